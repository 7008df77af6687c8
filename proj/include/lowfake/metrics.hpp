/*
 * Copyright 2026 The lowfake Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lowfake::metrics {

/// Manipulated (fake) samples are the positive class.
struct ScoredSample {
  double score = 0.0;
  bool positive = false;
};

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  double accuracy() const;
  /// TP / (TP + FN); 0 when there are no positives.
  double recall() const;
  double fpr() const;
  double fnr() const;
};

/// A sample is predicted positive iff score >= threshold.
Confusion confusion(std::span<const ScoredSample> samples, double threshold);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
};

/// Operating points at every distinct score (ascending) plus one sentinel
/// just above the largest score, where everything is predicted negative.
std::vector<RocPoint> roc_curve(std::span<const ScoredSample> samples);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/// Walks roc_curve() to the first pair of adjacent points where FPR - FNR
/// changes sign and interpolates linearly (in threshold) to the crossing.
/// Throws ConfigError unless both classes are present, NumericError on a
/// non-finite score.
EerResult eer(std::span<const ScoredSample> samples);

struct Report {
  Confusion counts;
  double threshold = 0.0;
  EerResult equal_error;
};

Report evaluate(std::span<const ScoredSample> samples, double threshold);

/// {"accuracy":..,"recall":..,"eer":..,"threshold":..,"counts":{"tp":..,...}}
std::string to_json(const Report& report);

/// `threshold,fpr,fnr,tpr` rows for external plotting.
std::string roc_csv(std::span<const RocPoint> points);

}  // namespace lowfake::metrics
