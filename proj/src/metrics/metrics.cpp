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
#include "lowfake/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "lowfake/error.hpp"

namespace lowfake::metrics {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void require_finite_scores(std::span<const ScoredSample> samples) {
  for (const auto& s : samples) {
    if (!std::isfinite(s.score)) throw NumericError("non-finite score");
  }
}

}  // namespace

double Confusion::accuracy() const { return ratio(tp + tn, total()); }
double Confusion::recall() const { return ratio(tp, tp + fn); }
double Confusion::fpr() const { return ratio(fp, fp + tn); }
double Confusion::fnr() const { return ratio(fn, tp + fn); }

Confusion confusion(std::span<const ScoredSample> samples, double threshold) {
  Confusion c;
  for (const auto& s : samples) {
    const bool predicted = s.score >= threshold;
    if (s.positive) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  return c;
}

std::vector<RocPoint> roc_curve(std::span<const ScoredSample> samples) {
  require_finite_scores(samples);
  std::vector<ScoredSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
  std::size_t pos = 0, neg = 0;
  for (const auto& s : sorted) (s.positive ? pos : neg)++;

  // Below the current threshold: positives are false negatives, negatives are true negatives.
  std::vector<RocPoint> out;
  std::size_t fn = 0, tn = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double t = sorted[i].score;
    out.push_back({t, ratio(neg - tn, neg), ratio(fn, pos)});
    for (; i < sorted.size() && sorted[i].score == t; ++i) (sorted[i].positive ? fn : tn)++;
  }
  const double top = sorted.empty() ? 0.0 : sorted.back().score;
  out.push_back({std::nextafter(top, std::numeric_limits<double>::infinity()), 0.0, ratio(pos, pos)});
  return out;
}

EerResult eer(std::span<const ScoredSample> samples) {
  const bool any_pos = std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.positive; });
  const bool any_neg = std::any_of(samples.begin(), samples.end(), [](const auto& s) { return !s.positive; });
  if (!any_pos || !any_neg) throw ConfigError("EER needs at least one positive and one negative sample");
  const auto roc = roc_curve(samples);
  // FPR - FNR starts at 1 (everything positive) and ends at -1 (sentinel).
  for (std::size_t k = 0; k + 1 < roc.size(); ++k) {
    const double d0 = roc[k].fpr - roc[k].fnr;
    const double d1 = roc[k + 1].fpr - roc[k + 1].fnr;
    if (d0 == 0.0) return {roc[k].fpr, roc[k].threshold};
    if (d0 > 0.0 && d1 <= 0.0) {
      const double a = d0 / (d0 - d1);
      return {roc[k].fpr + a * (roc[k + 1].fpr - roc[k].fpr),
              roc[k].threshold + a * (roc[k + 1].threshold - roc[k].threshold)};
    }
  }
  return {roc.back().fpr, roc.back().threshold};  // unreachable: the sentinel has d = -1
}

Report evaluate(std::span<const ScoredSample> samples, double threshold) {
  return {confusion(samples, threshold), threshold, eer(samples)};
}

std::string to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.counts.accuracy();
  j["recall"] = r.counts.recall();
  j["eer"] = r.equal_error.eer;
  j["eer_threshold"] = r.equal_error.threshold;
  j["threshold"] = r.threshold;
  j["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}};
  return j.dump();
}

std::string roc_csv(std::span<const RocPoint> points) {
  std::ostringstream out;
  out.precision(17);
  out << "threshold,fpr,fnr,tpr\n";
  for (const auto& p : points) out << p.threshold << ',' << p.fpr << ',' << p.fnr << ',' << 1.0 - p.fnr << '\n';
  return out.str();
}

}  // namespace lowfake::metrics
