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


#include "lowfake/bench.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "../nn/fast_activations.hpp"
#include "lowfake/error.hpp"
#include "lowfake/nn/forward.hpp"
#include "lowfake/random.hpp"

namespace lowfake::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::optional<double> reference_for(ActivationKind kind) {
  for (const auto& r : kReferenceOverheads) {
    if (r.kind == kind) return r.overhead_percent;
  }
  return std::nullopt;
}

}  // namespace

ActivationReport bench_activations(std::size_t elements, std::size_t repetitions, std::uint64_t seed) {
  if (elements < 1'000'000) throw ConfigError("bench activations needs at least 1e6 elements");
  if (repetitions < 5) throw ConfigError("bench activations needs at least 5 repetitions");
  std::vector<float> x(elements), y(elements), dy(elements);
  Rng rng(seed);
  for (float& v : x) v = static_cast<float>(normal(rng, 0.0, 2.0));

  ActivationReport report{elements, repetitions, {}};
  const auto n = static_cast<double>(elements);
  for (ActivationKind kind : kStudyActivations) {
    nn::detail::activate_f32(kind, x.data(), y.data(), elements);  // warm-up
    std::vector<double> fwd, bwd;
    for (std::size_t r = 0; r < repetitions; ++r) {
      auto t = Clock::now();
      nn::detail::activate_f32(kind, x.data(), y.data(), elements);
      fwd.push_back(seconds_since(t) * 1e9 / n);
      t = Clock::now();
      nn::detail::activate_with_grad_f32(kind, x.data(), y.data(), dy.data(), elements);
      bwd.push_back(seconds_since(t) * 1e9 / n);
    }
    report.rows.push_back({kind, median(fwd), median(bwd), 0.0});
  }
  const double base = report.rows.front().forward_ns;
  for (auto& row : report.rows) row.overhead_percent = 100.0 * (row.forward_ns / base - 1.0);
  return report;
}

void write_csv(std::ostream& out, const ActivationReport& report) {
  out << "activation,forward_ns,backward_ns,overhead_percent,reference_percent\n";
  for (const auto& r : report.rows) {
    out << to_string(r.kind) << ',' << r.forward_ns << ',' << r.backward_ns << ',' << r.overhead_percent << ',';
    if (const auto ref = reference_for(r.kind)) out << *ref;
    out << '\n';
  }
}

InferenceReport bench_inference(const nn::ModelGraph& graph, const nn::ParameterStore<float>& params,
                                std::size_t batch, std::size_t repetitions, std::uint64_t seed) {
  if (batch == 0 || repetitions == 0) throw ConfigError("bench inference needs a positive batch and repetitions");
  nn::Shape shape{batch};
  shape.insert(shape.end(), graph.input_shape.begin(), graph.input_shape.end());
  nn::Tensor<float> x(shape, 0.0f);
  Rng rng(seed);
  for (float& v : x) v = static_cast<float>(uniform(rng, 0.0, 1.0));
  nn::predict(graph, params, x);  // warm-up
  std::vector<double> per_image;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto t = Clock::now();
    nn::predict(graph, params, x);
    per_image.push_back(seconds_since(t) / static_cast<double>(batch));
  }
  return {batch, repetitions, median(per_image)};
}

void write_csv(std::ostream& out, const InferenceReport& report) {
  out << "batch,repetitions,seconds_per_image,reference_seconds\n";
  out << report.batch << ',' << report.repetitions << ',' << report.seconds_per_image << ','
      << kReferenceMesoSeconds << '\n';
}

double LfdReport::keypoint_share() const {
  const double total = keypoint_seconds + classification_seconds;
  return total > 0.0 ? keypoint_seconds / total : 0.0;
}

LfdReport bench_lfd(const std::vector<data::Image>& images, const std::optional<svm::LinearModel>& model,
                    const lfd::FastOptions& options) {
  if (images.empty()) throw ConfigError("bench lfd needs at least one image");
  const svm::LinearModel clf = model.value_or(svm::LinearModel{std::vector<double>(lfd::kFeatureSize, 0.0), 0.0});
  LfdReport report;
  report.images = images.size();
  double kp_total = 0.0, clf_total = 0.0;
  for (const auto& img : images) {
    auto t = Clock::now();
    const auto kps = lfd::face_keypoints(img, std::nullopt, options);
    kp_total += seconds_since(t);
    t = Clock::now();
    const auto f = lfd::featurize(kps);
    svm::score(clf, f);
    clf_total += seconds_since(t);
    report.keypoints += kps.size();
  }
  const auto n = static_cast<double>(images.size());
  report.keypoint_seconds = kp_total / n;
  report.classification_seconds = clf_total / n;
  return report;
}

void write_csv(std::ostream& out, const LfdReport& report) {
  out << "images,keypoints_per_image,keypoint_seconds,classification_seconds,keypoint_share,reference_share\n";
  out << report.images << ',' << static_cast<double>(report.keypoints) / static_cast<double>(report.images) << ','
      << report.keypoint_seconds << ',' << report.classification_seconds << ',' << report.keypoint_share() << ','
      << kReferenceKeypointShare << '\n';
}

}  // namespace lowfake::bench
