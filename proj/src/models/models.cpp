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

#include "lowfake/models.hpp"

#include <string>

namespace lowfake::models {

namespace {

void meso_tail(nn::GraphBuilder& b, ActivationKind conv_act, ActivationKind dense_act, std::size_t last_pool) {
  b.conv2d("conv3", 16, 5).activation(conv_act).batchnorm("bn3").maxpool(2);
  b.conv2d("conv4", 16, 5).activation(conv_act).batchnorm("bn4").maxpool(last_pool);
  b.flatten().dropout(0.5).dense("dense1", 16).activation(dense_act).dropout(0.5);
  b.dense("dense2", 1).sigmoid();
}

void inception(nn::GraphBuilder& b, const std::string& name, const InceptionWidths& w, ActivationKind act) {
  b.concat({
      [&](nn::GraphBuilder& s) { s.conv2d(name + "/b1", w.a, 1).activation(act); },
      [&](nn::GraphBuilder& s) {
        s.conv2d(name + "/b2_reduce", w.b, 1).activation(act).conv2d(name + "/b2", w.b, 3).activation(act);
      },
      [&](nn::GraphBuilder& s) {
        s.conv2d(name + "/b3_reduce", w.c, 1).activation(act).conv2d(name + "/b3", w.c, 3, 2).activation(act);
      },
      [&](nn::GraphBuilder& s) {
        s.conv2d(name + "/b4_reduce", w.d, 1).activation(act).conv2d(name + "/b4", w.d, 3, 3).activation(act);
      },
  });
}

std::size_t inception_count(std::size_t cin, const InceptionWidths& w) {
  auto conv = [](std::size_t k, std::size_t in, std::size_t out) { return k * k * in * out + out; };
  return conv(1, cin, w.a) + conv(1, cin, w.b) + conv(3, w.b, w.b) + conv(1, cin, w.c) +
         conv(3, w.c, w.c) + conv(1, cin, w.d) + conv(3, w.d, w.d) + 2 * w.channels();
}

}  // namespace

nn::ModelGraph build_meso4(ActivationKind conv_act, ActivationKind dense_act, MesoGeometry geometry) {
  nn::GraphBuilder b("meso4", {geometry.input_extent, geometry.input_extent, 3});
  b.conv2d("conv1", 8, 3).activation(conv_act).batchnorm("bn1").maxpool(2);
  b.conv2d("conv2", 8, 5).activation(conv_act).batchnorm("bn2").maxpool(2);
  meso_tail(b, conv_act, dense_act, geometry.last_pool);
  return b.build(conv_act, dense_act);
}

std::size_t mesoinception4_param_count(const MesoInceptionWidths& w) {
  const std::size_t c1 = w.first.channels();
  const std::size_t c2 = w.second.channels();
  const std::size_t flat = 8 * 8 * 16;
  return inception_count(3, w.first) + inception_count(c1, w.second) + (25 * c2 * 16 + 16) + 2 * 16 +
         (25 * 16 * 16 + 16) + 2 * 16 + (flat * 16 + 16) + (16 + 1);
}

MesoInceptionWidths reconcile_inception_widths(std::size_t target, std::size_t max_width) {
  if (mesoinception4_param_count(kInceptionCandidate) == target) return kInceptionCandidate;
  std::array<std::size_t, 8> v{};
  v.fill(1);
  while (true) {
    const MesoInceptionWidths w{{v[0], v[1], v[2], v[3]}, {v[4], v[5], v[6], v[7]}};
    if (mesoinception4_param_count(w) == target) return w;
    std::size_t i = v.size();
    while (i > 0 && v[i - 1] == max_width) v[--i] = 1;
    if (i == 0) break;
    ++v[i - 1];
  }
  throw ConfigError("no inception branch widths in 1.." + std::to_string(max_width) + " give " +
                    std::to_string(target) + " trainable parameters");
}

const MesoInceptionWidths& default_inception_widths() {
  static const MesoInceptionWidths widths = reconcile_inception_widths();
  return widths;
}

nn::ModelGraph build_mesoinception4(ActivationKind conv_act, ActivationKind dense_act, MesoGeometry geometry,
                                    std::optional<MesoInceptionWidths> widths) {
  const MesoInceptionWidths w = widths.value_or(default_inception_widths());
  nn::GraphBuilder b("mesoinception4", {geometry.input_extent, geometry.input_extent, 3});
  inception(b, "inception1", w.first, conv_act);
  b.batchnorm("bn1").maxpool(2);
  inception(b, "inception2", w.second, conv_act);
  b.batchnorm("bn2").maxpool(2);
  meso_tail(b, conv_act, dense_act, geometry.last_pool);
  return b.build(conv_act, dense_act);
}

nn::ModelGraph build_depth_net(std::size_t num_hidden, ActivationKind act, DepthNetOptions o) {
  if (num_hidden < 1 || num_hidden > kMaxDepthNetHidden) {
    throw ConfigError("depth net needs 1.." + std::to_string(kMaxDepthNetHidden) + " hidden layers, got " +
                      std::to_string(num_hidden));
  }
  nn::GraphBuilder b("depthnet", {o.input_extent, o.input_extent, 1});
  b.conv2d("conv1", o.conv1_filters, 3).activation(act);
  b.conv2d("conv2", o.conv2_filters, 3).activation(act);
  b.maxpool(2).dropout(o.dropout).flatten();
  for (std::size_t i = 1; i <= num_hidden; ++i) {
    const std::string n = std::to_string(i);
    b.dense("hidden" + n, o.hidden_units).batchnorm("hidden_bn" + n).activation(act).dropout(o.dropout);
  }
  b.dense("output", o.classes).softmax();
  return b.build(act, act);
}

ModelName parse_model_name(std::string_view name) {
  if (name == "meso4") return ModelName::meso4;
  if (name == "mesoinception4") return ModelName::mesoinception4;
  if (name == "depthnet") return ModelName::depthnet;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected meso4, mesoinception4 or depthnet)");
}

std::string_view to_string(ModelName name) {
  switch (name) {
    case ModelName::meso4:
      return "meso4";
    case ModelName::mesoinception4:
      return "mesoinception4";
    case ModelName::depthnet:
      return "depthnet";
  }
  return "unknown";
}

}  // namespace lowfake::models
