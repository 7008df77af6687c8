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

#include "lowfake/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lowfake/data/weights.hpp"
#include "lowfake/error.hpp"
#include "lowfake/models.hpp"
#include "lowfake/nn/forward.hpp"
#include "lowfake/nn/tape.hpp"
#include "lowfake/random.hpp"

namespace lowfake::trainer {

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::adam ? "adam" : "sgd"; }

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "sgd") return OptimizerKind::sgd;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected adam or sgd)");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(lr_floor > 0.0)) throw ConfigError("lr_floor must be positive");
  if (!(lr_start >= lr_floor)) throw ConfigError("lr_start must be >= lr_floor");
  if (!(lr_factor > 1.0)) throw ConfigError("lr_factor must exceed 1");
  if (lr_step < 1) throw ConfigError("lr_step must be at least 1");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction must lie in (0, 1)");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (!(bn_momentum >= 0.0 && bn_momentum < 1.0)) throw ConfigError("bn_momentum must lie in [0, 1)");
  if (loss == nn::LossKind::cross_entropy && model != "depthnet") {
    throw ConfigError("Meso models have a sigmoid head; use loss bce or mse");
  }
}

// ---- config text ---------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double d = std::stod(v, &used);
  if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
  return d;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec == std::errc() && p == v.data() + v.size()) return out;
  // Integral values written in float notation, e.g. 1e3.
  const double d = to_double(v);
  if (d < 0 || d != std::floor(d) || d > 1.8e19) throw std::invalid_argument(v);
  return static_cast<std::uint64_t>(d);
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument(v);
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

struct Field {
  const char* key;
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define LF_SIZE(name)                                                                \
  Field{#name, [](TrainConfig& c, const std::string& v) { c.name = to_u64(v); }, \
        [](const TrainConfig& c) { return std::to_string(c.name); }}
#define LF_REAL(name)                                                                   \
  Field{#name, [](TrainConfig& c, const std::string& v) { c.name = to_double(v); }, \
        [](const TrainConfig& c) { return fmt(c.name); }}
#define LF_AUG(name)                                                                                     \
  Field{"augment_" #name, [](TrainConfig& c, const std::string& v) { c.augmentation.name = to_double(v); }, \
        [](const TrainConfig& c) { return fmt(c.augmentation.name); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      LF_SIZE(batch_size),
      LF_REAL(lr_start),
      LF_REAL(lr_floor),
      LF_SIZE(lr_step),
      LF_REAL(lr_factor),
      LF_SIZE(patience),
      LF_SIZE(max_epochs),
      LF_SIZE(seed),
      Field{"optimizer", [](TrainConfig& c, const std::string& v) { c.optimizer = parse_optimizer(v); },
            [](const TrainConfig& c) { return std::string(to_string(c.optimizer)); }},
      Field{"loss", [](TrainConfig& c, const std::string& v) { c.loss = nn::parse_loss(v); },
            [](const TrainConfig& c) { return std::string(nn::to_string(c.loss)); }},
      LF_REAL(momentum),
      LF_REAL(bn_momentum),
      Field{"augment", [](TrainConfig& c, const std::string& v) { c.augment = to_bool(v); },
            [](const TrainConfig& c) { return std::string(c.augment ? "true" : "false"); }},
      LF_AUG(flip_probability),
      LF_AUG(zoom_probability),
      LF_AUG(zoom_range),
      LF_AUG(rotation_probability),
      LF_AUG(rotation_degrees),
      LF_AUG(brightness_probability),
      LF_AUG(brightness_range),
      LF_AUG(contrast_probability),
      LF_AUG(contrast_range),
      LF_REAL(val_fraction),
      Field{"model",
            [](TrainConfig& c, const std::string& v) {
              c.model = std::string(models::to_string(models::parse_model_name(v)));
            },
            [](const TrainConfig& c) { return c.model; }},
      Field{"conv_activation", [](TrainConfig& c, const std::string& v) { c.conv_activation = parse_activation(v); },
            [](const TrainConfig& c) { return std::string(to_string(c.conv_activation)); }},
      Field{"dense_activation", [](TrainConfig& c, const std::string& v) { c.dense_activation = parse_activation(v); },
            [](const TrainConfig& c) { return std::string(to_string(c.dense_activation)); }},
      LF_SIZE(input_size),
      LF_SIZE(repetitions),
      Field{"cache_images", [](TrainConfig& c, const std::string& v) { c.cache_images = to_bool(v); },
            [](const TrainConfig& c) { return std::string(c.cache_images ? "true" : "false"); }},
  };
  return f;
}

#undef LF_SIZE
#undef LF_REAL
#undef LF_AUG

}  // namespace

TrainConfig parse_config(std::string_view text, TrainConfig cfg) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    const auto& f = fields();
    const auto it = std::find_if(f.begin(), f.end(), [&](const Field& x) { return key == x.key; });
    if (it == f.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    try {
      it->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    } catch (const std::exception&) {
      throw ConfigError(where + ": bad value '" + value + "' for " + key);
    }
  }
  cfg.validate();
  return cfg;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string to_config_text(const TrainConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  return out;
}

double lr_at(std::size_t step, const TrainConfig& cfg) {
  // One division by the exact power keeps 1e-3 / 10^3 == 1e-6; repeated
  // division drifts by an ulp and would slip past the floor.
  const double drops = static_cast<double>(step / cfg.lr_step);
  return std::max(cfg.lr_floor, cfg.lr_start / std::pow(cfg.lr_factor, drops));
}

nn::ModelGraph build_model(const TrainConfig& cfg) {
  const auto name = models::parse_model_name(cfg.model);
  if (name == models::ModelName::depthnet) throw ConfigError("the depth net is trained by `depthnet sweep`");
  if (cfg.input_size < 16 || cfg.input_size % 16 != 0) throw ConfigError("input_size must be a multiple of 16");
  const models::MesoGeometry geom{cfg.input_size, cfg.input_size >= 64 && cfg.input_size % 32 == 0 ? 4u : 2u};
  return name == models::ModelName::meso4
             ? models::build_meso4(cfg.conv_activation, cfg.dense_activation, geom)
             : models::build_mesoinception4(cfg.conv_activation, cfg.dense_activation, geom);
}

LoadedModel load_model_weights(const std::filesystem::path& path) {
  const auto archive = data::read_archive(path);
  auto meta = [&](const char* key) {
    const auto it = archive.metadata.find(key);
    if (it == archive.metadata.end()) throw FormatError(path.string() + ": metadata lacks '" + key + "'");
    return it->second;
  };
  TrainConfig cfg;
  try {
    cfg.model = meta("model");
    cfg.conv_activation = parse_activation(meta("conv_activation"));
    cfg.dense_activation = parse_activation(meta("dense_activation"));
    const std::string shape = meta("input_shape");
    cfg.input_size = to_u64(shape.substr(0, shape.find('x')));
    const std::string side = std::to_string(cfg.input_size);
    if (shape != side + "x" + side + "x3") throw FormatError("unsupported input shape " + shape);
    auto graph = build_model(cfg);
    auto params = data::from_archive(archive, graph);
    return {std::move(graph), std::move(params)};
  } catch (const FormatError&) {
    throw;
  } catch (const ShapeError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(path.string() + ": cannot rebuild the model (" + e.what() + ")");
  }
}

// ---- optimizers -----------------------------------------------------------------

namespace {

void check_grads(const nn::ParameterStore<float>& params, const nn::GradMap<float>& grads) {
  for (const auto& e : params.entries()) {
    if (!e.trainable) continue;
    const auto it = grads.find(e.name);
    if (it == grads.end()) throw ShapeError("no gradient for parameter " + e.name);
    if (it->second.shape() != e.value.shape()) throw ShapeError("gradient shape mismatch for " + e.name);
    if (!it->second.all_finite()) throw NumericError("non-finite gradient for " + e.name);
  }
}

}  // namespace

void Adam::step(nn::ParameterStore<float>& params, const nn::GradMap<float>& grads, double lr) {
  check_grads(params, grads);
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const auto b1 = static_cast<float>(beta1_);
  const auto b2 = static_cast<float>(beta2_);
  const auto a1 = static_cast<float>(1.0 - beta1_);
  const auto a2 = static_cast<float>(1.0 - beta2_);
  for (auto& e : params.entries()) {
    if (!e.trainable) continue;
    const auto& g = grads.find(e.name)->second;
    auto& m = m_[e.name];
    auto& v = v_[e.name];
    if (m.empty()) {
      m.assign(g.size(), 0.0f);
      v.assign(g.size(), 0.0f);
    }
    float* w = e.value.raw();
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = b1 * m[i] + a1 * g[i];
      v[i] = b2 * v[i] + a2 * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      w[i] -= static_cast<float>(lr * mhat / (std::sqrt(vhat) + epsilon_));
    }
  }
}

void Sgd::step(nn::ParameterStore<float>& params, const nn::GradMap<float>& grads, double lr) {
  check_grads(params, grads);
  ++t_;
  for (auto& e : params.entries()) {
    if (!e.trainable) continue;
    const auto& g = grads.find(e.name)->second;
    float* w = e.value.raw();
    if (momentum_ == 0.0) {
      for (std::size_t i = 0; i < g.size(); ++i) w[i] -= static_cast<float>(lr * g[i]);
      continue;
    }
    auto& vel = velocity_[e.name];
    if (vel.empty()) vel.assign(g.size(), 0.0f);
    for (std::size_t i = 0; i < g.size(); ++i) {
      vel[i] = static_cast<float>(momentum_ * vel[i] - lr * g[i]);
      w[i] += vel[i];
    }
  }
}

std::unique_ptr<Optimizer> make_optimizer(const TrainConfig& cfg) {
  if (cfg.optimizer == OptimizerKind::adam) return std::make_unique<Adam>();
  return std::make_unique<Sgd>(cfg.momentum);
}

bool EarlyStopping::update(double val_acc) {
  ++epoch_;
  if (val_acc > best_) {
    best_ = val_acc;
    best_epoch_ = epoch_;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

// ---- training loop -----------------------------------------------------------------

nn::Tensor<float> predict_dataset(const nn::ModelGraph& graph, const nn::ParameterStore<float>& params,
                                  const data::Dataset& dataset, std::size_t batch_size) {
  if (dataset.size() == 0) throw ConfigError("cannot predict an empty dataset");
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  const std::size_t units = nn::shape_size(graph.output_shape);
  nn::Tensor<float> out({dataset.size(), units}, 0.0f);
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < dataset.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, dataset.size() - start);
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), start);
    const auto y = nn::predict(graph, params, data::gather(dataset, idx));
    std::copy(y.begin(), y.end(), out.raw() + start * units);
  }
  return out;
}

double dataset_accuracy(const nn::ModelGraph& graph, const nn::ParameterStore<float>& params,
                        const data::Dataset& dataset, std::size_t batch_size) {
  const auto y = predict_dataset(graph, params, dataset, batch_size);
  std::vector<int> labels(dataset.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = dataset.label(i);
  return nn::accuracy(y, labels);
}

TrainResult train(const nn::ModelGraph& graph, const data::Dataset& train_set, const data::Dataset& val_set,
                  const TrainConfig& cfg, const std::function<void(const EpochStats&)>& on_epoch,
                  std::optional<nn::ParameterStore<float>> initial) {
  cfg.validate();
  if (train_set.size() == 0 || val_set.size() == 0) {
    throw ConfigError("training and validation sets must be non-empty");
  }
  if (train_set.sample_shape() != graph.input_shape || val_set.sample_shape() != graph.input_shape) {
    throw ShapeError("dataset samples " + nn::shape_str(train_set.sample_shape()) + " do not fit graph input " +
                     nn::shape_str(graph.input_shape));
  }

  nn::ParameterStore<float> params =
      initial ? std::move(*initial) : nn::ParameterStore<float>::initialize(graph, derive_seed(cfg.seed, 0));
  params.check_against(graph);

  TrainResult result;
  result.params = params;

  auto optimizer = make_optimizer(cfg);
  Rng order_rng(derive_seed(cfg.seed, 1));
  Rng dropout_rng(derive_seed(cfg.seed, 2));
  Rng augment_rng(derive_seed(cfg.seed, 3));
  EarlyStopping stopper(cfg.patience);
  const bool augment = cfg.augment && graph.input_shape.size() == 3 && graph.input_shape[2] == 3;
  const std::size_t stride = nn::shape_size(graph.input_shape);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), order_rng);
    double loss_sum = 0.0;
    double correct = 0.0;
    double lr = lr_at(step, cfg);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - start);
      const std::span<const std::size_t> idx(order.data() + start, n);
      auto x = data::gather(train_set, idx);
      const auto labels = data::gather_labels(train_set, idx);
      if (augment) {
        for (std::size_t i = 0; i < n; ++i) {
          float* sample = x.raw() + i * stride;
          const data::Image img(graph.input_shape, std::vector<float>(sample, sample + stride));
          const auto out = data::augment(img, cfg.augmentation, augment_rng);
          std::copy(out.begin(), out.end(), sample);
        }
      }
      lr = lr_at(step, cfg);
      try {
        auto fwd = nn::forward(graph, params, x, nn::Mode::train, dropout_rng, cfg.bn_momentum);
        const auto loss = nn::compute_loss(cfg.loss, fwd.output, labels);
        const auto grads = nn::backward(fwd.tape, loss.grad);
        optimizer->step(params, grads, lr);
        loss_sum += loss.value * static_cast<double>(n);
        correct += nn::accuracy(fwd.output, labels) * static_cast<double>(n);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", step " +
                           std::to_string(step) + ", lr " + fmt(lr) + ")");
      }
      ++step;
    }

    EpochStats s;
    s.epoch = epoch;
    s.train_loss = loss_sum / static_cast<double>(order.size());
    s.train_acc = correct / static_cast<double>(order.size());
    s.val_acc = dataset_accuracy(graph, params, val_set, cfg.batch_size);
    s.lr = lr;
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(s);
    if (stopper.update(s.val_acc)) result.params = params;
    if (on_epoch) on_epoch(s);
    // A perfect score cannot be strictly improved on, so waiting out the
    // patience window would only return the same weights later.
    if (stopper.should_stop() || stopper.best() >= 1.0) break;
  }
  result.best_epoch = stopper.best_epoch();
  result.best_val_acc = result.best_epoch ? stopper.best() : 0.0;
  result.steps = step;
  return result;
}

void write_history_csv(std::ostream& out, std::span<const EpochStats> history) {
  out << "epoch,train_loss,train_acc,val_acc,lr,seconds\n";
  for (const auto& s : history) {
    out << s.epoch << ',' << fmt(s.train_loss) << ',' << fmt(s.train_acc) << ',' << fmt(s.val_acc) << ','
        << fmt(s.lr) << ',' << fmt(s.seconds) << '\n';
  }
}

// ---- stage grids -----------------------------------------------------------------

std::string GridRun::combination() const {
  return std::string(to_string(conv)) + "+" + std::string(to_string(dense));
}

std::size_t default_repetitions(int stage) {
  switch (stage) {
    case 1:
    case 2:
      return 3;
    case 3:
      return 5;
    default:
      throw ConfigError("stage must be 1, 2 or 3");
  }
}

std::vector<GridRun> stage_schedule(int stage, const TrainConfig& cfg) {
  using A = ActivationKind;
  const std::size_t stage_reps = default_repetitions(stage);  // also validates the stage
  const std::size_t reps = cfg.repetitions ? cfg.repetitions : stage_reps;
  std::vector<GridRun> runs;
  auto add = [&](A c, A d, double lr) { runs.push_back({runs.size(), c, d, lr, reps}); };
  if (stage == 1) {
    for (A c : kGridActivations) {
      for (A d : kGridActivations) add(c, d, cfg.lr_start);
    }
  } else if (stage == 2) {
    const std::pair<A, A> pairs[] = {{A::relu, A::swish}, {A::pish, A::mish},  {A::mish, A::mish},
                                     {A::swish, A::mish}, {A::mish, A::swish}, {A::relu, A::leaky_relu}};
    for (const auto& [c, d] : pairs) {
      for (double lr : {1e-2, 1e-3, 1e-4}) add(c, d, lr);
    }
  } else {
    add(A::swish, A::mish, 1e-3);
    add(A::pish, A::mish, 1e-3);
    add(A::relu, A::leaky_relu, 1e-3);
    add(A::mish, A::mish, 1e-2);
    add(A::relu, A::swish, 1e-3);
  }
  return runs;
}

void write_schedule_csv(std::ostream& out, std::span<const GridRun> runs) {
  out << "run,combination,lr_start,repetitions\n";
  for (const auto& r : runs) {
    out << r.index << ',' << r.combination() << ',' << fmt(r.lr_start) << ',' << r.repetitions << '\n';
  }
}

void write_grid_row(std::ostream& out, const GridRow& row) {
  out << row.combination << ',' << fmt(row.lr_start) << ',' << row.seed << ',' << fmt(row.best_val_acc) << ','
      << row.epochs << ',';
  if (row.test_acc) out << fmt(*row.test_acc);
  out << '\n';
}

std::vector<GridRow> run_stage_grid(int stage, const TrainConfig& cfg, const data::Dataset& dataset,
                                    std::span<const data::SampleRecord> records, std::ostream* csv) {
  if (dataset.size() != records.size()) throw ConfigError("dataset and manifest sizes differ");
  const auto runs = stage_schedule(stage, cfg);
  if (csv) *csv << kGridCsvHeader << '\n' << std::flush;
  std::vector<GridRow> rows;
  for (const auto& run : runs) {
    for (std::size_t rep = 0; rep < run.repetitions; ++rep) {
      const std::uint64_t seed = derive_seed(cfg.seed, rep);
      std::vector<std::size_t> train_idx, val_idx, test_idx;
      if (stage == 3) {
        const auto outer = data::scene_split_indices(records, cfg.val_fraction, seed);
        test_idx = outer.val;
        std::vector<data::SampleRecord> rest;
        rest.reserve(outer.train.size());
        for (std::size_t i : outer.train) rest.push_back(records[i]);
        const auto inner = data::scene_split_indices(rest, cfg.val_fraction, derive_seed(seed, 1));
        for (std::size_t i : inner.train) train_idx.push_back(outer.train[i]);
        for (std::size_t i : inner.val) val_idx.push_back(outer.train[i]);
      } else {
        auto split = data::scene_split_indices(records, cfg.val_fraction, seed);
        train_idx = std::move(split.train);
        val_idx = std::move(split.val);
      }
      TrainConfig run_cfg = cfg;
      run_cfg.conv_activation = run.conv;
      run_cfg.dense_activation = run.dense;
      run_cfg.lr_start = run.lr_start;
      run_cfg.seed = seed;
      const auto graph = build_model(run_cfg);
      const data::SubsetDataset train_set(dataset, train_idx);
      const data::SubsetDataset val_set(dataset, val_idx);
      const auto result = train(graph, train_set, val_set, run_cfg);
      GridRow row{run.combination(), run.lr_start, seed, result.best_val_acc, result.history.size(), std::nullopt};
      if (stage == 3) {
        row.test_acc =
            dataset_accuracy(graph, result.params, data::SubsetDataset(dataset, test_idx), cfg.batch_size);
      }
      if (csv) {
        write_grid_row(*csv, row);
        csv->flush();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace lowfake::trainer
