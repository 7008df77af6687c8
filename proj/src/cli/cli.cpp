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


#include "lowfake/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <map>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "lowfake/bench.hpp"
#include "lowfake/data/dataset.hpp"
#include "lowfake/data/manifest.hpp"
#include "lowfake/data/weights.hpp"
#include "lowfake/error.hpp"
#include "lowfake/lfd.hpp"
#include "lowfake/metrics.hpp"
#include "lowfake/models.hpp"
#include "lowfake/svm.hpp"
#include "lowfake/synthetic.hpp"
#include "lowfake/trainer.hpp"

namespace lowfake::cli {

std::optional<std::uint64_t> parse_seed(std::string_view text) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || p != text.data() + text.size()) return std::nullopt;
  return v;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("LOWFAKE_SEED");
  if (env == nullptr || *env == '\0') return 0;
  const auto seed = parse_seed(env);
  if (!seed) throw ConfigError("LOWFAKE_SEED must be an unsigned integer, got '" + std::string(env) + "'");
  return *seed;
}

namespace {

// Options shared by several subcommands; CLI11 writes straight into these.
struct Options {
  std::uint64_t seed = 0;
  std::string model = "meso4";
  std::string conv_act = "relu";
  std::string dense_act = "relu";
  std::size_t input_size = 256;
  bool print_params = false;
  std::string manifest, config, out, weights, history, roc, bbox, features, model_path, detector = "fast";
  double threshold = 0.5;
  std::size_t batch = 32;
  int stage = 1;
  bool dry_run = false;
  bool raw_counts = false;
  double fast_threshold = 20.0 / 255.0;
  int orientation_radius = 15;
  double lambda = 1e-4;
  std::size_t epochs = 100;
  double elements = 1e7;
  std::size_t repetitions = 7;
  std::size_t count = 0;
  std::size_t extent = 0;
  std::size_t min_depth = 2, max_depth = 8;
  std::vector<std::string> activations;
  std::size_t samples = 5000;
  double tolerance = models::kGradientTolerance;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw FormatError("cannot write " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::uint64_t seed_of(const CLI::App* app, const Options& o) {
  return app->count("--seed") ? o.seed : default_seed();
}

void add_seed(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed, "Random seed (default: $LOWFAKE_SEED, else 0)");
}

const std::vector<std::string> kActivationNames = {"relu", "leaky_relu", "swish", "mish", "pish", "elu"};

void add_model_options(CLI::App* app, Options& o) {
  app->add_option("--model", o.model, "meso4 or mesoinception4")
      ->check(CLI::IsMember({"meso4", "mesoinception4"}));
  app->add_option("--conv-act", o.conv_act, "Activation after every convolution")
      ->check(CLI::IsMember(kActivationNames));
  app->add_option("--dense-act", o.dense_act, "Activation after the hidden dense layer")
      ->check(CLI::IsMember(kActivationNames));
  app->add_option("--input-size", o.input_size, "Input side length in pixels (multiple of 16)");
}

trainer::TrainConfig model_config(const Options& o) {
  trainer::TrainConfig cfg;
  cfg.model = o.model;
  cfg.conv_activation = parse_activation(o.conv_act);
  cfg.dense_activation = parse_activation(o.dense_act);
  cfg.input_size = o.input_size;
  return cfg;
}

trainer::TrainConfig train_config(const CLI::App* app, const Options& o) {
  trainer::TrainConfig base;
  base.seed = default_seed();
  trainer::TrainConfig cfg = o.config.empty() ? base : trainer::load_config(o.config, base);
  if (app->count("--seed")) cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

data::ImageDataset image_dataset(std::vector<data::SampleRecord> records, std::size_t side, bool cache) {
  return data::ImageDataset(std::move(records), side, side, data::ColorMode::color, cache);
}

// ---- commands ------------------------------------------------------------------

int cmd_gradcheck(const CLI::App* app, const Options& o, std::ostream& out) {
  bool ok = true;
  out << "case,max_rel_error,checked,status\n";
  for (const auto& c : models::gradient_suite(seed_of(app, o))) {
    const bool pass = c.result.max_error < o.tolerance && c.result.checked > 0;
    ok = ok && pass;
    out << c.name << ',' << c.result.max_error << ',' << c.result.checked << ',' << (pass ? "PASS" : "FAIL") << '\n';
  }
  return ok ? 0 : 1;
}

int cmd_meso_build(const CLI::App* app, const Options& o, std::ostream& out) {
  const auto graph = trainer::build_model(model_config(o));
  const std::size_t params = nn::count_params(graph);
  if (o.print_params) {
    out << params << '\n';
  } else {
    out << "model: " << graph.name << "\ninput: " << nn::shape_str(graph.input_shape)
        << "\nconv_activation: " << to_string(graph.conv_activation)
        << "\ndense_activation: " << to_string(graph.dense_activation) << "\ntrainable_params: " << params
        << '\n';
  }
  if (!o.out.empty()) {
    data::save_weights(o.out, graph, nn::ParameterStore<float>::initialize(graph, seed_of(app, o)));
  }
  return 0;
}

int cmd_meso_train(const CLI::App* app, const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = train_config(app, o);
  const auto records = data::load_manifest(o.manifest);
  const auto split = data::scene_split_indices(records, cfg.val_fraction, cfg.seed);
  const auto all = image_dataset(records, cfg.input_size, cfg.cache_images);
  const data::SubsetDataset train_set(all, split.train), val_set(all, split.val);
  err << "training on " << train_set.size() << " images, validating on " << val_set.size() << '\n';

  const auto graph = trainer::build_model(cfg);
  out << "epoch,train_loss,train_acc,val_acc,lr,seconds\n" << std::flush;
  const auto result = trainer::train(graph, train_set, val_set, cfg, [&](const trainer::EpochStats& s) {
    out << s.epoch << ',' << s.train_loss << ',' << s.train_acc << ',' << s.val_acc << ',' << s.lr << ','
        << s.seconds << '\n'
        << std::flush;
  });
  data::save_weights(o.out, graph, result.params);
  if (!o.history.empty()) {
    std::ofstream h(o.history);
    if (!h) throw FormatError("cannot write " + o.history);
    trainer::write_history_csv(h, result.history);
  }
  err << "best epoch " << result.best_epoch << " (val_acc " << result.best_val_acc << "); weights written to "
      << o.out << '\n';
  return 0;
}

int cmd_meso_eval(const Options& o, std::ostream& out) {
  const auto model = trainer::load_model_weights(o.weights);
  const auto records = data::load_manifest(o.manifest);
  const auto ds = image_dataset(records, model.graph.input_shape[0], false);
  const auto probs = trainer::predict_dataset(model.graph, model.params, ds, o.batch);
  std::vector<metrics::ScoredSample> samples;
  for (std::size_t i = 0; i < records.size(); ++i) {
    samples.push_back({static_cast<double>(probs[i]), records[i].label == data::Label::fake});
  }
  out << metrics::to_json(metrics::evaluate(samples, o.threshold)) << '\n';
  if (!o.roc.empty()) {
    std::ofstream r(o.roc);
    if (!r) throw FormatError("cannot write " + o.roc);
    r << metrics::roc_csv(metrics::roc_curve(samples));
  }
  return 0;
}

int cmd_meso_grid(const CLI::App* app, const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = train_config(app, o);
  const auto runs = trainer::stage_schedule(o.stage, cfg);
  std::size_t trainings = 0;
  for (const auto& r : runs) trainings += r.repetitions;
  err << "stage " << o.stage << ": " << runs.size() << " runs, " << trainings << " trainings\n";
  if (o.dry_run) {
    trainer::write_schedule_csv(out, runs);
    return 0;
  }
  if (o.manifest.empty()) throw ConfigError("meso grid needs --manifest unless --dry-run is given");
  const auto records = data::load_manifest(o.manifest);
  const auto ds = image_dataset(records, cfg.input_size, cfg.cache_images);
  Output csv(o.out, out);
  trainer::run_stage_grid(o.stage, cfg, ds, records, &*csv);
  return 0;
}

int cmd_lfd_extract(const Options& o, std::ostream& err) {
  const auto records = data::load_manifest(o.manifest);
  const auto detector = lfd::parse_detector(o.detector);
  std::map<std::string, lfd::BBox> boxes;
  if (!o.bbox.empty()) {
    for (const auto& [path, box] : lfd::load_bbox_csv(o.bbox)) {
      boxes.emplace(std::filesystem::path(path).lexically_normal().string(), box);
    }
  }
  const lfd::FastOptions fast{o.fast_threshold, o.orientation_radius};
  std::vector<lfd::FeatureRow> rows;
  std::size_t total = 0;
  for (const auto& r : records) {
    std::optional<lfd::BBox> box;
    if (!boxes.empty()) {
      const auto it = boxes.find(std::filesystem::path(r.path).lexically_normal().string());
      if (it == boxes.end()) throw ConfigError("no bounding box for " + r.path);
      box = it->second;
    }
    std::vector<std::string> warnings;
    const auto kps = lfd::image_keypoints(r.path, detector, box, fast, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    total += kps.size();
    rows.push_back({r.label == data::Label::fake ? 1 : 0, lfd::featurize(kps, !o.raw_counts)});
  }
  lfd::write_feature_csv(o.out, rows);
  err << rows.size() << " images, " << total << " keypoints\n";
  return 0;
}

int cmd_lfd_train(const CLI::App* app, const Options& o, std::ostream& err) {
  const auto rows = lfd::load_feature_csv(o.features);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (const auto& r : rows) {
    x.emplace_back(r.features.begin(), r.features.end());
    y.push_back(r.label == 1 ? 1 : -1);
  }
  svm::TrainOptions opts;
  opts.lambda = o.lambda;
  opts.epochs = o.epochs;
  opts.seed = seed_of(app, o);
  const auto model = svm::train(x, y, opts);
  svm::save_model(o.out, model);
  err << "trained on " << rows.size() << " samples; objective " << svm::objective(model, x, y) << '\n';
  return 0;
}

int cmd_lfd_eval(const Options& o, std::ostream& out) {
  const auto model = svm::load_model(o.model_path);
  const auto rows = lfd::load_feature_csv(o.features);
  std::vector<metrics::ScoredSample> samples;
  for (const auto& r : rows) samples.push_back({svm::score(model, r.features), r.label == 1});
  out << metrics::to_json(metrics::evaluate(samples, 0.0)) << '\n';
  if (!o.roc.empty()) {
    std::ofstream roc(o.roc);
    if (!roc) throw FormatError("cannot write " + o.roc);
    roc << metrics::roc_csv(metrics::roc_curve(samples));
  }
  return 0;
}

int cmd_bench_activations(const CLI::App* app, const Options& o, std::ostream& out) {
  if (!(o.elements >= 1e6 && o.elements <= 1e9)) throw ConfigError("--n must lie in [1e6, 1e9]");
  const auto report = bench::bench_activations(static_cast<std::size_t>(o.elements), o.repetitions, seed_of(app, o));
  bench::write_csv(out, report);
  return 0;
}

int cmd_bench_inference(const CLI::App* app, const Options& o, std::ostream& out) {
  trainer::LoadedModel model;
  if (!o.weights.empty()) {
    model = trainer::load_model_weights(o.weights);
  } else {
    model.graph = trainer::build_model(model_config(o));
    model.params = nn::ParameterStore<float>::initialize(model.graph, seed_of(app, o));
  }
  bench::write_csv(out, bench::bench_inference(model.graph, model.params, o.batch, o.repetitions, seed_of(app, o)));
  return 0;
}

int cmd_bench_lfd(const CLI::App* app, const Options& o, std::ostream& out) {
  std::vector<data::Image> images;
  if (!o.manifest.empty()) {
    for (const auto& r : data::load_manifest(o.manifest)) images.push_back(data::decode_image(r.path));
  } else {
    synthetic::ForgerySetOptions f;
    f.count = o.count ? o.count : 50;
    f.seed = seed_of(app, o);
    images = synthetic::forgery_set(f).images;
  }
  std::optional<svm::LinearModel> model;
  if (!o.model_path.empty()) model = svm::load_model(o.model_path);
  bench::write_csv(out, bench::bench_lfd(images, model, {o.fast_threshold, o.orientation_radius}));
  return 0;
}

int cmd_depthnet_sweep(const CLI::App* app, const Options& o, std::ostream& out, std::ostream& err) {
  trainer::DepthSweepOptions opts;
  opts.min_depth = o.min_depth;
  opts.max_depth = o.max_depth;
  if (!o.activations.empty()) {
    opts.activations.clear();
    for (const auto& a : o.activations) opts.activations.push_back(parse_activation(a));
  }
  if (app->count("--epochs")) opts.epochs = o.epochs;
  if (app->count("--batch")) opts.batch_size = o.batch;
  opts.seed = seed_of(app, o);
  const auto data = synthetic::pattern_set(o.samples, opts.seed);
  const auto cells = trainer::depth_sweep(data, opts, [&](const trainer::DepthSweepCell& c) {
    err << "depth " << c.depth << ' ' << to_string(c.activation) << ": test_acc " << c.test_acc << " (val "
        << c.best_val_acc << ", " << c.epochs << " epochs)\n"
        << std::flush;
  });
  Output csv(o.out, out);
  trainer::write_depth_sweep_csv(*csv, cells, opts.activations);
  return 0;
}

int cmd_synth(const CLI::App* app, const Options& o, bool gradients, std::ostream& err) {
  synthetic::ImageSet set;
  if (gradients) {
    synthetic::GradientSetOptions g;
    if (o.count) g.count = o.count;
    if (o.extent) g.extent = o.extent;
    g.seed = seed_of(app, o);
    set = synthetic::gradient_set(g);
  } else {
    synthetic::ForgerySetOptions f;
    if (o.count) f.count = o.count;
    if (o.extent) f.extent = o.extent;
    f.seed = seed_of(app, o);
    set = synthetic::forgery_set(f);
  }
  const auto manifest = synthetic::write_image_set(set, o.out);
  err << set.images.size() << " images; manifest " << manifest.string() << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"lowfake: low-resource deepfake detection toolkit", "lowfake"};
  app.require_subcommand(1);
  Options o;

  auto* gradcheck = app.add_subcommand("gradcheck", "Whole-network gradient checks (exit 0 iff all pass)");
  add_seed(gradcheck, o);
  gradcheck->add_option("--tolerance", o.tolerance, "Maximum relative error");

  auto* meso = app.add_subcommand("meso", "Meso-4 / MesoInception-4 models");
  meso->require_subcommand(1);
  auto* build = meso->add_subcommand("build", "Build a model; print its summary or parameter count");
  add_model_options(build, o);
  build->add_flag("--print-params", o.print_params, "Print only the trainable-parameter count");
  build->add_option("--out", o.out, "Write freshly initialized weights here");
  add_seed(build, o);

  auto* train = meso->add_subcommand("train", "Train on a manifest with a scene-disjoint validation split");
  train->add_option("--manifest", o.manifest, "CSV manifest (path,label,scene_id)")->required();
  train->add_option("--config", o.config, "Training config file (key = value)");
  train->add_option("--out", o.out, "Weight file to write")->required();
  train->add_option("--history", o.history, "Per-epoch history CSV");
  add_seed(train, o);

  auto* eval = meso->add_subcommand("eval", "Evaluate weights on a manifest");
  eval->add_option("--weights", o.weights, "Weight file")->required();
  eval->add_option("--manifest", o.manifest, "CSV manifest")->required();
  eval->add_option("--threshold", o.threshold, "Decision threshold on the fake probability");
  eval->add_option("--batch", o.batch, "Inference batch size");
  eval->add_option("--roc", o.roc, "Write ROC points as CSV");

  auto* grid = meso->add_subcommand("grid", "Run an activation grid stage");
  grid->add_option("--stage", o.stage, "Stage 1, 2 or 3")->required()->check(CLI::Range(1, 3));
  grid->add_option("--config", o.config, "Training config file");
  grid->add_flag("--dry-run", o.dry_run, "Print the schedule without training");
  grid->add_option("--manifest", o.manifest, "CSV manifest");
  grid->add_option("--out", o.out, "Results CSV (default: stdout)");
  add_seed(grid, o);

  auto* lfd_cmd = app.add_subcommand("lfd", "Local feature descriptor pipeline");
  lfd_cmd->require_subcommand(1);
  auto* extract = lfd_cmd->add_subcommand("extract", "Extract 128-dim keypoint features");
  extract->add_option("--manifest", o.manifest, "CSV manifest")->required();
  extract->add_option("--detector", o.detector, "fast or sidecar")->check(CLI::IsMember({"fast", "sidecar"}));
  extract->add_option("--out", o.out, "Feature CSV to write")->required();
  extract->add_flag("--raw-counts", o.raw_counts, "Skip L2 normalization");
  extract->add_option("--bbox", o.bbox, "Face boxes CSV (path,left,top,width,height)");
  extract->add_option("--fast-threshold", o.fast_threshold, "FAST threshold on [0,1] intensities");
  extract->add_option("--orientation-radius", o.orientation_radius, "Centroid patch radius");

  auto* lfd_train = lfd_cmd->add_subcommand("train", "Train the linear SVM");
  lfd_train->add_option("--features", o.features, "Feature CSV")->required();
  lfd_train->add_option("--out", o.out, "Model file to write")->required();
  lfd_train->add_option("--lambda", o.lambda, "Regularization strength");
  lfd_train->add_option("--epochs", o.epochs, "Passes over the data");
  add_seed(lfd_train, o);

  auto* lfd_eval = lfd_cmd->add_subcommand("eval", "Score features; print accuracy/recall/EER JSON");
  lfd_eval->add_option("--model", o.model_path, "Model file")->required();
  lfd_eval->add_option("--features", o.features, "Feature CSV")->required();
  lfd_eval->add_option("--roc", o.roc, "Write ROC points as CSV");

  auto* bench_cmd = app.add_subcommand("bench", "Timing reports (CSV)");
  bench_cmd->require_subcommand(1);
  auto* bench_act = bench_cmd->add_subcommand("activations", "Per-element activation cost");
  bench_act->add_option("--n", o.elements, "Elements per repetition (>= 1e6)");
  bench_act->add_option("--reps", o.repetitions, "Repetitions (>= 5)");
  add_seed(bench_act, o);
  auto* bench_inf = bench_cmd->add_subcommand("inference", "Model inference time per image");
  bench_inf->add_option("--weights", o.weights, "Weight file (default: a fresh model)");
  add_model_options(bench_inf, o);
  bench_inf->add_option("--batch", o.batch, "Images per forward pass");
  bench_inf->add_option("--reps", o.repetitions, "Repetitions");
  add_seed(bench_inf, o);
  auto* bench_lfd = bench_cmd->add_subcommand("lfd", "LFD time per image, keypoints vs classification");
  bench_lfd->add_option("--manifest", o.manifest, "CSV manifest (default: synthetic textures)");
  bench_lfd->add_option("--model", o.model_path, "SVM model file");
  bench_lfd->add_option("--count", o.count, "Synthetic images when no manifest is given");
  add_seed(bench_lfd, o);

  auto* depthnet = app.add_subcommand("depthnet", "Depth experiments");
  depthnet->require_subcommand(1);
  auto* sweep = depthnet->add_subcommand("sweep", "Accuracy versus hidden-layer count on a synthetic 10-class set");
  sweep->add_option("--min", o.min_depth, "Smallest depth");
  sweep->add_option("--max", o.max_depth, "Largest depth");
  sweep->add_option("--act", o.activations, "Activation (repeatable; default relu swish mish pish)")
      ->check(CLI::IsMember(kActivationNames));
  sweep->add_option("--samples", o.samples, "Synthetic samples");
  sweep->add_option("--epochs", o.epochs, "Epochs per cell");
  sweep->add_option("--batch", o.batch, "Batch size");
  sweep->add_option("--out", o.out, "CSV path (default: stdout)");
  add_seed(sweep, o);

  auto* synth = app.add_subcommand("synth", "Write synthetic image sets with a manifest");
  synth->require_subcommand(1);
  auto* synth_grad = synth->add_subcommand("gradients", "Horizontal (pristine) vs vertical (fake) gradients");
  auto* synth_forgery = synth->add_subcommand("forgery", "Textures with and without a rotated patch");
  for (auto* s : {synth_grad, synth_forgery}) {
    s->add_option("--out", o.out, "Output directory")->required();
    s->add_option("--count", o.count, "Number of images");
    s->add_option("--extent", o.extent, "Image side length");
    add_seed(s, o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    if (*gradcheck) return cmd_gradcheck(gradcheck, o, out);
    if (*build) return cmd_meso_build(build, o, out);
    if (*train) return cmd_meso_train(train, o, out, err);
    if (*eval) return cmd_meso_eval(o, out);
    if (*grid) return cmd_meso_grid(grid, o, out, err);
    if (*extract) return cmd_lfd_extract(o, err);
    if (*lfd_train) return cmd_lfd_train(lfd_train, o, err);
    if (*lfd_eval) return cmd_lfd_eval(o, out);
    if (*bench_act) return cmd_bench_activations(bench_act, o, out);
    if (*bench_inf) return cmd_bench_inference(bench_inf, o, out);
    if (*bench_lfd) return cmd_bench_lfd(bench_lfd, o, out);
    if (*sweep) return cmd_depthnet_sweep(sweep, o, out, err);
    if (*synth_grad) return cmd_synth(synth_grad, o, true, err);
    if (*synth_forgery) return cmd_synth(synth_forgery, o, false, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace lowfake::cli
