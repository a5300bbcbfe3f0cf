#include "threadtrace/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "threadtrace/errors.hpp"
#include "threadtrace/ground_truth_io.hpp"
#include "threadtrace/image_io.hpp"
#include "threadtrace/json_io.hpp"
#include "threadtrace/metrics.hpp"
#include "threadtrace/pipeline.hpp"
#include "threadtrace/synthetic.hpp"

namespace threadtrace::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Pipeline flags; a flag given on the command line overrides --config.
struct ConfigFlags {
  std::string config_path;
  PipelineConfig values;
  std::vector<std::pair<CLI::Option*, double PipelineConfig::*>> real;
  std::vector<std::pair<CLI::Option*, int PipelineConfig::*>> integer;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON file with PipelineConfig keys")->check(CLI::ExistingFile);
    auto add_real = [&](const char* name, double PipelineConfig::*field, const char* help) {
      real.emplace_back(app->add_option(name, values.*field, help), field);
    };
    auto add_int = [&](const char* name, int PipelineConfig::*field, const char* help) {
      integer.emplace_back(app->add_option(name, values.*field, help), field);
    };
    add_real("--w", &PipelineConfig::w, "thread width in pixels");
    add_real("--t-l", &PipelineConfig::t_l, "lower ridge response threshold");
    add_real("--t-u", &PipelineConfig::t_u, "upper ridge response threshold");
    add_real("--t-d", &PipelineConfig::t_d, "region growing distance threshold (px)");
    add_real("--t-v", &PipelineConfig::t_v, "region growing intensity threshold");
    add_int("--t-c", &PipelineConfig::t_c, "minimum points per linked segment");
    add_real("--mask-tolerance", &PipelineConfig::mask_tolerance, "conjugate consistency tolerance");
    add_real("--mask-threshold", &PipelineConfig::mask_threshold, "g + g_conj level that counts as thread");
    add_real("--smoothing", &PipelineConfig::smoothing, "spline smoothing weight (0 interpolates)");
    add_int("--n-samples", &PipelineConfig::n_samples, "points sampled from the fitted spline");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = config_from_json(read_text_file(config_path));
    for (const auto& [opt, field] : real) {
      if (opt->count() > 0) cfg.*field = values.*field;
    }
    for (const auto& [opt, field] : integer) {
      if (opt->count() > 0) cfg.*field = values.*field;
    }
    cfg.validate();
    return cfg;
  }
};

GradientMap load_gradient(const fs::path& path) { return decode_gradient_map(read_file(path)); }

std::string scene_name(std::size_t index) {
  std::ostringstream s;
  s << "scene_" << std::setw(4) << std::setfill('0') << index;
  return s.str();
}

std::string format_ms(double ms) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << ms;
  return s.str();
}

// ---------------------------------------------------------------------------
// gen

struct GenOptions {
  fs::path out;
  int count = 1;
  std::uint64_t seed = 0;
  SceneConfig scene;
};

void run_gen(const GenOptions& o, std::ostream& out) {
  if (o.count < 1) throw ArgumentError("--count must be >= 1");
  o.scene.validate();
  fs::create_directories(o.out);
  ordered_json manifest;
  manifest["generator"] = {{"width", o.scene.width},
                           {"height", o.scene.height},
                           {"thread_width", o.scene.thread_width},
                           {"n_control_points", o.scene.n_control_points},
                           {"min_self_intersections", o.scene.min_self_intersections},
                           {"max_self_intersections", o.scene.max_self_intersections},
                           {"occlusion_rects", o.scene.occlusion_rects},
                           {"occluder_size", o.scene.occluder_size},
                           {"noise_sigma", o.scene.noise_sigma},
                           {"seed", o.seed},
                           {"count", o.count}};
  manifest["scenes"] = ordered_json::array();
  for (int i = 0; i < o.count; ++i) {
    SceneConfig cfg = o.scene;
    cfg.seed = mix_seed(o.seed, static_cast<std::uint64_t>(i));
    const SceneGroundTruth gt = generate_scene(cfg);
    const double w = cfg.thread_width;
    GradientMap conj = conjugate_ground_truth(gt, w);
    std::vector<PixelRect> rects;
    if (cfg.occlusion_rects > 0) {
      rects = place_occluders(gt, cfg.occlusion_rects, cfg.occluder_size, 2.0 * w, mix_seed(cfg.seed, 1));
    }
    const GradientMap grad = apply_degradation(gt.gradient, cfg.noise_sigma, rects, mix_seed(cfg.seed, 2));
    conj = apply_degradation(conj, cfg.noise_sigma, rects, mix_seed(cfg.seed, 3));

    const std::string name = scene_name(static_cast<std::size_t>(i));
    write_text_file(o.out / (name + "_gt.json"), ground_truth_to_json(gt));
    write_file(o.out / (name + "_grad.png"), encode_gradient_map(grad));
    write_file(o.out / (name + "_conj.png"), encode_gradient_map(conj));
    write_file(o.out / (name + "_overlap.png"), encode_overlap_map(gt.overlap));

    ordered_json occluders = ordered_json::array();
    for (const PixelRect& r : rects) occluders.push_back({r.x, r.y, r.width, r.height});
    manifest["scenes"].push_back({{"name", name},
                                  {"seed", cfg.seed},
                                  {"ground_truth", name + "_gt.json"},
                                  {"gradient", name + "_grad.png"},
                                  {"conjugate", name + "_conj.png"},
                                  {"overlap", name + "_overlap.png"},
                                  {"self_intersections", count_self_intersections(gt.centerline)},
                                  {"occluders", occluders}});
  }
  write_text_file(o.out / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << o.count << " scene(s) to " << o.out.string() << "\n";
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructOptions {
  fs::path gradient;
  fs::path conjugate;
  fs::path out_spline;
  fs::path out_overlay;
  ConfigFlags config;
};

void run_reconstruct(const ReconstructOptions& o, std::ostream& out) {
  const PipelineConfig cfg = o.config.resolve();
  const GradientMap g = load_gradient(o.gradient);
  ReconstructionResult result;
  if (o.conjugate.empty()) {
    result = reconstruct(g, cfg);
  } else {
    result = reconstruct(g, load_gradient(o.conjugate), cfg);
  }
  if (!o.out_spline.empty()) write_text_file(o.out_spline, spline_to_json(result.spline));
  if (!o.out_overlay.empty()) write_file(o.out_overlay, encode_rgb(render_overlay(result.fused_field, result.sampled)));
  if (result.detected) {
    out << "thread: " << result.fitted_points << " points from " << result.segments.size() << " segments, "
        << format_ms(result.timings.total_ms) << " ms\n";
  } else {
    out << result.failure << "\n";
  }
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  fs::path manifest;
  fs::path predictions;
  std::string suffix = "_spline.json";
  std::string mode = "conjugate";
  fs::path out;
  ConfigFlags config;
};

struct SceneEntry {
  std::string name;
  fs::path ground_truth, gradient, conjugate;
};

struct SceneOutcome {
  bool detected = false;
  OttpReport report;
  double psnr_db = 0.0;
};

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("THREADTRACE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) throw ArgumentError("THREADTRACE_THREADS must be a positive integer");
    n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Prediction file: a spline document, or a ground-truth document whose
// centerline is used as is.
Polyline load_prediction(const fs::path& path, int n_samples) {
  const std::string text = read_text_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (doc.is_object() && doc.contains("centerline")) return centerline_points(ground_truth_from_json(text).centerline);
  const ThreadSpline spline = spline_from_json(text);
  if (spline.empty()) return {};
  return sample(spline, n_samples);
}

SceneOutcome evaluate_scene(const SceneEntry& e, const EvalOptions& o, const PipelineConfig& cfg) {
  const SceneGroundTruth gt = ground_truth_from_json(read_text_file(e.ground_truth));
  const GradientMap g = load_gradient(e.gradient);
  SceneOutcome outcome;
  const GradientMap reference = render_gradient_map(gt, cfg.w);
  if (!reference.field().same_shape(g.field())) throw FormatError(e.name + ": gradient map size does not match the ground truth");
  outcome.psnr_db = psnr(g, reference);

  Polyline predicted;
  if (!o.predictions.empty()) {
    predicted = load_prediction(o.predictions / (e.name + o.suffix), cfg.n_samples);
  } else {
    const ReconstructionResult r =
        o.mode == "single" ? reconstruct(g, cfg) : reconstruct(g, load_gradient(e.conjugate), cfg);
    predicted = r.sampled;
  }
  if (predicted.empty()) return outcome;
  outcome.detected = true;
  outcome.report = ottp(predicted, gt.centerline);
  return outcome;
}

ordered_json psnr_value(double db) {
  if (std::isinf(db)) return "inf";
  return db;
}

void run_eval(const EvalOptions& o, std::ostream& out) {
  const PipelineConfig cfg = o.config.resolve();
  const fs::path base = o.manifest.parent_path();
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(o.manifest));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(o.manifest.string() + ": " + e.what());
  }
  std::vector<SceneEntry> scenes;
  try {
    for (const auto& s : manifest.at("scenes")) {
      scenes.push_back({s.at("name").get<std::string>(), base / s.at("ground_truth").get<std::string>(),
                        base / s.at("gradient").get<std::string>(), base / s.at("conjugate").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(o.manifest.string() + ": " + e.what());
  }
  if (scenes.empty()) throw InputError("manifest lists no scenes");

  std::vector<SceneOutcome> outcomes(scenes.size());
  std::vector<std::exception_ptr> errors(scenes.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < scenes.size(); i = next++) {
      try {
        outcomes[i] = evaluate_scene(scenes[i], o, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned workers = worker_count(scenes.size());
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ordered_json per_scene = ordered_json::array();
  std::size_t detected = 0, within = 0, finite_psnr = 0;
  double overall = 0.0, needle = 0.0, tail = 0.0, psnr_sum = 0.0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const SceneOutcome& s = outcomes[i];
    ordered_json row = {{"name", scenes[i].name}, {"detected", s.detected}, {"psnr_db", psnr_value(s.psnr_db)}};
    if (std::isfinite(s.psnr_db)) {
      psnr_sum += s.psnr_db;
      ++finite_psnr;
    }
    if (s.detected) {
      ++detected;
      overall += s.report.overall;
      needle += s.report.needle_end;
      tail += s.report.tail_end;
      if (s.report.overall <= 3.0) ++within;
      row["ottp"] = {{"overall", s.report.overall}, {"needle_end", s.report.needle_end}, {"tail_end", s.report.tail_end}};
    } else {
      row["ottp"] = nullptr;
    }
    per_scene.push_back(row);
  }
  const double m = static_cast<double>(scenes.size());
  ordered_json report;
  report["scenes"] = scenes.size();
  report["detected"] = detected;
  report["detection_rate"] = static_cast<double>(detected) / m;
  if (detected > 0) {
    const double d = static_cast<double>(detected);
    report["ottp"] = {{"overall", overall / d}, {"needle_end", needle / d}, {"tail_end", tail / d}};
  } else {
    report["ottp"] = nullptr;
  }
  report["fraction_within_3px"] = static_cast<double>(within) / m;
  report["psnr_db"] = finite_psnr == 0 ? ordered_json("inf") : ordered_json(psnr_sum / static_cast<double>(finite_psnr));
  report["per_scene"] = per_scene;

  const std::string text = report.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    write_text_file(o.out, text);
    out << "evaluated " << scenes.size() << " scene(s); report written to " << o.out.string() << "\n";
  }
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  int count = 20;
  std::uint64_t seed = 0;
  std::string mode = "conjugate";
  ConfigFlags config;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void run_bench(const BenchOptions& o, std::ostream& out) {
  if (o.count < 1) throw ArgumentError("--count must be >= 1");
  const PipelineConfig cfg = o.config.resolve();
  std::vector<double> fuse, ridge, search, link, fit, total, wall;
  std::size_t detected = 0;
  for (int i = 0; i < o.count; ++i) {
    SceneConfig scene;
    scene.thread_width = cfg.w;
    scene.seed = mix_seed(o.seed, static_cast<std::uint64_t>(i));
    const SceneGroundTruth gt = generate_scene(scene);
    const GradientMap conj = conjugate_ground_truth(gt, cfg.w);
    const auto t0 = std::chrono::steady_clock::now();
    const ReconstructionResult r = o.mode == "single" ? reconstruct(gt.gradient, cfg) : reconstruct(gt.gradient, conj, cfg);
    wall.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    fuse.push_back(r.timings.fuse_ms);
    ridge.push_back(r.timings.ridge_ms);
    search.push_back(r.timings.search_ms);
    link.push_back(r.timings.link_ms);
    fit.push_back(r.timings.fit_ms);
    total.push_back(r.timings.total_ms);
    if (r.detected) ++detected;
  }
  const double wall_median = median(wall);
  out << "frames: " << o.count << " (" << o.mode << " mode, " << detected << " detected)\n";
  out << "median ms per stage:\n";
  out << "  fuse    " << format_ms(median(fuse)) << "\n";
  out << "  ridge   " << format_ms(median(ridge)) << "\n";
  out << "  search  " << format_ms(median(search)) << "\n";
  out << "  link    " << format_ms(median(link)) << "\n";
  out << "  fit     " << format_ms(median(fit)) << "\n";
  out << "  total   " << format_ms(median(total)) << "\n";
  out << "median wall ms: " << format_ms(wall_median) << " (" << format_ms(1000.0 / wall_median) << " fps)\n";
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thread centerline reconstruction from gradient road maps", "threadtrace"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("--out", gen.out, "output directory")->required();
  gen_cmd->add_option("--count", gen.count, "number of scenes");
  gen_cmd->add_option("--seed", gen.seed, "base seed; scene i uses mix_seed(seed, i)");
  gen_cmd->add_option("--width", gen.scene.width, "frame width");
  gen_cmd->add_option("--height", gen.scene.height, "frame height");
  gen_cmd->add_option("--w", gen.scene.thread_width, "thread width in pixels");
  gen_cmd->add_option("--control-points", gen.scene.n_control_points, "B-spline control points");
  gen_cmd->add_option("--min-crossings", gen.scene.min_self_intersections, "minimum self-intersections");
  gen_cmd->add_option("--max-crossings", gen.scene.max_self_intersections, "maximum self-intersections");
  gen_cmd->add_option("--occluders", gen.scene.occlusion_rects, "square occluders per scene");
  gen_cmd->add_option("--occluder-size", gen.scene.occluder_size, "occluder side in pixels");
  gen_cmd->add_option("--noise", gen.scene.noise_sigma, "additive Gaussian noise sigma");

  ReconstructOptions rec;
  CLI::App* rec_cmd = app.add_subcommand("reconstruct", "Reconstruct the thread from gradient maps");
  rec_cmd->add_option("--gradient", rec.gradient, "gradient map PNG")->required()->check(CLI::ExistingFile);
  rec_cmd->add_option("--conjugate", rec.conjugate, "conjugate gradient map PNG")->check(CLI::ExistingFile);
  rec_cmd->add_option("--out-spline", rec.out_spline, "spline JSON output");
  rec_cmd->add_option("--out-overlay", rec.out_overlay, "overlay PNG output");
  rec.config.attach(rec_cmd);

  EvalOptions ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a dataset and report aggregate metrics");
  eval_cmd->add_option("--manifest", ev.manifest, "manifest.json written by gen")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--predictions", ev.predictions, "directory with one prediction file per scene")
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--prediction-suffix", ev.suffix, "prediction file name after the scene name");
  eval_cmd->add_option("--mode", ev.mode, "inline reconstruction mode")->check(CLI::IsMember({"conjugate", "single"}));
  eval_cmd->add_option("--out", ev.out, "report JSON output (default: stdout)");
  ev.config.attach(eval_cmd);

  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Time reconstruction on generated scenes");
  bench_cmd->add_option("--count", bench.count, "number of frames");
  bench_cmd->add_option("--seed", bench.seed, "base seed");
  bench_cmd->add_option("--mode", bench.mode, "reconstruction mode")->check(CLI::IsMember({"conjugate", "single"}));
  bench.config.attach(bench_cmd);

  std::vector<std::string> argv_storage{"threadtrace"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (gen_cmd->parsed()) run_gen(gen, out);
    if (rec_cmd->parsed()) run_reconstruct(rec, out);
    if (eval_cmd->parsed()) run_eval(ev, out);
    if (bench_cmd->parsed()) run_bench(bench, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const GenerationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitOk;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace threadtrace::cli
