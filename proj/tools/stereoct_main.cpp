// Command-line front end: match / attack / eval / synth / report.
// Every run that writes files also writes a JSON manifest describing the
// resolved configuration and input digests, so experiments are
// self-describing and reruns can be diffed bit-for-bit.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stereoct/attack.hpp"
#include "stereoct/cost_volume.hpp"
#include "stereoct/eval.hpp"
#include "stereoct/gradient.hpp"
#include "stereoct/imageio.hpp"
#include "stereoct/matcher.hpp"
#include "stereoct/parallel.hpp"
#include "stereoct/pipeline.hpp"
#include "stereoct/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stereoct;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  uint64_t h = 14695981039346656037ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf), in.gcount() > 0)
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<uint8_t>(buf[i]);
      h *= 1099511628211ULL;
    }
  return h;
}

json input_digest(const std::string& path) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, fnv1a64_file(path));
  return json{{"path", path}, {"fnv1a64", hex}};
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

DisparityMap read_disparity_any(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".png")
    return read_kitti_disparity(path);
  return read_pfm(path);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

json metrics_json(const Metrics& m) {
  return json{{"epe", m.epe},
              {"bad1", m.bad1},
              {"bad3", m.bad3},
              {"pixels", m.pixels},
              {"mask_fraction", m.mask_fraction}};
}

// Shared pipeline flags; match defaults to the hard census path, attack to
// the differentiable soft-census path.
struct PipelineFlags {
  std::string descriptor;
  std::vector<int> scales = default_scales();
  int max_disp = 192;
  double steepness = 1e5;
  double tau = 0.1;
  int window = 7;

  void add_to(CLI::App* cmd, const std::string& default_descriptor) {
    descriptor = default_descriptor;
    cmd->add_option("--descriptor", descriptor, "census | census-soft | sad")
        ->capture_default_str();
    cmd->add_option("--scales", scales, "census window sizes (odd, >= 3)")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--max-disp", max_disp, "number of disparity candidates")
        ->capture_default_str();
    cmd->add_option("--steepness", steepness, "soft census sigmoid steepness C")
        ->capture_default_str();
    cmd->add_option("--tau", tau, "soft-argmin temperature")->capture_default_str();
    cmd->add_option("--window", window, "box aggregation window (odd)")->capture_default_str();
  }

  PipelineConfig config() const {
    PipelineConfig cfg;
    cfg.descriptor = parse_descriptor(descriptor);
    cfg.scales = scales;
    cfg.max_disp = max_disp;
    cfg.steepness = steepness;
    cfg.match.temperature = tau;
    cfg.match.agg_window = window;
    return cfg;
  }

  json echo() const {
    return json{{"descriptor", descriptor}, {"scales", scales},   {"max_disp", max_disp},
                {"steepness", steepness},   {"tau", tau},         {"window", window}};
  }
};

std::vector<int> parse_int_list(const std::string& text, size_t count, const char* what) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    try {
      out.push_back(std::stoi(text.substr(pos, comma - pos)));
    } catch (...) {
      throw std::runtime_error(std::string("bad ") + what + ": " + text);
    }
    pos = comma + 1;
  }
  if (out.size() != count) throw std::runtime_error(std::string("bad ") + what + ": " + text);
  return out;
}

DisparityMap run_matcher(const CostVolume& vol, const std::string& aggregator, double p1,
                         double p2, int directions, const SoftMatchParams& soft) {
  if (aggregator == "sgm") {
    SgmParams params;
    params.p1 = p1;
    params.p2 = p2;
    params.directions = directions;
    return wta(sgm_aggregate(vol, params));
  }
  if (aggregator == "soft") return soft_argmin(vol, soft);
  throw std::runtime_error("unknown aggregator: " + aggregator + " (expected sgm or soft)");
}

CostVolume build_volume(const GrayImage& left, const GrayImage& right,
                        const PipelineConfig& cfg) {
  switch (cfg.descriptor) {
    case Descriptor::census_hard:
      return build_census_volume_reduced(left, right, cfg.scales, cfg.max_disp);
    case Descriptor::census_soft:
      return build_soft_census_volume_reduced(left, right, cfg.scales, cfg.max_disp,
                                              cfg.steepness);
    case Descriptor::sad:
      return build_sad_volume_reduced(left, right, cfg.scales, cfg.max_disp);
  }
  throw std::runtime_error("unreachable");
}

void write_trace_csv(const std::vector<double>& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "step,loss\n";
  for (size_t t = 0; t < trace.size(); ++t) {
    char line[64];
    std::snprintf(line, sizeof line, "%zu,%.17g\n", t, trace[t]);
    out << line;
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

// ---------------------------------------------------------------- match ----

struct MatchArgs {
  std::string left, right, out, color;
  std::string aggregator = "sgm";
  double p1 = 0.05, p2 = 0.5;
  int directions = 8;
  PipelineFlags pipe;
};

int run_match(const MatchArgs& a) {
  Timer timer;
  const GrayImage left = read_pgm(a.left);
  const GrayImage right = read_pgm(a.right);
  const PipelineConfig cfg = a.pipe.config();
  cfg.validate();

  const CostVolume vol = build_volume(left, right, cfg);
  const DisparityMap disp = run_matcher(vol, a.aggregator, a.p1, a.p2, a.directions, cfg.match);
  write_pfm(disp, a.out);
  if (!a.color.empty()) render_disparity_ppm(disp, cfg.max_disp, a.color);

  json config = a.pipe.echo();
  config["aggregator"] = a.aggregator;
  config["p1"] = a.p1;
  config["p2"] = a.p2;
  config["directions"] = a.directions;
  config["jobs"] = max_workers();
  json manifest{{"command", "match"},
                {"version", kVersion},
                {"config", config},
                {"inputs", {{"left", input_digest(a.left)}, {"right", input_digest(a.right)}}},
                {"outputs", {{"disparity", a.out}}},
                {"duration_ms", timer.ms()}};
  if (!a.color.empty()) manifest["outputs"]["color"] = a.color;
  write_json(manifest, a.out + ".manifest.json");
  return 0;
}

// --------------------------------------------------------------- attack ----

struct AttackArgs {
  std::string left, right, gt, occl, out_dir, mode = "constrained", rect, scene;
  double eps = 0.03, alpha = 0.01;
  int steps = 20;
  bool allow_zero_grad = false;
  PipelineFlags pipe;
  CLI::Option* eps_opt = nullptr;
  CLI::Option* steps_opt = nullptr;
};

int run_attack(const AttackArgs& a) {
  Timer timer;
  const GrayImage left = read_pgm(a.left);
  const GrayImage right = read_pgm(a.right);
  const DisparityMap gt = read_disparity_any(a.gt);
  const Mask occl = a.occl.empty() ? occlusion_mask(gt) : read_mask_pgm(a.occl);

  AttackConfig cfg;
  cfg.mode = parse_attack_mode(a.mode);
  cfg.eps = a.eps;
  cfg.alpha = a.alpha;
  cfg.steps = a.steps;
  cfg.pipeline = a.pipe.config();
  cfg.allow_zero_grad = a.allow_zero_grad;
  // Patch runs follow the patch conventions unless explicitly overridden.
  if (cfg.mode == AttackMode::patch) {
    if (a.eps_opt->count() == 0) cfg.eps = 1.0;
    if (a.steps_opt->count() == 0) cfg.steps = 100;
    if (a.rect.empty()) throw std::runtime_error("patch mode requires --rect x,y,w,h");
    const auto v = parse_int_list(a.rect, 4, "--rect");
    cfg.patch_rect = Rect{v[0], v[1], v[2], v[3]};
  }

  fs::create_directories(a.out_dir);
  const auto in_dir = [&](const char* name) { return (fs::path(a.out_dir) / name).string(); };

  const Mask emask = build_eval_mask(gt, occl, std::nullopt, cfg.pipeline.max_disp);
  const CostVolume clean_vol = build_volume(left, right, cfg.pipeline);
  const Metrics clean = compute_metrics(soft_argmin(clean_vol, cfg.pipeline.match), gt, emask);

  GrayImage ladv, radv;
  std::vector<double> trace;
  bool blocked = false;
  json outputs;
  if (cfg.mode == AttackMode::unconstrained) {
    const UnconstrainedResult res = unconstrained_pgd(left, right, gt, cfg);
    ladv = left;
    radv = right;
    for (size_t i = 0; i < ladv.data.size(); ++i) {
      ladv.data[i] += res.pert_left.data[i];
      radv.data[i] += res.pert_right.data[i];
    }
    write_pfm_raw(res.pert_left.data, left.width, left.height, in_dir("perturbation_left.pfm"));
    write_pfm_raw(res.pert_right.data, left.width, left.height, in_dir("perturbation_right.pfm"));
    outputs["perturbation_left"] = in_dir("perturbation_left.pfm");
    outputs["perturbation_right"] = in_dir("perturbation_right.pfm");
    trace = res.loss_trace;
    blocked = res.blocked;
  } else {
    const AttackResult res = pgd_attack(left, right, gt, occl, cfg);
    std::tie(ladv, radv) = apply_perturbation(left, right, gt, occl, res.pert);
    write_pfm_raw(res.pert.data, left.width, left.height, in_dir("perturbation.pfm"));
    outputs["perturbation"] = in_dir("perturbation.pfm");
    trace = res.loss_trace;
    blocked = res.blocked;
  }
  write_pgm(ladv, in_dir("left_adv.pgm"));
  write_pgm(radv, in_dir("right_adv.pgm"));
  write_trace_csv(trace, in_dir("trace.csv"));
  outputs["left_adv"] = in_dir("left_adv.pgm");
  outputs["right_adv"] = in_dir("right_adv.pgm");
  outputs["trace"] = in_dir("trace.csv");

  const CostVolume adv_vol = build_volume(ladv, radv, cfg.pipeline);
  const Metrics adv = compute_metrics(soft_argmin(adv_vol, cfg.pipeline.match), gt, emask);

  std::string scene = a.scene;
  if (scene.empty()) {
    const fs::path p = fs::path(a.left).parent_path();
    scene = p.empty() ? fs::path(a.left).stem().string() : p.filename().string();
  }

  json config = a.pipe.echo();
  config["mode"] = a.mode;
  config["eps"] = cfg.eps;
  config["alpha"] = cfg.alpha;
  config["steps"] = cfg.steps;
  config["aggregator"] = "soft";
  config["allow_zero_grad"] = cfg.allow_zero_grad;
  config["jobs"] = max_workers();
  if (cfg.patch_rect)
    config["rect"] = {cfg.patch_rect->x, cfg.patch_rect->y, cfg.patch_rect->w, cfg.patch_rect->h};

  json inputs{{"left", input_digest(a.left)},
              {"right", input_digest(a.right)},
              {"gt", input_digest(a.gt)}};
  if (!a.occl.empty()) inputs["occl"] = input_digest(a.occl);

  json manifest{{"command", "attack"},
                {"version", kVersion},
                {"scene", scene},
                {"config", config},
                {"inputs", inputs},
                {"outputs", outputs},
                {"blocked", blocked},
                {"initial_loss", trace.front()},
                {"final_loss", trace.back()},
                {"metrics_clean", metrics_json(clean)},
                {"metrics_adv", metrics_json(adv)},
                {"duration_ms", timer.ms()}};
  write_json(manifest, in_dir("manifest.json"));
  return 0;
}

// ----------------------------------------------------------------- eval ----

struct EvalArgs {
  std::string pred, gt, occl, crop, out;
  int max_disp = 192;
};

int run_eval(const EvalArgs& a) {
  Timer timer;
  const DisparityMap pred = read_disparity_any(a.pred);
  const DisparityMap gt = read_disparity_any(a.gt);
  const Mask occl = a.occl.empty() ? occlusion_mask(gt) : read_mask_pgm(a.occl);
  std::optional<Rect> crop;
  if (!a.crop.empty()) {
    const auto v = parse_int_list(a.crop, 4, "--crop");
    crop = Rect{v[0], v[1], v[2], v[3]};
  }
  const Mask mask = build_eval_mask(gt, occl, crop, a.max_disp);
  const Metrics m = compute_metrics(pred, gt, mask);
  const json metrics = metrics_json(m);
  std::cout << metrics.dump(2) << "\n";

  if (!a.out.empty()) {
    write_json(metrics, a.out);
    json config{{"max_disp", a.max_disp}, {"jobs", max_workers()}};
    if (crop) config["crop"] = {crop->x, crop->y, crop->w, crop->h};
    json inputs{{"pred", input_digest(a.pred)}, {"gt", input_digest(a.gt)}};
    if (!a.occl.empty()) inputs["occl"] = input_digest(a.occl);
    json manifest{{"command", "eval"},    {"version", kVersion},
                  {"config", config},     {"inputs", inputs},
                  {"outputs", {{"metrics", a.out}}}, {"duration_ms", timer.ms()}};
    write_json(manifest, a.out + ".manifest.json");
  }
  return 0;
}

// ---------------------------------------------------------------- synth ----

struct SynthArgs {
  std::string out_dir, size = "64x128", kind, plane, step, slant, tex = "0:1";
  int step_x = -1;
  uint64_t seed = 1;
  bool subpixel = false;
};

int run_synth(const SynthArgs& a) {
  Timer timer;
  SceneSpec spec;
  // --size rows x columns, matching the usual image-shape notation.
  {
    const size_t x = a.size.find('x');
    if (x == std::string::npos) throw std::runtime_error("bad --size, want HxW");
    spec.height = std::stoi(a.size.substr(0, x));
    spec.width = std::stoi(a.size.substr(x + 1));
  }
  int kinds = 0;
  if (!a.plane.empty()) {
    spec.kind = SceneKind::plane;
    spec.d0 = std::stod(a.plane);
    ++kinds;
  }
  if (!a.step.empty()) {
    spec.kind = SceneKind::step;
    const size_t c = a.step.find(':');
    if (c == std::string::npos) throw std::runtime_error("bad --step, want lo:hi");
    spec.d0 = std::stod(a.step.substr(0, c));
    spec.d1 = std::stod(a.step.substr(c + 1));
    ++kinds;
  }
  if (!a.slant.empty()) {
    spec.kind = SceneKind::slant;
    const auto parts = json::parse("[" + a.slant + "]");
    if (!parts.is_array() || parts.size() != 3)
      throw std::runtime_error("bad --slant, want d0,sx,sy");
    spec.d0 = parts[0].get<double>();
    spec.sx = parts[1].get<double>();
    spec.sy = parts[2].get<double>();
    ++kinds;
  }
  if (kinds != 1) throw std::runtime_error("pick exactly one of --plane, --step, --slant");
  {
    const size_t c = a.tex.find(':');
    if (c == std::string::npos) throw std::runtime_error("bad --tex, want lo:hi");
    spec.tex_lo = std::stod(a.tex.substr(0, c));
    spec.tex_hi = std::stod(a.tex.substr(c + 1));
  }
  spec.step_x = a.step_x;
  spec.seed = a.seed;
  spec.subpixel = a.subpixel;

  const SyntheticScene scene = make_scene(spec);
  fs::create_directories(a.out_dir);
  const auto in_dir = [&](const char* name) { return (fs::path(a.out_dir) / name).string(); };
  write_pgm(scene.left, in_dir("left.pgm"));
  write_pgm(scene.right, in_dir("right.pgm"));
  write_pfm(scene.gt, in_dir("gt.pfm"));
  write_mask_pgm(scene.occl, in_dir("occl.pgm"));

  json config{{"kind", scene_kind_name(spec.kind)},
              {"width", spec.width},
              {"height", spec.height},
              {"d0", spec.d0},
              {"d1", spec.d1},
              {"sx", spec.sx},
              {"sy", spec.sy},
              {"step_x", spec.step_x},
              {"tex_lo", spec.tex_lo},
              {"tex_hi", spec.tex_hi},
              {"seed", spec.seed},
              {"subpixel", spec.subpixel}};
  json manifest{{"command", "synth"},
                {"version", kVersion},
                {"config", config},
                {"inputs", json::object()},
                {"outputs",
                 {{"left", in_dir("left.pgm")},
                  {"right", in_dir("right.pgm")},
                  {"gt", in_dir("gt.pfm")},
                  {"occl", in_dir("occl.pgm")}}},
                {"duration_ms", timer.ms()}};
  write_json(manifest, in_dir("manifest.json"));
  return 0;
}

// --------------------------------------------------------------- report ----

struct ReportArgs {
  std::string dir, out;
};

int run_report(const ReportArgs& a) {
  std::vector<std::pair<std::string, json>> runs;
  for (const auto& entry : fs::recursive_directory_iterator(a.dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    json m;
    try {
      std::ifstream in(entry.path());
      in >> m;
    } catch (...) {
      continue;  // unrelated JSON files are fine to skip
    }
    if (m.value("command", "") == "attack" && m.contains("metrics_clean"))
      runs.emplace_back(entry.path().string(), std::move(m));
  }
  if (runs.empty()) throw std::runtime_error("no attack manifests found under " + a.dir);

  std::vector<std::pair<std::string, std::string>> rows;  // sort key, csv row
  for (const auto& [path, m] : runs) {
    const json& cfg = m.at("config");
    const json& mc = m.at("metrics_clean");
    const json& ma = m.at("metrics_adv");
    std::string row = m.value("scene", "?");
    row += "," + cfg.value("descriptor", "?");
    row += "," + cfg.value("aggregator", "?");
    row += "," + cfg.value("mode", "?");
    row += "," + fmt(cfg.value("eps", 0.0));
    row += "," + std::to_string(cfg.value("steps", 0));
    for (const json& metrics : {mc, ma}) {
      row += "," + fmt(metrics.value("epe", 0.0));
      row += "," + fmt(metrics.value("bad1", 0.0));
      row += "," + fmt(metrics.value("bad3", 0.0));
    }
    rows.emplace_back(row + "\x1f" + path, row);
  }
  std::sort(rows.begin(), rows.end());

  std::string csv = "scene,descriptor,aggregator,mode,eps,steps,epe,bad1,bad3,epe_adv,bad1_adv,bad3_adv\n";
  for (const auto& [key, row] : rows) csv += row + "\n";
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw std::runtime_error(a.out + ": cannot open for writing");
    out << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stereo matching robustness toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "worker thread cap (0 = machine default)");

  MatchArgs match_args;
  CLI::App* cmd_match = app.add_subcommand("match", "compute a disparity map for a stereo pair");
  cmd_match->add_option("--left", match_args.left, "left image (PGM)")->required();
  cmd_match->add_option("--right", match_args.right, "right image (PGM)")->required();
  cmd_match->add_option("--out", match_args.out, "output disparity (PFM)")->required();
  cmd_match->add_option("--color", match_args.color, "optional pseudo-color rendering (PPM)");
  cmd_match->add_option("--aggregator", match_args.aggregator, "sgm | soft")
      ->capture_default_str();
  cmd_match->add_option("--p1", match_args.p1, "SGM small-jump penalty")->capture_default_str();
  cmd_match->add_option("--p2", match_args.p2, "SGM large-jump penalty")->capture_default_str();
  cmd_match->add_option("--directions", match_args.directions, "SGM directions (4 or 8)")
      ->capture_default_str();
  match_args.pipe.add_to(cmd_match, "census");

  AttackArgs attack_args;
  CLI::App* cmd_attack = app.add_subcommand("attack", "run a PGD attack against the soft pipeline");
  cmd_attack->add_option("--left", attack_args.left, "left image (PGM)")->required();
  cmd_attack->add_option("--right", attack_args.right, "right image (PGM)")->required();
  cmd_attack->add_option("--gt", attack_args.gt, "ground-truth disparity (PFM or KITTI PNG)")
      ->required();
  cmd_attack->add_option("--occl", attack_args.occl,
                         "occlusion mask (PGM); derived from --gt when omitted");
  cmd_attack->add_option("--out-dir", attack_args.out_dir, "artifact directory")->required();
  cmd_attack->add_option("--mode", attack_args.mode, "constrained | unconstrained | patch")
      ->capture_default_str();
  attack_args.eps_opt =
      cmd_attack->add_option("--eps", attack_args.eps, "perturbation budget (patch default 1.0)")
          ->capture_default_str();
  cmd_attack->add_option("--alpha", attack_args.alpha, "sign step size")->capture_default_str();
  attack_args.steps_opt =
      cmd_attack->add_option("--steps", attack_args.steps, "iterations (patch default 100)")
          ->capture_default_str();
  cmd_attack->add_option("--rect", attack_args.rect, "patch rectangle x,y,w,h");
  cmd_attack->add_option("--scene", attack_args.scene,
                         "scene label for reports (default: left image's directory name)");
  cmd_attack->add_flag("--allow-zero-grad", attack_args.allow_zero_grad,
                       "run the hard-census no-op attack instead of refusing");
  attack_args.pipe.add_to(cmd_attack, "census-soft");

  EvalArgs eval_args;
  CLI::App* cmd_eval = app.add_subcommand("eval", "compute EPE / Bad metrics");
  cmd_eval->add_option("--pred", eval_args.pred, "predicted disparity (PFM or KITTI PNG)")
      ->required();
  cmd_eval->add_option("--gt", eval_args.gt, "ground-truth disparity (PFM or KITTI PNG)")
      ->required();
  cmd_eval->add_option("--occl", eval_args.occl,
                       "occlusion mask (PGM); derived from --gt when omitted");
  cmd_eval->add_option("--crop", eval_args.crop, "evaluation crop x,y,w,h");
  cmd_eval->add_option("--max-disp", eval_args.max_disp, "disparity threshold")
      ->capture_default_str();
  cmd_eval->add_option("--out", eval_args.out, "write metrics JSON (and a manifest) here");

  SynthArgs synth_args;
  CLI::App* cmd_synth = app.add_subcommand("synth", "generate a random-dot stereo scene");
  cmd_synth->add_option("--out-dir", synth_args.out_dir, "output directory")->required();
  cmd_synth->add_option("--size", synth_args.size, "scene shape HxW")->capture_default_str();
  cmd_synth->add_option("--plane", synth_args.plane, "constant-disparity plane D");
  cmd_synth->add_option("--step", synth_args.step, "two-level step lo:hi");
  cmd_synth->add_option("--slant", synth_args.slant, "slanted plane d0,sx,sy");
  cmd_synth->add_option("--step-x", synth_args.step_x, "step boundary column (default W/2)");
  cmd_synth->add_option("--tex", synth_args.tex, "texture intensity range lo:hi")
      ->capture_default_str();
  cmd_synth->add_option("--seed", synth_args.seed, "texture seed")->capture_default_str();
  cmd_synth->add_flag("--subpixel", synth_args.subpixel, "keep slant disparities fractional");

  ReportArgs report_args;
  CLI::App* cmd_report = app.add_subcommand("report", "summarize attack manifests as CSV");
  cmd_report->add_option("--dir", report_args.dir, "directory of run manifests")->required();
  cmd_report->add_option("--out", report_args.out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2; --help/--version exit 0
  }

  try {
    set_max_workers(jobs);
    if (app.got_subcommand(cmd_match)) return run_match(match_args);
    if (app.got_subcommand(cmd_attack)) return run_attack(attack_args);
    if (app.got_subcommand(cmd_eval)) return run_eval(eval_args);
    if (app.got_subcommand(cmd_synth)) return run_synth(synth_args);
    if (app.got_subcommand(cmd_report)) return run_report(report_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
