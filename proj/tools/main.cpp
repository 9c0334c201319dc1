// opdepth: command-line front end for the oriented-point depth toolkit.
// Subcommands compose over PFM depth maps, plain-text intrinsics, CSV
// tables and ASCII PLY point clouds.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "opd/config.hpp"
#include "opd/fit.hpp"
#include "opd/io.hpp"
#include "opd/metrics.hpp"
#include "opd/op_loss.hpp"
#include "opd/surface.hpp"
#include "opd/synth.hpp"

namespace {

using namespace opd;

void require_input(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw std::runtime_error("input file does not exist: '" + path + "'");
}

DepthMap load_depth(const std::string& path) {
  try {
    return read_pfm(read_file(path));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

Intrinsics load_intrinsics(const std::string& path) {
  try {
    return read_intrinsics(read_file(path));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// Optional flag values that override config-file keys (flag wins).
struct LossFlags {
  std::optional<double> alpha1, alpha2, beta, lambda;
  std::optional<std::string> similarity_mode, reduction;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--alpha1", alpha1,
                    "Weight of the point distance term (loss.alpha1)");
    cmd->add_option("--alpha2", alpha2,
                    "Weight of the normal similarity term (loss.alpha2)");
    cmd->add_option("--beta", beta,
                    "Weight of the normal magnitude regularizer (loss.beta)");
    cmd->add_option("--lambda", lambda,
                    "Weight of the OP term in the total loss (loss.lambda)");
    cmd->add_option("--similarity-mode", similarity_mode,
                    "normalized_align or raw_dot (loss.similarity_mode)")
        ->check(CLI::IsMember({"normalized_align", "raw_dot"}));
    cmd->add_option("--reduction", reduction,
                    "sum or mean (loss.reduction)")
        ->check(CLI::IsMember({"sum", "mean"}));
  }

  void apply(OpLossConfig* cfg) const {
    if (alpha1) cfg->alpha1 = *alpha1;
    if (alpha2) cfg->alpha2 = *alpha2;
    if (beta) cfg->beta = *beta;
    if (lambda) cfg->lambda = *lambda;
    if (similarity_mode)
      cfg->similarity_mode = parse_similarity_mode(*similarity_mode);
    if (reduction) cfg->reduction = parse_reduction(*reduction);
    cfg->require_valid();
  }
};

RunConfig load_run_config(const std::string& config_path) {
  if (config_path.empty()) return RunConfig{};
  require_input(config_path);
  return RunConfig::load(config_path);
}

std::string loss_csv(const LossBreakdown& b) {
  std::string out =
      "p2p,n2n_align,n2n_reg,op,image_l1,total,"
      "valid_pixels,valid_normals,valid_pred_normals\n";
  out += format_g17(b.p2p) + "," + format_g17(b.n2n_align) + "," +
         format_g17(b.n2n_reg) + "," + format_g17(b.op) + "," +
         format_g17(b.image_l1) + "," + format_g17(b.total) + "," +
         std::to_string(b.valid_pixel_count) + "," +
         std::to_string(b.valid_normal_count) + "," +
         std::to_string(b.valid_pred_normal_count) + "\n";
  return out;
}

// ----- gen -----

struct GenArgs {
  std::string out;
  std::string config_path;
  std::string intrinsics_path;
  std::optional<double> fx, fy, cx, cy, skew;
  std::optional<int> width, height;
  std::optional<std::string> scene_type;
  std::optional<std::vector<double>> normal, center;
  std::optional<double> offset, radius, base_depth, amplitude, freq_x, freq_y;
  std::optional<double> noise_sigma;
  std::optional<uint64_t> noise_seed;
};

void setup_gen(CLI::App* cmd, GenArgs* a) {
  cmd->add_option("out", a->out, "Output depth map (PFM)")->required();
  cmd->add_option("--config", a->config_path,
                  "Key-value config file (flags override)");
  cmd->add_option("--intrinsics", a->intrinsics_path,
                  "Intrinsics text file (overrides camera.* keys)");
  cmd->add_option("--fx", a->fx, "Focal length x (pixels, camera.fx)");
  cmd->add_option("--fy", a->fy, "Focal length y (pixels, camera.fy)");
  cmd->add_option("--cx", a->cx, "Principal point x (pixels, camera.cx)");
  cmd->add_option("--cy", a->cy, "Principal point y (pixels, camera.cy)");
  cmd->add_option("--skew", a->skew, "Axis skew (pixels, camera.skew)");
  cmd->add_option("--width", a->width, "Image width (pixels, image.width)");
  cmd->add_option("--height", a->height,
                  "Image height (pixels, image.height)");
  cmd->add_option("--scene", a->scene_type,
                  "plane, sphere or sinusoid (scene.type)")
      ->check(CLI::IsMember({"plane", "sphere", "sinusoid"}));
  cmd->add_option("--normal", a->normal,
                  "Plane unit normal nx ny nz (scene.normal)")
      ->expected(3);
  cmd->add_option("--offset", a->offset,
                  "Plane offset d0 with n.p = d0 (mm, scene.offset)");
  cmd->add_option("--center", a->center,
                  "Sphere center x y z (mm, scene.center)")
      ->expected(3);
  cmd->add_option("--radius", a->radius, "Sphere radius (mm, scene.radius)");
  cmd->add_option("--base-depth", a->base_depth,
                  "Sinusoid base depth z0 (mm, scene.base_depth)");
  cmd->add_option("--amplitude", a->amplitude,
                  "Sinusoid amplitude (mm, scene.amplitude)");
  cmd->add_option("--freq-x", a->freq_x,
                  "Sinusoid x frequency (rad/pixel, scene.freq_x)");
  cmd->add_option("--freq-y", a->freq_y,
                  "Sinusoid y frequency (rad/pixel, scene.freq_y)");
  cmd->add_option("--noise-sigma", a->noise_sigma,
                  "Gaussian depth noise sigma (mm, noise.sigma)");
  cmd->add_option("--noise-seed", a->noise_seed,
                  "Noise generator seed (noise.seed)");
}

int run_gen(const GenArgs& a) {
  RunConfig cfg = load_run_config(a.config_path);

  if (!a.intrinsics_path.empty()) {
    require_input(a.intrinsics_path);
    cfg.camera = load_intrinsics(a.intrinsics_path);
  }
  Intrinsics K = cfg.camera.value_or(Intrinsics{});
  if (a.fx) K.fx = *a.fx;
  if (a.fy) K.fy = *a.fy;
  if (a.cx) K.cx = *a.cx;
  if (a.cy) K.cy = *a.cy;
  if (a.skew) K.skew = *a.skew;
  K.require_valid();

  const int width = a.width.value_or(cfg.width.value_or(0));
  const int height = a.height.value_or(cfg.height.value_or(0));
  if (width < 1 || height < 1)
    throw std::runtime_error("gen: image width and height are required");

  // Scene type from the flag, falling back to the config; per-field flags
  // then override the config values (or must fully specify a fresh scene).
  std::string type;
  if (a.scene_type) {
    type = *a.scene_type;
  } else if (cfg.scene) {
    if (std::holds_alternative<PlaneScene>(*cfg.scene)) type = "plane";
    else if (std::holds_alternative<SphereScene>(*cfg.scene)) type = "sphere";
    else type = "sinusoid";
  } else {
    throw std::runtime_error("gen: no scene given (--scene or scene.type)");
  }

  SurfaceScene scene;
  if (type == "plane") {
    PlaneScene s;
    const bool from_config =
        cfg.scene && std::holds_alternative<PlaneScene>(*cfg.scene);
    if (from_config) s = std::get<PlaneScene>(*cfg.scene);
    else if (!a.normal || !a.offset)
      throw std::runtime_error("gen: plane needs --normal and --offset");
    if (a.normal)
      s.normal = Vec3((*a.normal)[0], (*a.normal)[1], (*a.normal)[2]);
    if (a.offset) s.offset = *a.offset;
    scene = s;
  } else if (type == "sphere") {
    SphereScene s;
    const bool from_config =
        cfg.scene && std::holds_alternative<SphereScene>(*cfg.scene);
    if (from_config) s = std::get<SphereScene>(*cfg.scene);
    else if (!a.center || !a.radius)
      throw std::runtime_error("gen: sphere needs --center and --radius");
    if (a.center)
      s.center = Vec3((*a.center)[0], (*a.center)[1], (*a.center)[2]);
    if (a.radius) s.radius = *a.radius;
    scene = s;
  } else {
    SinusoidScene s;
    const bool from_config =
        cfg.scene && std::holds_alternative<SinusoidScene>(*cfg.scene);
    if (from_config) s = std::get<SinusoidScene>(*cfg.scene);
    else if (!a.base_depth || !a.amplitude || !a.freq_x || !a.freq_y)
      throw std::runtime_error(
          "gen: sinusoid needs --base-depth, --amplitude, --freq-x and "
          "--freq-y");
    if (a.base_depth) s.base_depth = *a.base_depth;
    if (a.amplitude) s.amplitude = *a.amplitude;
    if (a.freq_x) s.freq_x = *a.freq_x;
    if (a.freq_y) s.freq_y = *a.freq_y;
    scene = s;
  }

  DepthMap depth = render_depth(scene, K, width, height);

  NoiseSpec noise = cfg.noise.value_or(NoiseSpec{});
  if (a.noise_sigma) noise.sigma = *a.noise_sigma;
  if (a.noise_seed) noise.seed = *a.noise_seed;
  if (noise.sigma > 0.0) depth = add_noise(depth, noise);

  write_file_atomic(a.out, write_pfm(depth));
  return 0;
}

// ----- backproject / normals -----

struct CloudArgs {
  std::string depth_path, intrinsics_path, out;
  bool include_unoriented = false;
  bool flip = false;
};

int run_backproject(const CloudArgs& a) {
  require_input(a.depth_path);
  require_input(a.intrinsics_path);
  const DepthMap depth = load_depth(a.depth_path);
  const Intrinsics K = load_intrinsics(a.intrinsics_path);
  OrientedPointCloud cloud = oriented_cloud(depth, K, a.include_unoriented);
  if (a.flip)
    for (OrientedPoint& p : cloud.points)
      if (p.normal.z() > 0.0) p.normal = -p.normal;
  write_file_atomic(a.out, export_ply(cloud));
  return 0;
}

struct NormalsArgs {
  std::string depth_path, intrinsics_path;
  std::string ply_out, pfm_prefix;
  bool flip = false;
};

int run_normals(const NormalsArgs& a) {
  require_input(a.depth_path);
  require_input(a.intrinsics_path);
  if (a.ply_out.empty() && a.pfm_prefix.empty())
    throw std::runtime_error("normals: give --ply and/or --pfm-prefix");
  const DepthMap depth = load_depth(a.depth_path);
  const Intrinsics K = load_intrinsics(a.intrinsics_path);
  NormalMap units = unit_normals(estimate_normals(depth, K));
  if (a.flip) units = flip_to_camera(units);

  if (!a.pfm_prefix.empty()) {
    const char* suffixes[3] = {"_nx.pfm", "_ny.pfm", "_nz.pfm"};
    for (int c = 0; c < 3; ++c) {
      DepthMap channel(units.width(), units.height());
      for (int y = 0; y < units.height(); ++y)
        for (int x = 0; x < units.width(); ++x)
          channel.at(x, y) = units.is_valid(x, y)
                                 ? units.at(x, y)[c]
                                 : DepthMap::invalid_value();
      write_file_atomic(a.pfm_prefix + suffixes[c], write_pfm(channel));
    }
  }
  if (!a.ply_out.empty()) {
    OrientedPointCloud cloud = oriented_cloud(depth, K, false);
    if (a.flip)
      for (OrientedPoint& p : cloud.points)
        if (p.normal.z() > 0.0) p.normal = -p.normal;
    write_file_atomic(a.ply_out, export_ply(cloud));
  }
  return 0;
}

// ----- loss -----

struct LossArgs {
  std::string pred_path, gt_path, intrinsics_path, config_path;
  LossFlags flags;
};

int run_loss(const LossArgs& a) {
  require_input(a.pred_path);
  require_input(a.gt_path);
  require_input(a.intrinsics_path);
  RunConfig cfg = load_run_config(a.config_path);
  a.flags.apply(&cfg.loss);
  const DepthMap pred = load_depth(a.pred_path);
  const DepthMap gt = load_depth(a.gt_path);
  const Intrinsics K = load_intrinsics(a.intrinsics_path);
  const LossBreakdown b = op_loss(pred, gt, K, cfg.loss);
  if (b.empty_overlap)
    std::cerr << "warning: no jointly valid pixel; distance terms are 0\n";
  std::fputs(loss_csv(b).c_str(), stdout);
  return 0;
}

// ----- gradcheck -----

struct GradcheckArgs {
  std::string pred_path, gt_path, intrinsics_path, config_path;
  LossFlags flags;
  double step = 1e-4;        // mm
  double threshold = 1e-5;   // max relative error for exit 0
  bool corrupt = false;      // negative-control hook for tests
};

int run_gradcheck(const GradcheckArgs& a) {
  require_input(a.pred_path);
  require_input(a.gt_path);
  require_input(a.intrinsics_path);
  RunConfig cfg = load_run_config(a.config_path);
  a.flags.apply(&cfg.loss);
  const DepthMap pred = load_depth(a.pred_path);
  const DepthMap gt = load_depth(a.gt_path);
  const Intrinsics K = load_intrinsics(a.intrinsics_path);

  GradientMap analytic = op_loss_gradient(pred, gt, K, cfg.loss);
  if (a.corrupt)
    for (int y = 0; y < analytic.height(); ++y)
      for (int x = 0; x < analytic.width(); ++x)
        if (analytic.is_valid(x, y))
          analytic.at(x, y) = analytic.at(x, y) * 1.01 + 1e-3;

  double max_rel = 0.0;
  long long checked = 0, excluded_kink = 0, skipped_small = 0;
  DepthMap probe = pred;
  for (int y = 0; y < pred.height(); ++y) {
    for (int x = 0; x < pred.width(); ++x) {
      if (!pred.is_valid(x, y)) continue;
      if (gt.is_valid(x, y) &&
          std::abs(pred.at(x, y) - gt.at(x, y)) < 1e-6) {
        ++excluded_kink;  // L1 kink: the FD secant straddles the corner
        continue;
      }
      const double saved = probe.at(x, y);
      probe.at(x, y) = saved + a.step;
      const double up = op_loss(probe, gt, K, cfg.loss).total;
      probe.at(x, y) = saved - a.step;
      const double down = op_loss(probe, gt, K, cfg.loss).total;
      probe.at(x, y) = saved;
      const double fd = (up - down) / (2.0 * a.step);
      if (std::abs(fd) <= 1e-8) {
        ++skipped_small;
        continue;
      }
      max_rel = std::max(max_rel,
                         std::abs(analytic.at(x, y) - fd) / std::abs(fd));
      ++checked;
    }
  }

  std::printf("max_rel_error=%s checked=%lld excluded_kink=%lld "
              "skipped_small_fd=%lld threshold=%s\n",
              format_g17(max_rel).c_str(), checked, excluded_kink,
              skipped_small, format_g17(a.threshold).c_str());
  return max_rel < a.threshold ? 0 : 1;
}

// ----- metrics -----

struct MetricsArgs {
  std::string pred_path, gt_path;
  std::string name = "metrics";
};

int run_metrics(const MetricsArgs& a) {
  require_input(a.pred_path);
  require_input(a.gt_path);
  const DepthMap pred = load_depth(a.pred_path);
  const DepthMap gt = load_depth(a.gt_path);
  std::fputs(metrics_csv({compute_metrics(pred, gt, a.name)}).c_str(), stdout);
  return 0;
}

// ----- fit / compare -----

struct FitArgs {
  std::string init_path, target_path, intrinsics_path, out_dir, config_path;
  LossFlags loss_flags;
  std::optional<double> learning_rate;
  std::optional<int> iterations, record_every;
  std::optional<uint64_t> seed;
};

void add_fit_flags(CLI::App* cmd, FitArgs* a) {
  cmd->add_option("--learning-rate", a->learning_rate,
                  "Step size (mm per unit gradient, fit.learning_rate)");
  cmd->add_option("--iterations", a->iterations,
                  "Gradient descent iterations (fit.iterations)");
  cmd->add_option("--record-every", a->record_every,
                  "Trajectory sampling stride (fit.record_every)");
  cmd->add_option("--seed", a->seed,
                  "Seed recorded for noisy inits (fit.seed)");
}

FitConfig merge_fit_config(const RunConfig& run, const FitArgs& a) {
  FitConfig cfg = run.fit;
  cfg.loss = run.loss;
  a.loss_flags.apply(&cfg.loss);
  if (a.learning_rate) cfg.learning_rate = *a.learning_rate;
  if (a.iterations) cfg.iterations = *a.iterations;
  if (a.record_every) cfg.record_every = *a.record_every;
  if (a.seed) cfg.seed = *a.seed;
  cfg.require_valid();
  return cfg;
}

int run_fit(const FitArgs& a) {
  require_input(a.init_path);
  require_input(a.target_path);
  require_input(a.intrinsics_path);
  const RunConfig run = load_run_config(a.config_path);
  const FitConfig cfg = merge_fit_config(run, a);
  const DepthMap init = load_depth(a.init_path);
  const DepthMap target = load_depth(a.target_path);
  const Intrinsics K = load_intrinsics(a.intrinsics_path);

  const FitResult result = fit(init, target, K, cfg);
  std::filesystem::create_directories(a.out_dir);
  write_file_atomic(a.out_dir + "/final.pfm", write_pfm(result.final_depth));
  write_file_atomic(a.out_dir + "/trajectory.csv", trajectory_csv(result));
  return 0;
}

struct CompareArgs {
  std::string init_path, target_path, intrinsics_path, out_dir;
  std::string config_a, config_b;
};

int run_compare(const CompareArgs& a) {
  require_input(a.init_path);
  require_input(a.target_path);
  require_input(a.intrinsics_path);
  require_input(a.config_a);
  require_input(a.config_b);
  const RunConfig run_a = RunConfig::load(a.config_a);
  const RunConfig run_b = RunConfig::load(a.config_b);
  FitConfig cfg_a = run_a.fit;
  cfg_a.loss = run_a.loss;
  FitConfig cfg_b = run_b.fit;
  cfg_b.loss = run_b.loss;
  cfg_a.require_valid();
  cfg_b.require_valid();

  const DepthMap init = load_depth(a.init_path);
  const DepthMap target = load_depth(a.target_path);
  const Intrinsics K = load_intrinsics(a.intrinsics_path);

  const ComparisonResult result = compare(init, target, K, cfg_a, cfg_b);
  std::filesystem::create_directories(a.out_dir);
  write_file_atomic(a.out_dir + "/comparison.csv", comparison_csv(result));
  write_file_atomic(a.out_dir + "/final_a.pfm", write_pfm(result.a.final_depth));
  write_file_atomic(a.out_dir + "/final_b.pfm", write_pfm(result.b.final_depth));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opdepth: oriented-point depth-map geometry toolkit"};
  app.require_subcommand(1);

  GenArgs gen_args;
  setup_gen(app.add_subcommand("gen", "Render a synthetic scene to PFM"),
            &gen_args);

  CloudArgs bp_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "backproject", "Export an oriented point cloud as ASCII PLY");
    cmd->add_option("depth", bp_args.depth_path, "Depth map (PFM, mm)")
        ->required();
    cmd->add_option("intrinsics", bp_args.intrinsics_path,
                    "Intrinsics text file")
        ->required();
    cmd->add_option("out", bp_args.out, "Output PLY path")->required();
    cmd->add_flag("--include-unoriented", bp_args.include_unoriented,
                  "Keep points with invalid normals (placeholder 0 0 0)");
    cmd->add_flag("--flip", bp_args.flip,
                  "Flip normals with positive z toward the camera");
  }

  NormalsArgs normals_args;
  {
    CLI::App* cmd =
        app.add_subcommand("normals", "Estimate unit surface normals");
    cmd->add_option("depth", normals_args.depth_path, "Depth map (PFM, mm)")
        ->required();
    cmd->add_option("intrinsics", normals_args.intrinsics_path,
                    "Intrinsics text file")
        ->required();
    cmd->add_option("--ply", normals_args.ply_out,
                    "Oriented point cloud output (PLY)");
    cmd->add_option("--pfm-prefix", normals_args.pfm_prefix,
                    "Write <prefix>_nx.pfm, _ny.pfm, _nz.pfm normal maps");
    cmd->add_flag("--flip", normals_args.flip,
                  "Flip normals with positive z toward the camera");
  }

  LossArgs loss_args;
  {
    CLI::App* cmd =
        app.add_subcommand("loss", "Print the OP loss breakdown as CSV");
    cmd->add_option("pred", loss_args.pred_path, "Predicted depth (PFM, mm)")
        ->required();
    cmd->add_option("gt", loss_args.gt_path, "Ground truth depth (PFM, mm)")
        ->required();
    cmd->add_option("intrinsics", loss_args.intrinsics_path,
                    "Intrinsics text file")
        ->required();
    cmd->add_option("--config", loss_args.config_path,
                    "Key-value config file (flags override)");
    loss_args.flags.add_to(cmd);
  }

  GradcheckArgs gc_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "gradcheck", "Analytic vs central finite-difference gradient check");
    cmd->add_option("pred", gc_args.pred_path, "Predicted depth (PFM, mm)")
        ->required();
    cmd->add_option("gt", gc_args.gt_path, "Ground truth depth (PFM, mm)")
        ->required();
    cmd->add_option("intrinsics", gc_args.intrinsics_path,
                    "Intrinsics text file")
        ->required();
    cmd->add_option("--config", gc_args.config_path,
                    "Key-value config file (flags override)");
    gc_args.flags.add_to(cmd);
    cmd->add_option("--step", gc_args.step,
                    "Central difference step (mm, default 1e-4)");
    cmd->add_option("--threshold", gc_args.threshold,
                    "Max relative error for exit 0 (default 1e-5)");
    cmd->add_flag("--corrupt-gradient", gc_args.corrupt,
                  "Corrupt the analytic gradient (negative-control hook)")
        ->group("");  // hidden
  }

  MetricsArgs metrics_args;
  {
    CLI::App* cmd =
        app.add_subcommand("metrics", "MAE/RMSE between two depth maps");
    cmd->add_option("pred", metrics_args.pred_path,
                    "Predicted depth (PFM, mm)")
        ->required();
    cmd->add_option("gt", metrics_args.gt_path, "Ground truth depth (PFM, mm)")
        ->required();
    cmd->add_option("--name", metrics_args.name, "Row label for the report");
  }

  FitArgs fit_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "fit", "Gradient-descent fit of a depth map toward a target");
    cmd->add_option("init", fit_args.init_path, "Initial depth (PFM, mm)")
        ->required();
    cmd->add_option("target", fit_args.target_path, "Target depth (PFM, mm)")
        ->required();
    cmd->add_option("intrinsics", fit_args.intrinsics_path,
                    "Intrinsics text file")
        ->required();
    cmd->add_option("outdir", fit_args.out_dir,
                    "Output directory (final.pfm, trajectory.csv)")
        ->required();
    cmd->add_option("--config", fit_args.config_path,
                    "Key-value config file (flags override)");
    fit_args.loss_flags.add_to(cmd);
    add_fit_flags(cmd, &fit_args);
  }

  CompareArgs compare_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "compare", "Run fit under two configs from the same init");
    cmd->add_option("init", compare_args.init_path, "Initial depth (PFM, mm)")
        ->required();
    cmd->add_option("target", compare_args.target_path,
                    "Target depth (PFM, mm)")
        ->required();
    cmd->add_option("intrinsics", compare_args.intrinsics_path,
                    "Intrinsics text file")
        ->required();
    cmd->add_option("outdir", compare_args.out_dir,
                    "Output directory (comparison.csv, final_a/b.pfm)")
        ->required();
    cmd->add_option("--config-a", compare_args.config_a,
                    "Config file for run A")
        ->required();
    cmd->add_option("--config-b", compare_args.config_b,
                    "Config file for run B")
        ->required();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("gen")) return run_gen(gen_args);
    if (app.got_subcommand("backproject")) return run_backproject(bp_args);
    if (app.got_subcommand("normals")) return run_normals(normals_args);
    if (app.got_subcommand("loss")) return run_loss(loss_args);
    if (app.got_subcommand("gradcheck")) return run_gradcheck(gc_args);
    if (app.got_subcommand("metrics")) return run_metrics(metrics_args);
    if (app.got_subcommand("fit")) return run_fit(fit_args);
    if (app.got_subcommand("compare")) return run_compare(compare_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
