#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "opd/config.hpp"
#include "opd/io.hpp"
#include "opd/op_loss.hpp"
#include "opd/surface.hpp"
#include "opd/synth.hpp"

using namespace opd;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("opd_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path_of(const std::string& name) {
  return (work_dir() / name).string();
}

CliResult run_cli(const std::string& args) {
  const std::string out_file = path_of("stdout.txt");
  const std::string err_file = path_of("stderr.txt");
  const std::string cmd = std::string(OPD_CLI_PATH) + " " + args + " > " +
                          out_file + " 2> " + err_file;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out_file);
  r.err = read_file(err_file);
  return r;
}

void write_depth(const std::string& name, const DepthMap& d) {
  write_file_atomic(path_of(name), write_pfm(d));
}

void write_K(const std::string& name, const Intrinsics& K) {
  write_file_atomic(path_of(name), write_intrinsics(K));
}

}  // namespace

TEST_CASE("help is available for every subcommand") {
  for (const char* cmd : {"gen", "backproject", "normals", "loss", "gradcheck",
                          "metrics", "fit", "compare"}) {
    const CliResult r = run_cli(std::string(cmd) + " --help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("Usage") != std::string::npos);
  }
}

TEST_CASE("gen then metrics against itself is exactly zero") {
  const CliResult gen = run_cli(
      "gen " + path_of("plane.pfm") +
      " --fx 50 --fy 50 --cx 8 --cy 8 --width 16 --height 16"
      " --scene plane --normal 0 0 1 --offset 10");
  REQUIRE(gen.exit_code == 0);
  const CliResult metrics =
      run_cli("metrics " + path_of("plane.pfm") + " " + path_of("plane.pfm"));
  CHECK(metrics.exit_code == 0);
  CHECK(metrics.out ==
        "name,mae_mm,rmse_mm,valid_pixels\nmetrics,0,0,256\n");
}

TEST_CASE("loss of an exact fixture against itself is all zeros") {
  // Interior constant 1 with an invalid border ring and fx=fy=1: raw
  // normals on every surviving site are exactly (0,0,1) with magnitude 1,
  // so even the reg prior is exactly zero.
  Intrinsics K{1.0, 1.0, 0.0, 0.0, 0.0};
  write_K("K1.txt", K);
  DepthMap flat(12, 12);
  for (int y = 1; y < 11; ++y)
    for (int x = 1; x < 11; ++x) flat.at(x, y) = 1.0;
  write_depth("flat.pfm", flat);
  const CliResult r = run_cli("loss " + path_of("flat.pfm") + " " +
                              path_of("flat.pfm") + " " + path_of("K1.txt"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\n0,0,0,0,0,0,100,64,64\n") != std::string::npos);
}

TEST_CASE("gen flags override config-file keys field by field") {
  write_file_atomic(path_of("gen.cfg"),
                    "camera.fx = 70\ncamera.fy = 70\ncamera.cx = 16\n"
                    "camera.cy = 16\nimage.width = 32\nimage.height = 32\n"
                    "scene.type = sphere\nscene.center = 0, 0, 80\n"
                    "scene.radius = 30\n");
  REQUIRE(run_cli("gen " + path_of("gen_cfg.pfm") + " --config " +
                  path_of("gen.cfg") + " --radius 20")
              .exit_code == 0);
  REQUIRE(run_cli("gen " + path_of("gen_flags.pfm") +
                  " --fx 70 --fy 70 --cx 16 --cy 16 --width 32 --height 32"
                  " --scene sphere --center 0 0 80 --radius 20")
              .exit_code == 0);
  CHECK(read_file(path_of("gen_cfg.pfm")) ==
        read_file(path_of("gen_flags.pfm")));
}

TEST_CASE("loss with alpha2 = 0 reports op equal to p2p") {
  Intrinsics K{20.0, 20.0, 4.0, 4.0, 0.0};
  const DepthMap clean =
      render_depth(SurfaceScene{SphereScene{Vec3(0, 0, 60), 25.0}}, K, 8, 8);
  write_K("K8.txt", K);
  write_depth("pred8.pfm", add_noise(clean, {0.4, 3}));
  write_depth("gt8.pfm", add_noise(clean, {0.3, 4}));
  const CliResult r =
      run_cli("loss " + path_of("pred8.pfm") + " " + path_of("gt8.pfm") + " " +
              path_of("K8.txt") + " --alpha1 1 --alpha2 0");
  REQUIRE(r.exit_code == 0);
  const size_t line_start = r.out.find('\n') + 1;
  const std::string line = r.out.substr(line_start);
  const size_t first_comma = line.find(',');
  const std::string p2p = line.substr(0, first_comma);
  // columns: p2p, n2n_align, n2n_reg, op, ...
  size_t pos = 0;
  std::vector<std::string> cols;
  std::string rest = line;
  while ((pos = rest.find(',')) != std::string::npos) {
    cols.push_back(rest.substr(0, pos));
    rest = rest.substr(pos + 1);
  }
  REQUIRE(cols.size() >= 4);
  CHECK(cols[3] == p2p);
}

TEST_CASE("loss output matches the library bitwise on the 8x8 fixture") {
  Intrinsics K{20.0, 20.0, 4.0, 4.0, 0.0};
  const DepthMap clean =
      render_depth(SurfaceScene{SphereScene{Vec3(0, 0, 60), 25.0}}, K, 8, 8);
  write_K("Kg.txt", K);
  write_depth("predg.pfm", add_noise(clean, {0.4, 3}));
  write_depth("gtg.pfm", add_noise(clean, {0.3, 4}));

  // Round-trip through the PFM codec exactly as the CLI reads them.
  const DepthMap pred = read_pfm(read_file(path_of("predg.pfm")));
  const DepthMap gt = read_pfm(read_file(path_of("gtg.pfm")));
  OpLossConfig cfg;
  cfg.beta = 0.5;
  const LossBreakdown b = op_loss(pred, gt, K, cfg);
  const std::string expected =
      format_g17(b.p2p) + "," + format_g17(b.n2n_align) + "," +
      format_g17(b.n2n_reg) + "," + format_g17(b.op) + "," +
      format_g17(b.image_l1) + "," + format_g17(b.total) + "," +
      std::to_string(b.valid_pixel_count) + "," +
      std::to_string(b.valid_normal_count) + "," +
      std::to_string(b.valid_pred_normal_count);

  const CliResult r =
      run_cli("loss " + path_of("predg.pfm") + " " + path_of("gtg.pfm") + " " +
              path_of("Kg.txt") + " --beta 0.5");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("\n" + expected + "\n") != std::string::npos);
}

TEST_CASE("gradcheck accepts smooth fixtures and honors the hook") {
  Intrinsics K{20.0, 20.0, 8.0, 8.0, 0.0};
  const DepthMap clean = render_depth(
      SurfaceScene{SinusoidScene{60.0, 2.5, 0.35, 0.3}}, K, 16, 16);
  write_K("Kgc.txt", K);
  write_depth("predgc.pfm", add_noise(clean, {0.3, 11}));
  write_depth("gtgc.pfm", add_noise(clean, {0.25, 12}));

  const std::string base = "gradcheck " + path_of("predgc.pfm") + " " +
                           path_of("gtgc.pfm") + " " + path_of("Kgc.txt");
  const CliResult ok = run_cli(base);
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("max_rel_error=") == 0);

  const CliResult corrupted = run_cli(base + " --corrupt-gradient");
  CHECK(corrupted.exit_code != 0);

  // pred == gt: every pixel sits on the L1 kink and is excluded.
  const CliResult kinks = run_cli("gradcheck " + path_of("predgc.pfm") + " " +
                                  path_of("predgc.pfm") + " " +
                                  path_of("Kgc.txt"));
  CHECK(kinks.exit_code == 0);
  const DepthMap pred = read_pfm(read_file(path_of("predgc.pfm")));
  CHECK(kinks.out.find("excluded_kink=" +
                       std::to_string(pred.valid_count())) !=
        std::string::npos);
  CHECK(kinks.out.find("checked=0") != std::string::npos);
}

TEST_CASE("missing inputs exit nonzero and name the path") {
  const CliResult r = run_cli("metrics " + path_of("absent.pfm") + " " +
                              path_of("absent.pfm"));
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("absent.pfm") != std::string::npos);

  const CliResult bp = run_cli("backproject " + path_of("plane.pfm") + " " +
                               path_of("no_K.txt") + " " + path_of("out.ply"));
  CHECK(bp.exit_code != 0);
  CHECK(bp.err.find("no_K.txt") != std::string::npos);
}

TEST_CASE("backproject exports a fronto plane at constant z") {
  Intrinsics K{50.0, 50.0, 8.0, 8.0, 0.0};
  write_K("Kbp.txt", K);
  write_depth("flat10.pfm",
              render_depth(SurfaceScene{PlaneScene{Vec3(0, 0, 1), 10.0}}, K,
                           16, 16));
  const CliResult r =
      run_cli("backproject " + path_of("flat10.pfm") + " " +
              path_of("Kbp.txt") + " " + path_of("flat10.ply"));
  REQUIRE(r.exit_code == 0);
  const std::string ply = read_file(path_of("flat10.ply"));
  CHECK(ply.find("element vertex 256\n") != std::string::npos);

  // every vertex line has z == 10 (third field)
  size_t pos = ply.find("end_header\n") + 11;
  int vertices = 0;
  while (pos < ply.size()) {
    const size_t eol = ply.find('\n', pos);
    const std::string line = ply.substr(pos, eol - pos);
    size_t a = line.find(' ');
    size_t b = line.find(' ', a + 1);
    size_t c = line.find(' ', b + 1);
    const double z = std::stod(line.substr(b + 1, c - b - 1));
    CHECK(std::abs(z - 10.0) < 1e-4);
    ++vertices;
    pos = eol + 1;
  }
  CHECK(vertices == 256);
}

TEST_CASE("backproject vertex count equals the valid-normal count") {
  Intrinsics K{70.0, 70.0, 16.0, 16.0, 0.0};
  const DepthMap d = render_depth(
      SurfaceScene{SphereScene{Vec3(0, 0, 80), 30.0}}, K, 32, 32);
  write_K("Ksp.txt", K);
  write_depth("sphere32.pfm", d);
  const CliResult r =
      run_cli("backproject " + path_of("sphere32.pfm") + " " +
              path_of("Ksp.txt") + " " + path_of("sphere32.ply"));
  REQUIRE(r.exit_code == 0);
  const DepthMap round_tripped = read_pfm(read_file(path_of("sphere32.pfm")));
  const int expected =
      unit_normals(estimate_normals(round_tripped, K)).valid_count();
  const std::string ply = read_file(path_of("sphere32.ply"));
  CHECK(ply.find("element vertex " + std::to_string(expected) + "\n") !=
        std::string::npos);
}

TEST_CASE("normals writes three pfm channels") {
  Intrinsics K{50.0, 50.0, 8.0, 8.0, 0.0};
  write_K("Kn.txt", K);
  write_depth("flatn.pfm", DepthMap(16, 16, 20.0));
  const CliResult r = run_cli("normals " + path_of("flatn.pfm") + " " +
                              path_of("Kn.txt") + " --pfm-prefix " +
                              path_of("flatn"));
  REQUIRE(r.exit_code == 0);
  const DepthMap nz = read_pfm(read_file(path_of("flatn_nz.pfm")));
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) CHECK(nz.at(x, y) == 1.0);
  // nx/ny are all zeros -> encoded as invalid-by-value in the pfm
  const DepthMap nx = read_pfm(read_file(path_of("flatn_nx.pfm")));
  CHECK(nx.valid_count() == 0);
}

TEST_CASE("fit with zero iterations returns the init bitwise") {
  Intrinsics K{70.0, 70.0, 8.0, 8.0, 0.0};
  const DepthMap target = render_depth(
      SurfaceScene{SphereScene{Vec3(0, 0, 80), 30.0}}, K, 16, 16);
  write_K("Kf.txt", K);
  write_depth("ftarget.pfm", target);
  write_depth("finit.pfm", add_noise(target, {1.0, 5}));
  const CliResult r = run_cli(
      "fit " + path_of("finit.pfm") + " " + path_of("ftarget.pfm") + " " +
      path_of("Kf.txt") + " " + path_of("fit0") +
      " --learning-rate 10 --iterations 0");
  REQUIRE(r.exit_code == 0);
  CHECK(read_file(path_of("fit0/final.pfm")) ==
        read_file(path_of("finit.pfm")));
}

TEST_CASE("cli runs are bitwise reproducible") {
  const std::string loss_cmd = "loss " + path_of("predg.pfm") + " " +
                               path_of("gtg.pfm") + " " + path_of("Kg.txt") +
                               " --beta 0.5";
  const CliResult a = run_cli(loss_cmd);
  const CliResult b = run_cli(loss_cmd);
  CHECK(a.out == b.out);

  const std::string fit_cmd =
      "fit " + path_of("finit.pfm") + " " + path_of("ftarget.pfm") + " " +
      path_of("Kf.txt") + " " + path_of("fit_det") +
      " --learning-rate 20 --iterations 10 --record-every 5";
  REQUIRE(run_cli(fit_cmd).exit_code == 0);
  const std::string first = read_file(path_of("fit_det/trajectory.csv"));
  const std::string first_pfm = read_file(path_of("fit_det/final.pfm"));
  REQUIRE(run_cli(fit_cmd).exit_code == 0);
  CHECK(read_file(path_of("fit_det/trajectory.csv")) == first);
  CHECK(read_file(path_of("fit_det/final.pfm")) == first_pfm);
}

TEST_CASE("compare produces a paired table and rejects bad schedules") {
  write_file_atomic(path_of("cmp_a.cfg"),
                    "loss.lambda = 0.05\nfit.learning_rate = 20\n"
                    "fit.iterations = 6\nfit.record_every = 3\n");
  write_file_atomic(path_of("cmp_b.cfg"),
                    "loss.lambda = 0\nfit.learning_rate = 20\n"
                    "fit.iterations = 6\nfit.record_every = 3\n");
  const std::string base = "compare " + path_of("finit.pfm") + " " +
                           path_of("ftarget.pfm") + " " + path_of("Kf.txt") +
                           " " + path_of("cmp_out");
  const CliResult r = run_cli(base + " --config-a " + path_of("cmp_a.cfg") +
                              " --config-b " + path_of("cmp_b.cfg"));
  REQUIRE(r.exit_code == 0);
  const std::string csv = read_file(path_of("cmp_out/comparison.csv"));
  CHECK(csv.find("image_l1_a") != std::string::npos);
  CHECK(csv.find("normal_angle_deg_b") != std::string::npos);
  // header plus rows at iterations 0, 3, 6
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  write_file_atomic(path_of("cmp_c.cfg"),
                    "fit.learning_rate = 20\nfit.iterations = 7\n"
                    "fit.record_every = 3\n");
  const CliResult bad = run_cli(base + "_bad --config-a " +
                                path_of("cmp_a.cfg") + " --config-b " +
                                path_of("cmp_c.cfg"));
  CHECK(bad.exit_code != 0);
  CHECK(!fs::exists(path_of("cmp_out_bad/comparison.csv")));
}
