#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string bin() {
  const char* b = std::getenv("SLOCAL_BIN");
  REQUIRE_MESSAGE(b != nullptr, "SLOCAL_BIN must point at the CLI binary");
  return b;
}

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  const auto d = fs::temp_directory_path() / "slocal_cli_test";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in.good()) return {};
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

RunResult run(const std::string& args) {
  const auto d = work_dir();
  const auto out = d / "stdout.txt";
  const auto err = d / "stderr.txt";
  const std::string cmd = bin() + " " + args + " >" + out.string() + " 2>" +
                          err.string();
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

/// First "key = value"-style stdout line value, e.g. grab("half_sig", out).
std::string grab(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos && line.substr(0, eq) == key)
      return line.substr(eq + 3);
  }
  return {};
}

}  // namespace

TEST_CASE("signature: clean quadrant values, machine-readable output") {
  const auto plus = run("signature --radius 6 --rho 4 --kappa auto");
  CHECK(plus.exit_code == 0);
  CHECK(grab("half_sig", plus.out) == "1");
  CHECK(grab("rho", plus.out) == "4");
  // Automatic kappa = clean bulk gap over twice the clean commutator norm,
  // measured at this radius.
  CHECK(std::stod(grab("kappa", plus.out)) ==
        doctest::Approx(0.0327464473189).epsilon(1e-9));

  const auto minus =
      run("signature --mu -0.25 --delta 0.35 --radius 6 --rho 4 "
          "--kappa 0.0327464473189");
  CHECK(minus.exit_code == 0);
  CHECK(grab("half_sig", minus.out) == "-1");
}

TEST_CASE("signature: CSV written atomically where requested") {
  const auto d = work_dir();
  const auto csv = d / "sig.csv";
  fs::remove(csv);
  const auto r = run("signature --radius 6 --rho 4 --kappa 0.0327 --out " +
                     csv.string());
  CHECK(r.exit_code == 0);
  const auto text = slurp(csv);
  CHECK(text.rfind("half_sig,gap_L,kappa,rho,", 0) == 0);
  CHECK(text.find("\n1,") != std::string::npos);
  CHECK_FALSE(fs::exists(csv.string() + ".tmp"));
}

TEST_CASE("bad invocations exit 2 without leaving output files") {
  CHECK(run("").exit_code == 2);                      // missing subcommand
  CHECK(run("frobnicate").exit_code == 2);            // unknown subcommand
  CHECK(run("signature --no-such-flag").exit_code == 2);
  CHECK(run("signature --radius 0").exit_code == 2);
  CHECK(run("signature --kappa -1").exit_code == 2);
  CHECK(run("signature --rho 200 --radius 6").exit_code == 2);
  CHECK(run("sweep --lambda-step 0 --radius 6 --rho 4 --kappa 0.03")
            .exit_code == 2);
  CHECK(run("sweep --shape disk --radius 6 --rho 4 --kappa 0.03").exit_code ==
        2);
  CHECK(run("signature --radius 6 --rho 4 --kappa auto --format json")
            .exit_code == 2);
  const auto d = work_dir();
  const auto out = d / "never.csv";
  fs::remove(out);
  const auto r = run("sweep --lambda-min 2 --lambda-max 1 --radius 6 --rho 4 "
                     "--kappa 0.03 --out " +
                     out.string());
  CHECK(r.exit_code == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("config file: sections, overrides, strict whitelist") {
  const auto d = work_dir();
  const auto cfg = d / "run.conf";
  {
    std::ofstream f(cfg);
    f << "# comment line\n"
      << "[model]\n"
      << "mu = -0.25\n"
      << "delta = 0.35\n"
      << "[localizer]\n"
      << "kappa = 0.0327464473189\n"
      << "rho = 4\n"
      << "[geometry]\n"
      << "radius = 6\n";
  }
  const auto r = run("signature --config " + cfg.string());
  CHECK(r.exit_code == 0);
  CHECK(grab("half_sig", r.out) == "-1");

  // explicit flag beats the file value
  const auto rf = run("signature --config " + cfg.string() + " --mu 0.25");
  CHECK(rf.exit_code == 0);
  CHECK(grab("half_sig", rf.out) == "1");

  const auto bad = d / "bad.conf";
  {
    std::ofstream f(bad);
    f << "[model]\nmu = 0.25\nunknown_key = 7\n";
  }
  const auto rb = run("signature --config " + bad.string());
  CHECK(rb.exit_code == 2);
  CHECK(rb.err.find("unknown_key") != std::string::npos);

  const auto dup = d / "dup.conf";
  {
    std::ofstream f(dup);
    f << "[model]\nmu = 0.25\nmu = 0.5\n";
  }
  CHECK(run("signature --config " + dup.string()).exit_code == 2);

  const auto loose = d / "loose.conf";
  {
    std::ofstream f(loose);
    f << "mu = 0.25\n";  // key before any [section]
  }
  CHECK(run("signature --config " + loose.string()).exit_code == 2);

  CHECK(run("signature --config " + (d / "missing.conf").string()).exit_code ==
        2);
}

TEST_CASE("sweep: identical reruns are byte-identical") {
  const auto d = work_dir();
  const auto a = d / "sweep_a.csv";
  const auto b = d / "sweep_b.csv";
  const std::string args =
      "sweep --radius 6 --rho 4 --kappa 0.0327464473189 --lambda-min 0 "
      "--lambda-max 1 --lambda-step 0.5 --samples 2 --seed 9 --out ";
  CHECK(run(args + a.string()).exit_code == 0);
  CHECK(run(args + b.string()).exit_code == 0);
  const auto ta = slurp(a);
  CHECK_FALSE(ta.empty());
  CHECK(ta == slurp(b));
  CHECK(ta.rfind("lambda,mean_half_sig,min_gap_L,mean_gap_L,min_gap_H,"
                 "mean_gap_H,n_closed_L,n_closed_H,samples\n",
                 0) == 0);
}

TEST_CASE("sweep: stdout when no --out, svg plot beside the csv") {
  const auto r = run("sweep --radius 6 --rho 4 --kappa 0.0327 --lambda-min 0 "
                     "--lambda-max 0 --lambda-step 0.5 --samples 1 --seed 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("lambda,", 0) == 0);

  const auto d = work_dir();
  const auto csv = d / "plot.csv";
  const auto svg = d / "plot.svg";
  fs::remove(svg);
  CHECK(run("sweep --radius 6 --rho 4 --kappa 0.0327 --lambda-min 0 "
            "--lambda-max 0.5 --lambda-step 0.5 --samples 1 --seed 3 "
            "--plot svg --out " +
            csv.string())
            .exit_code == 0);
  const auto body = slurp(svg);
  CHECK(body.rfind("<svg", 0) == 0);
  CHECK(body.find("</svg>") != std::string::npos);

  // plot without --out is a config error
  CHECK(run("sweep --radius 6 --rho 4 --kappa 0.0327 --plot svg").exit_code ==
        2);
}

TEST_CASE("spectrum: periodic bulk Hamiltonian and localizer target") {
  const auto rh = run("spectrum --target H --radius 6 --k 4");
  CHECK(rh.exit_code == 0);
  CHECK(grab("n_eigenvalues", rh.out) == "4");
  const double gap = std::stod(grab("min_abs_eig", rh.out));
  CHECK(gap == doctest::Approx(0.25).epsilon(1e-6));

  const auto rl = run("spectrum --target L --radius 6 --rho 4 --kappa auto "
                      "--k 2");
  CHECK(rl.exit_code == 0);
  const double lgap = std::stod(grab("min_abs_eig", rl.out));
  CHECK(lgap == doctest::Approx(0.0227713491457).epsilon(1e-6));

  // CSV payload: index,value rows
  const auto d = work_dir();
  const auto csv = d / "spec.csv";
  CHECK(run("spectrum --target H --radius 6 --k 3 --out " + csv.string())
            .exit_code == 0);
  const auto text = slurp(csv);
  CHECK(text.rfind("index,value\n", 0) == 0);

  CHECK(run("spectrum --target L --bc periodic --radius 6 --rho 4 "
            "--kappa 0.03")
            .exit_code == 2);
}

TEST_CASE("marker: defaults to a compact grid of +1 markers when clean") {
  const auto r = run("marker --radius 9 --kappa 0.0327464473189 --grid 2 "
                     "--spacing 2");
  CHECK(r.exit_code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(line.size() > 4);
    CHECK(line.substr(line.size() - 2) == " 1");
  }
  CHECK(rows == 4);  // one "x y half_sig" line per grid point
}

TEST_CASE("oracle: real-space Chern number close to one on the clean torus") {
  const auto r = run("oracle --radius 8 --margin 1");
  CHECK(r.exit_code == 0);
  const double chern = std::stod(grab("chern", r.out));
  CHECK(chern == doctest::Approx(0.990424).epsilon(1e-3));
  const double resid = std::stod(grab("imag_residual", r.out));
  CHECK(resid < 1e-8);

  CHECK(run("oracle --fermi-mode nonsense --radius 6").exit_code == 2);
}

TEST_CASE("bounds: reports the admissibility data, exit 3 on closed gap") {
  const auto r = run("bounds --radius 6 --rho 4 --kappa 0.0327464473189");
  CHECK(r.exit_code == 0);
  CHECK_FALSE(grab("g", r.out).empty());
  CHECK(grab("kappa_ok", r.out) == "0");  // far above the rigorous bound
  CHECK(grab("rho_ok", r.out) == "1");    // rho_min = 2g/kappa is below 2 here

  // mu = delta = 0 is gapless; the open-model spectrum touches zero
  const auto closed =
      run("bounds --mu 0 --delta 0 --radius 4 --rho 3 --kappa 0.03");
  CHECK(closed.exit_code == 3);
  CHECK_FALSE(closed.err.empty());
}
