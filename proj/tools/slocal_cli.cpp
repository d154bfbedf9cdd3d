/// Command-line front end.
///
/// Subcommands: signature, sweep, spectrum, marker, oracle, bounds.
/// Configuration comes from an optional line-oriented `key = value` file
/// with [sections] (--config PATH) plus flags; flags override the file and
/// unknown file keys are rejected. Exit codes: 0 success, 2 configuration
/// error, 3 numerical failure. Output files are written atomically
/// (temp + rename), so a failing run never leaves a partial file behind.
#include "slocal/experiment.hpp"
#include "slocal/inertia.hpp"
#include "slocal/io.hpp"
#include "slocal/lattice.hpp"
#include "slocal/localizer.hpp"
#include "slocal/models.hpp"
#include "slocal/rng.hpp"
#include "slocal/specflow.hpp"
#include "slocal/threads.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace {

using namespace slocal;

struct Options {
  // model
  double mu = 0.25;
  double delta = -0.35;
  double lambda = 0.0;
  std::uint64_t seed = 1;
  // geometry
  std::string shape = "square";
  int radius = 15;
  std::string bc;  // per-command default; "open" or "periodic"
  // localizer
  std::string kappa = "auto";  // auto | theorem1 | <number>
  double rho = 15.0;
  // sweep
  double lambda_min = 0.0;
  double lambda_max = 8.0;
  double lambda_step = 0.25;
  std::size_t samples = 20;
  std::size_t dense_limit = 4000;
  // marker
  int grid = 3;
  double spacing = 2.0;
  // oracle
  std::string fermi_mode = "strict";
  double margin = 1.0;
  // spectrum
  std::string target = "H";
  std::size_t k_lowest = 0;
  // output / run
  std::string out;
  std::string format = "csv";
  std::string plot;
  std::size_t threads = 0;
  std::string config_path;
};

/// Option handles for "was this flag given?" checks when merging the file.
struct Flags {
  std::map<std::string, CLI::Option*> by_key;  // canonical "section.key"
};

void add_common_options(CLI::App* cmd, Options& o, Flags& fl) {
  fl.by_key["model.mu"] = cmd->add_option("--mu", o.mu, "chemical potential");
  fl.by_key["model.delta"] =
      cmd->add_option("--delta", o.delta, "pairing strength");
  fl.by_key["model.lambda"] =
      cmd->add_option("--lambda", o.lambda, "disorder strength");
  fl.by_key["model.seed"] = cmd->add_option(
      "--seed", o.seed, "disorder seed (sweeps: base seed for the ensemble)");
  fl.by_key["geometry.shape"] =
      cmd->add_option("--shape", o.shape, "square | disk")
          ->check(CLI::IsMember({"square", "disk"}));
  fl.by_key["geometry.radius"] =
      cmd->add_option("--radius", o.radius, "geometry radius");
  fl.by_key["geometry.boundary"] =
      cmd->add_option("--bc", o.bc, "open | periodic")
          ->check(CLI::IsMember({"open", "periodic"}));
  fl.by_key["localizer.kappa"] = cmd->add_option(
      "--kappa", o.kappa, "auto | theorem1 | positive number");
  fl.by_key["localizer.rho"] =
      cmd->add_option("--rho", o.rho, "localizer truncation radius");
  fl.by_key["sweep.dense_limit"] = cmd->add_option(
      "--dense-limit", o.dense_limit, "max dimension for dense eigensolves");
  fl.by_key["output.out"] =
      cmd->add_option("--out", o.out, "output file (written atomically)");
  fl.by_key["output.format"] =
      cmd->add_option("--format", o.format, "output format (csv)");
  fl.by_key["output.plot"] = cmd->add_option(
      "--plot", o.plot, "also emit a static plot (svg); requires --out");
  fl.by_key["run.threads"] = cmd->add_option(
      "--threads", o.threads, "worker cap (0 = logical cores)");
  cmd->add_option("--config", o.config_path,
                  "key = value configuration file with [sections]");
}

/// All keys a configuration file may set, per subcommand scope.
const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model.mu",         "model.delta",      "model.lambda",
      "model.seed",       "geometry.shape",   "geometry.radius",
      "geometry.boundary", "geometry.orbitals", "localizer.kappa",
      "localizer.rho",    "sweep.lambda_min", "sweep.lambda_max",
      "sweep.lambda_step", "sweep.samples",   "sweep.dense_limit",
      "marker.grid",      "marker.spacing",   "oracle.fermi_mode",
      "oracle.margin",    "spectrum.target",  "spectrum.k",
      "output.out",       "output.format",    "output.plot",
      "run.threads"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Parses the file into canonical "section.key" -> value. Rejects unknown
/// keys, keys outside any section, and malformed lines.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::map<std::string, std::string> values;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw config_error(path + ":" + std::to_string(lineno) +
                           ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw config_error(path + ":" + std::to_string(lineno) +
                           ": empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw config_error(path + ":" + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw config_error(path + ":" + std::to_string(lineno) + ": key '" +
                         key + "' outside any [section]");
    const std::string canon = section + "." + key;
    if (!known_keys().count(canon))
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": unknown key '" + canon + "'");
    if (values.count(canon))
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": duplicate key '" + canon + "'");
    values[canon] = value;
  }
  return values;
}

template <typename T>
T parse_number(const std::string& canon, const std::string& value) {
  try {
    std::size_t pos = 0;
    if constexpr (std::is_floating_point_v<T>) {
      const double v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("trailing junk");
      return static_cast<T>(v);
    } else if constexpr (std::is_signed_v<T>) {
      const long long v = std::stoll(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("trailing junk");
      return static_cast<T>(v);
    } else {
      const unsigned long long v = std::stoull(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("trailing junk");
      return static_cast<T>(v);
    }
  } catch (const std::exception&) {
    throw config_error("config key '" + canon + "': cannot parse '" + value +
                       "'");
  }
}

/// Applies file values to every field whose flag was not given on the
/// command line. Returns the parsed file map so the caller can tell which
/// keys were set at all (by flag or file).
std::map<std::string, std::string> merge_config_file(Options& o,
                                                     const Flags& fl) {
  if (o.config_path.empty()) return {};
  const auto values = parse_config_file(o.config_path);
  const auto given = [&fl](const std::string& canon) {
    const auto it = fl.by_key.find(canon);
    return it != fl.by_key.end() && it->second != nullptr &&
           it->second->count() > 0;
  };
  for (const auto& [canon, value] : values) {
    if (given(canon)) continue;  // flags override the file
    if (canon == "model.mu") o.mu = parse_number<double>(canon, value);
    else if (canon == "model.delta") o.delta = parse_number<double>(canon, value);
    else if (canon == "model.lambda") o.lambda = parse_number<double>(canon, value);
    else if (canon == "model.seed") o.seed = parse_number<std::uint64_t>(canon, value);
    else if (canon == "geometry.shape") o.shape = value;
    else if (canon == "geometry.radius") o.radius = parse_number<int>(canon, value);
    else if (canon == "geometry.boundary") o.bc = value;
    else if (canon == "geometry.orbitals") {
      if (parse_number<int>(canon, value) != 2)
        throw config_error("geometry.orbitals: only 2 is supported");
    } else if (canon == "localizer.kappa") o.kappa = value;
    else if (canon == "localizer.rho") o.rho = parse_number<double>(canon, value);
    else if (canon == "sweep.lambda_min") o.lambda_min = parse_number<double>(canon, value);
    else if (canon == "sweep.lambda_max") o.lambda_max = parse_number<double>(canon, value);
    else if (canon == "sweep.lambda_step") o.lambda_step = parse_number<double>(canon, value);
    else if (canon == "sweep.samples") o.samples = parse_number<std::size_t>(canon, value);
    else if (canon == "sweep.dense_limit") o.dense_limit = parse_number<std::size_t>(canon, value);
    else if (canon == "marker.grid") o.grid = parse_number<int>(canon, value);
    else if (canon == "marker.spacing") o.spacing = parse_number<double>(canon, value);
    else if (canon == "oracle.fermi_mode") o.fermi_mode = value;
    else if (canon == "oracle.margin") o.margin = parse_number<double>(canon, value);
    else if (canon == "spectrum.target") o.target = value;
    else if (canon == "spectrum.k") o.k_lowest = parse_number<std::size_t>(canon, value);
    else if (canon == "output.out") o.out = value;
    else if (canon == "output.format") o.format = value;
    else if (canon == "output.plot") o.plot = value;
    else if (canon == "run.threads") o.threads = parse_number<std::size_t>(canon, value);
  }
  return values;
}

void validate_common(const Options& o) {
  if (o.format != "csv")
    throw config_error("unsupported --format '" + o.format +
                       "' (only csv is available)");
  if (!o.plot.empty()) {
    if (o.plot != "svg")
      throw config_error("unsupported --plot '" + o.plot +
                         "' (only svg is available)");
    if (o.out.empty())
      throw config_error("--plot requires --out (the plot lands next to it)");
  }
  if (o.shape != "square" && o.shape != "disk")
    throw config_error("shape must be square or disk");
  if (!o.bc.empty() && o.bc != "open" && o.bc != "periodic")
    throw config_error("boundary must be open or periodic");
  if (o.radius < 1) throw config_error("radius must be >= 1");
}

Shape shape_of(const Options& o) {
  return o.shape == "square" ? Shape::square : Shape::disk;
}

LatticeGeometry geometry_of(const Options& o, Boundary bc) {
  return {shape_of(o), o.radius, bc, 2};
}

SparseHermitian build_model(const Options& o, const LatticeGeometry& geom) {
  const ModelParams params{o.mu, o.delta, o.lambda};
  if (o.lambda == 0.0) return build_clean_pip(params, geom);
  return build_dirty(params, geom, sample_disorder(geom, o.seed));
}

/// Resolves the kappa policy string. For "auto" and "theorem1" the clean
/// model at the configured size is measured (the sweep path shares this via
/// resolve_kappa on its SweepConfig).
double resolve_kappa_option(const Options& o) {
  if (o.kappa != "auto" && o.kappa != "theorem1") {
    const double v = parse_number<double>("localizer.kappa", o.kappa);
    if (!(v > 0.0)) throw config_error("kappa must be positive");
    return v;
  }
  if (shape_of(o) != Shape::square)
    throw config_error("kappa policy '" + o.kappa +
                       "' needs the square geometry (its bulk reference is "
                       "the periodic companion); pass a numeric --kappa for "
                       "disks");
  SweepConfig sc;
  sc.mu = o.mu;
  sc.delta = o.delta;
  sc.lambda_grid = {0.0};
  sc.samples = 1;
  sc.rho = o.rho;
  sc.radius = o.radius;
  sc.kappa_policy = o.kappa == "auto" ? KappaPolicy::automatic
                                      : KappaPolicy::theorem1;
  sc.dense_limit = o.dense_limit;
  return resolve_kappa(sc);
}

void write_outputs(const Options& o, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows,
                   const std::vector<SvgSeries>& plot_series,
                   const std::string& plot_title, const std::string& x_label,
                   const std::string& y_label) {
  if (o.out.empty()) return;
  write_text_atomic(o.out, render_csv(header, rows));
  if (!o.plot.empty()) {
    const auto dot = o.out.find_last_of('.');
    const std::string stem =
        dot == std::string::npos ? o.out : o.out.substr(0, dot);
    write_text_atomic(stem + ".svg",
                      render_scatter_svg(plot_title, x_label, y_label,
                                         plot_series));
  }
}

// ---------------------------------------------------------------- signature

int cmd_signature(const Options& o) {
  validate_common(o);
  if (!o.plot.empty())
    throw config_error("--plot is only available for spectrum and sweep");
  if (!o.bc.empty() && o.bc != "open")
    throw config_error("signature uses open boundaries (the localizer needs "
                       "a genuine edge)");
  const auto geom = geometry_of(o, Boundary::open);
  const auto h = build_model(o, geom);
  const auto d0 = build_dirac(geom, {0.0, 0.0});
  const double kappa = resolve_kappa_option(o);
  const LocalizerParams params{kappa, o.rho, {0.0, 0.0}};

  const auto l = assemble_even_localizer(h, d0, params);
  const auto f = LDLFactor::compute(l, default_pivot_tol(l));
  if (f.inertia().n_zero > 0)
    throw gap_closed_error("localizer is singular at tolerance (gap closed); "
                           "the half-signature is undefined here");
  const double half_sig = 0.5 * double(f.inertia().signature());
  const double gap_l = gap_from_factor(f).gap;

  BoundsReport rep{};
  bool have_bounds = true;
  try {
    // Advisory print: 1e-8 on the certified gap is ample here and much
    // cheaper than the default; `bounds` remains the full-precision tool.
    rep = check_bounds(h, d0, params, 1e-8);
  } catch (const gap_closed_error&) {
    have_bounds = false;  // H itself is singular; the invariant may still be
                          // fine (mobility regime), so this is not fatal
  }

  std::printf("half_sig = %s\n", format_sig(half_sig).c_str());
  std::printf("gap_L = %s\n", format_sig(gap_l).c_str());
  std::printf("kappa = %s\n", format_sig(kappa).c_str());
  std::printf("rho = %s\n", format_sig(o.rho).c_str());
  if (have_bounds) {
    std::printf("g = %s\n", format_sig(rep.g).c_str());
    std::printf("norm_H = %s\n", format_sig(rep.norm_H).c_str());
    std::printf("norm_comm = %s\n", format_sig(rep.norm_comm).c_str());
    std::printf("kappa_max = %s\n", format_sig(rep.kappa_max).c_str());
    std::printf("rho_min = %s\n", format_sig(rep.rho_min).c_str());
    std::printf("kappa_ok = %d\n", rep.kappa_ok ? 1 : 0);
    std::printf("rho_ok = %d\n", rep.rho_ok ? 1 : 0);
  } else {
    std::printf("g = nan (H singular at tolerance; bounds unavailable)\n");
  }

  const std::vector<std::string> header{
      "half_sig", "gap_L",     "kappa",   "rho",      "g",      "norm_H",
      "norm_comm", "kappa_max", "rho_min", "kappa_ok", "rho_ok"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<std::string>> rows{
      {format_sig(half_sig), format_sig(gap_l), format_sig(kappa),
       format_sig(o.rho), format_sig(have_bounds ? rep.g : nan),
       format_sig(have_bounds ? rep.norm_H : nan),
       format_sig(have_bounds ? rep.norm_comm : nan),
       format_sig(have_bounds ? rep.kappa_max : nan),
       format_sig(have_bounds ? rep.rho_min : nan),
       have_bounds && rep.kappa_ok ? "1" : "0",
       have_bounds && rep.rho_ok ? "1" : "0"}};
  write_outputs(o, header, rows, {}, "", "", "");
  return 0;
}

// -------------------------------------------------------------------- sweep

int cmd_sweep(const Options& o) {
  validate_common(o);
  if (shape_of(o) != Shape::square)
    throw config_error("sweep needs the square geometry (open localizer + "
                       "periodic companion pair)");
  if (!(o.lambda_step > 0.0))
    throw config_error("sweep: lambda_step must be positive");
  if (o.lambda_max < o.lambda_min)
    throw config_error("sweep: lambda_max < lambda_min");

  SweepConfig sc;
  sc.mu = o.mu;
  sc.delta = o.delta;
  sc.samples = o.samples;
  sc.base_seed = o.seed;
  sc.rho = o.rho;
  sc.radius = o.radius;
  sc.dense_limit = o.dense_limit;
  sc.n_threads = o.threads;
  if (o.kappa == "auto") {
    sc.kappa_policy = KappaPolicy::automatic;
  } else if (o.kappa == "theorem1") {
    sc.kappa_policy = KappaPolicy::theorem1;
  } else {
    sc.kappa_policy = KappaPolicy::fixed;
    sc.kappa_value = parse_number<double>("localizer.kappa", o.kappa);
  }
  const auto n_steps =
      static_cast<std::size_t>((o.lambda_max - o.lambda_min) / o.lambda_step +
                               1e-9);
  for (std::size_t i = 0; i <= n_steps; ++i)
    sc.lambda_grid.push_back(o.lambda_min + double(i) * o.lambda_step);

  const auto rows = run_sweep(sc);

  bool degraded = false;
  for (const auto& r : rows) {
    if (r.n_failed > 0)
      std::fprintf(stderr, "lambda=%s: %zu of %zu samples failed\n",
                   format_sig(r.lambda).c_str(), r.n_failed, r.samples);
    if (double(r.samples - r.n_failed) < 0.9 * double(r.samples))
      degraded = true;
  }

  const std::string csv = render_sweep_csv(rows);
  if (!o.out.empty()) {
    write_text_atomic(o.out, csv);
    if (!o.plot.empty()) {
      SvgSeries sig{"mean_half_sig", {}, {}, true};
      SvgSeries gl{"min_gap_L", {}, {}, true};
      SvgSeries gh{"min_gap_H", {}, {}, true};
      for (const auto& r : rows) {
        sig.x.push_back(r.lambda);
        sig.y.push_back(r.mean_half_sig);
        gl.x.push_back(r.lambda);
        gl.y.push_back(r.min_gap_L);
        gh.x.push_back(r.lambda);
        gh.y.push_back(r.min_gap_H);
      }
      const auto dot = o.out.find_last_of('.');
      const std::string stem =
          dot == std::string::npos ? o.out : o.out.substr(0, dot);
      write_text_atomic(stem + ".svg",
                        render_scatter_svg("disorder sweep", "lambda", "value",
                                           {sig, gl, gh}));
    }
  } else {
    std::fputs(csv.c_str(), stdout);
  }
  std::fprintf(stderr, "sweep: %zu rows, %zu samples each\n", rows.size(),
               sc.samples);
  if (degraded) {
    std::fprintf(stderr,
                 "sweep: a row lost more than 10%% of its samples to "
                 "numerical failures\n");
    return 3;
  }
  return 0;
}

// ----------------------------------------------------------------- spectrum

int cmd_spectrum(const Options& o) {
  validate_common(o);
  if (o.target != "H" && o.target != "L")
    throw config_error("spectrum: --target must be H or L");

  std::vector<double> values;
  if (o.target == "H") {
    const Boundary bc = (o.bc.empty() || o.bc == "periodic")
                            ? Boundary::periodic
                            : Boundary::open;
    if (bc == Boundary::periodic && shape_of(o) != Shape::square)
      throw config_error("periodic boundaries need the square geometry");
    const auto geom = geometry_of(o, bc);
    values = export_spectrum(build_model(o, geom), o.k_lowest, o.dense_limit);
  } else {
    if (!o.bc.empty() && o.bc != "open")
      throw config_error("spectrum of L uses open boundaries");
    const auto geom = geometry_of(o, Boundary::open);
    const auto h = build_model(o, geom);
    const auto d0 = build_dirac(geom, {0.0, 0.0});
    const double kappa = resolve_kappa_option(o);
    const auto l = assemble_even_localizer(h, d0, {kappa, o.rho, {0.0, 0.0}});
    values = export_spectrum(l, o.k_lowest, o.dense_limit);
  }

  double min_abs = std::numeric_limits<double>::infinity();
  for (double v : values) min_abs = std::min(min_abs, std::abs(v));
  std::printf("n_eigenvalues = %zu\n", values.size());
  std::printf("min_abs_eig = %s\n", format_sig(min_abs).c_str());

  std::vector<std::vector<std::string>> rows;
  rows.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    rows.push_back({std::to_string(i), format_sig(values[i])});
  SvgSeries pts{"eigenvalues", {}, {}, false};
  for (std::size_t i = 0; i < values.size(); ++i) {
    pts.x.push_back(double(i));
    pts.y.push_back(values[i]);
  }
  write_outputs(o, {"index", "value"}, rows, {pts},
                std::string("spectrum of ") + o.target, "index", "eigenvalue");
  return 0;
}

// ------------------------------------------------------------------- marker

int cmd_marker(const Options& o) {
  validate_common(o);
  if (!o.plot.empty())
    throw config_error("--plot is only available for spectrum and sweep");
  if (o.grid < 1 || o.grid > 99)
    throw config_error("marker: grid must be in [1, 99]");
  if (!(o.spacing > 0.0)) throw config_error("marker: spacing must be > 0");
  if (!o.bc.empty() && o.bc != "open")
    throw config_error("marker uses open boundaries");
  const auto geom = geometry_of(o, Boundary::open);
  const auto h = build_model(o, geom);
  const double kappa = resolve_kappa_option(o);

  std::vector<std::array<double, 2>> centers;
  const double off = 0.5 * double(o.grid - 1);
  for (int i = 0; i < o.grid; ++i)
    for (int j = 0; j < o.grid; ++j)
      centers.push_back({(double(i) - off) * o.spacing,
                         (double(j) - off) * o.spacing});

  const auto points = local_marker_map(h, geom, kappa, o.rho, centers);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(points.size());
  for (const auto& p : points) {
    std::printf("%s %s %s\n", format_sig(p.center[0]).c_str(),
                format_sig(p.center[1]).c_str(),
                format_sig(p.half_sig).c_str());
    rows.push_back({format_sig(p.center[0]), format_sig(p.center[1]),
                    format_sig(p.half_sig)});
  }
  write_outputs(o, {"x", "y", "half_sig"}, rows, {}, "", "", "");
  return 0;
}

// ------------------------------------------------------------------- oracle

int cmd_oracle(const Options& o) {
  validate_common(o);
  if (!o.plot.empty())
    throw config_error("--plot is only available for spectrum and sweep");
  if (o.fermi_mode != "strict" && o.fermi_mode != "mobility")
    throw config_error("oracle: fermi_mode must be strict or mobility");
  const Boundary bc =
      (o.bc.empty() || o.bc == "periodic") ? Boundary::periodic
                                           : Boundary::open;
  if (bc == Boundary::periodic && shape_of(o) != Shape::square)
    throw config_error("periodic boundaries need the square geometry");
  const auto geom = geometry_of(o, bc);
  const auto h = build_model(o, geom);
  const auto proj = fermi_projection(h, o.fermi_mode == "strict"
                                            ? FermiMode::strict
                                            : FermiMode::mobility);

  // Region: every site on the torus; interior sites (margin away from the
  // edge) on open geometries.
  const auto sites = enumerate_sites(geom);
  std::vector<Site> region;
  if (bc == Boundary::periodic) {
    region = sites;
  } else {
    for (const auto& s : sites) {
      const double dist =
          geom.shape == Shape::disk
              ? double(geom.radius) - std::hypot(double(s.n1), double(s.n2))
              : double(geom.radius) -
                    std::max(std::abs(double(s.n1)), std::abs(double(s.n2)));
      if (dist >= o.margin) region.push_back(s);
    }
    if (region.empty())
      throw config_error("oracle: margin leaves no interior sites");
  }

  const auto ch = chern_real_space(proj, geom, region, o.margin);
  std::printf("chern = %s\n", format_sig(ch.value).c_str());
  std::printf("imag_residual = %s\n", format_sig(ch.imag_residual).c_str());
  write_outputs(o, {"chern", "imag_residual"},
                {{format_sig(ch.value), format_sig(ch.imag_residual)}}, {}, "",
                "", "");
  return 0;
}

// ------------------------------------------------------------------- bounds

int cmd_bounds(const Options& o) {
  validate_common(o);
  if (!o.plot.empty())
    throw config_error("--plot is only available for spectrum and sweep");
  if (!o.bc.empty() && o.bc != "open")
    throw config_error("bounds are stated for the open-boundary model");
  const auto geom = geometry_of(o, Boundary::open);
  const auto h = build_model(o, geom);
  const auto d0 = build_dirac(geom, {0.0, 0.0});
  const double kappa = resolve_kappa_option(o);
  const auto rep = check_bounds(h, d0, {kappa, o.rho, {0.0, 0.0}});

  std::printf("g = %s\n", format_sig(rep.g).c_str());
  std::printf("norm_H = %s\n", format_sig(rep.norm_H).c_str());
  std::printf("norm_comm = %s\n", format_sig(rep.norm_comm).c_str());
  std::printf("kappa = %s\n", format_sig(kappa).c_str());
  std::printf("kappa_max = %s\n", format_sig(rep.kappa_max).c_str());
  std::printf("rho = %s\n", format_sig(o.rho).c_str());
  std::printf("rho_min = %s\n", format_sig(rep.rho_min).c_str());
  std::printf("kappa_ok = %d\n", rep.kappa_ok ? 1 : 0);
  std::printf("rho_ok = %d\n", rep.rho_ok ? 1 : 0);
  write_outputs(o,
                {"g", "norm_H", "norm_comm", "kappa", "kappa_max", "rho",
                 "rho_min", "kappa_ok", "rho_ok"},
                {{format_sig(rep.g), format_sig(rep.norm_H),
                  format_sig(rep.norm_comm), format_sig(kappa),
                  format_sig(rep.kappa_max), format_sig(o.rho),
                  format_sig(rep.rho_min), rep.kappa_ok ? "1" : "0",
                  rep.rho_ok ? "1" : "0"}},
                {}, "", "", "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  slocal::pin_blas_single_threaded();

  CLI::App app{"slocal: topological invariants from the spectral localizer"};
  app.require_subcommand(1);

  Options o;
  std::map<std::string, Flags> flags;
  auto* sig = app.add_subcommand(
      "signature", "half-signature of the localizer for one sample");
  add_common_options(sig, o, flags["signature"]);
  auto* sweep = app.add_subcommand(
      "sweep", "disorder-ensemble sweep over a lambda grid");
  add_common_options(sweep, o, flags["sweep"]);
  flags["sweep"].by_key["sweep.lambda_min"] =
      sweep->add_option("--lambda-min", o.lambda_min, "grid start");
  flags["sweep"].by_key["sweep.lambda_max"] =
      sweep->add_option("--lambda-max", o.lambda_max, "grid end (inclusive)");
  flags["sweep"].by_key["sweep.lambda_step"] =
      sweep->add_option("--lambda-step", o.lambda_step, "grid step");
  flags["sweep"].by_key["sweep.samples"] =
      sweep->add_option("--samples", o.samples, "disorder samples per point");
  auto* spectrum = app.add_subcommand(
      "spectrum", "eigenvalues of H (periodic) or the localizer (open)");
  add_common_options(spectrum, o, flags["spectrum"]);
  flags["spectrum"].by_key["spectrum.target"] =
      spectrum->add_option("--target", o.target, "H | L")
          ->check(CLI::IsMember({"H", "L"}));
  flags["spectrum"].by_key["spectrum.k"] = spectrum->add_option(
      "--k", o.k_lowest, "keep only the k eigenvalues nearest zero (0 = all)");
  auto* marker = app.add_subcommand(
      "marker", "local topological marker on a center grid");
  add_common_options(marker, o, flags["marker"]);
  flags["marker"].by_key["marker.grid"] =
      marker->add_option("--grid", o.grid, "center grid side length");
  flags["marker"].by_key["marker.spacing"] =
      marker->add_option("--spacing", o.spacing, "center grid spacing");
  auto* oracle = app.add_subcommand(
      "oracle", "real-space Chern number of the Fermi projection");
  add_common_options(oracle, o, flags["oracle"]);
  flags["oracle"].by_key["oracle.fermi_mode"] =
      oracle->add_option("--fermi-mode", o.fermi_mode, "strict | mobility")
          ->check(CLI::IsMember({"strict", "mobility"}));
  flags["oracle"].by_key["oracle.margin"] = oracle->add_option(
      "--margin", o.margin, "edge margin for the averaging region (open bc)");
  auto* bounds = app.add_subcommand(
      "bounds", "certified parameter bounds for the localizer");
  add_common_options(bounds, o, flags["bounds"]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  }

  try {
    if (sig->parsed()) {
      merge_config_file(o, flags["signature"]);
      return cmd_signature(o);
    }
    if (sweep->parsed()) {
      merge_config_file(o, flags["sweep"]);
      return cmd_sweep(o);
    }
    if (spectrum->parsed()) {
      merge_config_file(o, flags["spectrum"]);
      return cmd_spectrum(o);
    }
    if (marker->parsed()) {
      const auto file_values = merge_config_file(o, flags["marker"]);
      const bool rho_set =
          flags["marker"].by_key.at("localizer.rho")->count() > 0 ||
          file_values.count("localizer.rho") > 0;
      if (!rho_set) o.rho = 6.0;  // marker windows must fit inside the sample
      return cmd_marker(o);
    }
    if (oracle->parsed()) {
      merge_config_file(o, flags["oracle"]);
      return cmd_oracle(o);
    }
    if (bounds->parsed()) {
      merge_config_file(o, flags["bounds"]);
      return cmd_bounds(o);
    }
    throw slocal::config_error("no subcommand given");
  } catch (const slocal::config_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const slocal::numerical_failure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
