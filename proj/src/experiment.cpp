#include "slocal/experiment.hpp"

#include "slocal/inertia.hpp"
#include "slocal/io.hpp"
#include "slocal/localizer.hpp"
#include "slocal/rng.hpp"
#include "slocal/threads.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace slocal {

namespace {

constexpr double kGapTol = 1e-8;
// kappa only needs a handful of accurate digits (the admissible plateau
// spans tens of percent), so its certified gap measurement can run at a
// looser bisection tolerance and save factorizations.
constexpr double kKappaGapTol = 1e-6;

LatticeGeometry open_geometry(const SweepConfig& c) {
  return {Shape::square, c.radius, Boundary::open, 2};
}

LatticeGeometry periodic_geometry(const SweepConfig& c) {
  return {Shape::square, c.radius, Boundary::periodic, 2};
}

/// Everything measured on one disorder realization.
struct SampleStats {
  double half_sig = 0.0;
  bool closed_L = false;
  bool closed_H = false;
  bool failed = false;
  double gap_L = 0.0;
  double gap_H = 0.0;
};

SampleStats run_one(const SweepConfig& c, double lambda, std::uint64_t seed,
                    const LatticeGeometry& geom_open,
                    const LatticeGeometry& geom_per, const SparseComplex& d0,
                    double kappa) {
  SampleStats st;
  const ModelParams params{c.mu, c.delta, lambda};
  try {
    const auto h_open =
        build_dirty(params, geom_open, sample_disorder(geom_open, seed));
    const auto l =
        assemble_even_localizer(h_open, d0, {kappa, c.rho, {0.0, 0.0}});
    const auto f = LDLFactor::compute(l, default_pivot_tol(l));
    if (f.inertia().n_zero > 0) {
      st.closed_L = true;  // gap_L stays 0
    } else {
      st.half_sig = 0.5 * static_cast<double>(f.inertia().signature());
      st.gap_L = gap_from_factor(f, kGapTol).gap;
    }

    const auto h_per =
        build_dirty(params, geom_per, sample_disorder(geom_per, seed));
    const auto gh = spectral_gap(h_per, GapMethod::inverse, kGapTol);
    st.gap_H = gh.gap;
    st.closed_H = gh.gap == 0.0;
  } catch (const numerical_failure&) {
    st.failed = true;
  }
  return st;
}

SweepRow reduce_row(double lambda, std::size_t samples,
                    const std::vector<SampleStats>& stats) {
  SweepRow row;
  row.lambda = lambda;
  row.samples = samples;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double sum_sig = 0.0, sum_gl = 0.0, sum_gh = 0.0;
  double min_gl = std::numeric_limits<double>::infinity(), min_gh = min_gl;
  std::size_t n_sig = 0, n_gap = 0;
  std::map<double, std::size_t> hist;
  for (const auto& st : stats) {
    if (st.failed) {
      ++row.n_failed;
      continue;
    }
    ++n_gap;
    sum_gl += st.gap_L;
    sum_gh += st.gap_H;
    min_gl = std::min(min_gl, st.gap_L);
    min_gh = std::min(min_gh, st.gap_H);
    if (st.closed_L) {
      ++row.n_gap_closed_L;
    } else {
      ++n_sig;
      sum_sig += st.half_sig;
      ++hist[st.half_sig];
    }
    if (st.closed_H) ++row.n_gap_closed_H;
  }
  row.mean_half_sig = n_sig ? sum_sig / double(n_sig) : nan;
  row.mean_gap_L = n_gap ? sum_gl / double(n_gap) : nan;
  row.mean_gap_H = n_gap ? sum_gh / double(n_gap) : nan;
  row.min_gap_L = n_gap ? min_gl : nan;
  row.min_gap_H = n_gap ? min_gh : nan;
  row.half_sig_histogram.assign(hist.begin(), hist.end());
  return row;
}

std::array<double, 5> five_number(std::vector<double> v) {
  std::array<double, 5> q{};
  if (v.empty()) {
    q.fill(std::numeric_limits<double>::quiet_NaN());
    return q;
  }
  std::sort(v.begin(), v.end());
  const auto at = [&](double p) {
    const double x = p * double(v.size() - 1);
    const auto lo = static_cast<std::size_t>(x);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = x - double(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
  };
  q = {v.front(), at(0.25), at(0.5), at(0.75), v.back()};
  return q;
}

}  // namespace

void validate(const SweepConfig& config) {
  if (config.lambda_grid.empty())
    throw config_error("sweep: lambda_grid must be nonempty");
  for (std::size_t i = 1; i < config.lambda_grid.size(); ++i)
    if (!(config.lambda_grid[i] > config.lambda_grid[i - 1]))
      throw config_error("sweep: lambda_grid must be strictly increasing");
  if (config.samples == 0) throw config_error("sweep: samples must be >= 1");
  if (config.radius < 1) throw config_error("sweep: radius must be >= 1");
  if (!(config.rho >= 1.0))
    throw config_error("sweep: rho must be >= 1");
  const double max_mod = std::hypot(double(config.radius),
                                    double(config.radius));
  if (config.rho > max_mod)
    throw config_error("sweep: rho exceeds the open geometry");
  if (config.kappa_policy == KappaPolicy::fixed && !(config.kappa_value > 0.0))
    throw config_error("sweep: fixed kappa must be positive");
  if (config.dense_limit == 0)
    throw config_error("sweep: dense_limit must be >= 1");
  validate(open_geometry(config));
  validate(periodic_geometry(config));
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 32; ++i) grid.push_back(0.25 * double(i));
  return grid;
}

double resolve_kappa(const SweepConfig& config) {
  validate(config);
  if (config.kappa_policy == KappaPolicy::fixed) return config.kappa_value;

  const auto geom_open = open_geometry(config);
  const ModelParams clean{config.mu, config.delta, 0.0};
  const auto h_open = build_clean_pip(clean, geom_open);
  const auto d0 = build_dirac(geom_open, {0.0, 0.0});
  const double norm_comm =
      operator_norm(commutator(d0, SparseComplex::from_hermitian(h_open)));

  if (config.kappa_policy == KappaPolicy::automatic) {
    // Bulk invertibility gap from the periodic companion: the open model's
    // own gap is dominated by edge modes and would starve kappa.
    const auto h_per = build_clean_pip(clean, periodic_geometry(config));
    const auto g = spectral_gap(h_per, GapMethod::bisection, kKappaGapTol);
    if (g.gap == 0.0)
      throw gap_closed_error("automatic kappa: clean bulk gap is closed");
    return default_kappa(g.gap, norm_comm);
  }

  // theorem1: fully certified bound, measured on the open model itself.
  const auto g = spectral_gap(h_open, GapMethod::bisection, kKappaGapTol);
  if (g.gap == 0.0)
    throw gap_closed_error("theorem1 kappa: clean open-model gap is closed");
  const double norm_h = operator_norm(SparseComplex::from_hermitian(h_open));
  const double denom = 12.0 * norm_h * norm_comm;
  if (!(denom > 0.0))
    throw numerical_failure("theorem1 kappa: degenerate norms");
  return g.gap * g.gap * g.gap / denom;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  validate(config);
  const double kappa = resolve_kappa(config);
  const auto geom_open = open_geometry(config);
  const auto geom_per = periodic_geometry(config);
  const auto d0 = build_dirac(geom_open, {0.0, 0.0});
  const std::size_t threads =
      config.n_threads ? config.n_threads : default_threads();

  // One flat task list over (lambda, sample) so the pool stays busy across
  // lambda boundaries; the reduction regroups by lambda in order.
  const std::size_t n_lambda = config.lambda_grid.size();
  const std::size_t total = n_lambda * config.samples;
  auto stats = parallel_map<SampleStats>(total, threads, [&](std::size_t t) {
    const std::size_t li = t / config.samples;
    const std::size_t si = t % config.samples;
    const std::uint64_t seed = rng::sample_seed(config.base_seed, li, si);
    return run_one(config, config.lambda_grid[li], seed, geom_open, geom_per,
                   d0, kappa);
  });

  std::vector<SweepRow> rows;
  rows.reserve(n_lambda);
  for (std::size_t li = 0; li < n_lambda; ++li) {
    const std::vector<SampleStats> slice(
        stats.begin() + long(li * config.samples),
        stats.begin() + long((li + 1) * config.samples));
    rows.push_back(reduce_row(config.lambda_grid[li], config.samples, slice));
  }
  return rows;
}

std::string render_sweep_csv(const std::vector<SweepRow>& rows) {
  const std::vector<std::string> header{
      "lambda",     "mean_half_sig", "min_gap_L", "mean_gap_L", "min_gap_H",
      "mean_gap_H", "n_closed_L",    "n_closed_H", "samples"};
  std::vector<std::vector<std::string>> body;
  body.reserve(rows.size());
  for (const auto& r : rows)
    body.push_back({format_sig(r.lambda), format_sig(r.mean_half_sig),
                    format_sig(r.min_gap_L), format_sig(r.mean_gap_L),
                    format_sig(r.min_gap_H), format_sig(r.mean_gap_H),
                    std::to_string(r.n_gap_closed_L),
                    std::to_string(r.n_gap_closed_H),
                    std::to_string(r.samples)});
  return render_csv(header, body);
}

std::vector<double> export_spectrum(const SparseHermitian& op,
                                    std::size_t k_lowest,
                                    std::size_t dense_limit) {
  if (op.dim() > dense_limit)
    throw config_error("export_spectrum: dimension " +
                       std::to_string(op.dim()) + " exceeds dense_limit " +
                       std::to_string(dense_limit));
  auto w = dense_eigenvalues(op);
  if (k_lowest == 0 || k_lowest >= w.size()) return w;
  std::sort(w.begin(), w.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  w.resize(k_lowest);
  std::sort(w.begin(), w.end());
  return w;
}

MobilityReport mobility_probe(const SweepConfig& config, double lambda) {
  validate(config);
  if (!(lambda >= 0.0)) throw config_error("mobility_probe: lambda < 0");
  const double kappa = resolve_kappa(config);
  const auto geom_open = open_geometry(config);
  const auto geom_per = periodic_geometry(config);
  const auto d0 = build_dirac(geom_open, {0.0, 0.0});
  const std::size_t threads =
      config.n_threads ? config.n_threads : default_threads();

  auto stats =
      parallel_map<SampleStats>(config.samples, threads, [&](std::size_t si) {
        const std::uint64_t seed = rng::sample_seed(config.base_seed, 0, si);
        return run_one(config, lambda, seed, geom_open, geom_per, d0, kappa);
      });

  MobilityReport rep;
  rep.samples = config.samples;
  std::vector<double> gaps_h, gaps_l;
  std::map<double, std::size_t> hist;
  for (const auto& st : stats) {
    if (st.failed) {
      ++rep.n_failed;
      continue;
    }
    gaps_h.push_back(st.gap_H);
    gaps_l.push_back(st.gap_L);
    if (st.closed_L)
      ++rep.n_gap_closed_L;
    else
      ++hist[st.half_sig];
    if (st.closed_H) ++rep.n_gap_closed_H;
  }
  rep.gap_H_quantiles = five_number(std::move(gaps_h));
  rep.localizer_gap_quantiles = five_number(std::move(gaps_l));
  std::size_t best = 0;
  for (const auto& [value, count] : hist)
    if (count > best) {
      best = count;
      rep.half_sig_mode = value;
    }
  return rep;
}

}  // namespace slocal
