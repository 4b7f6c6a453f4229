#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "critwin/configuration.hpp"
#include "critwin/degree_sequence.hpp"
#include "critwin/errors.hpp"
#include "critwin/exploration.hpp"
#include "critwin/format.hpp"
#include "critwin/rng.hpp"

namespace critwin {

enum class Family { mixed13, heavy_vertex, three_point, file };
enum class Regime { fixed, inside, below, above };
enum class SampleMode { multigraph, simple };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::mixed13: return "mixed13";
    case Family::heavy_vertex: return "heavy_vertex";
    case Family::three_point: return "three_point";
    case Family::file: return "file";
  }
  return "?";
}

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::fixed: return "fixed";
    case Regime::inside: return "inside";
    case Regime::below: return "below";
    case Regime::above: return "above";
  }
  return "?";
}

inline std::string_view to_string(SampleMode m) {
  return m == SampleMode::multigraph ? "multigraph" : "simple";
}

struct FamilyParams {
  Regime regime = Regime::fixed;
  double q_target = 0.0;     // used when regime == fixed
  double coefficient = 1.0;  // window coefficient for the other regimes
  // heavy_vertex: fixed delta if positive, otherwise ceil(n^delta_exponent)
  std::int64_t delta = 0;
  double delta_exponent = 0.4;
  // three_point
  std::int64_t d_high = 10;
  std::int64_t count_high = 1;
  // file
  std::vector<std::int64_t> degrees;
  std::string source;
};

struct ExperimentSpec {
  Family family = Family::mixed13;
  FamilyParams params;
  std::vector<std::size_t> n_values;
  int replicates = 1;
  std::uint64_t master_seed = 0;
  double zeta = 0.05;
  // Record each exploration's trace up to the concentration horizons and
  // check the Q_t / R_t concentration bounds (multigraph mode only).
  bool record_traces = true;
  SampleMode mode = SampleMode::multigraph;
  int max_attempts = kDefaultMaxAttempts;
  int workers = 1;
  // Measure wall time per replicate. Off by default so output is reproducible.
  bool timing = false;
};

struct ReplicateRecord {
  std::size_t n = 0;
  double q = 0;
  double r = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::int64_t cmax = 0;
  std::int64_t second_cmax = 0;
  std::int64_t complex_components = 0;
  std::int64_t max_excess = 0;
  std::optional<bool> conc_q_pass;
  std::optional<bool> conc_r_pass;
  int attempts = 1;
  double wall_ms = 0;
};

struct SizeSummary {
  std::size_t n = 0;
  double q_target = 0;
  double q = 0;
  double r = 0;
  std::int64_t max_degree = 0;
  ConditionDReport condition;
  // 5, 25, 50, 75, 95 percent
  std::array<double, 5> cmax_quantiles{};
  double cmax_mean = 0;
  double complex_fraction = 0;
  double conc_pass_fraction = 0;  // both bounds held; NaN if not evaluated
};

struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // sum of squared residuals in log space
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ReplicateRecord> records;  // size-major, then replicate order
  std::vector<SizeSummary> sizes;
  std::optional<SlopeFit> median_slope;
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------

/// Least-squares fit of log(statistic) against log(n).
inline SlopeFit loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw PreconditionViolated("slope fit needs at least 3 points");
  std::vector<double> xs, ys;
  for (auto [n, stat] : points) {
    if (!(n > 0) || !(stat > 0)) throw PreconditionViolated("slope fit needs positive values");
    xs.push_back(std::log(n));
    ys.push_back(std::log(stat));
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw Degenerate("all n values are equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    fit.residual += e * e;
  }
  return fit;
}

inline SlopeFit loglog_slope(const std::vector<std::pair<double, double>>& points) {
  return loglog_slope(std::span<const std::pair<double, double>>(points));
}

/// Target Q for a regime at size n. Inside the window the target is
/// coefficient * n^{-1/3} R^{2/3}; below and above it is -/+ coefficient *
/// n^{-1/4}, i.e. omega(n) = coefficient * n^{1/12} R^{-2/3}.
inline double regime_preset(Regime regime, std::size_t n, double coefficient,
                            double r_at_zero = 1.0) {
  if (!(coefficient >= 0)) throw PreconditionViolated("coefficient must be non-negative");
  const double nn = static_cast<double>(n);
  switch (regime) {
    case Regime::inside: return coefficient * std::pow(r_at_zero, 2.0 / 3.0) / std::cbrt(nn);
    case Regime::below: return -coefficient * std::pow(nn, -0.25);
    case Regime::above: return coefficient * std::pow(nn, -0.25);
    case Regime::fixed: break;
  }
  throw PreconditionViolated("regime_preset needs inside, below or above");
}

inline double family_q_target(const ExperimentSpec& spec, std::size_t n) {
  const auto& p = spec.params;
  if (p.regime == Regime::fixed) return p.q_target;
  double r0 = 1.0;  // every {1,3} mixture has R = 1
  if (spec.family == Family::three_point) {
    r0 = family_three_point(n, p.d_high, p.count_high, 0.0).r_value();
  }
  return regime_preset(p.regime, n, p.coefficient, r0);
}

inline DegreeSequence build_family(const ExperimentSpec& spec, std::size_t n) {
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::mixed13: return family_mixed13(n, family_q_target(spec, n));
    case Family::heavy_vertex: {
      const std::int64_t delta =
          p.delta > 0 ? p.delta
                      : static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(n), p.delta_exponent) - 1e-9));
      return family_heavy_vertex(n, delta);
    }
    case Family::three_point:
      return family_three_point(n, p.d_high, p.count_high, family_q_target(spec, n));
    case Family::file:
      if (p.degrees.size() != n) {
        throw PreconditionViolated("file family has " + std::to_string(p.degrees.size()) +
                                   " vertices but n = " + std::to_string(n));
      }
      return build_sequence(p.degrees);
  }
  throw PreconditionViolated("unknown family");
}

inline void validate(const ExperimentSpec& spec) {
  if (spec.replicates < 1) throw PreconditionViolated("replicates must be >= 1");
  if (spec.n_values.empty()) throw PreconditionViolated("n_values is empty");
  for (std::size_t i = 1; i < spec.n_values.size(); ++i) {
    if (spec.n_values[i] <= spec.n_values[i - 1]) {
      throw PreconditionViolated("n_values must be strictly increasing");
    }
  }
  if (spec.workers < 1) throw PreconditionViolated("workers must be >= 1");
  require_zeta(spec.zeta);
}

/// Type-7 (linear interpolation) quantile of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace detail {

inline ReplicateRecord run_replicate(const ExperimentSpec& spec, const DegreeSequence& seq,
                                     std::size_t n, int replicate) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = spec.timing ? Clock::now() : Clock::time_point{};
  ReplicateRecord rec;
  rec.n = n;
  rec.q = seq.q_value();
  rec.r = seq.r_value();
  rec.replicate = replicate;
  rec.seed = derive_seed(spec.master_seed, to_string(spec.family), n, static_cast<std::uint64_t>(replicate));
  Rng rng(rec.seed);

  ComponentCensus census;
  if (spec.mode == SampleMode::multigraph) {
    ExploreOptions opts;
    opts.record_trace = spec.record_traces;
    if (spec.record_traces) {
      // Only the prefix inside the concentration horizons is ever inspected.
      ExplorationTrace empty;
      const auto h = trace_concentration_check(empty, seq, spec.zeta);
      opts.trace_step_limit = std::max(h.r_horizon, h.q_horizon);
    }
    auto out = explore_all(seq, rng, opts);
    if (out.trace) {
      const auto conc = trace_concentration_check(*out.trace, seq, spec.zeta);
      rec.conc_q_pass = conc.q_pass;
      rec.conc_r_pass = conc.r_pass;
    }
    census = std::move(out.census);
  } else {
    auto sample = sample_simple(seq, rng, spec.max_attempts);
    rec.attempts = sample.attempts;
    census = census_of(sample.graph);
  }
  const auto lc = largest_component(census);
  rec.cmax = lc.size;
  rec.second_cmax = lc.second_size;
  rec.complex_components = census.complex_count();
  rec.max_excess = census.max_excess();
  if (spec.timing) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }
  return rec;
}

}  // namespace detail

/// Runs every (n, replicate) pair. Replicate r at size n draws from a stream
/// seeded by derive_seed(master_seed, family, n, r), so the result does not
/// depend on worker count or scheduling.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  ExperimentResult result;
  result.spec = spec;

  std::vector<DegreeSequence> seqs;
  for (std::size_t n : spec.n_values) {
    DegreeSequence seq = build_family(spec, n);
    const auto cond = check_condition_d(seq, spec.zeta);
    if (!cond.pass_b || !cond.pass_c) {
      throw PreconditionViolated("n = " + std::to_string(n) + " violates Condition D(b,c)");
    }
    if (!cond.pass_a) {
      result.warnings.push_back("n = " + std::to_string(n) + ": Condition D(a) fails, max degree / bound = " +
                                format_double(cond.margin_a));
    }
    if (!cond.pass_d) {
      result.warnings.push_back("n = " + std::to_string(n) + ": Condition D(d) fails, |Q| = " +
                                format_double(cond.margin_d));
    }
    SizeSummary s;
    s.n = n;
    s.q_target = spec.family == Family::mixed13 || spec.family == Family::three_point
                     ? family_q_target(spec, n)
                     : seq.q_value();
    s.q = seq.q_value();
    s.r = seq.r_value();
    s.max_degree = seq.max_degree();
    s.condition = cond;
    result.sizes.push_back(s);
    seqs.push_back(std::move(seq));
  }

  const std::size_t per_n = static_cast<std::size_t>(spec.replicates);
  const std::size_t total = per_n * spec.n_values.size();
  result.records.resize(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::size_t k = i / per_n;
      try {
        result.records[i] = detail::run_replicate(spec, seqs[k], spec.n_values[k], static_cast<int>(i % per_n));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(spec.workers), total);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t k = 0; k < result.sizes.size(); ++k) {
    auto& s = result.sizes[k];
    std::vector<double> cmax;
    std::size_t complex = 0, conc_seen = 0, conc_ok = 0;
    for (std::size_t j = 0; j < per_n; ++j) {
      const auto& rec = result.records[k * per_n + j];
      cmax.push_back(static_cast<double>(rec.cmax));
      if (rec.complex_components > 0) ++complex;
      if (rec.conc_q_pass && rec.conc_r_pass) {
        ++conc_seen;
        if (*rec.conc_q_pass && *rec.conc_r_pass) ++conc_ok;
      }
    }
    std::sort(cmax.begin(), cmax.end());
    const double ps[] = {0.05, 0.25, 0.5, 0.75, 0.95};
    for (std::size_t i = 0; i < 5; ++i) s.cmax_quantiles[i] = quantile_sorted(cmax, ps[i]);
    double sum = 0;
    for (double c : cmax) sum += c;
    s.cmax_mean = sum / static_cast<double>(cmax.size());
    s.complex_fraction = static_cast<double>(complex) / static_cast<double>(per_n);
    s.conc_pass_fraction = conc_seen == 0 ? std::numeric_limits<double>::quiet_NaN()
                                          : static_cast<double>(conc_ok) / static_cast<double>(conc_seen);
  }
  if (result.sizes.size() >= 3) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : result.sizes) pts.emplace_back(static_cast<double>(s.n), s.cmax_quantiles[2]);
    result.median_slope = loglog_slope(pts);
  }
  return result;
}

struct ComplexCensusRow {
  std::size_t n = 0;
  double fraction = 0;  // replicates with at least one complex component
  double omega = 0;     // |Q| n^{1/3} R^{-2/3}
  double bound = 0;     // 20 / omega^3
};

/// Fraction of replicates with a component holding more than one cycle, next
/// to the bound 20/omega(n)^3 for each size. Only meaningful below the window.
inline std::vector<ComplexCensusRow> complex_component_census(const ExperimentResult& result) {
  std::vector<ComplexCensusRow> rows;
  for (const auto& s : result.sizes) {
    if (!(s.q < 0)) {
      throw PreconditionViolated("complex-component census needs Q < 0 at every size");
    }
    ComplexCensusRow row;
    row.n = s.n;
    row.fraction = s.complex_fraction;
    row.omega = std::abs(s.q) * std::cbrt(static_cast<double>(s.n)) / std::pow(s.r, 2.0 / 3.0);
    row.bound = 20.0 / (row.omega * row.omega * row.omega);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

inline void write_replicates_csv(std::ostream& os, const ExperimentResult& result) {
  auto flag = [](const std::optional<bool>& b) -> std::string {
    if (!b) return {};
    return *b ? "1" : "0";
  };
  os << "family,n,q,r,replicate,seed,cmax,second_cmax,complex_components,max_excess,"
        "conc_q_pass,conc_r_pass,wall_ms\n";
  const auto family = to_string(result.spec.family);
  for (const auto& rec : result.records) {
    os << family << ',' << rec.n << ',' << format_double(rec.q) << ',' << format_double(rec.r) << ','
       << rec.replicate << ',' << rec.seed << ',' << rec.cmax << ',' << rec.second_cmax << ','
       << rec.complex_components << ',' << rec.max_excess << ',' << flag(rec.conc_q_pass) << ','
       << flag(rec.conc_r_pass) << ',' << (result.spec.timing ? format_double(rec.wall_ms) : "")
       << '\n';
  }
}

inline nlohmann::json condition_json(const ConditionDReport& c) {
  return {{"zeta", c.zeta},         {"pass_a", c.pass_a},     {"pass_b", c.pass_b},
          {"pass_c", c.pass_c},     {"pass_d", c.pass_d},     {"delta_bound", c.delta_bound},
          {"margin_a", c.margin_a}, {"margin_c", c.margin_c}, {"margin_d", c.margin_d}};
}

inline nlohmann::json summary_json(const ExperimentResult& result) {
  using nlohmann::json;
  const auto& spec = result.spec;
  json echo = {{"family", to_string(spec.family)},
               {"regime", to_string(spec.params.regime)},
               {"q_target", spec.params.q_target},
               {"coefficient", spec.params.coefficient},
               {"n_values", spec.n_values},
               {"replicates", spec.replicates},
               {"master_seed", spec.master_seed},
               {"zeta", spec.zeta},
               {"record_traces", spec.record_traces},
               {"mode", to_string(spec.mode)}};
  if (spec.family == Family::heavy_vertex) {
    echo["delta"] = spec.params.delta;
    echo["delta_exponent"] = spec.params.delta_exponent;
  }
  if (spec.family == Family::three_point) {
    echo["d_high"] = spec.params.d_high;
    echo["count_high"] = spec.params.count_high;
  }
  if (spec.family == Family::file) echo["source"] = spec.params.source;

  json sizes = json::array();
  for (const auto& s : result.sizes) {
    json row = {{"n", s.n},
                {"q_target", s.q_target},
                {"q", s.q},
                {"r", s.r},
                {"max_degree", s.max_degree},
                {"condition_d", condition_json(s.condition)},
                {"cmax_quantiles",
                 {{"p05", s.cmax_quantiles[0]},
                  {"p25", s.cmax_quantiles[1]},
                  {"p50", s.cmax_quantiles[2]},
                  {"p75", s.cmax_quantiles[3]},
                  {"p95", s.cmax_quantiles[4]}}},
                {"cmax_mean", s.cmax_mean},
                {"complex_fraction", s.complex_fraction}};
    row["conc_pass_fraction"] = std::isfinite(s.conc_pass_fraction) ? json(s.conc_pass_fraction) : json(nullptr);
    sizes.push_back(row);
  }
  json out = {{"spec", echo}, {"sizes", sizes}, {"warnings", result.warnings}};
  if (result.median_slope) {
    out["median_cmax_slope"] = {{"slope", result.median_slope->slope},
                                {"intercept", result.median_slope->intercept},
                                {"residual", result.median_slope->residual}};
  }
  bool below = !result.sizes.empty();
  for (const auto& s : result.sizes) below = below && s.q < 0;
  if (below) {
    json rows = json::array();
    for (const auto& row : complex_component_census(result)) {
      rows.push_back({{"n", row.n}, {"fraction", row.fraction}, {"omega", row.omega}, {"bound", row.bound}});
    }
    out["complex_census"] = rows;
  }
  return out;
}

}  // namespace critwin
