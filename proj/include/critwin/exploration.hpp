#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "critwin/census.hpp"
#include "critwin/degree_sequence.hpp"
#include "critwin/errors.hpp"
#include "critwin/format.hpp"
#include "critwin/rational.hpp"
#include "critwin/rng.hpp"

namespace critwin {

/// One step of the exploration process.
struct StepRecord {
  std::int64_t t = 0;                // index of the state this step produced
  std::int64_t eta = 0;              // Y_t - Y_{t-1}
  double q_before = 0;               // Q_{t-1}
  double r_before = 0;               // R_{t-1}
  std::int64_t y_after = 0;          // Y_t
  std::int64_t d_after = 0;          // D_t
  double q_after = 0;                // Q_t, NaN once D_t < 2
  double r_after = 0;                // R_t, NaN once D_t < 2
  std::optional<Vertex> new_vertex;  // v_t
  std::int64_t component_id = 0;
  bool restart = false;              // opened a new component, no copy matched
};

/// Exact one-step moments of eta_{t+1} given the current state, computed by
/// summing over every possible partner copy, next to the closed forms built
/// from the running sums. exact_step_expectation throws unless they agree.
struct StepExpectation {
  Rational mean;
  Rational second_moment;
  Rational closed_mean;
  Rational closed_second_moment;
  bool from_zero = false;  // Y_t == 0: the next step opens a component
};

/// State of the component exploration: C_t, Y_t, D_t and the running sums
/// over vertices outside C_t that give Q_t and R_t in O(1).
///
/// The matching is exposed lazily. Unmatched copies live in a flat pool with
/// swap-remove, so a uniform partner costs O(1). While Y_t > 0 the copy to be
/// matched next is the oldest unmatched copy of the current component (FIFO).
class ExplorationState {
 public:
  ExplorationState(DegreeSequence seq, std::optional<Vertex> start = std::nullopt)
      : seq_(std::move(seq)) {
    const auto copies = static_cast<std::size_t>(seq_.copy_count());
    pool_.resize(copies);
    pos_.resize(copies);
    for (CopyId c = 0; c < copies; ++c) {
      pool_[c] = c;
      pos_[c] = c;
    }
    in_component_.assign(seq_.n(), 0);
    queue_.reserve(copies);
    sum_d_out_ = seq_.sum_d();
    sum_d2_out_ = seq_.sum_d2();
    sum_d3_out_ = seq_.sum_d3();
    sum_dd2sq_out_ = seq_.sum_dd2sq();
    d_total_ = seq_.copy_count();

    const Vertex v = start.value_or(0);
    if (v >= seq_.n()) throw PreconditionViolated("start vertex out of range");
    start_vertex_ = v;
    open_component(v);
  }

  const DegreeSequence& seq() const { return seq_; }
  Vertex start_vertex() const { return start_vertex_; }
  std::int64_t t() const { return t_; }
  std::int64_t y() const { return y_; }
  std::int64_t d_total() const { return d_total_; }
  bool halted() const { return d_total_ == 0; }
  bool in_component(Vertex v) const { return in_component_[v] != 0; }
  std::int64_t component_id() const {
    return static_cast<std::int64_t>(census_.components.size()) - 1;
  }

  std::int64_t sum_d_out() const { return sum_d_out_; }
  std::int64_t sum_d2_out() const { return sum_d2_out_; }
  std::int64_t sum_d3_out() const { return sum_d3_out_; }
  std::int64_t sum_dd2sq_out() const { return sum_dd2sq_out_; }

  /// Q_t = sum_{u not in C_t} d_u^2 / (D_t - 1) - 2
  Rational q_t() const {
    require_defined();
    return Rational(sum_d2_out_, d_total_ - 1) - 2;
  }
  /// R_t = (4 (Y_t - 1) + sum_{u not in C_t} d_u (d_u-2)^2) / (D_t - 1)
  Rational r_t() const {
    require_defined();
    return Rational(4 * (y_ - 1) + sum_dd2sq_out_, d_total_ - 1);
  }
  double q_value() const {
    if (d_total_ < 2) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(sum_d2_out_) / static_cast<double>(d_total_ - 1) - 2.0;
  }
  double r_value() const {
    if (d_total_ < 2) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(4 * (y_ - 1) + sum_dd2sq_out_) / static_cast<double>(d_total_ - 1);
  }

  const ComponentCensus& census() const { return census_; }

  /// When enabled, every matched pair of copy ids is appended to pairing().
  void set_record_pairing(bool on) { record_pairing_ = on; }
  const std::vector<CopyId>& pairing() const { return pairing_; }

  /// Advances one step. With Y_t > 0 the oldest unmatched copy of the
  /// component is matched to a uniform other unmatched copy; with Y_t == 0 a
  /// uniform unmatched copy picks the vertex that opens the next component.
  template <class Urbg>
  StepRecord step(Urbg& rng) {
    if (halted()) throw Halted();
    StepRecord rec;
    rec.q_before = q_value();
    rec.r_before = r_value();
    const std::int64_t y_before = y_;

    if (y_ > 0) {
      const CopyId mine = queue_[head_];
      take(mine);
      const CopyId partner = pool_[uniform_below(rng, pool_.size())];
      take(partner);
      if (record_pairing_) {
        pairing_.push_back(mine);
        pairing_.push_back(partner);
      }
      ++census_.components.back().edges;
      d_total_ -= 2;
      const Vertex u = seq_.owner(partner);
      if (!in_component_[u]) {
        add_vertex(u);
        y_ += static_cast<std::int64_t>(seq_.degree(u)) - 2;
        rec.new_vertex = u;
      } else {
        y_ -= 2;
      }
    } else {
      const CopyId pick = pool_[uniform_below(rng, pool_.size())];
      const Vertex u = seq_.owner(pick);
      open_component(u);
      rec.new_vertex = u;
      rec.restart = true;
    }
    skip_matched();
    ++t_;

    rec.t = t_;
    rec.eta = y_ - y_before;
    rec.y_after = y_;
    rec.d_after = d_total_;
    rec.q_after = q_value();
    rec.r_after = r_value();
    rec.component_id = component_id();
#ifndef NDEBUG
    if ((t_ & (t_ - 1)) == 0 && !running_sums_consistent()) {
      throw ViolatedIdentity("running sums drifted from recomputed sums");
    }
#endif
    return rec;
  }

  /// Recomputes every running sum from scratch and compares (O(n)).
  bool running_sums_consistent() const {
    std::int64_t s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (Vertex v = 0; v < seq_.n(); ++v) {
      if (in_component_[v]) continue;
      const std::int64_t d = seq_.degree(v);
      s1 += d;
      s2 += d * d;
      s3 += d * d * d;
      s4 += d * (d - 2) * (d - 2);
    }
    return s1 == sum_d_out_ && s2 == sum_d2_out_ && s3 == sum_d3_out_ && s4 == sum_dd2sq_out_ &&
           d_total_ == y_ + sum_d_out_ && static_cast<std::int64_t>(pool_.size()) == d_total_;
  }

  StepExpectation exact_step_expectation() const {
    if (halted()) throw Halted();
    StepExpectation out;
    std::int64_t s1 = 0;
    std::int64_t s2 = 0;
    if (y_ > 0) {
      const CopyId mine = queue_[head_];
      for (CopyId c : pool_) {
        if (c == mine) continue;
        const Vertex u = seq_.owner(c);
        const std::int64_t eta = in_component_[u] ? -2 : static_cast<std::int64_t>(seq_.degree(u)) - 2;
        s1 += eta;
        s2 += eta * eta;
      }
      out.mean = Rational(s1, d_total_ - 1);
      out.second_moment = Rational(s2, d_total_ - 1);
      out.closed_mean = q_t();
      out.closed_second_moment = r_t();
    } else {
      out.from_zero = true;
      for (CopyId c : pool_) {
        const std::int64_t d = seq_.degree(seq_.owner(c));
        s1 += d;
        s2 += d * d;
      }
      out.mean = Rational(s1, d_total_);
      out.second_moment = Rational(s2, d_total_);
      out.closed_mean = Rational(sum_d2_out_, d_total_);
      out.closed_second_moment = Rational(sum_d3_out_, d_total_);
      if (d_total_ >= 2 && out.second_moment < r_t() / 2) {
        throw ViolatedIdentity("second moment from Y=0 fell below R_t/2");
      }
    }
    if (out.mean != out.closed_mean || out.second_moment != out.closed_second_moment) {
      throw ViolatedIdentity("partner enumeration disagrees with closed-form moments");
    }
    return out;
  }

 private:
  static constexpr std::uint32_t kMatched = std::numeric_limits<std::uint32_t>::max();

  void require_defined() const {
    if (d_total_ < 2) throw Halted();
  }

  void take(CopyId c) {
    const std::uint32_t p = pos_[c];
    const CopyId last = pool_.back();
    pool_[p] = last;
    pos_[last] = p;
    pool_.pop_back();
    pos_[c] = kMatched;
  }

  void add_vertex(Vertex u) {
    in_component_[u] = 1;
    const std::int64_t d = seq_.degree(u);
    sum_d_out_ -= d;
    sum_d2_out_ -= d * d;
    sum_d3_out_ -= d * d * d;
    sum_dd2sq_out_ -= d * (d - 2) * (d - 2);
    ++census_.components.back().vertices;
    const CopyId first = seq_.copy_offset(u);
    for (CopyId c = first; c < first + seq_.degree(u); ++c) queue_.push_back(c);
  }

  void open_component(Vertex u) {
    census_.components.push_back(ComponentRecord{});
    add_vertex(u);
    y_ = seq_.degree(u);
  }

  void skip_matched() {
    while (head_ < queue_.size() && pos_[queue_[head_]] == kMatched) ++head_;
  }

  DegreeSequence seq_;
  Vertex start_vertex_ = 0;
  std::vector<CopyId> pool_;
  std::vector<std::uint32_t> pos_;
  std::vector<std::uint8_t> in_component_;
  std::vector<CopyId> queue_;
  std::size_t head_ = 0;

  std::int64_t t_ = 0;
  std::int64_t y_ = 0;
  std::int64_t d_total_ = 0;
  std::int64_t sum_d_out_ = 0;
  std::int64_t sum_d2_out_ = 0;
  std::int64_t sum_d3_out_ = 0;
  std::int64_t sum_dd2sq_out_ = 0;

  ComponentCensus census_;
  bool record_pairing_ = false;
  std::vector<CopyId> pairing_;
};

/// C_0 = {start}, Y_0 = d_start. Without a start vertex the lowest index is used.
inline ExplorationState start_exploration(const DegreeSequence& seq,
                                          std::optional<Vertex> start = std::nullopt) {
  return ExplorationState(seq, start);
}

inline StepExpectation exact_step_expectation(const ExplorationState& state) {
  return state.exact_step_expectation();
}

struct TraceStart {
  Vertex vertex = 0;
  std::int64_t y = 0;
  std::int64_t d_total = 0;
  double q = 0;
  double r = 0;
};

struct ExplorationTrace {
  TraceStart start;
  std::vector<StepRecord> steps;
  // Indices into steps where a new component was opened.
  std::vector<std::size_t> component_starts;
};

struct ExploreOptions {
  std::optional<Vertex> start;
  bool record_trace = false;
  // Stop recording after this many steps (exploration still completes).
  std::int64_t trace_step_limit = std::numeric_limits<std::int64_t>::max();
  bool record_pairing = false;
};

struct ExplorationOutcome {
  ComponentCensus census;
  std::optional<ExplorationTrace> trace;
  // Matched copy ids, consecutive entries form a pair.
  std::vector<CopyId> pairing;
};

/// Runs the exploration until every copy is matched: exactly |E| matching
/// steps plus one restart per component after the first.
template <class Urbg>
ExplorationOutcome explore_all(const DegreeSequence& seq, Urbg& rng,
                               const ExploreOptions& opts = {}) {
  ExplorationState state(seq, opts.start);
  state.set_record_pairing(opts.record_pairing);
  ExplorationOutcome out;
  if (opts.record_trace) {
    ExplorationTrace trace;
    trace.start = TraceStart{state.start_vertex(), state.y(), state.d_total(), state.q_value(),
                             state.r_value()};
    out.trace = std::move(trace);
  }
  while (!state.halted()) {
    StepRecord rec = state.step(rng);
    if (out.trace && rec.t <= opts.trace_step_limit) {
      if (rec.restart) out.trace->component_starts.push_back(out.trace->steps.size());
      out.trace->steps.push_back(rec);
    }
  }
  out.census = state.census();
  if (opts.record_pairing) out.pairing = state.pairing();
  return out;
}

/// Columns: t, y, d_total, q_t, r_t, eta, component_id. Row t = 0 is the
/// starting state and has no eta.
inline void write_trace_csv(std::ostream& os, const ExplorationTrace& trace) {
  os << "t,y,d_total,q_t,r_t,eta,component_id\n";
  os << 0 << ',' << trace.start.y << ',' << trace.start.d_total << ',' << format_double(trace.start.q)
     << ',' << format_double(trace.start.r) << ",," << 0 << '\n';
  for (const auto& s : trace.steps) {
    os << s.t << ',' << s.y_after << ',' << s.d_after << ',' << format_double(s.q_after) << ','
       << format_double(s.r_after) << ',' << s.eta << ',' << s.component_id << '\n';
  }
}

// ---------------------------------------------------------------------------
// Concentration of Q_t and R_t along a recorded trace.

struct ConcentrationReport {
  std::int64_t r_horizon = 0;  // floor(zeta n / (400 Delta))
  std::int64_t q_horizon = 0;  // floor(zeta |Q| n / (1000 R) + 2 n^{2/3} R^{-1/3})
  double q_tolerance = 0;      // |Q|/2 + (800/zeta) n^{-1/3} R^{2/3}
  bool r_pass = true;
  bool q_pass = true;
  std::optional<std::int64_t> first_r_violation;
  std::optional<std::int64_t> first_q_violation;
};

/// Checks |R_t - R| < R/2 up to the R horizon and
/// |Q_t - Q| <= |Q|/2 + (800/zeta) n^{-1/3} R^{2/3} up to the Q horizon. Steps
/// past the end of the trace are not checked.
inline ConcentrationReport trace_concentration_check(const ExplorationTrace& trace,
                                                     const DegreeSequence& seq, double zeta) {
  require_zeta(zeta);
  const double n = static_cast<double>(seq.n());
  const double q = seq.q_value();
  const double r = seq.r_value();
  ConcentrationReport rep;
  rep.r_horizon = static_cast<std::int64_t>(std::floor(zeta * n / (400.0 * seq.max_degree())));
  const double q_h = r > 0 ? zeta * std::abs(q) * n / (1000.0 * r) + 2.0 * std::pow(n, 2.0 / 3.0) / std::cbrt(r)
                           : std::numeric_limits<double>::infinity();
  rep.q_horizon = std::isfinite(q_h) ? static_cast<std::int64_t>(std::floor(q_h))
                                     : std::numeric_limits<std::int64_t>::max();
  rep.q_tolerance = 0.5 * std::abs(q) + (800.0 / zeta) * std::pow(r, 2.0 / 3.0) / std::cbrt(n);

  for (const auto& s : trace.steps) {
    if (s.t > rep.r_horizon && s.t > rep.q_horizon) break;
    if (s.t >= 1 && s.t <= rep.r_horizon && std::isfinite(s.r_after) && rep.r_pass &&
        !(std::abs(s.r_after - r) < r / 2)) {
      rep.r_pass = false;
      rep.first_r_violation = s.t;
    }
    if (s.t >= 1 && s.t <= rep.q_horizon && std::isfinite(s.q_after) && rep.q_pass &&
        std::abs(s.q_after - q) > rep.q_tolerance) {
      rep.q_pass = false;
      rep.first_q_violation = s.t;
    }
  }
  return rep;
}

}  // namespace critwin
