#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "critwin/errors.hpp"
#include "critwin/rational.hpp"

namespace critwin {

using Vertex = std::uint32_t;
using CopyId = std::uint32_t;

/// An immutable degree sequence d_1..d_n with every derived quantity the rest
/// of the library needs cached at construction.
///
/// Copies share one immutable payload, so passing a DegreeSequence by value is
/// cheap and safe across threads. The drift Q = sum(d^2)/(2|E|) - 2 and the
/// variance scale R = sum(d (d-2)^2)/(2|E|) are kept as exact rationals.
///
/// Vertex-copies are numbered globally: vertex v owns the contiguous range
/// [copy_offset(v), copy_offset(v) + d_v).
class DegreeSequence {
 public:
  std::span<const std::uint32_t> degrees() const { return data_->degrees; }
  std::uint32_t degree(Vertex v) const { return data_->degrees[v]; }
  std::size_t n() const { return data_->degrees.size(); }

  std::int64_t edge_count() const { return data_->sum_d / 2; }
  std::int64_t copy_count() const { return data_->sum_d; }
  std::int64_t sum_d() const { return data_->sum_d; }
  std::int64_t sum_d2() const { return data_->sum_d2; }
  std::int64_t sum_d3() const { return data_->sum_d3; }
  /// sum of d (d-2)^2
  std::int64_t sum_dd2sq() const { return data_->sum_dd2sq; }

  const Rational& q() const { return data_->q; }
  const Rational& r() const { return data_->r; }
  double q_value() const { return to_double(data_->q); }
  double r_value() const { return to_double(data_->r); }

  std::uint32_t max_degree() const { return data_->max_degree; }
  const std::map<std::uint32_t, std::size_t>& degree_counts() const { return data_->counts; }
  std::size_t count_of_degree(std::uint32_t d) const {
    auto it = data_->counts.find(d);
    return it == data_->counts.end() ? 0 : it->second;
  }

  CopyId copy_offset(Vertex v) const { return data_->offsets[v]; }
  Vertex owner(CopyId c) const { return data_->owner[c]; }

  friend DegreeSequence build_sequence(std::span<const std::int64_t> degrees);

 private:
  struct Data {
    std::vector<std::uint32_t> degrees;
    std::vector<CopyId> offsets;
    std::vector<Vertex> owner;
    std::int64_t sum_d = 0;
    std::int64_t sum_d2 = 0;
    std::int64_t sum_d3 = 0;
    std::int64_t sum_dd2sq = 0;
    Rational q;
    Rational r;
    std::uint32_t max_degree = 0;
    std::map<std::uint32_t, std::size_t> counts;
  };

  explicit DegreeSequence(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

/// Validates raw degrees and computes every cached field in one pass.
/// Throws ZeroDegree for a zero entry and OddSum when no multigraph exists.
inline DegreeSequence build_sequence(std::span<const std::int64_t> degrees) {
  if (degrees.empty()) throw PreconditionViolated("degree sequence is empty");
  auto data = std::make_shared<DegreeSequence::Data>();
  data->degrees.reserve(degrees.size());
  data->offsets.reserve(degrees.size());
  for (std::size_t v = 0; v < degrees.size(); ++v) {
    const std::int64_t d = degrees[v];
    if (d == 0) throw ZeroDegree(v);
    if (d < 0 || d > std::int64_t{1} << 24) {
      throw PreconditionViolated("degree of vertex " + std::to_string(v) + " is out of range");
    }
    data->offsets.push_back(static_cast<CopyId>(data->sum_d));
    data->degrees.push_back(static_cast<std::uint32_t>(d));
    data->sum_d += d;
    data->sum_d2 += d * d;
    data->sum_d3 += d * d * d;
    data->sum_dd2sq += d * (d - 2) * (d - 2);
    data->max_degree = std::max(data->max_degree, static_cast<std::uint32_t>(d));
    ++data->counts[static_cast<std::uint32_t>(d)];
  }
  if (data->sum_d % 2 != 0) throw OddSum(data->sum_d);
  if (data->sum_d >= (std::int64_t{1} << 32)) throw TooLarge("more than 2^32 vertex-copies");

  data->owner.resize(static_cast<std::size_t>(data->sum_d));
  for (Vertex v = 0; v < data->degrees.size(); ++v) {
    std::fill_n(data->owner.begin() + data->offsets[v], data->degrees[v], v);
  }
  data->q = Rational(data->sum_d2, data->sum_d) - 2;
  data->r = Rational(data->sum_dd2sq, data->sum_d);
  return DegreeSequence(std::move(data));
}

inline DegreeSequence build_sequence(std::initializer_list<std::int64_t> degrees) {
  return build_sequence(std::span<const std::int64_t>(degrees.begin(), degrees.size()));
}

inline DegreeSequence build_sequence(const std::vector<std::int64_t>& degrees) {
  return build_sequence(std::span<const std::int64_t>(degrees));
}

// ---------------------------------------------------------------------------
// Condition D

struct ConditionDReport {
  double zeta = 0;
  bool pass_a = false;  // max degree bound
  bool pass_b = false;  // no isolated vertices
  bool pass_c = false;  // bounded fraction of degree-2 vertices
  bool pass_d = false;  // |Q| <= zeta/2

  double delta_bound = 0;  // n^{1/3} R^{1/3} / ln n
  double margin_a = 0;     // max degree / delta_bound; clause (a) holds iff <= 1
  double margin_c = 0;     // n_2 / n, compared against 1 - zeta
  double margin_d = 0;     // |Q|, compared against zeta/2

  bool all() const { return pass_a && pass_b && pass_c && pass_d; }
};

inline void require_zeta(double zeta) {
  if (!(zeta > 0.0 && zeta < 0.1)) {
    throw PreconditionViolated("zeta must lie in (0, 1/10), got " + std::to_string(zeta));
  }
}

inline ConditionDReport check_condition_d(const DegreeSequence& seq, double zeta) {
  require_zeta(zeta);
  ConditionDReport rep;
  rep.zeta = zeta;
  const double n = static_cast<double>(seq.n());
  const double log_n = std::log(n);
  rep.delta_bound = log_n > 0 ? std::cbrt(n) * std::cbrt(seq.r_value()) / log_n
                              : std::numeric_limits<double>::infinity();
  rep.margin_a = static_cast<double>(seq.max_degree()) / rep.delta_bound;
  rep.pass_a = static_cast<double>(seq.max_degree()) <= rep.delta_bound;
  // build_sequence rejects zero degrees, so n_0 is always 0 here.
  rep.pass_b = seq.count_of_degree(0) == 0;
  const double n2 = static_cast<double>(seq.count_of_degree(2));
  rep.margin_c = n2 / n;
  rep.pass_c = n2 <= (1.0 - zeta) * n;
  rep.margin_d = std::abs(seq.q_value());
  rep.pass_d = rep.margin_d <= zeta / 2;
  return rep;
}

// ---------------------------------------------------------------------------
// Elementary observations that every sequence satisfying Condition D(b,c)
// obeys. A false entry means the cached arithmetic is wrong.

struct ObservationReport {
  bool edges_lower = false;  // n/2 <= |E|
  bool edges_upper = false;  // |E| <= (1 + Q/2) n
  bool square_sum = false;   // sum d^2 == (4 + 2Q) |E|
  bool r_lower = false;      // zeta/4 <= R
  bool r_upper = false;      // R <= 2 max_degree

  bool all() const { return edges_lower && edges_upper && square_sum && r_lower && r_upper; }

  std::string first_failure() const {
    if (!edges_lower) return "n/2 <= |E|";
    if (!edges_upper) return "|E| <= (1 + Q/2) n";
    if (!square_sum) return "sum d^2 = (4 + 2Q)|E|";
    if (!r_lower) return "zeta/4 <= R";
    if (!r_upper) return "R <= 2 Delta";
    return {};
  }
};

inline ObservationReport check_observations(const DegreeSequence& seq, double zeta) {
  const ConditionDReport d = check_condition_d(seq, zeta);
  if (!d.pass_b || !d.pass_c) {
    throw PreconditionViolated("observations need Condition D(b,c)");
  }
  ObservationReport rep;
  const auto n = static_cast<std::int64_t>(seq.n());
  const std::int64_t edges = seq.edge_count();
  rep.edges_lower = 2 * edges >= n;
  rep.edges_upper = Rational(edges) <= (Rational(1) + seq.q() / 2) * n;
  rep.square_sum = Rational(seq.sum_d2()) == (Rational(4) + seq.q() * 2) * edges;
  rep.r_lower = seq.r_value() >= zeta / 4;
  rep.r_upper = seq.r() <= Rational(2 * static_cast<std::int64_t>(seq.max_degree()));
  return rep;
}

/// Same as check_observations but throws ViolatedIdentity naming the first
/// inequality that failed.
inline ObservationReport require_observations(const DegreeSequence& seq, double zeta) {
  ObservationReport rep = check_observations(seq, zeta);
  if (!rep.all()) throw ViolatedIdentity("observation failed: " + rep.first_failure());
  return rep;
}

// ---------------------------------------------------------------------------
// Parameterized degree families

namespace detail {

// Restores an even degree sum by turning one degree-1 vertex (searching from
// the back, never below `first`) into a degree-2 vertex.
inline void repair_parity(std::vector<std::int64_t>& degrees, std::size_t first = 0) {
  std::int64_t sum = 0;
  for (auto d : degrees) sum += d;
  if (sum % 2 == 0) return;
  for (std::size_t i = degrees.size(); i-- > first;) {
    if (degrees[i] == 1) {
      degrees[i] = 2;
      return;
    }
  }
  throw Infeasible("no degree-1 vertex available to repair an odd degree sum");
}

inline void append(std::vector<std::int64_t>& out, std::int64_t count, std::int64_t degree) {
  out.insert(out.end(), static_cast<std::size_t>(count), degree);
}

}  // namespace detail

/// Degrees in {1, 3} with the degree-3 share chosen so that Q is as close to
/// q_target as integer rounding allows. Degree-1 vertices come first. An odd n
/// forces an odd sum, in which case one degree-1 vertex becomes degree 2.
inline DegreeSequence family_mixed13(std::size_t n, double q_target) {
  if (n < 4) throw PreconditionViolated("mixed13 needs n >= 4");
  if (!(std::abs(q_target) < 1.0)) throw PreconditionViolated("mixed13 needs |q_target| < 1");
  const auto nn = static_cast<std::int64_t>(n);
  const std::int64_t n3 = std::llround(static_cast<double>(nn) * (1.0 + q_target) / (4.0 - 2.0 * q_target));
  if (n3 < 1 || n3 > nn - 1) {
    throw Infeasible("mixed13: rounding gives " + std::to_string(n3) + " degree-3 vertices");
  }
  std::vector<std::int64_t> degrees;
  degrees.reserve(n);
  detail::append(degrees, nn - n3, 1);
  detail::append(degrees, n3, 3);
  detail::repair_parity(degrees);
  return build_sequence(degrees);
}

/// One vertex (index 0) of degree delta; the other n-1 vertices are split
/// three quarters degree 1, one quarter degree 3.
inline DegreeSequence family_heavy_vertex(std::size_t n, std::int64_t delta) {
  if (delta < 3) throw PreconditionViolated("heavy_vertex needs delta >= 3");
  const auto nn = static_cast<std::int64_t>(n);
  if (delta > nn - 1) {
    throw Infeasible("heavy_vertex: delta " + std::to_string(delta) + " exceeds n - 1");
  }
  const std::int64_t rest = nn - 1;
  const std::int64_t n3 = std::llround(static_cast<double>(rest) / 4.0);
  std::vector<std::int64_t> degrees;
  degrees.reserve(n);
  degrees.push_back(delta);
  detail::append(degrees, rest - n3, 1);
  detail::append(degrees, n3, 3);
  detail::repair_parity(degrees, 1);
  return build_sequence(degrees);
}

/// count_high vertices of degree d_high followed by a {1, 3} tail whose split
/// brings Q within 10/n of q_target. Lets R grow while Q stays put.
inline DegreeSequence family_three_point(std::size_t n, std::int64_t d_high,
                                         std::int64_t count_high, double q_target) {
  const auto nn = static_cast<std::int64_t>(n);
  if (d_high < 4) throw PreconditionViolated("three_point needs d_high >= 4");
  if (count_high < 1) throw PreconditionViolated("three_point needs count_high >= 1");
  if (count_high * d_high > nn) throw PreconditionViolated("three_point needs count_high * d_high <= n");

  const std::int64_t tail = nn - count_high;
  const double h1 = static_cast<double>(count_high * d_high);
  const double h2 = static_cast<double>(count_high * d_high * d_high);
  const double m = static_cast<double>(tail);
  // Solve h2 + m + 8 n3 = (2 + q)(h1 + m + 2 n3) for n3.
  const double exact = ((2.0 + q_target) * (h1 + m) - h2 - m) / (4.0 - 2.0 * q_target);

  std::vector<std::int64_t> best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (double guess : {std::floor(exact), std::ceil(exact)}) {
    const auto n3 = std::clamp(static_cast<std::int64_t>(guess), std::int64_t{0}, tail);
    std::vector<std::int64_t> degrees;
    degrees.reserve(n);
    detail::append(degrees, count_high, d_high);
    detail::append(degrees, tail - n3, 1);
    detail::append(degrees, n3, 3);
    try {
      detail::repair_parity(degrees, static_cast<std::size_t>(count_high));
    } catch (const Infeasible&) {
      continue;
    }
    std::int64_t s1 = 0, s2 = 0;
    for (auto d : degrees) {
      s1 += d;
      s2 += d * d;
    }
    const double gap = std::abs(static_cast<double>(s2) / static_cast<double>(s1) - 2.0 - q_target);
    if (gap < best_gap) {
      best_gap = gap;
      best = std::move(degrees);
    }
  }
  if (best.empty() || !(best_gap < 10.0 / static_cast<double>(nn))) {
    throw Infeasible("three_point: no {1,3} tail brings Q within 10/n of the target");
  }
  return build_sequence(best);
}

}  // namespace critwin
