#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "critwin/census.hpp"
#include "critwin/degree_sequence.hpp"
#include "critwin/errors.hpp"
#include "critwin/rational.hpp"

namespace critwin {

/// The index-th of d_v copies of a vertex.
struct Copy {
  Vertex vertex = 0;
  std::uint32_t index = 0;
  auto operator<=>(const Copy&) const = default;
};

struct CopyPair {
  Copy a;
  Copy b;
};

/// Undirected edge with u <= v; a loop has u == v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  auto operator<=>(const Edge&) const = default;
};

inline CopyId copy_id(const DegreeSequence& seq, Copy c) {
  return seq.copy_offset(c.vertex) + c.index;
}

inline Copy copy_of(const DegreeSequence& seq, CopyId id) {
  const Vertex v = seq.owner(id);
  return Copy{v, id - seq.copy_offset(v)};
}

inline bool valid_copy(const DegreeSequence& seq, Copy c) {
  return c.vertex < seq.n() && c.index < seq.degree(c.vertex);
}

/// A configuration: a perfect matching of vertex-copies together with the
/// multigraph obtained by contracting each vertex's copies.
class ConfigurationGraph {
 public:
  /// Pairs copies (flat[0], flat[1]), (flat[2], flat[3]), ... Every copy id in
  /// [0, 2|E|) must appear exactly once.
  static ConfigurationGraph from_pairing(DegreeSequence seq, std::span<const CopyId> flat) {
    if (static_cast<std::int64_t>(flat.size()) != seq.copy_count()) {
      throw PreconditionViolated("pairing must cover every vertex-copy");
    }
    ConfigurationGraph g(std::move(seq));
    g.partner_.assign(flat.size(), 0);
    g.edges_.reserve(flat.size() / 2);
    for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
      const CopyId a = flat[i];
      const CopyId b = flat[i + 1];
      g.partner_[a] = b;
      g.partner_[b] = a;
      Vertex u = g.seq_.owner(a);
      Vertex v = g.seq_.owner(b);
      if (u > v) std::swap(u, v);
      g.edges_.push_back(Edge{u, v});
    }
    return g;
  }

  const DegreeSequence& seq() const { return seq_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// partner()[c] is the copy matched with copy c. Two configurations are the
  /// same matching exactly when their partner arrays are equal.
  const std::vector<CopyId>& partner() const { return partner_; }

  std::vector<CopyPair> matching() const {
    std::vector<CopyPair> out;
    out.reserve(partner_.size() / 2);
    for (CopyId c = 0; c < partner_.size(); ++c) {
      if (c < partner_[c]) out.push_back({copy_of(seq_, c), copy_of(seq_, partner_[c])});
    }
    return out;
  }

  std::vector<Edge> sorted_edges() const {
    auto out = edges_;
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  explicit ConfigurationGraph(DegreeSequence seq) : seq_(std::move(seq)) {}

  DegreeSequence seq_;
  std::vector<CopyId> partner_;
  std::vector<Edge> edges_;
};

/// Uniform perfect matching of the 2|E| copies: Fisher-Yates shuffle, then
/// consecutive copies are paired.
template <class Urbg>
ConfigurationGraph sample_configuration(const DegreeSequence& seq, Urbg& rng) {
  std::vector<CopyId> copies(static_cast<std::size_t>(seq.copy_count()));
  std::iota(copies.begin(), copies.end(), CopyId{0});
  std::shuffle(copies.begin(), copies.end(), rng);
  return ConfigurationGraph::from_pairing(seq, copies);
}

inline constexpr std::int64_t kMaxEnumeratedCopies = 12;

/// Every perfect matching of the copy set, each exactly once:
/// (2|E| - 1)!! configurations in total.
inline std::vector<ConfigurationGraph> enumerate_configurations(const DegreeSequence& seq) {
  if (seq.copy_count() > kMaxEnumeratedCopies) {
    throw TooLarge("enumeration limited to " + std::to_string(kMaxEnumeratedCopies) +
                   " vertex-copies");
  }
  const auto m = static_cast<std::size_t>(seq.copy_count());
  std::vector<ConfigurationGraph> out;
  std::vector<CopyId> flat;
  std::vector<bool> used(m, false);

  auto recurse = [&](auto&& self) -> void {
    if (flat.size() == m) {
      out.push_back(ConfigurationGraph::from_pairing(seq, flat));
      return;
    }
    const auto first = static_cast<CopyId>(std::find(used.begin(), used.end(), false) - used.begin());
    used[first] = true;
    for (CopyId other = first + 1; other < m; ++other) {
      if (used[other]) continue;
      used[other] = true;
      flat.push_back(first);
      flat.push_back(other);
      self(self);
      flat.pop_back();
      flat.pop_back();
      used[other] = false;
    }
    used[first] = false;
  };
  recurse(recurse);
  return out;
}

struct SimplicityVerdict {
  bool is_simple = true;
  std::int64_t loop_count = 0;
  // Parallel non-loop edges beyond the first of each vertex pair.
  std::int64_t multi_edge_count = 0;
};

inline SimplicityVerdict is_simple(const ConfigurationGraph& g) {
  SimplicityVerdict out;
  auto edges = g.sorted_edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].u == edges[i].v) {
      ++out.loop_count;
    } else if (i > 0 && edges[i] == edges[i - 1]) {
      ++out.multi_edge_count;
    }
  }
  out.is_simple = out.loop_count == 0 && out.multi_edge_count == 0;
  return out;
}

struct SimpleSample {
  ConfigurationGraph graph;
  int attempts = 0;
};

inline constexpr int kDefaultMaxAttempts = 200;

/// Rejection sampling: draws configurations until one is simple. The result
/// is uniform over simple graphs with the given degrees. Throws Exhausted when
/// max_attempts configurations were all non-simple.
template <class Urbg>
SimpleSample sample_simple(const DegreeSequence& seq, Urbg& rng,
                           int max_attempts = kDefaultMaxAttempts) {
  if (max_attempts < 1) throw PreconditionViolated("max_attempts must be positive");
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    auto g = sample_configuration(seq, rng);
    if (is_simple(g).is_simple) return SimpleSample{std::move(g), attempt};
  }
  throw Exhausted(max_attempts);
}

/// Asymptotic probability that a uniform configuration is simple,
/// exp(1/4 - (sum d^2 / 2|E|)^2 / 4) = exp(1/4 - (Q + 2)^2 / 4). The true
/// probability differs from this by an unquantified o(1) term.
inline double simplicity_probability_formula(const DegreeSequence& seq) {
  const double nu = seq.q_value() + 2.0;
  return std::exp(0.25 - 0.25 * nu * nu);
}

struct PairJoinProbability {
  Rational exact;
  // (|E|-1-l)! / (2^l (|E|-1)!); absent when l == |E|, where it is undefined.
  std::optional<Rational> bound;
};

/// Probability that a uniform configuration joins every one of the given
/// pairwise-disjoint copy pairs.
inline PairJoinProbability pair_join_probability(const DegreeSequence& seq,
                                                 std::span<const CopyPair> pairs) {
  std::vector<CopyId> seen;
  seen.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    if (!valid_copy(seq, p.a) || !valid_copy(seq, p.b)) {
      throw PreconditionViolated("copy out of range for this degree sequence");
    }
    seen.push_back(copy_id(seq, p.a));
    seen.push_back(copy_id(seq, p.b));
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw OverlappingPairs("copy pairs must be pairwise disjoint");
  }

  const auto ell = static_cast<std::int64_t>(pairs.size());
  const std::int64_t edges = seq.edge_count();
  std::int64_t denom = 1;
  for (std::int64_t i = 1; i <= ell; ++i) {
    if (__builtin_mul_overflow(denom, 2 * edges - 2 * i + 1, &denom)) {
      throw TooLarge("pair-join probability denominator overflows 64 bits");
    }
  }
  PairJoinProbability out{Rational(1, denom), std::nullopt};
  if (ell < edges) {
    // 1 / (2^l (|E|-1)(|E|-2)...(|E|-l))
    std::int64_t bound_denom = 1;
    for (std::int64_t i = 1; i <= ell; ++i) {
      if (__builtin_mul_overflow(bound_denom, 2 * (edges - i), &bound_denom)) {
        throw TooLarge("pair-join bound denominator overflows 64 bits");
      }
    }
    out.bound = Rational(1, bound_denom);
  }
  return out;
}

/// "u v" per line with u <= v, sorted; loops appear as "v v".
inline void write_edge_list(std::ostream& os, const ConfigurationGraph& g) {
  for (const auto& e : g.sorted_edges()) os << e.u << ' ' << e.v << '\n';
}

inline ComponentCensus census_of(const ConfigurationGraph& g) {
  return census_of_edges(g.seq().n(), g.edges());
}

}  // namespace critwin
