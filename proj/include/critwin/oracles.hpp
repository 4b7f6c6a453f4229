#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "critwin/configuration.hpp"
#include "critwin/degree_sequence.hpp"
#include "critwin/exploration.hpp"
#include "critwin/rational.hpp"

// Small-instance checks of the samplers against exhaustive enumeration.

namespace critwin {

struct ChiSquareResult {
  double statistic = 0;
  int degrees_of_freedom = 0;
  double critical = 0;  // upper quantile at the requested level
  bool pass = true;
  std::int64_t samples = 0;
};

/// Pearson chi-square of observed counts against equal expected counts.
/// A single category is trivially uniform.
inline ChiSquareResult chi_square_uniform(const std::vector<std::int64_t>& counts, double level = 0.999) {
  ChiSquareResult out;
  for (auto c : counts) out.samples += c;
  out.degrees_of_freedom = static_cast<int>(counts.size()) - 1;
  if (out.degrees_of_freedom < 1) return out;
  const double expected = static_cast<double>(out.samples) / static_cast<double>(counts.size());
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    out.statistic += diff * diff / expected;
  }
  out.critical = boost::math::quantile(boost::math::chi_squared(out.degrees_of_freedom), level);
  out.pass = out.statistic <= out.critical;
  return out;
}

namespace detail {

inline std::vector<CopyId> partner_from_pairing(std::span<const CopyId> flat) {
  std::vector<CopyId> partner(flat.size());
  for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
    partner[flat[i]] = flat[i + 1];
    partner[flat[i + 1]] = flat[i];
  }
  return partner;
}

}  // namespace detail

/// Index of every enumerated matching, keyed by its partner array.
class MatchingIndex {
 public:
  explicit MatchingIndex(const DegreeSequence& seq, bool simple_only = false) {
    for (const auto& g : enumerate_configurations(seq)) {
      if (simple_only && !is_simple(g).is_simple) continue;
      index_.emplace(g.partner(), index_.size());
    }
  }
  std::size_t size() const { return index_.size(); }
  std::optional<std::size_t> find(const std::vector<CopyId>& partner) const {
    auto it = index_.find(partner);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<std::vector<CopyId>, std::size_t> index_;
};

struct UniformityReport {
  ChiSquareResult sampler;      // sample_configuration
  ChiSquareResult exploration;  // matching exposed by explore_all
  std::size_t categories = 0;
  bool unknown_outcome = false;  // a sample matched nothing in the enumeration
  bool pass() const { return sampler.pass && exploration.pass && !unknown_outcome; }
};

template <class Urbg>
UniformityReport uniformity_check(const DegreeSequence& seq, std::int64_t samples, Urbg& rng,
                                  double level = 0.999) {
  const MatchingIndex index(seq);
  UniformityReport rep;
  rep.categories = index.size();
  std::vector<std::int64_t> a(index.size(), 0), b(index.size(), 0);
  ExploreOptions opts;
  opts.record_pairing = true;
  for (std::int64_t i = 0; i < samples; ++i) {
    const auto ia = index.find(sample_configuration(seq, rng).partner());
    const auto out = explore_all(seq, rng, opts);
    const auto ib = index.find(detail::partner_from_pairing(out.pairing));
    if (!ia || !ib) {
      rep.unknown_outcome = true;
      continue;
    }
    ++a[*ia];
    ++b[*ib];
  }
  rep.sampler = chi_square_uniform(a, level);
  rep.exploration = chi_square_uniform(b, level);
  return rep;
}

/// Chi-square of sample_simple outcomes against the simple matchings.
template <class Urbg>
ChiSquareResult simple_uniformity_check(const DegreeSequence& seq, std::int64_t samples, Urbg& rng,
                                        double level = 0.999) {
  const MatchingIndex index(seq, true);
  if (index.size() == 0) throw PreconditionViolated("sequence has no simple configuration");
  std::vector<std::int64_t> counts(index.size(), 0);
  for (std::int64_t i = 0; i < samples; ++i) {
    const auto hit = index.find(sample_simple(seq, rng, 10000).graph.partner());
    if (!hit) throw ViolatedIdentity("sample_simple returned a non-simple matching");
    ++counts[*hit];
  }
  return chi_square_uniform(counts, level);
}

struct PairJoinReport {
  std::int64_t matchings = 0;
  std::int64_t pair_sets = 0;  // disjoint pair-sets checked, all sizes
  bool exact_matches_enumeration = true;
  bool exact_within_bound = true;
  std::optional<Rational> single_pair_probability;
  bool pass() const { return exact_matches_enumeration && exact_within_bound; }
};

/// For every set of disjoint copy pairs, compares pair_join_probability with
/// the fraction of enumerated matchings containing the whole set. Counting
/// walks each matching's 2^|E| sub-matchings once.
inline PairJoinReport pair_join_check(const DegreeSequence& seq) {
  const auto configs = enumerate_configurations(seq);
  const auto edges = static_cast<std::size_t>(seq.edge_count());
  std::map<std::vector<std::pair<CopyId, CopyId>>, std::int64_t> contained;
  for (const auto& g : configs) {
    std::vector<std::pair<CopyId, CopyId>> pairs;
    for (CopyId c = 0; c < g.partner().size(); ++c) {
      if (c < g.partner()[c]) pairs.emplace_back(c, g.partner()[c]);
    }
    for (std::uint32_t mask = 0; mask < (1u << edges); ++mask) {
      std::vector<std::pair<CopyId, CopyId>> subset;
      for (std::size_t i = 0; i < edges; ++i) {
        if (mask & (1u << i)) subset.push_back(pairs[i]);
      }
      ++contained[subset];
    }
  }
  PairJoinReport rep;
  rep.matchings = static_cast<std::int64_t>(configs.size());
  for (const auto& [subset, count] : contained) {
    std::vector<CopyPair> query;
    for (auto [a, b] : subset) query.push_back({copy_of(seq, a), copy_of(seq, b)});
    const auto p = pair_join_probability(seq, query);
    const Rational freq(count, rep.matchings);
    if (p.exact != freq) rep.exact_matches_enumeration = false;
    if (!query.empty() && p.bound && !(p.exact <= *p.bound)) rep.exact_within_bound = false;
    if (query.size() == 1 && !rep.single_pair_probability) rep.single_pair_probability = p.exact;
    ++rep.pair_sets;
  }
  return rep;
}

/// Number of sets of pairwise-disjoint pairs on m points (partial matchings).
inline std::int64_t partial_matching_count(std::int64_t m) {
  // a(m) = a(m-1) + (m-1) a(m-2)
  std::int64_t prev = 1, cur = 1;
  for (std::int64_t k = 2; k <= m; ++k) {
    const std::int64_t next = cur + (k - 1) * prev;
    prev = cur;
    cur = next;
  }
  return m == 0 ? 1 : cur;
}

}  // namespace critwin
