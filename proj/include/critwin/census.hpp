#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string_view>
#include <utility>
#include <vector>

#include "critwin/errors.hpp"

namespace critwin {

enum class ComponentClass { tree, unicyclic, complex };

inline std::string_view to_string(ComponentClass c) {
  switch (c) {
    case ComponentClass::tree: return "tree";
    case ComponentClass::unicyclic: return "unicyclic";
    case ComponentClass::complex: return "complex";
  }
  return "?";
}

struct ComponentRecord {
  std::int64_t vertices = 0;
  std::int64_t edges = 0;

  // Edges minus vertices: -1 for a tree, 0 for one cycle, >= 1 for more.
  std::int64_t excess() const { return edges - vertices; }

  ComponentClass cls() const {
    const auto e = excess();
    if (e < 0) return ComponentClass::tree;
    if (e == 0) return ComponentClass::unicyclic;
    return ComponentClass::complex;
  }
};

// Components in discovery order (exploration) or by smallest vertex (graph).
struct ComponentCensus {
  std::vector<ComponentRecord> components;

  std::int64_t total_vertices() const {
    return std::accumulate(components.begin(), components.end(), std::int64_t{0},
                           [](std::int64_t s, const ComponentRecord& c) { return s + c.vertices; });
  }
  std::int64_t total_edges() const {
    return std::accumulate(components.begin(), components.end(), std::int64_t{0},
                           [](std::int64_t s, const ComponentRecord& c) { return s + c.edges; });
  }
  std::int64_t complex_count() const {
    return std::count_if(components.begin(), components.end(),
                         [](const ComponentRecord& c) { return c.excess() >= 1; });
  }
  // Largest excess over all components; -1 when every component is a tree.
  std::int64_t max_excess() const {
    std::int64_t m = -1;
    for (const auto& c : components) m = std::max(m, c.excess());
    return m;
  }
};

struct LargestComponents {
  std::int64_t size = 0;
  std::int64_t second_size = 0;
};

/// Largest and second-largest vertex counts. A tie reports the same value
/// twice; a single component reports 0 as the runner-up.
inline LargestComponents largest_component(const ComponentCensus& census) {
  if (census.components.empty()) throw PreconditionViolated("census is empty");
  LargestComponents out;
  for (const auto& c : census.components) {
    if (c.vertices > out.size) {
      out.second_size = out.size;
      out.size = c.vertices;
    } else if (c.vertices > out.second_size) {
      out.second_size = c.vertices;
    }
  }
  return out;
}

inline void write_census_csv(std::ostream& os, const ComponentCensus& census) {
  os << "component_id,vertices,edges,excess,class\n";
  for (std::size_t i = 0; i < census.components.size(); ++i) {
    const auto& c = census.components[i];
    os << i << ',' << c.vertices << ',' << c.edges << ',' << c.excess() << ','
       << to_string(c.cls()) << '\n';
  }
}

/// Census of the multigraph on vertices [0, n) with the given edge list.
/// Loops count as one edge of their component.
template <class EdgeRange>
ComponentCensus census_of_edges(std::size_t n, const EdgeRange& edges) {
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::uint32_t{0});
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& e : edges) {
    auto a = find(e.u);
    auto b = find(e.v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::int64_t> slot(n, -1);
  ComponentCensus census;
  for (std::uint32_t v = 0; v < n; ++v) {
    auto root = find(v);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::int64_t>(census.components.size());
      census.components.emplace_back();
    }
    ++census.components[static_cast<std::size_t>(slot[root])].vertices;
  }
  for (const auto& e : edges) {
    ++census.components[static_cast<std::size_t>(slot[find(e.u)])].edges;
  }
  return census;
}

}  // namespace critwin
