#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "wsm/bench.hpp"

namespace wsm::bench {

namespace {

struct Arc {
  std::uint32_t from;
  std::uint32_t to;
};

Graph from_arcs(std::uint32_t vertices, bool directed, const std::vector<Arc>& arcs) {
  Graph g;
  g.vertices = vertices;
  g.directed = directed;
  g.offsets.assign(static_cast<std::size_t>(vertices) + 1, 0);
  for (const Arc& a : arcs) {
    ++g.offsets[a.from + 1];
    if (!directed) ++g.offsets[a.to + 1];
  }
  for (std::uint32_t v = 0; v < vertices; ++v) g.offsets[v + 1] += g.offsets[v];
  g.targets.resize(g.offsets[vertices]);
  std::vector<std::uint64_t> fill(g.offsets.begin(), g.offsets.end() - 1);
  for (const Arc& a : arcs) {
    g.targets[fill[a.from]++] = a.to;
    if (!directed) g.targets[fill[a.to]++] = a.from;
  }
  return g;
}

constexpr std::pair<GraphKind, std::string_view> kGraphNames[] = {
    {GraphKind::kTorus2d, "torus2d"},     {GraphKind::kTorus2d60, "torus2d60"}, {GraphKind::kTorus3d, "torus3d"},
    {GraphKind::kTorus3d40, "torus3d40"}, {GraphKind::kRandom, "random"},
};

}  // namespace

std::string_view to_string(GraphKind k) {
  for (const auto& [kind, name] : kGraphNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<GraphKind> parse_graph_kind(std::string_view s) {
  for (const auto& [kind, name] : kGraphNames) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

bool Graph::has_edge(std::uint32_t u, std::uint32_t v) const {
  if (u >= vertices || v >= vertices) return false;
  const auto n = neighbors(u);
  return std::find(n.begin(), n.end(), v) != n.end();
}

Graph torus(int dims, std::uint32_t side, double keep, bool directed, std::uint64_t seed) {
  if (dims < 1 || dims > 3) throw std::invalid_argument("torus dimension must be 1..3");
  if (side < 3) throw std::invalid_argument("torus side must be >= 3");
  std::uint64_t total = 1;
  for (int d = 0; d < dims; ++d) total *= side;
  if (total > 0xfffffffeULL) throw std::invalid_argument("torus too large");
  const auto nv = static_cast<std::uint32_t>(total);

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution present(keep);
  std::vector<Arc> arcs;
  arcs.reserve(static_cast<std::size_t>(nv) * static_cast<std::size_t>(dims));
  for (std::uint32_t v = 0; v < nv; ++v) {
    std::uint32_t stride = 1;
    for (int d = 0; d < dims; ++d) {
      const std::uint32_t coord = (v / stride) % side;
      const std::uint32_t w = coord + 1 == side ? v - coord * stride : v + stride;
      if (keep >= 1.0 || present(rng)) arcs.push_back({v, w});
      stride *= side;
    }
  }
  return from_arcs(nv, directed, arcs);
}

Graph random_graph(std::uint32_t vertices, std::uint64_t edges, bool directed, std::uint64_t seed) {
  if (vertices < 2) throw std::invalid_argument("random graph needs at least 2 vertices");
  const std::uint64_t pairs = static_cast<std::uint64_t>(vertices) * (vertices - 1) / (directed ? 1 : 2);
  if (edges > pairs) throw std::invalid_argument("too many edges requested for a simple graph");

  std::mt19937_64 rng(seed);
  std::vector<Arc> arcs;
  arcs.reserve(edges);
  if (edges * 2 > pairs) {
    // Dense request: enumerate every candidate and keep a random subset.
    for (std::uint32_t u = 0; u < vertices; ++u) {
      for (std::uint32_t v = directed ? 0 : u + 1; v < vertices; ++v) {
        if (u != v) arcs.push_back({u, v});
      }
    }
    std::shuffle(arcs.begin(), arcs.end(), rng);
    arcs.resize(edges);
  } else {
    std::uniform_int_distribution<std::uint32_t> pick(0, vertices - 1);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges * 2);
    while (arcs.size() < edges) {
      std::uint32_t u = pick(rng);
      std::uint32_t v = pick(rng);
      if (u == v) continue;
      if (!directed && u > v) std::swap(u, v);
      if (seen.insert(static_cast<std::uint64_t>(u) << 32 | v).second) arcs.push_back({u, v});
    }
  }
  return from_arcs(vertices, directed, arcs);
}

Graph gen_graph(const GraphParams& p) {
  auto side_for = [&](int dims) {
    const double s = std::round(std::pow(static_cast<double>(p.vertices), 1.0 / dims));
    return static_cast<std::uint32_t>(s);
  };
  switch (p.kind) {
    case GraphKind::kTorus2d: return torus(2, side_for(2), 1.0, p.directed, p.seed);
    case GraphKind::kTorus2d60: return torus(2, side_for(2), 0.6, p.directed, p.seed);
    case GraphKind::kTorus3d: return torus(3, side_for(3), 1.0, p.directed, p.seed);
    case GraphKind::kTorus3d40: return torus(3, side_for(3), 0.4, p.directed, p.seed);
    case GraphKind::kRandom: {
      if (p.vertices > 0xfffffffeULL) throw std::invalid_argument("too many vertices");
      const std::uint64_t m = p.edges == 0 ? 4 * p.vertices : p.edges;
      return random_graph(static_cast<std::uint32_t>(p.vertices), m, p.directed, p.seed);
    }
  }
  throw std::invalid_argument("unknown graph kind");
}

std::uint64_t component_size(const Graph& g, std::uint32_t root) {
  std::vector<bool> seen(g.vertices, false);
  std::vector<std::uint32_t> stack{root};
  seen[root] = true;
  std::uint64_t count = 0;
  while (!stack.empty()) {
    const std::uint32_t v = stack.back();
    stack.pop_back();
    ++count;
    for (std::uint32_t w : g.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return count;
}

bool verify_spanning_tree(const Graph& g, std::span<const std::uint32_t> parents, std::uint32_t root) {
  const std::uint32_t nv = g.vertices;
  if (parents.size() != nv || root >= nv || parents[root] != root) return false;

  for (std::uint32_t v = 0; v < nv; ++v) {
    const std::uint32_t p = parents[v];
    if (v == root || p == kNoParent) continue;
    if (p >= nv || !g.has_edge(p, v)) return false;
  }

  // Every vertex with a parent must reach the root by following parents.
  enum : std::uint8_t { kUnseen, kOnPath, kRooted };
  std::vector<std::uint8_t> mark(nv, kUnseen);
  mark[root] = kRooted;
  std::vector<std::uint32_t> path;
  for (std::uint32_t v = 0; v < nv; ++v) {
    if (parents[v] == kNoParent || mark[v] == kRooted) continue;
    path.clear();
    std::uint32_t u = v;
    while (mark[u] == kUnseen) {
      mark[u] = kOnPath;
      path.push_back(u);
      u = parents[u];
      if (u == kNoParent) return false;
    }
    if (mark[u] == kOnPath) return false;  // cycle
    for (std::uint32_t w : path) mark[w] = kRooted;
  }

  std::vector<bool> reach(nv, false);
  std::vector<std::uint32_t> stack{root};
  reach[root] = true;
  while (!stack.empty()) {
    const std::uint32_t v = stack.back();
    stack.pop_back();
    for (std::uint32_t w : g.neighbors(v)) {
      if (!reach[w]) {
        reach[w] = true;
        stack.push_back(w);
      }
    }
  }
  for (std::uint32_t v = 0; v < nv; ++v) {
    if (reach[v] != (parents[v] != kNoParent)) return false;
  }
  return true;
}

}  // namespace wsm::bench
