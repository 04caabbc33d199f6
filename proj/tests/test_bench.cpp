#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "wsm/bench.hpp"

using namespace wsm;
using namespace wsm::bench;

namespace {

std::set<std::pair<std::uint32_t, std::uint32_t>> undirected_edges(const Graph& g) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t v = 0; v < g.vertices; ++v) {
    for (std::uint32_t w : g.neighbors(v)) out.insert({std::min(v, w), std::max(v, w)});
  }
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Columns except the timing ones.
std::string structural(const std::string& row) {
  std::istringstream in(row);
  std::string cell;
  std::string out;
  for (int i = 0; std::getline(in, cell, ','); ++i) {
    if (i < 5) out += cell + ",";
  }
  return out;
}

}  // namespace

TEST_CASE("names round trip") {
  for (Algorithm a : kAllAlgorithms) CHECK(parse_algorithm(to_string(a)) == a);
  CHECK(parse_algorithm("ws-wmult") == Algorithm::kWsWMult);
  CHECK_FALSE(parse_algorithm("cilk").has_value());
  CHECK(parse_graph_kind("torus3d40") == GraphKind::kTorus3d40);
  CHECK(parse_buffer("doubling") == BufferKind::kDoubling);
  CHECK(parse_profile("relaxed") == MemoryProfile::kRelaxed);
  CHECK(parse_zero_cost_mode("put-steal") == ZeroCostMode::kPutSteal);
}

TEST_CASE("torus graphs: vertex and edge counts, degree regularity") {
  const Graph t2 = torus(2, 4, 1.0, false, 1);
  CHECK(t2.vertices == 16);
  CHECK(t2.edge_count() == 32);
  CHECK(undirected_edges(t2).size() == 32);
  for (std::uint32_t v = 0; v < t2.vertices; ++v) CHECK(t2.neighbors(v).size() == 4);
  // Wrap-around: vertex 3 (x=3, y=0) is adjacent to vertex 0.
  CHECK(t2.has_edge(3, 0));
  CHECK(t2.has_edge(0, 12));

  const Graph t3 = torus(3, 3, 1.0, false, 1);
  CHECK(t3.vertices == 27);
  CHECK(t3.edge_count() == 81);
  for (std::uint32_t v = 0; v < t3.vertices; ++v) CHECK(t3.neighbors(v).size() == 6);

  const Graph d2 = torus(2, 4, 1.0, true, 1);
  CHECK(d2.edge_count() == 32);
  for (std::uint32_t v = 0; v < d2.vertices; ++v) CHECK(d2.neighbors(v).size() == 2);

  CHECK_THROWS_AS(torus(2, 2, 1.0, false, 1), std::invalid_argument);
}

TEST_CASE("percolated tori keep roughly the requested fraction of edges") {
  const Graph full = torus(2, 100, 1.0, false, 3);
  const Graph p60 = torus(2, 100, 0.6, false, 3);
  const Graph p40 = torus(3, 22, 0.4, false, 3);
  const double f60 = static_cast<double>(p60.edge_count()) / static_cast<double>(full.edge_count());
  const double f40 = static_cast<double>(p40.edge_count()) / (3.0 * 22 * 22 * 22);
  CHECK(f60 == doctest::Approx(0.6).epsilon(0.05));
  CHECK(f40 == doctest::Approx(0.4).epsilon(0.05));
  // Deterministic given the seed.
  CHECK(torus(2, 100, 0.6, false, 3).targets == p60.targets);
}

TEST_CASE("random graphs have exactly the requested unique edges") {
  const Graph g = random_graph(10, 20, false, 7);
  CHECK(g.vertices == 10);
  CHECK(g.edge_count() == 20);
  const auto edges = undirected_edges(g);
  CHECK(edges.size() == 20);
  for (const auto& [u, v] : edges) CHECK(u != v);

  const Graph dense = random_graph(6, 15, false, 7);
  CHECK(undirected_edges(dense).size() == 15);
  const Graph directed = random_graph(10, 50, true, 7);
  CHECK(directed.edge_count() == 50);
  CHECK_THROWS_AS(random_graph(4, 7, false, 1), std::invalid_argument);
}

TEST_CASE("gen_graph sizes tori from the target vertex count") {
  GraphParams p;
  p.vertices = 100'000;
  p.kind = GraphKind::kTorus2d;
  CHECK(gen_graph(p).vertices == 316u * 316u);
  p.kind = GraphKind::kTorus3d;
  CHECK(gen_graph(p).vertices == 46u * 46u * 46u);
  p.kind = GraphKind::kRandom;
  p.vertices = 1000;
  CHECK(gen_graph(p).edge_count() == 4000);
}

TEST_CASE("verify_spanning_tree accepts trees and rejects broken ones") {
  const Graph g = torus(2, 3, 1.0, false, 1);
  // BFS tree from 0.
  std::vector<std::uint32_t> parents(g.vertices, kNoParent);
  parents[0] = 0;
  std::vector<std::uint32_t> frontier{0};
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    for (std::uint32_t w : g.neighbors(frontier[i])) {
      if (parents[w] == kNoParent) {
        parents[w] = frontier[i];
        frontier.push_back(w);
      }
    }
  }
  CHECK(verify_spanning_tree(g, parents, 0));

  auto missing = parents;
  missing[8] = kNoParent;
  CHECK_FALSE(verify_spanning_tree(g, missing, 0));

  auto not_an_edge = parents;
  // 0 and 4 are diagonal neighbours on the 3x3 torus: no edge between them.
  REQUIRE_FALSE(g.has_edge(0, 4));
  not_an_edge[4] = 0;
  CHECK_FALSE(verify_spanning_tree(g, not_an_edge, 0));

  auto cycle = parents;
  cycle[1] = 2;
  cycle[2] = 1;
  CHECK_FALSE(verify_spanning_tree(g, cycle, 0));

  auto bad_root = parents;
  bad_root[0] = 1;
  CHECK_FALSE(verify_spanning_tree(g, bad_root, 0));
  CHECK_FALSE(verify_spanning_tree(g, std::span<const std::uint32_t>(parents).first(5), 0));
}

TEST_CASE("trimmed mean drops the fastest and slowest runs") {
  CHECK(trimmed_mean({5, 1, 3, 9, 2}) == doctest::Approx((5 + 3 + 2) / 3.0));
  CHECK(trimmed_mean({4, 6}) == doctest::Approx(5));
  CHECK(trimmed_mean({7}) == doctest::Approx(7));
}

TEST_CASE("zero-cost runs report five runs and correct counts") {
  BenchConfig cfg;
  cfg.ops = 1000;
  for (Algorithm a : kAllAlgorithms) {
    cfg.algorithm = a;
    const BenchReport take = zero_cost(cfg, ZeroCostMode::kPutTake);
    CHECK_MESSAGE(take.ok, to_string(a), ": ", take.error);
    CHECK(take.run_ms.size() == 5);
    CHECK(take.extracted == 1000);
    const BenchReport steal = zero_cost(cfg, ZeroCostMode::kPutSteal);
    CHECK_MESSAGE(steal.ok, to_string(a), ": ", steal.error);
    CHECK(steal.extracted == 1000);
  }
  cfg.algorithm = Algorithm::kBWsWMult;
  cfg.thieves = 3;
  cfg.buffer = BufferKind::kDoubling;
  const BenchReport many = zero_cost(cfg, ZeroCostMode::kPutSteal);
  CHECK(many.ok);
  CHECK(many.extracted == 1000);
}

TEST_CASE("spanning trees are valid for every algorithm and thread count") {
  GraphParams p;
  p.vertices = 2000;
  for (GraphKind kind : {GraphKind::kTorus2d, GraphKind::kTorus3d40, GraphKind::kRandom}) {
    for (bool directed : {false, true}) {
      p.kind = kind;
      p.directed = directed;
      const Graph g = gen_graph(p);
      const std::uint64_t reach = component_size(g, 0);
      for (Algorithm a : kAllAlgorithms) {
        for (std::size_t t : {1u, 3u}) {
          BenchConfig cfg;
          cfg.algorithm = a;
          cfg.threads = t;
          cfg.reps = 3;
          cfg.segment_length = 16;
          const SpanningResult r = spanning_tree(g, 0, cfg);
          CHECK_MESSAGE(r.valid, to_string(kind), " ", to_string(a), " T=", t, " ", r.report.error);
          CHECK(r.claims == reach - 1);
          // Workers stop once every vertex is claimed, so late leaves may stay queued.
          CHECK(r.extractions > 0);
        }
      }
    }
  }
}

TEST_CASE("single-thread spanning trees are identical across FIFO algorithms") {
  GraphParams p;
  p.vertices = 1000;
  p.kind = GraphKind::kTorus2d60;
  const Graph g = gen_graph(p);
  BenchConfig cfg;
  cfg.reps = 1;
  std::vector<std::uint32_t> reference;
  for (Algorithm a : kAllAlgorithms) {
    if (a == Algorithm::kChaseLev) continue;  // LIFO owner order builds a different tree
    cfg.algorithm = a;
    const SpanningResult r = spanning_tree(g, 0, cfg);
    REQUIRE(r.valid);
    if (reference.empty()) {
      reference = r.parents;
    } else {
      CHECK_MESSAGE(r.parents == reference, to_string(a));
    }
  }
}

TEST_CASE("suite: parsing, row layout and normalization") {
  const SuiteSpec spec = parse_suite(R"({
    "graphs": [{"kind": "torus2d"}],
    "algorithms": ["chase-lev", "ws-wmult"],
    "threads": [1, 2],
    "vertices": 900,
    "reps": 3
  })");
  CHECK(spec.graphs.size() == 1);
  CHECK(spec.vertices == 900);
  std::size_t progress = 0;
  const auto rows = run_suite(spec, [&](const SuiteRow&) { ++progress; });
  CHECK(progress == 4);
  const std::string csv = suite_csv(rows);
  const auto out = lines(csv);
  REQUIRE(out.size() == 5);
  CHECK(out[0] == kCsvHeader);
  CHECK(out[1].rfind("torus2d,false,chase-lev,circular,1,", 0) == 0);
  CHECK(out[1].substr(out[1].rfind(',') + 1) == "1.0000");
  CHECK(out[2].rfind("torus2d,false,ws-wmult,segmented,1,", 0) == 0);
  for (const SuiteRow& r : rows) CHECK(r.valid);

  const auto again = lines(suite_csv(run_suite(spec)));
  REQUIRE(again.size() == out.size());
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(structural(again[i]) == structural(out[i]));

  CHECK_THROWS_AS(parse_suite("{}"), ParseError);
  CHECK_THROWS_AS(parse_suite("not json"), ParseError);
  CHECK_THROWS_AS(parse_suite(R"({"graphs":[{"kind":"cube"}]})"), ParseError);
  CHECK_THROWS_AS(parse_suite(R"({"graphs":[{"kind":"random"}],"threads":[0]})"), ParseError);
  CHECK_THROWS_AS(parse_suite(R"({"graphs":[{"kind":"random"}],"reps":0})"), ParseError);
}

TEST_CASE("suite: zero-cost rows are normalized to Chase-Lev in the same mode") {
  const SuiteSpec spec = parse_suite(R"({
    "zero_cost": {"modes": ["put-take", "put-steal"], "ops": 5000, "thieves": 2},
    "algorithms": ["ws-mult", "chase-lev"],
    "reps": 3
  })");
  CHECK(spec.graphs.empty());
  CHECK(spec.zero_cost_thieves == 2);
  const auto out = lines(suite_csv(run_suite(spec)));
  REQUIRE(out.size() == 5);
  CHECK(out[1].rfind("zero-cost-put-take,false,ws-mult,segmented,1,", 0) == 0);
  CHECK(out[2].rfind("zero-cost-put-take,false,chase-lev,circular,1,", 0) == 0);
  CHECK(out[2].substr(out[2].rfind(',') + 1) == "1.0000");
  CHECK(out[3].rfind("zero-cost-put-steal,false,ws-mult,segmented,3,", 0) == 0);
  CHECK(out[4].substr(out[4].rfind(',') + 1) == "1.0000");
  CHECK(parse_suite(R"({"zero_cost": {}})").zero_cost_modes.size() == 2);
  CHECK_THROWS_AS(parse_suite(R"({"zero_cost": {"modes": ["put-put"]}})"), ParseError);
  CHECK_THROWS_AS(parse_suite(R"({"zero_cost": {"ops": 0}})"), ParseError);
}
