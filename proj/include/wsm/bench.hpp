#pragma once

// Benchmark harness: zero-cost put/take and put/steal loops, graph
// generators, the parallel spanning-tree application and suite runner.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsm/shmem.hpp"
#include "wsm/types.hpp"

namespace wsm::bench {

enum class Algorithm { kWsMult, kWsWMult, kBWsMult, kBWsWMult, kExact, kChaseLev, kIdempotentFifo };

inline constexpr Algorithm kAllAlgorithms[] = {
    Algorithm::kWsMult,   Algorithm::kWsWMult,  Algorithm::kBWsMult,       Algorithm::kBWsWMult,
    Algorithm::kExact,    Algorithm::kChaseLev, Algorithm::kIdempotentFifo,
};

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view s);

/// Extraction guarantee of an algorithm, used to validate result counts.
enum class Guarantee { kRelaxed, kBounded, kExact, kIdempotent };
Guarantee guarantee_of(Algorithm a);

enum class BufferKind { kSegmented, kDoubling };
std::string_view to_string(BufferKind b);
std::optional<BufferKind> parse_buffer(std::string_view s);

std::string_view to_string(MemoryProfile p);
std::optional<MemoryProfile> parse_profile(std::string_view s);

enum class ZeroCostMode { kPutTake, kPutSteal };
std::optional<ZeroCostMode> parse_zero_cost_mode(std::string_view s);
std::string_view to_string(ZeroCostMode m);

struct BenchConfig {
  Algorithm algorithm = Algorithm::kWsWMult;
  BufferKind buffer = BufferKind::kSegmented;
  std::size_t segment_length = 256;  // also the initial length of doubling arrays
  std::uint64_t ops = 1'000'000;
  std::size_t threads = 1;
  std::size_t thieves = 1;  // put-steal only
  std::size_t reps = 5;
  std::uint64_t seed = 1;
  MemoryProfile profile = MemoryProfile::kSeqCst;
};

struct BenchReport {
  std::vector<double> run_ms;
  double trimmed_mean_ms = 0;
  /// Non-empty extractions of the last repetition.
  std::uint64_t extracted = 0;
  bool ok = true;
  std::string error;
};

/// Mean after dropping the fastest and slowest run (plain mean below three runs).
double trimmed_mean(std::vector<double> runs);

/// N puts followed by N takes on the owner thread, or followed by steals
/// from `thieves` thief threads until the queue reports empty.
BenchReport zero_cost(const BenchConfig& cfg, ZeroCostMode mode);

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

/// Compressed adjacency lists. Undirected graphs store each edge in both
/// endpoint lists.
struct Graph {
  std::uint32_t vertices = 0;
  bool directed = false;
  std::vector<std::uint64_t> offsets;  // size vertices + 1
  std::vector<std::uint32_t> targets;

  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
  }
  bool has_edge(std::uint32_t u, std::uint32_t v) const;
  /// Undirected edges or directed arcs.
  std::uint64_t edge_count() const { return directed ? targets.size() : targets.size() / 2; }
};

enum class GraphKind { kTorus2d, kTorus2d60, kTorus3d, kTorus3d40, kRandom };
std::string_view to_string(GraphKind k);
std::optional<GraphKind> parse_graph_kind(std::string_view s);

struct GraphParams {
  GraphKind kind = GraphKind::kTorus2d;
  /// Target vertex count; tori use side = round(vertices^(1/d)).
  std::uint64_t vertices = 100'000;
  /// Random graphs only; 0 means 4 * vertices.
  std::uint64_t edges = 0;
  bool directed = false;
  std::uint64_t seed = 1;
};

/// Torus over `dims` dimensions of `side` vertices each. Every edge (or, for
/// directed graphs, every arc pointing in the positive direction of a
/// dimension) is kept with probability `keep`.
Graph torus(int dims, std::uint32_t side, double keep, bool directed, std::uint64_t seed);

/// `edges` distinct edges (arcs when directed) chosen uniformly at random,
/// no self loops.
Graph random_graph(std::uint32_t vertices, std::uint64_t edges, bool directed, std::uint64_t seed);

Graph gen_graph(const GraphParams& p);

/// Vertices reachable from `root`, root included.
std::uint64_t component_size(const Graph& g, std::uint32_t root);

inline constexpr std::uint32_t kNoParent = 0xffffffffu;

/// True iff parents[root] == root, every other parent edge exists in g, the
/// parent links are acyclic, and the vertices with a parent are exactly
/// those reachable from root.
bool verify_spanning_tree(const Graph& g, std::span<const std::uint32_t> parents, std::uint32_t root);

struct SpanningResult {
  std::vector<std::uint32_t> parents;  // from the last repetition
  BenchReport report;
  std::uint64_t claims = 0;            // vertices claimed besides the root
  std::uint64_t extractions = 0;       // vertex tasks extracted, duplicates included
  bool valid = false;                  // every repetition produced a valid tree
};

/// Parallel spanning tree rooted at `root`: one deque per thread, claim
/// neighbors by CAS on the parent array, put claimed vertices, steal from a
/// uniformly random other thread when the own deque is empty.
SpanningResult spanning_tree(const Graph& g, std::uint32_t root, const BenchConfig& cfg);

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

struct SuiteGraph {
  GraphKind kind = GraphKind::kTorus2d;
  bool directed = false;
  std::uint64_t edges = 0;
};

struct SuiteSpec {
  std::vector<SuiteGraph> graphs;
  /// Zero-cost experiments, reported with graph column `zero-cost-<mode>`.
  std::vector<ZeroCostMode> zero_cost_modes;
  std::uint64_t zero_cost_ops = 1'000'000;
  std::size_t zero_cost_thieves = 1;
  std::vector<Algorithm> algorithms;
  std::vector<std::size_t> threads;
  std::uint64_t vertices = 100'000;
  BufferKind buffer = BufferKind::kSegmented;
  std::size_t segment_length = 256;
  std::size_t reps = 5;
  std::uint64_t seed = 1;
  MemoryProfile profile = MemoryProfile::kSeqCst;
};

/// JSON suite file. Keys: "graphs" (array of {"kind", "directed", "edges"}),
/// "zero_cost" ({"modes", "ops", "thieves"}), "algorithms", "threads",
/// "vertices", "buffer", "segment_length", "reps", "seed", "profile". At least
/// one of "graphs" and "zero_cost" is required. Throws ParseError.
SuiteSpec parse_suite(std::string_view json);

struct SuiteRow {
  std::string graph;
  bool directed = false;
  std::string algorithm;
  std::string buffer;
  std::size_t threads = 1;
  double trimmed_mean_ms = 0;
  double speedup = 0;  // NaN when the row failed
  bool valid = false;
  std::string error;
};

using SuiteProgress = std::function<void(const SuiteRow&)>;

/// Runs every zero-cost mode x algorithm cell, then every graph x thread count
/// x algorithm cell. Speedups divide the Chase-Lev trimmed mean of the same
/// experiment (single-thread for graphs) by the cell's trimmed mean; that
/// baseline is measured even when Chase-Lev is not listed.
std::vector<SuiteRow> run_suite(const SuiteSpec& spec, const SuiteProgress& progress = {});

inline constexpr std::string_view kCsvHeader =
    "graph,directed,algorithm,buffer,threads,trimmed_mean_ms,speedup_vs_chaselev_1t";

/// Header plus one line per row; failed rows report `nan` for both timing columns.
std::string suite_csv(const std::vector<SuiteRow>& rows);

}  // namespace wsm::bench
