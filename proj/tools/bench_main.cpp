// Benchmark driver. Uses only the shared C interface.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "wsm/wsm.h"

namespace {

int report_error(const char* what, wsm_status s) {
  std::cerr << "bench: " << what << ": " << wsm_status_string(s);
  const char* detail = wsm_last_error();
  if (detail != nullptr && *detail != '\0') std::cerr << " (" << detail << ")";
  std::cerr << '\n';
  return 2;
}

template <class T>
bool parse(wsm_status (*fn)(const char*, T*), const std::string& name, T* out) {
  const wsm_status s = fn(name.c_str(), out);
  if (s != WSM_OK) {
    report_error("invalid option", s);
    return false;
  }
  return true;
}

void print_runs(const wsm_bench_result& r) {
  std::printf("runs_ms=");
  for (uint32_t i = 0; i < r.runs; ++i) std::printf(i ? ",%.3f" : "%.3f", r.run_ms[i]);
  std::printf("\n");
}

struct Common {
  std::string algo = "ws-wmult";
  std::string buffer = "segmented";
  std::string profile = "seq-cst";
  uint32_t segment_len = 256;
  uint32_t reps = 5;
  uint64_t seed = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--algo", c.algo, "ws-mult|ws-wmult|b-ws-mult|b-ws-wmult|exact|chase-lev|idempotent-fifo")
      ->capture_default_str();
  app->add_option("--buffer", c.buffer, "segmented|doubling")->capture_default_str();
  app->add_option("--segment-len", c.segment_len, "segment length / initial array length")->capture_default_str();
  app->add_option("--profile", c.profile, "seq-cst|relaxed")->capture_default_str();
  app->add_option("--reps", c.reps, "repetitions (trimmed mean drops min and max)")->capture_default_str();
  app->add_option("--seed", c.seed)->capture_default_str();
}

bool fill_config(const Common& c, wsm_bench_config* cfg) {
  wsm_bench_config_default(cfg);
  if (!parse(wsm_parse_algorithm, c.algo, &cfg->algorithm)) return false;
  if (!parse(wsm_parse_buffer, c.buffer, &cfg->buffer)) return false;
  if (!parse(wsm_parse_profile, c.profile, &cfg->profile)) return false;
  cfg->segment_length = c.segment_len;
  cfg->reps = c.reps;
  cfg->seed = c.seed;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Work-stealing queue benchmarks"};
  app.require_subcommand(1);

  Common zc;
  std::string mode = "put-take";
  uint64_t ops = 1'000'000;
  uint32_t thieves = 1;
  auto* zero = app.add_subcommand("zero-cost", "N puts followed by N takes or by steals until empty");
  add_common(zero, zc);
  zero->add_option("--mode", mode, "put-take|put-steal")->capture_default_str();
  zero->add_option("--ops", ops, "number of tasks")->capture_default_str();
  zero->add_option("--thieves", thieves, "thief threads for put-steal")->capture_default_str();

  Common st;
  std::string graph = "torus2d";
  uint64_t vertices = 100'000;
  uint64_t edges = 0;
  bool directed = false;
  uint32_t threads = 1;
  auto* span = app.add_subcommand("spanning-tree", "parallel spanning tree over a generated graph");
  add_common(span, st);
  span->add_option("--graph", graph, "torus2d|torus2d60|torus3d|torus3d40|random")->capture_default_str();
  span->add_option("--vertices", vertices)->capture_default_str();
  span->add_option("--edges", edges, "random graphs only; default 4 * vertices");
  span->add_flag("--directed,!--undirected", directed, "directed arcs (default undirected)");
  span->add_option("--threads", threads)->capture_default_str();

  std::string suite_file;
  std::string out_file = "results.csv";
  auto* suite = app.add_subcommand("suite", "run a JSON suite and write CSV");
  suite->add_option("--file", suite_file, "suite description (JSON)")->required()->check(CLI::ExistingFile);
  suite->add_option("--out", out_file, "CSV output path")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*zero) {
    wsm_bench_config cfg;
    wsm_zero_cost_mode m;
    if (!fill_config(zc, &cfg) || !parse(wsm_parse_zero_cost_mode, mode, &m)) return 2;
    cfg.ops = ops;
    cfg.thieves = thieves;
    wsm_bench_result r;
    const wsm_status s = wsm_bench_zero_cost(&cfg, m, &r);
    if (s != WSM_OK) return report_error("zero-cost", s);
    std::printf("algorithm=%s mode=%s ops=%llu trimmed_mean_ms=%.3f extracted=%llu ok=%s\n",
                wsm_algorithm_name(cfg.algorithm), mode.c_str(), static_cast<unsigned long long>(ops),
                r.trimmed_mean_ms, static_cast<unsigned long long>(r.extracted), r.ok ? "true" : "false");
    print_runs(r);
    if (!r.ok) std::fprintf(stderr, "bench: %s\n", wsm_last_error());
    return r.ok ? 0 : 1;
  }

  if (*span) {
    wsm_bench_config cfg;
    wsm_graph g;
    if (!fill_config(st, &cfg) || !parse(wsm_parse_graph, graph, &g)) return 2;
    cfg.threads = threads;
    wsm_bench_result r;
    const wsm_status s = wsm_bench_spanning_tree(&cfg, g, vertices, edges, directed ? 1 : 0, &r);
    if (s != WSM_OK) return report_error("spanning-tree", s);
    std::printf("algorithm=%s graph=%s directed=%s threads=%u trimmed_mean_ms=%.3f extractions=%llu valid=%s\n",
                wsm_algorithm_name(cfg.algorithm), graph.c_str(), directed ? "true" : "false", threads,
                r.trimmed_mean_ms, static_cast<unsigned long long>(r.extracted), r.valid ? "true" : "false");
    print_runs(r);
    if (!r.valid) std::fprintf(stderr, "bench: %s\n", wsm_last_error());
    return r.valid ? 0 : 1;
  }

  std::ifstream in(suite_file);
  std::stringstream text;
  text << in.rdbuf();
  std::printf("%s\n", "graph,directed,algorithm,buffer,threads,trimmed_mean_ms,speedup_vs_chaselev_1t");
  char* csv = nullptr;
  const wsm_status s = wsm_bench_suite(
      text.str().c_str(),
      [](const char* row, void*) {
        std::printf("%s\n", row);
        std::fflush(stdout);
      },
      nullptr, &csv);
  if (s != WSM_OK) return report_error("suite", s);
  const bool all_valid = *wsm_last_error() == '\0';
  std::ofstream out(out_file);
  out << csv;
  wsm_free(csv);
  if (!out) {
    std::cerr << "bench: cannot write " << out_file << '\n';
    return 2;
  }
  return all_valid ? 0 : 1;
}
