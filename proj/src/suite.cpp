#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "wsm/bench.hpp"

namespace wsm::bench {

namespace {

template <class T, class Parse>
T parse_enum(const nlohmann::json& j, const char* what, Parse parse) {
  if (!j.is_string()) throw ParseError(std::string("suite: ") + what + " must be a string");
  auto v = parse(j.get<std::string>());
  if (!v) throw ParseError(std::string("suite: unknown ") + what + " '" + j.get<std::string>() + "'");
  return *v;
}

std::string format_number(double v, int digits) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

SuiteSpec parse_suite(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("suite: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("suite: top level must be an object");
  SuiteSpec s;
  try {
    if (!j.contains("graphs") && !j.contains("zero_cost")) {
      throw ParseError("suite: needs \"graphs\" or \"zero_cost\"");
    }
    if (j.contains("graphs") && (!j["graphs"].is_array() || j["graphs"].empty())) {
      throw ParseError("suite: \"graphs\" must be a non-empty array");
    }
    for (const auto& gj : j.value("graphs", nlohmann::json::array())) {
      SuiteGraph g;
      g.kind = parse_enum<GraphKind>(gj.at("kind"), "graph kind", parse_graph_kind);
      g.directed = gj.value("directed", false);
      g.edges = gj.value("edges", std::uint64_t{0});
      s.graphs.push_back(g);
    }
    if (j.contains("zero_cost")) {
      const auto& z = j["zero_cost"];
      if (!z.is_object()) throw ParseError("suite: \"zero_cost\" must be an object");
      if (z.contains("modes")) {
        for (const auto& m : z["modes"]) {
          s.zero_cost_modes.push_back(parse_enum<ZeroCostMode>(m, "zero-cost mode", parse_zero_cost_mode));
        }
      } else {
        s.zero_cost_modes = {ZeroCostMode::kPutTake, ZeroCostMode::kPutSteal};
      }
      s.zero_cost_ops = z.value("ops", s.zero_cost_ops);
      s.zero_cost_thieves = z.value("thieves", s.zero_cost_thieves);
      if (s.zero_cost_ops == 0 || s.zero_cost_thieves == 0) throw ParseError("suite: zero_cost ops and thieves must be positive");
    }
    if (j.contains("algorithms")) {
      for (const auto& a : j["algorithms"]) s.algorithms.push_back(parse_enum<Algorithm>(a, "algorithm", parse_algorithm));
    } else {
      s.algorithms.assign(std::begin(kAllAlgorithms), std::end(kAllAlgorithms));
    }
    if (j.contains("threads")) {
      for (const auto& t : j["threads"]) {
        const auto n = t.get<std::size_t>();
        if (n == 0) throw ParseError("suite: thread counts must be positive");
        s.threads.push_back(n);
      }
    } else {
      s.threads = {1};
    }
    s.vertices = j.value("vertices", s.vertices);
    if (j.contains("buffer")) s.buffer = parse_enum<BufferKind>(j["buffer"], "buffer", parse_buffer);
    s.segment_length = j.value("segment_length", s.segment_length);
    s.reps = j.value("reps", s.reps);
    s.seed = j.value("seed", s.seed);
    if (j.contains("profile")) s.profile = parse_enum<MemoryProfile>(j["profile"], "profile", parse_profile);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("suite: ") + e.what());
  }
  if (s.reps == 0) throw ParseError("suite: reps must be positive");
  if (s.segment_length == 0) throw ParseError("suite: segment_length must be positive");
  return s;
}

std::vector<SuiteRow> run_suite(const SuiteSpec& spec, const SuiteProgress& progress) {
  std::vector<SuiteRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (ZeroCostMode mode : spec.zero_cost_modes) {
    BenchConfig base;
    base.buffer = spec.buffer;
    base.segment_length = spec.segment_length;
    base.ops = spec.zero_cost_ops;
    base.thieves = spec.zero_cost_thieves;
    base.reps = spec.reps;
    base.seed = spec.seed;
    base.profile = spec.profile;

    BenchConfig cl = base;
    cl.algorithm = Algorithm::kChaseLev;
    const BenchReport baseline = zero_cost(cl, mode);
    const double base_ms = baseline.ok ? baseline.trimmed_mean_ms : nan;
    for (Algorithm a : spec.algorithms) {
      BenchConfig cfg = base;
      cfg.algorithm = a;
      const BenchReport res = a == Algorithm::kChaseLev ? baseline : zero_cost(cfg, mode);
      SuiteRow row;
      row.graph = "zero-cost-" + std::string(to_string(mode));
      row.algorithm = std::string(to_string(a));
      row.buffer = a == Algorithm::kChaseLev ? "circular" : std::string(to_string(spec.buffer));
      row.threads = mode == ZeroCostMode::kPutTake ? 1 : 1 + spec.zero_cost_thieves;
      row.valid = res.ok;
      row.trimmed_mean_ms = res.ok ? res.trimmed_mean_ms : nan;
      row.speedup = res.ok ? base_ms / res.trimmed_mean_ms : nan;
      row.error = res.error;
      if (progress) progress(row);
      rows.push_back(std::move(row));
    }
  }
  for (const SuiteGraph& sg : spec.graphs) {
    GraphParams gp;
    gp.kind = sg.kind;
    gp.vertices = spec.vertices;
    gp.edges = sg.edges;
    gp.directed = sg.directed;
    gp.seed = spec.seed;
    const Graph g = gen_graph(gp);

    BenchConfig base;
    base.buffer = spec.buffer;
    base.segment_length = spec.segment_length;
    base.reps = spec.reps;
    base.seed = spec.seed;
    base.profile = spec.profile;

    BenchConfig cl = base;
    cl.algorithm = Algorithm::kChaseLev;
    cl.threads = 1;
    const SpanningResult baseline = spanning_tree(g, 0, cl);
    const double base_ms = baseline.valid ? baseline.report.trimmed_mean_ms : nan;

    for (std::size_t threads : spec.threads) {
      for (Algorithm a : spec.algorithms) {
        BenchConfig cfg = base;
        cfg.algorithm = a;
        cfg.threads = threads;
        const SpanningResult res =
            (a == Algorithm::kChaseLev && threads == 1) ? baseline : spanning_tree(g, 0, cfg);
        SuiteRow row;
        row.graph = std::string(to_string(sg.kind));
        row.directed = sg.directed;
        row.algorithm = std::string(to_string(a));
        row.buffer = a == Algorithm::kChaseLev ? "circular" : std::string(to_string(spec.buffer));
        row.threads = threads;
        row.valid = res.valid;
        if (res.valid) {
          row.trimmed_mean_ms = res.report.trimmed_mean_ms;
          row.speedup = base_ms / res.report.trimmed_mean_ms;
        } else {
          row.trimmed_mean_ms = nan;
          row.speedup = nan;
          row.error = res.report.error.empty() ? "invalid spanning tree" : res.report.error;
        }
        if (progress) progress(row);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string suite_csv(const std::vector<SuiteRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const SuiteRow& r : rows) {
    out << r.graph << ',' << (r.directed ? "true" : "false") << ',' << r.algorithm << ',' << r.buffer << ','
        << r.threads << ',' << format_number(r.trimmed_mean_ms, 6) << ',' << format_number(r.speedup, 4) << '\n';
  }
  return out.str();
}

}  // namespace wsm::bench
