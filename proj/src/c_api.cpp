#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "bench_dispatch.hpp"
#include "wsm/bench.hpp"
#include "wsm/checker.hpp"
#include "wsm/history.hpp"
#include "wsm/wsm.h"

namespace {

thread_local std::string g_last_error;

wsm_status fail(wsm_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Converts the library's exceptions into status codes.
template <class F>
wsm_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const wsm::CapacityError& e) {
    return fail(WSM_ERR_CAPACITY, e.what());
  } catch (const wsm::ContractViolation& e) {
    return fail(WSM_ERR_CONTRACT, e.what());
  } catch (const wsm::ParseError& e) {
    return fail(WSM_ERR_PARSE, e.what());
  } catch (const wsm::BoundExhausted& e) {
    return fail(WSM_ERR_BOUND, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(WSM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(WSM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WSM_ERR_INTERNAL, "unknown error");
  }
}

struct ThiefBase {
  virtual ~ThiefBase() = default;
  virtual wsm::TakeResult steal() = 0;
};

struct QueueBase {
  virtual ~QueueBase() = default;
  virtual bool put(wsm::TaskId x) = 0;
  virtual wsm::TakeResult take() = 0;
  virtual std::unique_ptr<ThiefBase> thief() = 0;
};

template <class Q>
struct QueueImpl final : QueueBase {
  struct Thief final : ThiefBase {
    explicit Thief(typename Q::Thief t) : handle(t) {}
    wsm::TakeResult steal() override { return handle.steal(); }
    typename Q::Thief handle;
  };

  explicit QueueImpl(std::unique_ptr<Q> q) : queue(std::move(q)), owner(queue->owner()) {}
  bool put(wsm::TaskId x) override { return owner.put(x); }
  wsm::TakeResult take() override { return owner.take(); }
  std::unique_ptr<ThiefBase> thief() override { return std::make_unique<Thief>(queue->thief()); }

  std::unique_ptr<Q> queue;
  typename Q::Owner owner;
};

wsm::bench::Algorithm to_algorithm(wsm_algorithm a) {
  if (a < WSM_ALGO_WS_MULT || a > WSM_ALGO_IDEMPOTENT_FIFO) throw std::invalid_argument("unknown algorithm");
  return static_cast<wsm::bench::Algorithm>(a);
}

wsm::bench::BenchConfig to_config(const wsm_bench_config* c) {
  if (c == nullptr) throw std::invalid_argument("null config");
  wsm::bench::BenchConfig cfg;
  cfg.algorithm = to_algorithm(c->algorithm);
  cfg.buffer = c->buffer == WSM_BUFFER_DOUBLING ? wsm::bench::BufferKind::kDoubling : wsm::bench::BufferKind::kSegmented;
  cfg.segment_length = c->segment_length;
  cfg.ops = c->ops;
  cfg.threads = c->threads;
  cfg.thieves = c->thieves;
  cfg.reps = c->reps;
  cfg.seed = c->seed;
  cfg.profile = c->profile == WSM_PROFILE_RELAXED ? wsm::MemoryProfile::kRelaxed : wsm::MemoryProfile::kSeqCst;
  if (cfg.segment_length == 0) throw std::invalid_argument("segment length must be positive");
  if (cfg.reps == 0 || cfg.reps > WSM_MAX_RUNS) throw std::invalid_argument("reps must be in 1..64");
  return cfg;
}

void fill_result(const wsm::bench::BenchReport& r, wsm_bench_result* out) {
  std::memset(out, 0, sizeof *out);
  out->trimmed_mean_ms = r.trimmed_mean_ms;
  out->runs = static_cast<uint32_t>(std::min<std::size_t>(r.run_ms.size(), WSM_MAX_RUNS));
  for (uint32_t i = 0; i < out->runs; ++i) out->run_ms[i] = r.run_ms[i];
  out->extracted = r.extracted;
  out->ok = r.ok ? 1 : 0;
}

template <class T, class Parse>
wsm_status parse_name(const char* name, T* out, Parse parse, const char* what) {
  return guarded([&] {
    if (name == nullptr || out == nullptr) return fail(WSM_ERR_INVALID_ARGUMENT, "null argument");
    auto v = parse(name);
    if (!v) return fail(WSM_ERR_PARSE, std::string("unknown ") + what + " '" + name + "'");
    *out = static_cast<T>(*v);
    return WSM_OK;
  });
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

struct wsm_queue {
  std::unique_ptr<QueueBase> impl;
};

struct wsm_thief {
  std::unique_ptr<ThiefBase> impl;
};

extern "C" {

const char* wsm_last_error(void) { return g_last_error.c_str(); }

const char* wsm_status_string(wsm_status status) {
  switch (status) {
    case WSM_OK: return "ok";
    case WSM_EMPTY: return "empty";
    case WSM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WSM_ERR_CAPACITY: return "capacity exceeded";
    case WSM_ERR_CONTRACT: return "contract violation";
    case WSM_ERR_PARSE: return "parse error";
    case WSM_ERR_BOUND: return "bound exhausted";
    case WSM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void wsm_free(void* p) { std::free(p); }

wsm_status wsm_parse_algorithm(const char* name, wsm_algorithm* out) {
  return parse_name(name, out, wsm::bench::parse_algorithm, "algorithm");
}
wsm_status wsm_parse_buffer(const char* name, wsm_buffer* out) {
  return parse_name(name, out, wsm::bench::parse_buffer, "buffer");
}
wsm_status wsm_parse_profile(const char* name, wsm_profile* out) {
  return parse_name(name, out, wsm::bench::parse_profile, "memory profile");
}
wsm_status wsm_parse_graph(const char* name, wsm_graph* out) {
  return parse_name(name, out, wsm::bench::parse_graph_kind, "graph");
}
wsm_status wsm_parse_zero_cost_mode(const char* name, wsm_zero_cost_mode* out) {
  return parse_name(name, out, wsm::bench::parse_zero_cost_mode, "mode");
}

const char* wsm_algorithm_name(wsm_algorithm algorithm) {
  if (algorithm < WSM_ALGO_WS_MULT || algorithm > WSM_ALGO_IDEMPOTENT_FIFO) return "unknown";
  return wsm::bench::to_string(static_cast<wsm::bench::Algorithm>(algorithm)).data();
}

wsm_status wsm_queue_create(wsm_algorithm algorithm, wsm_buffer buffer, uint64_t capacity, uint32_t segment_length,
                            wsm_queue** out) {
  return guarded([&] {
    if (out == nullptr) return fail(WSM_ERR_INVALID_ARGUMENT, "null output pointer");
    *out = nullptr;
    if (capacity < 2 || capacity > (uint64_t{1} << 40)) return fail(WSM_ERR_INVALID_ARGUMENT, "capacity must be in 2..2^40");
    if (segment_length == 0) return fail(WSM_ERR_INVALID_ARGUMENT, "segment length must be positive");
    wsm::bench::BenchConfig cfg;
    cfg.algorithm = to_algorithm(algorithm);
    cfg.buffer = buffer == WSM_BUFFER_DOUBLING ? wsm::bench::BufferKind::kDoubling : wsm::bench::BufferKind::kSegmented;
    cfg.segment_length = segment_length;
    auto impl = wsm::bench::detail::dispatch(cfg, [&](auto tag) -> std::unique_ptr<QueueBase> {
      using Q = typename decltype(tag)::type;
      return std::make_unique<QueueImpl<Q>>(
          wsm::bench::detail::make_queue<Q>(static_cast<wsm::Word>(capacity), wsm::bench::detail::buffer_options(cfg)));
    });
    *out = new wsm_queue{std::move(impl)};
    return WSM_OK;
  });
}

void wsm_queue_destroy(wsm_queue* queue) { delete queue; }

wsm_status wsm_put(wsm_queue* queue, int64_t task) {
  return guarded([&] {
    if (queue == nullptr) return fail(WSM_ERR_INVALID_ARGUMENT, "null queue");
    if (task < 1) return fail(WSM_ERR_INVALID_ARGUMENT, "task ids start at 1");
    queue->impl->put(task);
    return WSM_OK;
  });
}

wsm_status wsm_take(wsm_queue* queue, int64_t* task) {
  return guarded([&] {
    if (queue == nullptr || task == nullptr) return fail(WSM_ERR_INVALID_ARGUMENT, "null argument");
    auto x = queue->impl->take();
    if (!x) return WSM_EMPTY;
    *task = *x;
    return WSM_OK;
  });
}

wsm_status wsm_thief_create(wsm_queue* queue, wsm_thief** out) {
  return guarded([&] {
    if (queue == nullptr || out == nullptr) return fail(WSM_ERR_INVALID_ARGUMENT, "null argument");
    *out = new wsm_thief{queue->impl->thief()};
    return WSM_OK;
  });
}

void wsm_thief_destroy(wsm_thief* thief) { delete thief; }

wsm_status wsm_steal(wsm_thief* thief, int64_t* task) {
  return guarded([&] {
    if (thief == nullptr || task == nullptr) return fail(WSM_ERR_INVALID_ARGUMENT, "null argument");
    auto x = thief->impl->steal();
    if (!x) return WSM_EMPTY;
    *task = *x;
    return WSM_OK;
  });
}

wsm_status wsm_check_history(const char* history, wsm_spec spec, uint32_t processes, int* accepted) {
  return guarded([&] {
    if (history == nullptr || accepted == nullptr) return fail(WSM_ERR_INVALID_ARGUMENT, "null argument");
    const auto h = wsm::History::parse(history);
    wsm::Verdict v;
    switch (spec) {
      case WSM_SPEC_MULTIPLICITY: v = wsm::check_set_linearizable(h, wsm::MultiplicityQueueSpec{}); break;
      case WSM_SPEC_WEAK_MULTIPLICITY:
        if (processes == 0) return fail(WSM_ERR_INVALID_ARGUMENT, "process count must be positive");
        v = wsm::check_linearizable(h, wsm::WeakMultiplicityQueueSpec{processes});
        break;
      case WSM_SPEC_EXACT_FIFO: v = wsm::check_linearizable(h, wsm::ExactFifoSpec{}); break;
      default: return fail(WSM_ERR_INVALID_ARGUMENT, "unknown specification");
    }
    *accepted = v.inconclusive ? -1 : (v.accepted ? 1 : 0);
    if (!v.accepted) g_last_error = v.reason;
    return WSM_OK;
  });
}

wsm_status wsm_check_bounds(const char* history, wsm_bound_mode mode, int* accepted) {
  return guarded([&] {
    if (history == nullptr || accepted == nullptr) return fail(WSM_ERR_INVALID_ARGUMENT, "null argument");
    if (mode < WSM_BOUND_MULT || mode > WSM_BOUND_EXACT) return fail(WSM_ERR_INVALID_ARGUMENT, "unknown bound mode");
    const auto v = wsm::check_multiplicity_bounds(wsm::History::parse(history), static_cast<wsm::BoundMode>(mode));
    *accepted = v.accepted ? 1 : 0;
    if (!v.accepted) g_last_error = v.reason;
    return WSM_OK;
  });
}

void wsm_bench_config_default(wsm_bench_config* cfg) {
  if (cfg == nullptr) return;
  const wsm::bench::BenchConfig d;
  cfg->algorithm = static_cast<wsm_algorithm>(d.algorithm);
  cfg->buffer = WSM_BUFFER_SEGMENTED;
  cfg->segment_length = static_cast<uint32_t>(d.segment_length);
  cfg->ops = d.ops;
  cfg->threads = static_cast<uint32_t>(d.threads);
  cfg->thieves = static_cast<uint32_t>(d.thieves);
  cfg->reps = static_cast<uint32_t>(d.reps);
  cfg->seed = d.seed;
  cfg->profile = WSM_PROFILE_SEQ_CST;
}

wsm_status wsm_bench_zero_cost(const wsm_bench_config* cfg, wsm_zero_cost_mode mode, wsm_bench_result* out) {
  return guarded([&] {
    if (out == nullptr) return fail(WSM_ERR_INVALID_ARGUMENT, "null result");
    const auto c = to_config(cfg);
    const auto r = wsm::bench::zero_cost(
        c, mode == WSM_PUT_STEAL ? wsm::bench::ZeroCostMode::kPutSteal : wsm::bench::ZeroCostMode::kPutTake);
    fill_result(r, out);
    out->valid = out->ok;
    if (!r.ok) g_last_error = r.error;
    return WSM_OK;
  });
}

wsm_status wsm_bench_spanning_tree(const wsm_bench_config* cfg, wsm_graph graph, uint64_t vertices, uint64_t edges,
                                   int directed, wsm_bench_result* out) {
  return guarded([&] {
    if (out == nullptr) return fail(WSM_ERR_INVALID_ARGUMENT, "null result");
    if (graph < WSM_GRAPH_TORUS2D || graph > WSM_GRAPH_RANDOM) return fail(WSM_ERR_INVALID_ARGUMENT, "unknown graph");
    const auto c = to_config(cfg);
    wsm::bench::GraphParams gp;
    gp.kind = static_cast<wsm::bench::GraphKind>(graph);
    gp.vertices = vertices;
    gp.edges = edges;
    gp.directed = directed != 0;
    gp.seed = c.seed;
    const auto g = wsm::bench::gen_graph(gp);
    const auto r = wsm::bench::spanning_tree(g, 0, c);
    fill_result(r.report, out);
    out->valid = r.valid ? 1 : 0;
    if (!r.valid) g_last_error = r.report.error;
    return WSM_OK;
  });
}

wsm_status wsm_bench_suite(const char* suite_json, wsm_suite_progress progress, void* user, char** csv) {
  return guarded([&] {
    if (suite_json == nullptr || csv == nullptr) return fail(WSM_ERR_INVALID_ARGUMENT, "null argument");
    *csv = nullptr;
    const auto spec = wsm::bench::parse_suite(suite_json);
    wsm::bench::SuiteProgress cb;
    if (progress != nullptr) {
      cb = [&](const wsm::bench::SuiteRow& row) {
        std::string line = wsm::bench::suite_csv({row});
        line = line.substr(line.find('\n') + 1);
        if (!line.empty() && line.back() == '\n') line.pop_back();
        progress(line.c_str(), user);
      };
    }
    const auto rows = wsm::bench::run_suite(spec, cb);
    *csv = dup_string(wsm::bench::suite_csv(rows));
    bool all_valid = true;
    for (const auto& r : rows) all_valid &= r.valid;
    if (!all_valid) g_last_error = "some suite rows failed";
    return WSM_OK;
  });
}

}  // extern "C"
