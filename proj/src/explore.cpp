#include "wsm/explore.hpp"

#include <bit>
#include <functional>
#include <unordered_set>

#include "wsm/baselines.hpp"
#include "wsm/wsqueue.hpp"

namespace wsm {

std::string_view to_string(ExploreStatus s) {
  switch (s) {
    case ExploreStatus::kComplete: return "complete";
    case ExploreStatus::kBoundExhausted: return "bound-exhausted";
    case ExploreStatus::kProgramError: return "program-error";
    case ExploreStatus::kStopped: return "stopped";
  }
  return "?";
}

namespace explore_detail {

struct ProcState {
  std::size_t next_op = 0;
  std::vector<std::byte> local;     // handle before the current operation
  std::vector<AccessRecord> done;   // accesses of the current operation
  std::vector<void*> allocs;        // objects allocated by the current operation
  bool invoked = false;
  std::optional<Access> pending;
};

struct StateKey {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  friend bool operator==(const StateKey&, const StateKey&) = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const { return static_cast<std::size_t>(k.a ^ (k.b * 0x9e3779b97f4a7c15ULL)); }
};

template <class T>
void put_raw(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

/// Execution state of one interleaving plus the operations that advance it.
class Machine {
 public:
  struct Snapshot {
    std::vector<Word> memory;
    std::vector<ProcState> procs;
    History history;
    AccessLog log;
    std::optional<OnlineChecker> checker;
    bool violated = false;
    std::uint64_t steps = 0;
  };

  Machine(SimTarget& target, const Program& program, const ExploreBounds& bounds,
          const std::vector<Word>& initial_memory)
      : target_(target), program_(program), bounds_(bounds), initial_memory_(initial_memory) {
    if (program.processes.size() > target.process_count()) {
      throw ContractViolation("program has more processes than the target supports");
    }
  }

  void reset(std::optional<OnlineChecker> checker, bool keep_log) {
    target_.context().memory() = initial_memory_;
    procs_.assign(program_.processes.size(), {});
    for (ProcessId p = 0; p < procs_.size(); ++p) procs_[p].local = target_.initial_local(p);
    history_ = {};
    log_.clear();
    checker_ = std::move(checker);
    violated_ = false;
    steps_ = 0;
    keep_log_ = keep_log;
    for (ProcessId p = 0; p < procs_.size(); ++p) settle(p);
  }

  Snapshot save() const {
    return {target_.context().memory(), procs_, history_, log_, checker_, violated_, steps_};
  }

  void restore(const Snapshot& s) {
    target_.context().memory() = s.memory;
    procs_ = s.procs;
    history_ = s.history;
    log_ = s.log;
    checker_ = s.checker;
    violated_ = s.violated;
    steps_ = s.steps;
  }

  bool enabled(ProcessId p) const { return p < procs_.size() && procs_[p].pending.has_value(); }

  std::vector<ProcessId> enabled_set() const {
    std::vector<ProcessId> out;
    for (ProcessId p = 0; p < procs_.size(); ++p) {
      if (procs_[p].pending) out.push_back(p);
    }
    return out;
  }

  void step(ProcessId p) {
    if (!enabled(p)) throw ContractViolation("process " + std::to_string(p) + " has no pending step");
    if (steps_ >= bounds_.max_steps) throw BoundExhausted("step bound reached");
    ProcState& ps = procs_[p];
    if (!ps.invoked) {
      emit_invoke(p);
      ps.invoked = true;
    }
    const Access a = *ps.pending;
    ps.pending.reset();
    const Word result = target_.context().apply(a);
    if (keep_log_) log_.push_back({steps_, p, {a, result}});
    ++steps_;
    ps.done.push_back({a, result});
    settle(p);
  }

  const History& history() const { return history_; }
  const AccessLog& log() const { return log_; }
  bool violated() const { return violated_; }
  const std::vector<ProcState>& procs() const { return procs_; }
  SimContext& context() { return target_.context(); }

  StateKey key() const {
    std::string buf;
    const auto& mem = target_.context().memory();
    put_raw(buf, mem.size());
    buf.append(reinterpret_cast<const char*>(mem.data()), mem.size() * sizeof(Word));
    for (const ProcState& ps : procs_) {
      put_raw(buf, ps.next_op);
      put_raw(buf, ps.invoked);
      put_raw(buf, ps.local.size());
      buf.append(reinterpret_cast<const char*>(ps.local.data()), ps.local.size());
      put_raw(buf, ps.done.size());
      for (const AccessRecord& r : ps.done) {
        put_raw(buf, r.access.kind);
        put_raw(buf, r.access.cell);
        put_raw(buf, r.access.arg);
        put_raw(buf, r.access.arg2);
        put_raw(buf, r.result);
      }
      put_raw(buf, ps.allocs.size());
      for (void* q : ps.allocs) put_raw(buf, q);
    }
    if (checker_) checker_->encode(buf);
    const std::hash<std::string_view> h;
    StateKey k;
    k.a = h(buf);
    buf.push_back('\x5a');
    k.b = h(buf);
    return k;
  }

 private:
  void emit_invoke(ProcessId p) {
    const OpSpec& op = program_.processes[p][procs_[p].next_op];
    const Word arg = has_argument(op.kind) ? op.arg : 0;
    history_.invoke(p, op.kind, arg);
    if (checker_) checker_->invoke(p, op.kind, arg);
  }

  void emit_respond(ProcessId p, Word result) {
    const OpSpec& op = program_.processes[p][procs_[p].next_op];
    history_.respond(p, op.kind, result);
    if (checker_ && !checker_->respond(p, op.kind, result)) violated_ = true;
  }

  // Re-runs p's current operation; either it completes or the first
  // unperformed access becomes p's pending step.
  void settle(ProcessId p) {
    ProcState& ps = procs_[p];
    const auto& ops = program_.processes[p];
    while (ps.next_op < ops.size()) {
      SimContext& ctx = target_.context();
      SimContext::ReplayFrame frame;
      frame.done = ps.done;
      frame.allocations = &ps.allocs;
      frame.retry_cap = bounds_.retry_cap;
      std::vector<std::byte> local = ps.local;
      Word result = 0;
      {
        SimContext::Activation active(ctx);
        ctx.push_frame(&frame);
        try {
          result = target_.run(p, local.data(), ops[ps.next_op]);
        } catch (const SimYield&) {
          ctx.pop_frame();
          ps.pending = frame.pending;
          return;
        } catch (...) {
          ctx.pop_frame();
          throw;
        }
        ctx.pop_frame();
      }
      if (frame.pos != ps.done.size()) throw ContractViolation("replay diverged: operation finished early");
      if (!ps.invoked) emit_invoke(p);
      emit_respond(p, result);
      ps.local = std::move(local);
      ps.done.clear();
      ps.allocs.clear();
      ps.invoked = false;
      ++ps.next_op;
    }
    ps.pending.reset();
  }

  SimTarget& target_;
  const Program& program_;
  ExploreBounds bounds_;
  std::vector<Word> initial_memory_;
  std::vector<ProcState> procs_;
  History history_;
  AccessLog log_;
  std::optional<OnlineChecker> checker_;
  bool violated_ = false;
  bool keep_log_ = true;
  std::uint64_t steps_ = 0;
};

}  // namespace explore_detail

using explore_detail::Machine;
using explore_detail::StateKey;
using explore_detail::StateKeyHash;

struct Explorer::Impl {
  SimTarget& target;
  Program program;
  ExploreBounds bounds;
  std::vector<Word> initial_memory;
};

Explorer::Explorer(SimTarget& target, Program program, ExploreBounds bounds)
    : impl_(std::make_unique<Impl>(Impl{target, std::move(program), bounds, target.context().memory()})) {}

Explorer::~Explorer() = default;

ExploreResult Explorer::explore(const Visitor& visit) {
  ExploreResult result;
  Machine m(impl_->target, impl_->program, impl_->bounds, impl_->initial_memory);
  bool stopped = false;

  std::function<void()> dfs = [&]() {
    const auto enabled = m.enabled_set();
    if (enabled.empty()) {
      ++result.executions;
      if (!visit(m.history(), m.log()) || result.executions >= impl_->bounds.max_executions) stopped = true;
      return;
    }
    const auto snap = m.save();
    for (std::size_t i = 0; i < enabled.size() && !stopped; ++i) {
      if (i > 0) m.restore(snap);
      try {
        m.step(enabled[i]);
      } catch (const BoundExhausted&) {
        ++result.bound_hits;
        continue;
      }
      dfs();
    }
  };

  try {
    m.reset(std::nullopt, true);
    dfs();
  } catch (const BoundExhausted& e) {
    ++result.bound_hits;
  } catch (const std::exception& e) {
    result.status = ExploreStatus::kProgramError;
    result.message = e.what();
    return result;
  }
  if (stopped) {
    result.status = ExploreStatus::kStopped;
  } else if (result.bound_hits > 0) {
    result.status = ExploreStatus::kBoundExhausted;
    result.message = std::to_string(result.bound_hits) + " schedules exceeded a bound";
  }
  return result;
}

CheckedResult Explorer::explore_checked(const SpecMachine& spec, const CheckedOptions& opt) {
  CheckedResult result;
  Machine m(impl_->target, impl_->program, impl_->bounds, impl_->initial_memory);
  std::unordered_set<StateKey, StateKeyHash> visited;
  bool stopped = false;

  auto offline = [&](const History& h) {
    return opt.sets ? check_set_linearizable(h, spec, opt.offline) : check_linearizable(h, spec, opt.offline);
  };

  auto report = [&](std::string reason) {
    result.violation = true;
    result.violation_reason = std::move(reason);
    result.counterexample = m.history();
    stopped = true;
  };

  std::function<void()> dfs = [&]() {
    if (m.violated()) {
      const Verdict v = offline(m.history());
      report(v.accepted ? "online checker rejected a prefix the offline search accepts"
                        : "history prefix cannot be linearized");
      return;
    }
    if (opt.merge && !visited.insert(m.key()).second) {
      ++result.merged;
      return;
    }
    if (++result.states > impl_->bounds.max_states) {
      stopped = true;
      return;
    }
    const auto enabled = m.enabled_set();
    if (enabled.empty()) {
      ++result.terminals;
      if (opt.offline_check) {
        const Verdict v = offline(m.history());
        if (v.inconclusive) {
          result.offline_inconclusive = true;
        } else if (!v.accepted) {
          report("offline search rejected a history the online checker accepted");
          return;
        }
      }
      if (opt.terminal_check) {
        if (auto msg = opt.terminal_check(m.history()); !msg.empty()) report(std::move(msg));
      }
      return;
    }
    const auto snap = m.save();
    for (std::size_t i = 0; i < enabled.size() && !stopped; ++i) {
      if (i > 0) m.restore(snap);
      try {
        m.step(enabled[i]);
      } catch (const BoundExhausted&) {
        ++result.bound_hits;
        continue;
      }
      dfs();
    }
  };

  try {
    m.reset(OnlineChecker(spec, impl_->program.processes.size(), opt.sets), false);
    dfs();
  } catch (const BoundExhausted&) {
    ++result.bound_hits;
  } catch (const std::exception& e) {
    result.status = ExploreStatus::kProgramError;
    result.message = e.what();
    return result;
  }
  if (stopped && !result.violation) {
    result.status = ExploreStatus::kStopped;
  } else if (result.bound_hits > 0) {
    result.status = ExploreStatus::kBoundExhausted;
    result.message = std::to_string(result.bound_hits) + " schedules exceeded a bound";
  }
  return result;
}

// ---------------------------------------------------------------------------
// Sessions and schedule replay
// ---------------------------------------------------------------------------

struct Explorer::Session::Impl {
  Machine machine;
  Impl(SimTarget& t, const Program& p, const ExploreBounds& b, const std::vector<Word>& mem) : machine(t, p, b, mem) {
    machine.reset(std::nullopt, true);
  }
};

Explorer::Session::Session(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Explorer::Session::~Session() = default;
Explorer::Session::Session(Session&&) noexcept = default;
Explorer::Session& Explorer::Session::operator=(Session&&) noexcept = default;

bool Explorer::Session::enabled(ProcessId pid) const { return impl_->machine.enabled(pid); }

std::optional<Access> Explorer::Session::peek(ProcessId pid) const {
  const auto& procs = impl_->machine.procs();
  if (pid >= procs.size()) return std::nullopt;
  return procs[pid].pending;
}

void Explorer::Session::step(ProcessId pid) { impl_->machine.step(pid); }

void Explorer::Session::finish_op(ProcessId pid) {
  const std::size_t before = completed_ops(pid);
  while (completed_ops(pid) == before) impl_->machine.step(pid);
}

void Explorer::Session::run_to_end(ProcessId pid) {
  while (enabled(pid)) impl_->machine.step(pid);
}

std::size_t Explorer::Session::completed_ops(ProcessId pid) const { return impl_->machine.procs().at(pid).next_op; }

std::size_t Explorer::Session::accesses_in_op(ProcessId pid) const {
  return impl_->machine.procs().at(pid).done.size();
}

bool Explorer::Session::finished() const { return impl_->machine.enabled_set().empty(); }
const History& Explorer::Session::history() const { return impl_->machine.history(); }
const AccessLog& Explorer::Session::log() const { return impl_->machine.log(); }
SimContext& Explorer::Session::context() { return impl_->machine.context(); }

Explorer::Session Explorer::session() {
  return Session(std::make_unique<Session::Impl>(impl_->target, impl_->program, impl_->bounds, impl_->initial_memory));
}

std::pair<History, AccessLog> Explorer::replay(const Schedule& schedule) {
  Machine m(impl_->target, impl_->program, impl_->bounds, impl_->initial_memory);
  m.reset(std::nullopt, true);
  for (ProcessId p : schedule.steps) m.step(p);
  return {m.history(), m.log()};
}

// ---------------------------------------------------------------------------
// Scripted duplicate-extraction executions
// ---------------------------------------------------------------------------

namespace {

Program scripted_program(int z) {
  if (z < 1) throw std::invalid_argument("z must be >= 1");
  Program prog;
  prog.processes.resize(2);
  for (int i = 1; i <= z; ++i) prog.processes[0].push_back({OpKind::kPut, i});
  for (int i = 1; i <= z; ++i) prog.processes[0].push_back({OpKind::kTake, 0});
  for (int i = 0; i < z * (z + 1) / 2; ++i) prog.processes[1].push_back({OpKind::kSteal, 0});
  return prog;
}

// Rounds r = z..1: advance the owner's take until `pause` holds (or it
// completes), let the thief finish r steals, then complete the take.
template <class Pause>
History run_rounds(SimTarget& target, int z, Pause pause) {
  ExploreBounds bounds;
  bounds.max_steps = ~std::size_t{0};
  bounds.retry_cap = ~std::size_t{0};
  Explorer ex(target, scripted_program(z), bounds);
  auto s = ex.session();
  for (int i = 0; i < z; ++i) s.finish_op(0);
  for (int r = z; r >= 1; --r) {
    const std::size_t before = s.completed_ops(0);
    while (s.completed_ops(0) == before && !pause(s)) s.step(0);
    for (int k = 0; k < r; ++k) s.finish_op(1);
    if (s.completed_ops(0) == before) s.finish_op(0);
  }
  return s.history();
}

}  // namespace

History replay_idempotent_counterexample(int z) {
  QueueTarget<IdempotentFifo<SimBackend>> target(1);
  return run_rounds(target, z, [](Explorer::Session& s) {
    const auto a = s.peek(0);
    return a && a->kind == AccessKind::kWrite;
  });
}

History replay_ws_mult_shape(int z) {
  QueueOptions opt;
  opt.capacity = z + 2;
  const auto height = static_cast<std::size_t>(std::countr_zero(std::bit_ceil(static_cast<std::size_t>(z + 2))));
  QueueTarget<WsMult<SimBackend>> target(1, opt);
  return run_rounds(target, z, [height](Explorer::Session& s) { return s.accesses_in_op(0) >= height + 1; });
}

}  // namespace wsm
