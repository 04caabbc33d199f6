#pragma once

// Histories of native (multi-threaded) runs.
//
// Every thread keeps its own event list. Each event is stamped from one global
// counter: an invocation right before the operation starts and a response
// right after it returns. If a responds before b is invoked in real time, the
// stamps agree, so the merged history never invents concurrency that did not
// occur (it may only report extra precedence-free overlap).

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "wsm/explore.hpp"
#include "wsm/history.hpp"
#include "wsm/types.hpp"

namespace wsm {

class EventRecorder {
 public:
  explicit EventRecorder(std::atomic<std::uint64_t>& clock) : clock_(&clock) {}

  void reserve(std::size_t n) { events_.reserve(n); }

  template <class F>
  Word record(ProcessId pid, OpKind kind, Word arg, F&& op) {
    events_.push_back({EventKind::kInvoke, pid, kind, arg, tick()});
    const Word result = op();
    events_.push_back({EventKind::kRespond, pid, kind, result, tick()});
    return result;
  }

  std::vector<Event>& events() { return events_; }

 private:
  std::uint64_t tick() { return clock_->fetch_add(1, std::memory_order_seq_cst); }

  std::atomic<std::uint64_t>* clock_;
  std::vector<Event> events_;
};

namespace detail {

inline History merge(std::vector<EventRecorder>& recorders) {
  std::vector<Event> all;
  std::size_t n = 0;
  for (auto& r : recorders) n += r.events().size();
  all.reserve(n);
  for (auto& r : recorders) {
    all.insert(all.end(), r.events().begin(), r.events().end());
    r.events().clear();
    r.events().shrink_to_fit();
  }
  return History::from_events(std::move(all));
}

inline void spin_until(const std::atomic<bool>& flag) {
  while (!flag.load(std::memory_order_acquire)) std::this_thread::yield();
}

}  // namespace detail

/// Runs `program` with one thread per process (process 0 is the owner) on a
/// native queue and returns the recorded history.
template <class Q>
History record_program(Q& q, const Program& program) {
  std::atomic<std::uint64_t> clock{1};
  std::atomic<bool> go{false};
  const std::size_t n = program.processes.size();
  std::vector<EventRecorder> rec(n, EventRecorder(clock));
  std::vector<std::thread> pool;
  for (std::size_t p = 0; p < n; ++p) {
    pool.emplace_back([&, p] {
      const auto pid = static_cast<ProcessId>(p);
      auto owner = q.owner();
      auto thief = q.thief();
      detail::spin_until(go);
      for (const OpSpec& op : program.processes[p]) {
        switch (op.kind) {
          case OpKind::kPut: rec[p].record(pid, op.kind, op.arg, [&] { return owner.put(op.arg) ? kTrue : kFalse; }); break;
          case OpKind::kTake: rec[p].record(pid, op.kind, 0, [&] { return to_word(owner.take()); }); break;
          case OpKind::kSteal: rec[p].record(pid, op.kind, 0, [&] { return to_word(thief.steal()); }); break;
          default: throw ContractViolation("queue programs contain put, take and steal only");
        }
      }
    });
  }
  go.store(true, std::memory_order_release);
  for (auto& t : pool) t.join();
  return detail::merge(rec);
}

struct StressConfig {
  std::size_t thieves = 1;
  Word tasks = 1'000'000;
  std::uint64_t seed = 1;
  /// Probability that the owner takes after a put while tasks remain to put.
  double take_ratio = 0.25;
};

/// Drain protocol: the owner puts tasks 1..tasks, interleaving random takes;
/// thieves steal concurrently. Once the last put has responded, every process
/// keeps extracting until two consecutive extractions invoked after that point
/// return Empty. The resulting history satisfies is_drained.
template <class Q>
History stress_run(Q& q, const StressConfig& cfg) {
  std::atomic<std::uint64_t> clock{1};
  std::atomic<bool> go{false};
  std::atomic<bool> puts_done{false};
  const std::size_t n = cfg.thieves + 1;
  std::vector<EventRecorder> rec(n, EventRecorder(clock));
  const auto expected = static_cast<std::size_t>(cfg.tasks) * 2;
  rec[0].reserve(expected * 2);
  for (std::size_t p = 1; p < n; ++p) rec[p].reserve(expected / cfg.thieves + 64);

  auto drain = [](auto&& extract, const std::atomic<bool>& done) {
    int empties = 0;
    while (empties < 2) {
      const bool after = done.load(std::memory_order_acquire);
      const Word r = extract();
      empties = (r == kEmpty && after) ? empties + 1 : 0;
    }
  };

  std::vector<std::thread> pool;
  pool.emplace_back([&] {
    auto owner = q.owner();
    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution take_now(cfg.take_ratio);
    detail::spin_until(go);
    for (Word x = 1; x <= cfg.tasks; ++x) {
      rec[0].record(0, OpKind::kPut, x, [&] { return owner.put(x) ? kTrue : kFalse; });
      if (take_now(rng)) rec[0].record(0, OpKind::kTake, 0, [&] { return to_word(owner.take()); });
    }
    puts_done.store(true, std::memory_order_release);
    drain([&] { return rec[0].record(0, OpKind::kTake, 0, [&] { return to_word(owner.take()); }); }, puts_done);
  });
  for (std::size_t p = 1; p < n; ++p) {
    pool.emplace_back([&, p] {
      const auto pid = static_cast<ProcessId>(p);
      auto thief = q.thief();
      detail::spin_until(go);
      drain([&] { return rec[p].record(pid, OpKind::kSteal, 0, [&] { return to_word(thief.steal()); }); },
            puts_done);
    });
  }
  go.store(true, std::memory_order_release);
  for (auto& t : pool) t.join();
  return detail::merge(rec);
}

/// Random sequential workload on one thread: each step picks a process and
/// one of its operations uniformly. Puts use fresh ids 1, 2, ...
template <class Q>
History run_sequential(Q& q, std::size_t thieves, std::size_t ops, std::uint64_t seed, Word max_puts) {
  History h;
  auto owner = q.owner();
  std::vector<typename Q::Thief> handles;
  for (std::size_t t = 0; t < thieves; ++t) handles.push_back(q.thief());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> who(0, thieves);
  std::bernoulli_distribution put_now(0.5);
  Word next = 1;
  for (std::size_t i = 0; i < ops; ++i) {
    const std::size_t p = who(rng);
    const auto pid = static_cast<ProcessId>(p);
    if (p == 0 && next <= max_puts && put_now(rng)) {
      h.invoke(0, OpKind::kPut, next);
      h.respond(0, OpKind::kPut, owner.put(next) ? kTrue : kFalse);
      ++next;
    } else if (p == 0) {
      h.invoke(0, OpKind::kTake);
      h.respond(0, OpKind::kTake, to_word(owner.take()));
    } else {
      h.invoke(pid, OpKind::kSteal);
      h.respond(pid, OpKind::kSteal, to_word(handles[p - 1].steal()));
    }
  }
  return h;
}

/// Random sequential workload on a range max register with `processes`
/// handles; written values are drawn from 1..max_value.
template <class Reg>
History run_sequential_register(Reg& reg, std::size_t processes, std::size_t ops, std::uint64_t seed,
                                Word max_value) {
  History h;
  std::vector<typename Reg::Handle> handles;
  for (std::size_t p = 0; p < processes; ++p) handles.push_back(reg.handle());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> who(0, processes - 1);
  std::uniform_int_distribution<Word> value(1, max_value);
  std::bernoulli_distribution write_now(0.5);
  for (std::size_t i = 0; i < ops; ++i) {
    const auto pid = static_cast<ProcessId>(who(rng));
    if (write_now(rng)) {
      const Word v = value(rng);
      h.invoke(pid, OpKind::kRMaxWrite, v);
      h.respond(pid, OpKind::kRMaxWrite, handles[pid].rmax_write(v) ? kTrue : kFalse);
    } else {
      h.invoke(pid, OpKind::kRMaxRead);
      h.respond(pid, OpKind::kRMaxRead, handles[pid].rmax_read());
    }
  }
  return h;
}

}  // namespace wsm
