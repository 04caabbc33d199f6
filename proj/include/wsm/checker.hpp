#pragma once

// Correctness checking of histories against (set-)sequential specifications.
//
// A SpecMachine describes an object by a transition relation over abstract
// states. `apply` receives a concurrency class (one call for a sequential
// object, any number of pairwise-concurrent calls for a set-sequential one)
// and lists every permitted outcome: the next state and one result per call.
// An empty outcome list means the class is not allowed in that state.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wsm/history.hpp"
#include "wsm/types.hpp"

namespace wsm {

using SpecState = std::vector<Word>;

struct Call {
  ProcessId pid = 0;
  OpKind kind = OpKind::kPut;
  Word arg = 0;
};

struct Outcome {
  SpecState next;
  std::vector<Word> results;  // parallel to the calls
};

class SpecMachine {
 public:
  virtual ~SpecMachine() = default;
  virtual std::string name() const = 0;
  virtual SpecState initial() const = 0;
  /// Whether classes of more than one call may be allowed.
  virtual bool set_sequential() const { return false; }
  virtual void apply(const SpecState& state, std::span<const Call> calls, std::vector<Outcome>& out) const = 0;
};

/// FIFO work-stealing with multiplicity. State: the queue contents. A put is
/// always alone; a class of extractions (at most one take) all return the
/// head task and remove it once; on an empty queue only a lone extraction is
/// allowed, returning empty.
class MultiplicityQueueSpec final : public SpecMachine {
 public:
  std::string name() const override { return "multiplicity"; }
  SpecState initial() const override { return {}; }
  bool set_sequential() const override { return true; }
  void apply(const SpecState& s, std::span<const Call> calls, std::vector<Outcome>& out) const override;
};

/// FIFO work-stealing with weak multiplicity over `processes` processes,
/// process 0 being the owner. Each process views a suffix of the put
/// sequence; an extraction by process i may return any of its first j
/// tasks, where j stops at the first task of the shortest view, and drops
/// everything up to the returned task from its own view. While some view is
/// empty, a non-empty view may also return Empty, which empties it.
///
/// State encoding: [view offset of each process..., remaining tasks...],
/// normalized so the smallest offset is 0.
class WeakMultiplicityQueueSpec final : public SpecMachine {
 public:
  explicit WeakMultiplicityQueueSpec(std::size_t processes) : n_(processes) {}
  std::string name() const override { return "weak-multiplicity"; }
  SpecState initial() const override { return SpecState(n_, 0); }
  void apply(const SpecState& s, std::span<const Call> calls, std::vector<Outcome>& out) const override;

 private:
  std::size_t n_;
};

/// Exact FIFO queue: take and steal both remove the head task.
class ExactFifoSpec final : public SpecMachine {
 public:
  std::string name() const override { return "exact-fifo"; }
  SpecState initial() const override { return {}; }
  void apply(const SpecState& s, std::span<const Call> calls, std::vector<Outcome>& out) const override;
};

/// Max register starting at `initial_value`. The range operations are treated
/// as their exact counterparts, which makes this the sequential oracle of the
/// range max register.
class MaxRegisterSpec final : public SpecMachine {
 public:
  explicit MaxRegisterSpec(Word initial_value = 1) : init_(initial_value) {}
  std::string name() const override { return "max-register"; }
  SpecState initial() const override { return {init_}; }
  void apply(const SpecState& s, std::span<const Call> calls, std::vector<Outcome>& out) const override;

 private:
  Word init_;
};

/// Range max register over `processes` processes: a vector of per-process
/// values starting at 1. rmaxwrite raises the caller's entry; rmaxread
/// returns any value between the caller's entry and the vector maximum and
/// stores it as the caller's entry.
class RangeMaxRegisterSpec final : public SpecMachine {
 public:
  explicit RangeMaxRegisterSpec(std::size_t processes) : n_(processes) {}
  std::string name() const override { return "range-max-register"; }
  SpecState initial() const override { return SpecState(n_, 1); }
  void apply(const SpecState& s, std::span<const Call> calls, std::vector<Outcome>& out) const override;

 private:
  std::size_t n_;
};

struct Verdict {
  bool accepted = false;
  bool inconclusive = false;
  std::string reason;
  /// On acceptance: the concurrency classes, as operation ids, in order.
  std::vector<std::vector<std::size_t>> witness;
  /// On rejection by a search: completed operations left unlinearized by the
  /// deepest partial linearization found. On a bound violation: the
  /// operations involved.
  std::vector<std::size_t> frontier;
  std::uint64_t nodes = 0;

  explicit operator bool() const { return accepted; }
};

struct CheckOptions {
  std::uint64_t budget = 10'000'000;  // search nodes before giving up
};

/// Searches for an ordering of concurrency classes (non-empty sets of
/// pairwise-concurrent operations) that contains every completed operation,
/// optionally pending ones, respects real-time precedence and is a run of
/// `spec`.
Verdict check_set_linearizable(const History& h, const SpecMachine& spec, const CheckOptions& opt = {});

/// Same search restricted to singleton classes.
Verdict check_linearizable(const History& h, const SpecMachine& spec, const CheckOptions& opt = {});

/// Compares a sequential history (no overlapping operations) step by step
/// with a deterministic exact specification.
Verdict check_sequentially_exact(const History& h, const SpecMachine& exact);

enum class BoundMode {
  kMult,     // duplicate extractions of a task are pairwise concurrent
  kWeak,     // no process extracts a task twice
  kBounded,  // per task at most one take and at most one steal
  kExact,    // per task at most one extraction (exactly one when drained)
};

std::string_view to_string(BoundMode mode);

struct BoundOptions {
  /// Also require each process to return tasks in strictly increasing put order.
  bool check_order = true;
};

/// True when no operation is pending and every process that extracted ends
/// with two Empty extractions invoked after the last put responded.
bool is_drained(const History& h);

/// Multiplicity side conditions. In every mode each returned task must have
/// been put (put invoked before the extraction responded). When the history
/// is drained every put task must also have been extracted at least once.
Verdict check_multiplicity_bounds(const History& h, BoundMode mode, const BoundOptions& opt = {});

/// Incremental set-linearizability / linearizability check that consumes
/// events as they happen. It keeps every configuration (abstract state plus
/// the linearization status of each pending operation) reachable by some
/// valid partial linearization of the prefix seen so far; a response that no
/// configuration explains is a violation. Copyable, so a search can fork it.
class OnlineChecker {
 public:
  OnlineChecker(const SpecMachine& spec, std::size_t processes, bool sets);

  void invoke(ProcessId pid, OpKind kind, Word arg);
  /// Returns false once the prefix cannot be (set-)linearized.
  bool respond(ProcessId pid, OpKind kind, Word result);

  bool ok() const { return !configs_.empty(); }
  std::size_t configuration_count() const { return configs_.size(); }

  /// Canonical byte encoding of the configuration set, for state hashing.
  void encode(std::string& out) const;

 private:
  enum class Phase : std::uint8_t { kIdle, kPending, kLinearized };
  struct Status {
    Phase phase = Phase::kIdle;
    OpKind kind = OpKind::kPut;
    Word arg = 0;
    Word result = 0;
    friend bool operator==(const Status&, const Status&) = default;
    friend auto operator<=>(const Status&, const Status&) = default;
  };
  struct Config {
    SpecState state;
    std::vector<Status> procs;
    friend bool operator==(const Config&, const Config&) = default;
    friend auto operator<=>(const Config&, const Config&) = default;
  };

  void close();

  const SpecMachine* spec_;
  bool sets_;
  std::vector<Config> configs_;  // sorted, unique
};

}  // namespace wsm
