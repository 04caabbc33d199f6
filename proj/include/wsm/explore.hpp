#pragma once

// Schedule exploration over the simulated backend.
//
// A SimTarget owns a SimContext holding the shared object and knows how to
// run one operation of process `pid` on that process's handle, stored as raw
// bytes (handles are trivially copyable). The explorer never suspends a
// running operation: it re-executes the operation from its starting handle
// against the accesses already performed, and the first new access is
// reported as that process's next step. Each step applies exactly one access.
//
// Invocation and response events are emitted immediately before the first
// access and immediately after the last access of an operation; any other
// placement yields a history with fewer precedence constraints.

#include <cstddef>
#include <cstring>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "wsm/checker.hpp"
#include "wsm/history.hpp"
#include "wsm/shmem.hpp"
#include "wsm/types.hpp"

namespace wsm {

struct OpSpec {
  OpKind kind = OpKind::kPut;
  Word arg = 0;
  friend bool operator==(const OpSpec&, const OpSpec&) = default;
};

/// Operation list of each process; process 0 is the owner for queues.
struct Program {
  std::vector<std::vector<OpSpec>> processes;
};

class SimTarget {
 public:
  virtual ~SimTarget() = default;
  SimContext& context() { return ctx_; }
  virtual std::size_t process_count() const = 0;
  virtual std::vector<std::byte> initial_local(ProcessId pid) const = 0;
  /// Runs `op` for `pid` with the context active; `local` holds the handle.
  virtual Word run(ProcessId pid, std::byte* local, const OpSpec& op) = 0;

 protected:
  SimContext ctx_;
};

namespace detail {

template <class H>
std::vector<std::byte> handle_bytes(const H& h) {
  static_assert(std::is_trivially_copyable_v<H>, "handles must be trivially copyable");
  std::vector<std::byte> out(sizeof(H));
  std::memcpy(out.data(), &h, sizeof(H));
  return out;
}

template <class H>
H& handle_at(std::byte* p) {
  return *std::launder(reinterpret_cast<H*>(p));
}

}  // namespace detail

/// Process 0 drives Q::Owner (put/take); processes 1..thieves drive Q::Thief.
template <class Q>
class QueueTarget final : public SimTarget {
 public:
  template <class... Args>
  explicit QueueTarget(std::size_t thieves, Args&&... args) : thieves_(thieves) {
    SimContext::Activation active(ctx_);
    queue_ = std::make_unique<Q>(std::forward<Args>(args)...);
  }

  std::size_t process_count() const override { return thieves_ + 1; }

  std::vector<std::byte> initial_local(ProcessId pid) const override {
    return pid == 0 ? detail::handle_bytes(queue_->owner()) : detail::handle_bytes(queue_->thief());
  }

  Word run(ProcessId pid, std::byte* local, const OpSpec& op) override {
    if (pid == 0) {
      auto& h = detail::handle_at<typename Q::Owner>(local);
      if (op.kind == OpKind::kPut) return h.put(op.arg) ? kTrue : kFalse;
      if (op.kind == OpKind::kTake) return to_word(h.take());
    } else if (op.kind == OpKind::kSteal) {
      return to_word(detail::handle_at<typename Q::Thief>(local).steal());
    }
    throw ContractViolation("operation not available to process " + std::to_string(pid));
  }

  Q& queue() { return *queue_; }

 private:
  std::size_t thieves_;
  std::unique_ptr<Q> queue_;
};

/// Every process may call maxread/maxwrite on one shared register.
template <class Reg>
class MaxRegisterTarget final : public SimTarget {
 public:
  MaxRegisterTarget(std::size_t processes, Word capacity) : n_(processes) {
    SimContext::Activation active(ctx_);
    reg_ = std::make_unique<Reg>(capacity);
  }
  std::size_t process_count() const override { return n_; }
  std::vector<std::byte> initial_local(ProcessId) const override { return {}; }
  Word run(ProcessId, std::byte*, const OpSpec& op) override {
    if (op.kind == OpKind::kMaxRead) return reg_->max_read();
    if (op.kind == OpKind::kMaxWrite) {
      reg_->max_write(op.arg);
      return kTrue;
    }
    throw ContractViolation("unsupported operation for a max register");
  }
  Reg& reg() { return *reg_; }

 private:
  std::size_t n_;
  std::unique_ptr<Reg> reg_;
};

/// Every process holds its own handle on one range max register.
template <class Reg>
class RangeRegisterTarget final : public SimTarget {
 public:
  RangeRegisterTarget(std::size_t processes, bool refresh_on_write = true) : n_(processes) {
    SimContext::Activation active(ctx_);
    reg_ = std::make_unique<Reg>(refresh_on_write);
  }
  std::size_t process_count() const override { return n_; }
  std::vector<std::byte> initial_local(ProcessId) const override { return detail::handle_bytes(reg_->handle()); }
  Word run(ProcessId, std::byte* local, const OpSpec& op) override {
    auto& h = detail::handle_at<typename Reg::Handle>(local);
    if (op.kind == OpKind::kRMaxRead) return h.rmax_read();
    if (op.kind == OpKind::kRMaxWrite) return h.rmax_write(op.arg) ? kTrue : kFalse;
    throw ContractViolation("unsupported operation for a range max register");
  }

 private:
  std::size_t n_;
  std::unique_ptr<Reg> reg_;
};

/// Ad-hoc target: `setup` runs once with the context active and may create
/// cells; `body(pid, op)` implements every operation. Processes carry no
/// local state.
class LambdaTarget final : public SimTarget {
 public:
  using Setup = std::function<std::shared_ptr<void>()>;
  using Body = std::function<Word(ProcessId, const OpSpec&)>;

  LambdaTarget(std::size_t processes, const Setup& setup, Body body) : n_(processes), body_(std::move(body)) {
    SimContext::Activation active(ctx_);
    state_ = setup();
  }
  std::size_t process_count() const override { return n_; }
  std::vector<std::byte> initial_local(ProcessId) const override { return {}; }
  Word run(ProcessId pid, std::byte*, const OpSpec& op) override { return body_(pid, op); }

 private:
  std::size_t n_;
  Body body_;
  std::shared_ptr<void> state_;
};

struct ExploreBounds {
  std::size_t max_steps = 10'000;  // accesses per execution
  std::size_t retry_cap = 8;       // retries per operation
  std::uint64_t max_executions = ~std::uint64_t{0};
  std::uint64_t max_states = ~std::uint64_t{0};  // explore_checked only
};

enum class ExploreStatus {
  kComplete,        // every schedule covered
  kBoundExhausted,  // some schedule hit a bound; the others were covered
  kProgramError,    // an operation threw (contract violation, capacity, ...)
  kStopped,         // the visitor asked to stop or an execution cap was hit
};

std::string_view to_string(ExploreStatus s);

struct ExploreResult {
  ExploreStatus status = ExploreStatus::kComplete;
  std::string message;
  std::uint64_t executions = 0;  // maximal interleavings visited
  std::uint64_t bound_hits = 0;
};

struct CheckedResult {
  ExploreStatus status = ExploreStatus::kComplete;
  std::string message;
  std::uint64_t states = 0;     // distinct search states expanded
  std::uint64_t merged = 0;     // transitions into an already expanded state
  std::uint64_t terminals = 0;  // maximal executions checked offline
  std::uint64_t bound_hits = 0;
  bool violation = false;
  std::string violation_reason;
  History counterexample;
  bool offline_inconclusive = false;
};

struct CheckedOptions {
  bool sets = true;          // set-linearizability (true) or linearizability
  bool offline_check = true;  // re-check every terminal history with the offline search
  CheckOptions offline;
  /// Extra predicate run on terminal histories; returning a non-empty string
  /// reports a violation. With merging on it sees one history per distinct
  /// final state, so predicates over the history itself need merge = false.
  std::function<std::string(const History&)> terminal_check;
  /// Expand each search state once. Off means plain depth-first enumeration.
  bool merge = true;
};

class Explorer {
 public:
  Explorer(SimTarget& target, Program program, ExploreBounds bounds = {});
  ~Explorer();
  Explorer(const Explorer&) = delete;
  Explorer& operator=(const Explorer&) = delete;

  /// Visits every maximal interleaving depth-first. The visitor returns
  /// false to stop early.
  using Visitor = std::function<bool(const History&, const AccessLog&)>;
  ExploreResult explore(const Visitor& visit);

  /// Exhaustive check of every interleaving against `spec`. States that
  /// agree on shared memory, every process's local state and the online
  /// checker's configuration set have identical futures and verdicts, so
  /// each is expanded once.
  CheckedResult explore_checked(const SpecMachine& spec, const CheckedOptions& opt = {});

  /// Step-by-step control of a single execution.
  class Session {
   public:
    ~Session();
    Session(Session&&) noexcept;
    Session& operator=(Session&&) noexcept;

    bool enabled(ProcessId pid) const;
    /// The access `pid` would perform next.
    std::optional<Access> peek(ProcessId pid) const;
    /// Performs one access of `pid`.
    void step(ProcessId pid);
    /// Steps `pid` until its current operation responds.
    void finish_op(ProcessId pid);
    /// Steps `pid` until it has no operations left.
    void run_to_end(ProcessId pid);
    /// Operations of `pid` already completed.
    std::size_t completed_ops(ProcessId pid) const;
    /// Accesses already performed by `pid`'s current operation.
    std::size_t accesses_in_op(ProcessId pid) const;
    bool finished() const;
    const History& history() const;
    const AccessLog& log() const;
    SimContext& context();

   private:
    friend class Explorer;
    struct Impl;
    explicit Session(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
  };

  Session session();

  /// Runs the schedule (one process id per step) and returns the history.
  /// Steps naming a process with nothing left to do are a ContractViolation.
  std::pair<History, AccessLog> replay(const Schedule& schedule);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Scripted duplicate-extraction execution on idempotent FIFO: z puts, then for
/// r = z..1 the owner's take pauses right before its head write while one
/// thief performs r steals, after which the take completes.
History replay_idempotent_counterexample(int z);

/// The same scripted shape on the multiplicity queue (tree register): the
/// owner's take pauses right after reading its task.
History replay_ws_mult_shape(int z);

}  // namespace wsm
