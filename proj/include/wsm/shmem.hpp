#pragma once

// Shared-memory substrate. Every algorithm in this library is a template over
// a backend that supplies `Cell` (Read/Write/Swap/CompareAndSwap on one word),
// an allocation hook and a retry hook. NativeBackend maps cells onto
// std::atomic; SimBackend routes every access through the thread's active
// SimContext, which logs, counts and (under the explorer) schedules them.

#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <typeinfo>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wsm/types.hpp"

namespace wsm {

using CellId = std::uint32_t;

enum class AccessKind : std::uint8_t { kRead, kWrite, kSwap, kCas };

std::string_view to_string(AccessKind kind);

struct Access {
  AccessKind kind = AccessKind::kRead;
  CellId cell = 0;
  Word arg = 0;   // value written / swapped in / CAS expected
  Word arg2 = 0;  // CAS desired
  friend bool operator==(const Access&, const Access&) = default;
};

/// One performed access. `result` is the value read, the value displaced by a
/// swap, 1/0 for a successful/failed CAS, and 0 for a write.
struct AccessRecord {
  Access access;
  Word result = 0;
  friend bool operator==(const AccessRecord&, const AccessRecord&) = default;
};

struct LogEntry {
  std::uint64_t step = 0;
  ProcessId pid = 0;
  AccessRecord record;
  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

using AccessLog = std::vector<LogEntry>;

/// Line format: `step,pid,kind,cell,arg,result`. A CAS argument is written as
/// `expected/desired`; a write has result `-`.
std::string format_access_log(const AccessLog& log);
AccessLog parse_access_log(std::string_view text);

struct InstructionCount {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t swaps = 0;
  std::uint64_t cases = 0;

  void add(AccessKind kind) {
    switch (kind) {
      case AccessKind::kRead: ++reads; break;
      case AccessKind::kWrite: ++writes; break;
      case AccessKind::kSwap: ++swaps; break;
      case AccessKind::kCas: ++cases; break;
    }
  }
  std::uint64_t total() const { return reads + writes + swaps + cases; }
  InstructionCount& operator+=(const InstructionCount& o) {
    reads += o.reads;
    writes += o.writes;
    swaps += o.swaps;
    cases += o.cases;
    return *this;
  }
  friend bool operator==(const InstructionCount&, const InstructionCount&) = default;
};

InstructionCount count_instructions(std::span<const LogEntry> entries);

/// Ordered list of process ids, one per scheduled step.
struct Schedule {
  std::vector<ProcessId> steps;
};

template <class T>
Word pointer_to_word(T* p) {
  return static_cast<Word>(std::bit_cast<std::uintptr_t>(p));
}

template <class T>
T* word_to_pointer(Word w) {
  return std::bit_cast<T*>(static_cast<std::uintptr_t>(w));
}

// ---------------------------------------------------------------------------
// Native backend
// ---------------------------------------------------------------------------

enum class MemoryProfile {
  kSeqCst,   // every access sequentially consistent
  kRelaxed,  // acquire loads, release stores, acq_rel RMW; no full fences
};

template <MemoryProfile Profile = MemoryProfile::kSeqCst>
struct NativeBackend {
  static constexpr bool kSimulated = false;
  static constexpr MemoryProfile kProfile = Profile;

  class Cell {
   public:
    Cell() = default;
    explicit Cell(Word init) : value_(init) {}
    Cell(const Cell&) = delete;
    Cell& operator=(const Cell&) = delete;

    Word read() const { return value_.load(kLoad); }
    void write(Word v) { value_.store(v, kStore); }
    Word swap(Word v) { return value_.exchange(v, kRmw); }
    bool cas(Word expected, Word desired) {
      return value_.compare_exchange_strong(expected, desired, kRmw, kLoad);
    }
    /// Plain initialization before the cell is reachable by other threads.
    void init(Word v) { value_.store(v, std::memory_order_relaxed); }

   private:
    static constexpr auto kLoad =
        Profile == MemoryProfile::kSeqCst ? std::memory_order_seq_cst : std::memory_order_acquire;
    static constexpr auto kStore =
        Profile == MemoryProfile::kSeqCst ? std::memory_order_seq_cst : std::memory_order_release;
    static constexpr auto kRmw =
        Profile == MemoryProfile::kSeqCst ? std::memory_order_seq_cst : std::memory_order_acq_rel;

    std::atomic<Word> value_{kBottom};
  };

  template <class T, class... Args>
  static T* make(Args&&... args) {
    return new T(std::forward<Args>(args)...);
  }
  template <class T>
  static void destroy(T* p) {
    delete p;
  }
  static void on_retry() {}
  /// Full fence where an algorithm needs StoreLoad ordering; free under kSeqCst.
  static void fence() {
    if constexpr (Profile == MemoryProfile::kRelaxed) std::atomic_thread_fence(std::memory_order_seq_cst);
  }
};

using Native = NativeBackend<MemoryProfile::kSeqCst>;
using NativeRelaxed = NativeBackend<MemoryProfile::kRelaxed>;

// ---------------------------------------------------------------------------
// Simulated backend
// ---------------------------------------------------------------------------

/// Thrown by a simulated access when the current replay has run out of
/// recorded steps; carries no data (the pending access is stored in the frame).
struct SimYield {};

class SimContext;

namespace detail {
inline thread_local SimContext* g_current_sim = nullptr;
}

/// Deterministic single-threaded memory. By default accesses are applied
/// immediately ("direct" mode) and logged against the configured process id.
/// The explorer installs a ReplayFrame instead: an operation is re-executed
/// from its start, recorded accesses are answered from the frame, and the
/// first unrecorded access is captured and aborts the run with SimYield.
class SimContext {
 public:
  struct ReplayFrame {
    std::span<const AccessRecord> done;
    std::size_t pos = 0;
    std::optional<Access> pending;
    std::vector<void*>* allocations = nullptr;
    std::size_t alloc_pos = 0;
    std::size_t retries = 0;
    std::size_t retry_cap = std::numeric_limits<std::size_t>::max();
  };

  class Activation {
   public:
    explicit Activation(SimContext& ctx) : previous_(detail::g_current_sim) { detail::g_current_sim = &ctx; }
    ~Activation() { detail::g_current_sim = previous_; }
    Activation(const Activation&) = delete;
    Activation& operator=(const Activation&) = delete;

   private:
    SimContext* previous_;
  };

  SimContext();
  ~SimContext();
  SimContext(const SimContext&) = delete;
  SimContext& operator=(const SimContext&) = delete;

  static SimContext& current();

  CellId new_cell(Word init);
  void init_cell(CellId id, Word v);
  /// Inspect without logging or counting.
  Word peek(CellId id) const;
  std::size_t cell_count() const { return memory_.size(); }

  std::vector<Word>& memory() { return memory_; }
  const std::vector<Word>& memory() const { return memory_; }

  /// Applies an access to memory and returns its result; no logging.
  Word apply(const Access& a);

  /// Entry point for SimBackend::Cell.
  Word access(const Access& a);

  // Direct-mode attribution and bookkeeping.
  void set_process(ProcessId pid) { pid_ = pid; }
  ProcessId process() const { return pid_; }
  void set_logging(bool on) { logging_ = on; }
  const AccessLog& log() const { return log_; }
  void clear_log() { log_.clear(); }
  const InstructionCount& counts() const { return counts_; }
  void reset_counts() { counts_ = {}; }
  void set_retry_cap(std::size_t cap) { direct_retry_cap_ = cap; }
  void reset_retries() { direct_retries_ = 0; }

  void on_retry();

  void push_frame(ReplayFrame* frame) { frame_ = frame; }
  void pop_frame() { frame_ = nullptr; }
  ReplayFrame* frame() const { return frame_; }

  /// Inside a replay frame, allocation is canonical: the same type built from
  /// the same (trivially copyable) arguments when memory has the same size
  /// yields the same object and the same cell ids, so schedules that differ
  /// only in allocation order reach byte-identical states. Such objects may
  /// hold cell ids and immutable fields only; mutable state lives in cells.
  template <class T, class... Args>
  T* make(Args&&... args) {
    if (frame_ != nullptr && frame_->alloc_pos < frame_->allocations->size()) {
      return static_cast<T*>((*frame_->allocations)[frame_->alloc_pos++]);
    }
    T* p = nullptr;
    if constexpr ((std::is_trivially_copyable_v<std::decay_t<Args>> && ...)) {
      if (frame_ == nullptr) return construct<T>(std::forward<Args>(args)...);
      std::string key;
      append_key(key, memory_.size());
      append_key(key, typeid(T).hash_code());
      (append_key(key, static_cast<std::decay_t<Args>>(args)), ...);
      if (auto it = canonical_.find(key); it != canonical_.end()) {
        memory_.insert(memory_.end(), it->second.cells.begin(), it->second.cells.end());
        p = static_cast<T*>(it->second.object);
      } else {
        const std::size_t before = memory_.size();
        p = construct<T>(std::forward<Args>(args)...);
        canonical_.emplace(std::move(key),
                           Allocation{p, std::vector<Word>(memory_.begin() + static_cast<std::ptrdiff_t>(before),
                                                           memory_.end())});
      }
    } else {
      p = construct<T>(std::forward<Args>(args)...);
    }
    if (frame_ != nullptr) {
      frame_->allocations->push_back(p);
      ++frame_->alloc_pos;
    }
    return p;
  }

 private:
  struct HolderBase {
    virtual ~HolderBase() = default;
  };
  template <class T>
  struct Holder final : HolderBase {
    template <class... Args>
    explicit Holder(Args&&... args) : value(std::forward<Args>(args)...) {}
    T value;
  };

  struct Allocation {
    void* object;
    std::vector<Word> cells;  // initial values of the cells the object created
  };

  template <class V>
  static void append_key(std::string& key, const V& v) {
    key.append(reinterpret_cast<const char*>(&v), sizeof v);
  }

  template <class T, class... Args>
  T* construct(Args&&... args) {
    auto holder = std::make_unique<Holder<T>>(std::forward<Args>(args)...);
    T* p = &holder->value;
    arena_.push_back(std::move(holder));
    return p;
  }

  std::vector<Word> memory_;
  std::unordered_map<std::string, Allocation> canonical_;
  AccessLog log_;
  InstructionCount counts_;
  ProcessId pid_ = 0;
  bool logging_ = true;
  std::uint64_t step_ = 0;
  std::size_t direct_retries_ = 0;
  std::size_t direct_retry_cap_ = std::numeric_limits<std::size_t>::max();
  ReplayFrame* frame_ = nullptr;
  std::vector<std::unique_ptr<HolderBase>> arena_;
};

inline SimContext& SimContext::current() {
  if (detail::g_current_sim == nullptr) throw ContractViolation("no active SimContext on this thread");
  return *detail::g_current_sim;
}

struct SimBackend {
  static constexpr bool kSimulated = true;

  class Cell {
   public:
    Cell() : id_(SimContext::current().new_cell(kBottom)) {}
    explicit Cell(Word init) : id_(SimContext::current().new_cell(init)) {}
    Cell(const Cell&) = delete;
    Cell& operator=(const Cell&) = delete;

    Word read() const { return SimContext::current().access({AccessKind::kRead, id_, 0, 0}); }
    void write(Word v) { SimContext::current().access({AccessKind::kWrite, id_, v, 0}); }
    Word swap(Word v) { return SimContext::current().access({AccessKind::kSwap, id_, v, 0}); }
    bool cas(Word expected, Word desired) {
      return SimContext::current().access({AccessKind::kCas, id_, expected, desired}) != 0;
    }
    void init(Word v) { SimContext::current().init_cell(id_, v); }
    CellId id() const { return id_; }

   private:
    CellId id_;
  };

  template <class T, class... Args>
  static T* make(Args&&... args) {
    return SimContext::current().make<T>(std::forward<Args>(args)...);
  }
  template <class T>
  static void destroy(T*) {}
  static void on_retry() { SimContext::current().on_retry(); }
  static void fence() {}
};

}  // namespace wsm
