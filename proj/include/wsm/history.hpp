#pragma once

// Operation histories: invocation/response events with timestamps.
//
// Text format, one event per line:
//   event,pid,op,arg_or_result,timestamp
// where event is `inv` or `res`, op is one of put/take/steal/maxread/maxwrite/
// rmaxread/rmaxwrite, the value column holds the argument of an invocation
// (`-` when there is none) or the result of a response (`true`, `empty` or an
// integer). Blank lines and lines starting with '#' are ignored.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsm/types.hpp"

namespace wsm {

enum class EventKind : std::uint8_t { kInvoke, kRespond };

/// `value` is the invocation argument (0 when absent) or the response result
/// (kEmpty for empty, kTrue for `true`).
struct Event {
  EventKind kind = EventKind::kInvoke;
  ProcessId pid = 0;
  OpKind op = OpKind::kPut;
  Word value = 0;
  std::uint64_t time = 0;
  friend bool operator==(const Event&, const Event&) = default;
};

/// True when the operation carries an argument on invocation.
bool has_argument(OpKind kind);

/// True when the response of `kind` is the constant `true`.
bool returns_true(OpKind kind);

class History {
 public:
  History() = default;

  /// Appends with timestamp = max(previous timestamp + 1, 0).
  void invoke(ProcessId pid, OpKind op, Word arg = 0);
  void respond(ProcessId pid, OpKind op, Word result);

  /// Appends an event carrying its own timestamp; timestamps must increase.
  void append(const Event& e);

  /// Builds a history from events recorded independently (e.g. per thread),
  /// ordering them by timestamp.
  static History from_events(std::vector<Event> events);

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  /// Empty string when well formed, otherwise a description of the first
  /// problem: per process, invocations and responses alternate starting with
  /// an invocation, responses match the pending operation, timestamps
  /// strictly increase.
  std::string well_formedness_error() const;
  bool well_formed() const { return well_formedness_error().empty(); }

  std::string to_text() const;
  static History parse(std::string_view text);

  friend bool operator==(const History&, const History&) = default;

 private:
  std::vector<Event> events_;
};

inline constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

/// One operation reconstructed from a history. `res == kNever` when pending.
struct Operation {
  std::size_t id = 0;  // position in invocation order
  ProcessId pid = 0;
  OpKind kind = OpKind::kPut;
  Word arg = 0;
  std::optional<Word> result;
  std::uint64_t inv = 0;
  std::uint64_t res = kNever;

  bool completed() const { return result.has_value(); }
};

/// Operations in invocation order. Throws ContractViolation on an ill-formed
/// history.
std::vector<Operation> operations(const History& h);

/// Real-time precedence: a's response happens before b's invocation.
inline bool precedes(const Operation& a, const Operation& b) { return a.res < b.inv; }

inline bool concurrent(const Operation& a, const Operation& b) { return !precedes(a, b) && !precedes(b, a); }

}  // namespace wsm
