#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wsm {

/// Payload of every shared cell: a task id, an index, a flag or a sentinel.
using Word = std::int64_t;

/// Task identifiers are drawn from 1, 2, ...; zero and negatives are reserved.
using TaskId = Word;

using ProcessId = std::uint32_t;

/// Cell value meaning "no task stored here yet".
inline constexpr Word kBottom = 0;

/// Result word used by histories for an empty extraction. Never a valid task.
inline constexpr Word kEmpty = -1;

inline constexpr Word kTrue = 1;
inline constexpr Word kFalse = 0;

/// Either a task or nothing.
using TakeResult = std::optional<TaskId>;

inline Word to_word(const TakeResult& r) { return r ? *r : kEmpty; }

enum class OpKind : std::uint8_t {
  kPut,
  kTake,
  kSteal,
  kMaxRead,
  kMaxWrite,
  kRMaxRead,
  kRMaxWrite,
};

std::string_view to_string(OpKind kind);
std::optional<OpKind> parse_op_kind(std::string_view text);

inline bool is_extraction(OpKind kind) { return kind == OpKind::kTake || kind == OpKind::kSteal; }

class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A caller broke a precondition that the algorithm relies on (for example a
/// thief reading past the initialized frontier of the task buffer).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A simulated run hit one of its configured limits (steps, retries, states).
class BoundExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wsm
