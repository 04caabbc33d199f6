#include "wsm/shmem.hpp"

#include <charconv>
#include <sstream>

#include "text.hpp"

namespace wsm {

std::string_view to_string(AccessKind kind) {
  switch (kind) {
    case AccessKind::kRead: return "read";
    case AccessKind::kWrite: return "write";
    case AccessKind::kSwap: return "swap";
    case AccessKind::kCas: return "cas";
  }
  return "?";
}

InstructionCount count_instructions(std::span<const LogEntry> entries) {
  InstructionCount c;
  for (const auto& e : entries) c.add(e.record.access.kind);
  return c;
}

std::string format_access_log(const AccessLog& log) {
  std::ostringstream out;
  for (const auto& e : log) {
    const auto& a = e.record.access;
    out << e.step << ',' << e.pid << ',' << to_string(a.kind) << ',' << a.cell << ',';
    if (a.kind == AccessKind::kCas) {
      out << a.arg << '/' << a.arg2;
    } else if (a.kind == AccessKind::kRead) {
      out << '-';
    } else {
      out << a.arg;
    }
    out << ',';
    if (a.kind == AccessKind::kWrite) {
      out << '-';
    } else {
      out << e.record.result;
    }
    out << '\n';
  }
  return out.str();
}

AccessLog parse_access_log(std::string_view text) {
  AccessLog log;
  std::size_t line_no = 0;
  for (std::string_view line : text::lines(text)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto fields = text::split(line, ',');
    if (fields.size() != 6) throw ParseError("access log line " + std::to_string(line_no) + ": expected 6 fields");
    LogEntry e;
    e.step = text::parse_uint(fields[0], line_no);
    e.pid = static_cast<ProcessId>(text::parse_uint(fields[1], line_no));
    auto& a = e.record.access;
    if (fields[2] == "read") {
      a.kind = AccessKind::kRead;
    } else if (fields[2] == "write") {
      a.kind = AccessKind::kWrite;
    } else if (fields[2] == "swap") {
      a.kind = AccessKind::kSwap;
    } else if (fields[2] == "cas") {
      a.kind = AccessKind::kCas;
    } else {
      throw ParseError("access log line " + std::to_string(line_no) + ": unknown kind");
    }
    a.cell = static_cast<CellId>(text::parse_uint(fields[3], line_no));
    if (a.kind == AccessKind::kCas) {
      auto slash = fields[4].find('/');
      if (slash == std::string_view::npos) throw ParseError("access log line " + std::to_string(line_no) + ": cas arg");
      a.arg = text::parse_int(fields[4].substr(0, slash), line_no);
      a.arg2 = text::parse_int(fields[4].substr(slash + 1), line_no);
    } else if (a.kind != AccessKind::kRead) {
      a.arg = text::parse_int(fields[4], line_no);
    }
    if (a.kind != AccessKind::kWrite) e.record.result = text::parse_int(fields[5], line_no);
    log.push_back(e);
  }
  return log;
}

SimContext::SimContext() = default;
SimContext::~SimContext() = default;

CellId SimContext::new_cell(Word init) {
  memory_.push_back(init);
  return static_cast<CellId>(memory_.size() - 1);
}

void SimContext::init_cell(CellId id, Word v) {
  if (id >= memory_.size()) throw ContractViolation("init of unknown cell");
  memory_[id] = v;
}

Word SimContext::peek(CellId id) const {
  if (id >= memory_.size()) throw ContractViolation("peek of unknown cell");
  return memory_[id];
}

Word SimContext::apply(const Access& a) {
  if (a.cell >= memory_.size()) throw ContractViolation("access to unknown cell " + std::to_string(a.cell));
  Word& slot = memory_[a.cell];
  switch (a.kind) {
    case AccessKind::kRead: return slot;
    case AccessKind::kWrite: slot = a.arg; return 0;
    case AccessKind::kSwap: return std::exchange(slot, a.arg);
    case AccessKind::kCas:
      if (slot == a.arg) {
        slot = a.arg2;
        return 1;
      }
      return 0;
  }
  return 0;
}

Word SimContext::access(const Access& a) {
  if (frame_ != nullptr) {
    if (frame_->pos < frame_->done.size()) {
      const AccessRecord& rec = frame_->done[frame_->pos++];
      if (rec.access != a) throw ContractViolation("replay diverged: operation is not deterministic");
      return rec.result;
    }
    frame_->pending = a;
    throw SimYield{};
  }
  Word result = apply(a);
  counts_.add(a.kind);
  if (logging_) log_.push_back({step_, pid_, {a, result}});
  ++step_;
  return result;
}

void SimContext::on_retry() {
  if (frame_ != nullptr) {
    if (++frame_->retries > frame_->retry_cap) throw BoundExhausted("retry cap exceeded");
    return;
  }
  if (++direct_retries_ > direct_retry_cap_) throw BoundExhausted("retry cap exceeded");
}

}  // namespace wsm
