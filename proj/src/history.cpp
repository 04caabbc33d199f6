#include "wsm/history.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

#include "text.hpp"

namespace wsm {

namespace {

constexpr std::pair<OpKind, std::string_view> kOpNames[] = {
    {OpKind::kPut, "put"},           {OpKind::kTake, "take"},         {OpKind::kSteal, "steal"},
    {OpKind::kMaxRead, "maxread"},   {OpKind::kMaxWrite, "maxwrite"}, {OpKind::kRMaxRead, "rmaxread"},
    {OpKind::kRMaxWrite, "rmaxwrite"},
};

}  // namespace

std::string_view to_string(OpKind kind) {
  for (const auto& [k, name] : kOpNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<OpKind> parse_op_kind(std::string_view text) {
  for (const auto& [k, name] : kOpNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

bool has_argument(OpKind kind) {
  return kind == OpKind::kPut || kind == OpKind::kMaxWrite || kind == OpKind::kRMaxWrite;
}

bool returns_true(OpKind kind) { return has_argument(kind); }

void History::invoke(ProcessId pid, OpKind op, Word arg) {
  const std::uint64_t t = events_.empty() ? 0 : events_.back().time + 1;
  events_.push_back({EventKind::kInvoke, pid, op, arg, t});
}

void History::respond(ProcessId pid, OpKind op, Word result) {
  const std::uint64_t t = events_.empty() ? 0 : events_.back().time + 1;
  events_.push_back({EventKind::kRespond, pid, op, result, t});
}

void History::append(const Event& e) {
  if (!events_.empty() && e.time <= events_.back().time) {
    throw ContractViolation("history timestamps must strictly increase");
  }
  events_.push_back(e);
}

History History::from_events(std::vector<Event> events) {
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  History h;
  for (const auto& e : events) h.append(e);
  return h;
}

std::string History::well_formedness_error() const {
  std::unordered_map<ProcessId, std::optional<OpKind>> open;
  std::uint64_t last = 0;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    if (i > 0 && e.time <= last) return "event " + std::to_string(i) + ": timestamp does not increase";
    last = e.time;
    auto& slot = open[e.pid];
    if (e.kind == EventKind::kInvoke) {
      if (slot) return "event " + std::to_string(i) + ": process " + std::to_string(e.pid) + " invokes while pending";
      slot = e.op;
    } else {
      if (!slot) return "event " + std::to_string(i) + ": response without invocation";
      if (*slot != e.op) return "event " + std::to_string(i) + ": response does not match pending operation";
      slot.reset();
    }
  }
  return {};
}

std::string History::to_text() const {
  std::ostringstream out;
  for (const Event& e : events_) {
    out << (e.kind == EventKind::kInvoke ? "inv" : "res") << ',' << e.pid << ',' << to_string(e.op) << ',';
    if (e.kind == EventKind::kInvoke) {
      if (has_argument(e.op)) {
        out << e.value;
      } else {
        out << '-';
      }
    } else if (returns_true(e.op)) {
      out << "true";
    } else if (e.value == kEmpty) {
      out << "empty";
    } else {
      out << e.value;
    }
    out << ',' << e.time << '\n';
  }
  return out.str();
}

History History::parse(std::string_view text) {
  History h;
  std::size_t line_no = 0;
  for (std::string_view line : text::lines(text)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto f = text::split(line, ',');
    if (f.size() != 5) throw ParseError("history line " + std::to_string(line_no) + ": expected 5 fields");
    Event e;
    if (f[0] == "inv") {
      e.kind = EventKind::kInvoke;
    } else if (f[0] == "res") {
      e.kind = EventKind::kRespond;
    } else {
      throw ParseError("history line " + std::to_string(line_no) + ": unknown event '" + std::string(f[0]) + "'");
    }
    e.pid = static_cast<ProcessId>(text::parse_uint(f[1], line_no));
    auto op = parse_op_kind(f[2]);
    if (!op) throw ParseError("history line " + std::to_string(line_no) + ": unknown op '" + std::string(f[2]) + "'");
    e.op = *op;
    if (f[3] == "-") {
      e.value = 0;
    } else if (f[3] == "true") {
      e.value = kTrue;
    } else if (f[3] == "empty") {
      e.value = kEmpty;
    } else {
      e.value = text::parse_int(f[3], line_no);
    }
    e.time = text::parse_uint(f[4], line_no);
    try {
      h.append(e);
    } catch (const ContractViolation&) {
      throw ParseError("history line " + std::to_string(line_no) + ": timestamp does not increase");
    }
  }
  return h;
}

std::vector<Operation> operations(const History& h) {
  if (auto err = h.well_formedness_error(); !err.empty()) throw ContractViolation("ill-formed history: " + err);
  std::vector<Operation> ops;
  ops.reserve(h.events().size() / 2 + 1);
  std::unordered_map<ProcessId, std::size_t> open;
  for (const Event& e : h.events()) {
    if (e.kind == EventKind::kInvoke) {
      Operation op;
      op.id = ops.size();
      op.pid = e.pid;
      op.kind = e.op;
      op.arg = has_argument(e.op) ? e.value : 0;
      op.inv = e.time;
      open[e.pid] = ops.size();
      ops.push_back(op);
    } else {
      Operation& op = ops[open.at(e.pid)];
      op.result = e.value;
      op.res = e.time;
    }
  }
  return ops;
}

}  // namespace wsm
