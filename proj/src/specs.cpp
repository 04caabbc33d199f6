#include <algorithm>

#include "wsm/checker.hpp"

namespace wsm {

void MultiplicityQueueSpec::apply(const SpecState& s, std::span<const Call> calls, std::vector<Outcome>& out) const {
  if (calls.empty()) return;
  if (calls.size() == 1 && calls[0].kind == OpKind::kPut) {
    SpecState next = s;
    next.push_back(calls[0].arg);
    out.push_back({std::move(next), {kTrue}});
    return;
  }
  int takes = 0;
  for (const Call& c : calls) {
    if (!is_extraction(c.kind)) return;
    if (c.kind == OpKind::kTake) ++takes;
  }
  if (takes > 1) return;
  if (s.empty()) {
    if (calls.size() == 1) out.push_back({s, {kEmpty}});
    return;
  }
  out.push_back({SpecState(s.begin() + 1, s.end()), std::vector<Word>(calls.size(), s.front())});
}

namespace {

// Drops the prefix of the task list that every view has already passed.
void normalize_views(SpecState& st, std::size_t n) {
  const Word low = *std::min_element(st.begin(), st.begin() + static_cast<std::ptrdiff_t>(n));
  if (low == 0) return;
  for (std::size_t i = 0; i < n; ++i) st[i] -= low;
  st.erase(st.begin() + static_cast<std::ptrdiff_t>(n), st.begin() + static_cast<std::ptrdiff_t>(n + low));
}

}  // namespace

void WeakMultiplicityQueueSpec::apply(const SpecState& s, std::span<const Call> calls,
                                      std::vector<Outcome>& out) const {
  if (calls.size() != 1) return;
  const Call& c = calls[0];
  if (c.pid >= n_) return;
  const auto tasks = static_cast<Word>(s.size() - n_);
  if (c.kind == OpKind::kPut) {
    if (c.pid != 0) return;
    SpecState next = s;
    next.push_back(c.arg);
    out.push_back({std::move(next), {kTrue}});
    return;
  }
  if (c.kind == OpKind::kTake && c.pid != 0) return;
  if (c.kind == OpKind::kSteal && c.pid == 0) return;
  if (!is_extraction(c.kind)) return;

  const Word own = s[c.pid];
  const Word len = tasks - own;
  if (len == 0) {
    out.push_back({s, {kEmpty}});
    return;
  }
  const Word furthest = *std::max_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n_));
  const Word shortest = tasks - furthest;
  const Word j = len - std::max<Word>(shortest, 1) + 1;
  for (Word k = 1; k <= j; ++k) {
    SpecState next = s;
    next[c.pid] = own + k;
    const Word x = s[n_ + static_cast<std::size_t>(own + k - 1)];
    normalize_views(next, n_);
    out.push_back({std::move(next), {x}});
  }
  // When some view is already empty, x_j is the empty string itself: the
  // extraction may return Empty and its view jumps past every task.
  if (shortest == 0) {
    SpecState next = s;
    next[c.pid] = tasks;
    normalize_views(next, n_);
    out.push_back({std::move(next), {kEmpty}});
  }
}

void ExactFifoSpec::apply(const SpecState& s, std::span<const Call> calls, std::vector<Outcome>& out) const {
  if (calls.size() != 1) return;
  const Call& c = calls[0];
  if (c.kind == OpKind::kPut) {
    SpecState next = s;
    next.push_back(c.arg);
    out.push_back({std::move(next), {kTrue}});
  } else if (is_extraction(c.kind)) {
    if (s.empty()) {
      out.push_back({s, {kEmpty}});
    } else {
      out.push_back({SpecState(s.begin() + 1, s.end()), {s.front()}});
    }
  }
}

void MaxRegisterSpec::apply(const SpecState& s, std::span<const Call> calls, std::vector<Outcome>& out) const {
  if (calls.size() != 1) return;
  const Call& c = calls[0];
  if (c.kind == OpKind::kMaxWrite || c.kind == OpKind::kRMaxWrite) {
    out.push_back({{std::max(s[0], c.arg)}, {kTrue}});
  } else if (c.kind == OpKind::kMaxRead || c.kind == OpKind::kRMaxRead) {
    out.push_back({s, {s[0]}});
  }
}

void RangeMaxRegisterSpec::apply(const SpecState& s, std::span<const Call> calls, std::vector<Outcome>& out) const {
  if (calls.size() != 1) return;
  const Call& c = calls[0];
  if (c.pid >= n_) return;
  if (c.kind == OpKind::kRMaxWrite) {
    SpecState next = s;
    if (c.arg > next[c.pid]) next[c.pid] = c.arg;
    out.push_back({std::move(next), {kTrue}});
  } else if (c.kind == OpKind::kRMaxRead) {
    const Word top = *std::max_element(s.begin(), s.end());
    for (Word x = s[c.pid]; x <= top; ++x) {
      SpecState next = s;
      next[c.pid] = x;
      out.push_back({std::move(next), {x}});
    }
  }
}

}  // namespace wsm
