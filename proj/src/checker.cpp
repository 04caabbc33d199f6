#include "wsm/checker.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace wsm {

namespace {

struct BudgetExceeded {};

void append_word(std::string& out, Word w) { out.append(reinterpret_cast<const char*>(&w), sizeof w); }

class Search {
 public:
  Search(const std::vector<Operation>& ops, const SpecMachine& spec, bool sets, std::uint64_t budget)
      : ops_(ops), spec_(spec), sets_(sets), budget_(budget), preds_(ops.size(), 0) {
    for (std::size_t b = 0; b < ops.size(); ++b) {
      for (std::size_t a = 0; a < ops.size(); ++a) {
        if (a != b && precedes(ops[a], ops[b])) preds_[b] |= std::uint64_t{1} << a;
      }
      if (ops[b].completed()) completed_ |= std::uint64_t{1} << b;
    }
  }

  Verdict run() {
    Verdict v;
    try {
      v.accepted = dfs(0, spec_.initial());
    } catch (const BudgetExceeded&) {
      v.inconclusive = true;
      v.reason = "search budget exhausted after " + std::to_string(nodes_) + " nodes";
    }
    v.nodes = nodes_;
    if (v.accepted) {
      v.witness.assign(path_.rbegin(), path_.rend());
    } else if (!v.inconclusive) {
      v.reason = "no valid linearization";
      for (std::size_t i = 0; i < ops_.size(); ++i) {
        if (ops_[i].completed() && !(best_ & (std::uint64_t{1} << i))) v.frontier.push_back(i);
      }
    }
    return v;
  }

 private:
  bool dfs(std::uint64_t mask, const SpecState& state) {
    if ((mask & completed_) == completed_) return true;
    if (++nodes_ > budget_) throw BudgetExceeded{};
    if (std::popcount(mask) > std::popcount(best_)) best_ = mask;

    std::string key;
    append_word(key, static_cast<Word>(mask));
    for (Word w : state) append_word(key, w);
    if (failed_.contains(key)) return false;

    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      const auto bit = std::uint64_t{1} << i;
      if (!(mask & bit) && (preds_[i] & ~mask) == 0) cand.push_back(i);
    }

    // Classes without pending operations first: dropping a pending operation
    // is always allowed, so it is the cheaper branch to try.
    std::vector<std::uint32_t> classes;
    const std::uint32_t limit = sets_ ? (std::uint32_t{1} << cand.size()) : 0;
    if (sets_) {
      for (std::uint32_t s = 1; s < limit; ++s) classes.push_back(s);
    } else {
      for (std::size_t i = 0; i < cand.size(); ++i) classes.push_back(std::uint32_t{1} << i);
    }
    auto pending_in = [&](std::uint32_t s) {
      int n = 0;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        if ((s >> i & 1) && !ops_[cand[i]].completed()) ++n;
      }
      return n;
    };
    std::stable_sort(classes.begin(), classes.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return pending_in(a) < pending_in(b); });

    std::vector<Call> calls;
    std::vector<std::size_t> members;
    std::vector<Outcome> outcomes;
    for (std::uint32_t s : classes) {
      calls.clear();
      members.clear();
      std::uint64_t next_mask = mask;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        if (!(s >> i & 1)) continue;
        const Operation& op = ops_[cand[i]];
        calls.push_back({op.pid, op.kind, op.arg});
        members.push_back(cand[i]);
        next_mask |= std::uint64_t{1} << cand[i];
      }
      outcomes.clear();
      spec_.apply(state, calls, outcomes);
      for (const Outcome& o : outcomes) {
        bool match = true;
        for (std::size_t k = 0; k < members.size() && match; ++k) {
          const Operation& op = ops_[members[k]];
          if (op.completed() && *op.result != o.results[k]) match = false;
        }
        if (!match) continue;
        if (dfs(next_mask, o.next)) {
          path_.push_back(members);
          return true;
        }
      }
    }
    failed_.insert(std::move(key));
    return false;
  }

  const std::vector<Operation>& ops_;
  const SpecMachine& spec_;
  bool sets_;
  std::uint64_t budget_;
  std::vector<std::uint64_t> preds_;
  std::uint64_t completed_ = 0;
  std::uint64_t best_ = 0;
  std::uint64_t nodes_ = 0;
  std::unordered_set<std::string> failed_;
  std::vector<std::vector<std::size_t>> path_;  // reversed
};

Verdict search(const History& h, const SpecMachine& spec, bool sets, const CheckOptions& opt) {
  const auto ops = operations(h);
  if (ops.size() > 64) throw ContractViolation("checker supports at most 64 operations per history");
  return Search(ops, spec, sets, opt.budget).run();
}

}  // namespace

Verdict check_set_linearizable(const History& h, const SpecMachine& spec, const CheckOptions& opt) {
  return search(h, spec, true, opt);
}

Verdict check_linearizable(const History& h, const SpecMachine& spec, const CheckOptions& opt) {
  return search(h, spec, false, opt);
}

Verdict check_sequentially_exact(const History& h, const SpecMachine& exact) {
  const auto ops = operations(h);
  Verdict v;
  SpecState state = exact.initial();
  std::vector<Outcome> outcomes;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const Operation& op = ops[i];
    if (i > 0 && !(ops[i - 1].res < op.inv)) {
      v.reason = "history is not sequential at operation " + std::to_string(i);
      v.frontier = {i - 1, i};
      return v;
    }
    if (!op.completed()) break;
    outcomes.clear();
    const Call call{op.pid, op.kind, op.arg};
    exact.apply(state, std::span<const Call>(&call, 1), outcomes);
    if (outcomes.size() != 1) {
      v.reason = "specification has no unique transition at operation " + std::to_string(i);
      v.frontier = {i};
      return v;
    }
    if (outcomes[0].results[0] != *op.result) {
      v.reason = "operation " + std::to_string(i) + " (" + std::string(to_string(op.kind)) + ") returned " +
                 std::to_string(*op.result) + ", expected " + std::to_string(outcomes[0].results[0]);
      v.frontier = {i};
      return v;
    }
    v.witness.push_back({i});
    state = std::move(outcomes[0].next);
  }
  v.accepted = true;
  return v;
}

std::string_view to_string(BoundMode mode) {
  switch (mode) {
    case BoundMode::kMult: return "mult";
    case BoundMode::kWeak: return "weak";
    case BoundMode::kBounded: return "bounded";
    case BoundMode::kExact: return "exact";
  }
  return "?";
}

namespace {

bool drained(const std::vector<Operation>& ops) {
  std::uint64_t last_put = 0;
  bool any_put = false;
  for (const Operation& op : ops) {
    if (!op.completed()) return false;
    if (op.kind == OpKind::kPut) {
      last_put = std::max(last_put, op.res);
      any_put = true;
    }
  }
  // Per process: whether it extracts, and its last two operations (ops are in
  // invocation order, so this is also per-process program order).
  struct Tail {
    bool extracts = false;
    const Operation* prev = nullptr;
    const Operation* last = nullptr;
  };
  std::unordered_map<ProcessId, Tail> tails;
  for (const Operation& op : ops) {
    Tail& t = tails[op.pid];
    t.extracts |= is_extraction(op.kind);
    t.prev = t.last;
    t.last = &op;
  }
  bool any_extractor = false;
  for (const auto& [pid, t] : tails) {
    if (!t.extracts) continue;
    any_extractor = true;
    if (t.prev == nullptr) return false;
    for (const Operation* o : {t.prev, t.last}) {
      if (!is_extraction(o->kind) || *o->result != kEmpty) return false;
      if (any_put && o->inv <= last_put) return false;
    }
  }
  return any_extractor;
}

}  // namespace

bool is_drained(const History& h) { return drained(operations(h)); }

Verdict check_multiplicity_bounds(const History& h, BoundMode mode, const BoundOptions& opt) {
  const auto ops = operations(h);
  Verdict v;
  auto fail = [&](std::string reason, std::vector<std::size_t> involved) {
    v.accepted = false;
    v.reason = std::move(reason);
    v.frontier = std::move(involved);
    return v;
  };

  struct PutInfo {
    std::size_t op;
    std::size_t rank;
  };
  std::unordered_map<TaskId, PutInfo> put_of;
  for (const Operation& op : ops) {
    if (op.kind != OpKind::kPut) continue;
    if (!put_of.emplace(op.arg, PutInfo{op.id, put_of.size()}).second) {
      return fail("task " + std::to_string(op.arg) + " put twice", {op.id});
    }
  }

  // Ordered by task so the first reported violation is deterministic.
  std::map<TaskId, std::vector<std::size_t>> extracted;
  std::unordered_map<ProcessId, std::pair<std::size_t, std::size_t>> last_rank;  // pid -> (rank, op)
  for (const Operation& op : ops) {
    if (!is_extraction(op.kind) || !op.completed() || *op.result == kEmpty) continue;
    const TaskId x = *op.result;
    auto it = put_of.find(x);
    if (it == put_of.end() || !(ops[it->second.op].inv < op.res)) {
      return fail("task " + std::to_string(x) + " returned but never put", {op.id});
    }
    if (opt.check_order) {
      const std::size_t rank = it->second.rank;
      auto lr = last_rank.find(op.pid);
      if (lr != last_rank.end() && rank <= lr->second.first) {
        return fail("process " + std::to_string(op.pid) + " returned tasks out of put order",
                    {lr->second.second, op.id});
      }
      last_rank[op.pid] = {rank, op.id};
    }
    extracted[x].push_back(op.id);
  }

  for (const auto& [x, list] : extracted) {
    switch (mode) {
      case BoundMode::kMult: {
        std::uint64_t max_inv = 0;
        std::uint64_t min_res = kNever;
        for (std::size_t id : list) {
          max_inv = std::max(max_inv, ops[id].inv);
          min_res = std::min(min_res, ops[id].res);
        }
        if (list.size() > 1 && !(max_inv < min_res)) {
          return fail("task " + std::to_string(x) + " extracted by non-concurrent operations", list);
        }
        break;
      }
      case BoundMode::kWeak: {
        std::set<ProcessId> seen;
        for (std::size_t id : list) {
          if (!seen.insert(ops[id].pid).second) {
            return fail("process " + std::to_string(ops[id].pid) + " extracted task " + std::to_string(x) + " twice",
                        list);
          }
        }
        break;
      }
      case BoundMode::kBounded: {
        int takes = 0;
        int steals = 0;
        for (std::size_t id : list) (ops[id].kind == OpKind::kTake ? takes : steals)++;
        if (takes > 1 || steals > 1) {
          return fail("task " + std::to_string(x) + " extracted by " + std::to_string(takes) + " takes and " +
                          std::to_string(steals) + " steals",
                      list);
        }
        break;
      }
      case BoundMode::kExact:
        if (list.size() > 1) return fail("task " + std::to_string(x) + " extracted more than once", list);
        break;
    }
  }

  if (drained(ops)) {
    for (const Operation& op : ops) {
      if (op.kind == OpKind::kPut && !extracted.contains(op.arg)) {
        return fail("task " + std::to_string(op.arg) + " never extracted", {op.id});
      }
    }
  }
  v.accepted = true;
  return v;
}

// ---------------------------------------------------------------------------
// Online checker
// ---------------------------------------------------------------------------

OnlineChecker::OnlineChecker(const SpecMachine& spec, std::size_t processes, bool sets) : spec_(&spec), sets_(sets) {
  configs_.push_back({spec.initial(), std::vector<Status>(processes)});
}

void OnlineChecker::invoke(ProcessId pid, OpKind kind, Word arg) {
  for (Config& c : configs_) {
    if (pid >= c.procs.size()) throw ContractViolation("process id out of range");
    c.procs[pid] = {Phase::kPending, kind, arg, 0};
  }
  std::sort(configs_.begin(), configs_.end());
}

bool OnlineChecker::respond(ProcessId pid, OpKind kind, Word result) {
  close();
  std::vector<Config> kept;
  for (Config& c : configs_) {
    Status& s = c.procs.at(pid);
    if (s.phase == Phase::kLinearized && s.kind == kind && s.result == result) {
      s = Status{};
      kept.push_back(std::move(c));
    }
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  configs_ = std::move(kept);
  return ok();
}

void OnlineChecker::close() {
  std::set<Config> seen(configs_.begin(), configs_.end());
  std::vector<Config> work(configs_.begin(), configs_.end());
  std::vector<Call> calls;
  std::vector<ProcessId> members;
  std::vector<Outcome> outcomes;
  while (!work.empty()) {
    Config c = std::move(work.back());
    work.pop_back();
    std::vector<ProcessId> pending;
    for (ProcessId p = 0; p < c.procs.size(); ++p) {
      if (c.procs[p].phase == Phase::kPending) pending.push_back(p);
    }
    if (pending.empty()) continue;
    std::vector<std::uint32_t> classes;
    if (sets_) {
      for (std::uint32_t s = 1; s < (std::uint32_t{1} << pending.size()); ++s) classes.push_back(s);
    } else {
      for (std::size_t i = 0; i < pending.size(); ++i) classes.push_back(std::uint32_t{1} << i);
    }
    for (std::uint32_t s : classes) {
      calls.clear();
      members.clear();
      for (std::size_t i = 0; i < pending.size(); ++i) {
        if (!(s >> i & 1)) continue;
        const Status& st = c.procs[pending[i]];
        calls.push_back({pending[i], st.kind, st.arg});
        members.push_back(pending[i]);
      }
      outcomes.clear();
      spec_->apply(c.state, calls, outcomes);
      for (Outcome& o : outcomes) {
        Config n{std::move(o.next), c.procs};
        for (std::size_t k = 0; k < members.size(); ++k) {
          Status& st = n.procs[members[k]];
          st.phase = Phase::kLinearized;
          st.result = o.results[k];
        }
        if (seen.insert(n).second) work.push_back(std::move(n));
      }
    }
  }
  configs_.assign(seen.begin(), seen.end());
}

void OnlineChecker::encode(std::string& out) const {
  append_word(out, static_cast<Word>(configs_.size()));
  for (const Config& c : configs_) {
    append_word(out, static_cast<Word>(c.state.size()));
    for (Word w : c.state) append_word(out, w);
    for (const Status& s : c.procs) {
      out.push_back(static_cast<char>(s.phase));
      out.push_back(static_cast<char>(s.kind));
      append_word(out, s.arg);
      append_word(out, s.result);
    }
  }
}

}  // namespace wsm
