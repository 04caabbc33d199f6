// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every selected criterion passes. Arguments select criteria by number
// (default: all); `--csv-dir DIR` chooses where benchmark CSVs are written.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wsm/baselines.hpp"
#include "wsm/bench.hpp"
#include "wsm/explore.hpp"
#include "wsm/maxreg.hpp"
#include "wsm/record.hpp"
#include "wsm/wsqueue.hpp"

using namespace wsm;

namespace {

struct Finding {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string csv_dir = ".";

// ---------------------------------------------------------------------------
// Exhaustive exploration of the maximal programs.
//
// Owner: 3 puts and 3 takes in each of the 20 orders; every thief: 3 steals.
// Any program with at most 3 puts and 3 extractions per process is, process
// by process, a prefix of one of these, so its executions are prefixes of
// explored executions. The online checker validates every prefix and the
// offline search every terminal history.

std::vector<Program> maximal_programs(std::size_t thieves) {
  std::vector<Program> out;
  for (unsigned mask = 0; mask < 64; ++mask) {
    if (std::popcount(mask) != 3) continue;
    Program p;
    p.processes.resize(thieves + 1);
    Word next = 1;
    for (int i = 0; i < 6; ++i) {
      if (mask & (1u << i)) {
        p.processes[0].push_back({OpKind::kPut, next++});
      } else {
        p.processes[0].push_back({OpKind::kTake, 0});
      }
    }
    for (std::size_t t = 1; t <= thieves; ++t) p.processes[t].assign(3, {OpKind::kSteal, 0});
    out.push_back(std::move(p));
  }
  return out;
}

QueueOptions exploration_options() {
  QueueOptions opt;
  opt.capacity = 4;
  opt.buffer.segment_length = 4;
  return opt;
}

template <class Q>
Finding exhaustive(bool sets, const std::function<const SpecMachine&(std::size_t)>& spec_for) {
  Finding o;
  std::uint64_t states = 0;
  std::uint64_t terminals = 0;
  std::uint64_t programs = 0;
  for (std::size_t thieves : {1u, 2u}) {
    for (const Program& p : maximal_programs(thieves)) {
      QueueTarget<Q> target(thieves, exploration_options());
      Explorer ex(target, p);
      CheckedOptions co;
      co.sets = sets;
      const CheckedResult r = ex.explore_checked(spec_for(thieves), co);
      ++programs;
      states += r.states;
      terminals += r.terminals;
      if (r.status != ExploreStatus::kComplete) o.fail("exploration stopped early");
      if (r.violation) o.fail("rejected: " + r.violation_reason + "\n" + r.counterexample.to_text());
      if (r.offline_inconclusive) o.fail("inconclusive terminal history");
    }
  }
  if (o.pass) {
    o.detail = std::to_string(programs) + " programs, " + std::to_string(states) + " states, " +
               std::to_string(terminals) + " terminal states";
  }
  return o;
}

Finding criterion1() {
  const MultiplicityQueueSpec spec;
  return exhaustive<WsMult<SimBackend>>(true, [&](std::size_t) -> const SpecMachine& { return spec; });
}

Finding criterion2() {
  const WeakMultiplicityQueueSpec two(2);
  const WeakMultiplicityQueueSpec three(3);
  return exhaustive<WsWMult<SimBackend>>(false, [&](std::size_t thieves) -> const SpecMachine& {
    return thieves == 1 ? two : three;
  });
}

// ---------------------------------------------------------------------------

constexpr std::size_t kSequentialOps = 100'000;

template <class Q>
void sequential_queue(Finding& o, const char* name) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Q q;
    const History h = run_sequential(q, 3, kSequentialOps, seed, static_cast<Word>(kSequentialOps));
    const Verdict v = check_sequentially_exact(h, ExactFifoSpec{});
    if (!v.accepted) o.fail(std::string(name) + " seed " + std::to_string(seed) + ": " + v.reason);
  }
}

Finding criterion3() {
  Finding o;
  sequential_queue<WsMult<Native>>(o, "ws-mult");
  sequential_queue<WsWMult<Native>>(o, "ws-wmult");
  sequential_queue<BWsWMult<Native>>(o, "b-ws-wmult");
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    RangeMaxRegister<Native> reg;
    const History h = run_sequential_register(reg, 4, kSequentialOps, seed, 1'000'000);
    const Verdict v = check_sequentially_exact(h, MaxRegisterSpec{});
    if (!v.accepted) o.fail("range max register seed " + std::to_string(seed) + ": " + v.reason);
  }
  if (o.pass) o.detail = "4 objects x 3 seeds x 1e5 operations";
  return o;
}

// ---------------------------------------------------------------------------

template <class Q>
void stress(Finding& o, const char* name, BoundMode mode, std::uint64_t& runs) {
  for (std::size_t n : {2u, 4u, 8u}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Q q;
      StressConfig cfg;
      cfg.thieves = n - 1;
      cfg.tasks = 1'000'000;
      cfg.seed = seed;
      const History h = stress_run(q, cfg);
      ++runs;
      if (!is_drained(h)) {
        o.fail(std::string(name) + " n=" + std::to_string(n) + " seed " + std::to_string(seed) + ": not drained");
        continue;
      }
      const Verdict v = check_multiplicity_bounds(h, mode);
      if (!v.accepted) {
        o.fail(std::string(name) + " n=" + std::to_string(n) + " seed " + std::to_string(seed) + ": " + v.reason);
      }
    }
  }
}

Finding criterion4() {
  Finding o;
  std::uint64_t runs = 0;
  stress<WsMult<Native>>(o, "ws-mult", BoundMode::kMult, runs);
  stress<WsWMult<Native>>(o, "ws-wmult", BoundMode::kWeak, runs);
  stress<BWsMult<Native>>(o, "b-ws-mult", BoundMode::kBounded, runs);
  stress<BWsWMult<Native>>(o, "b-ws-wmult", BoundMode::kBounded, runs);
  stress<ExactWs<Native>>(o, "exact", BoundMode::kExact, runs);
  if (o.pass) o.detail = std::to_string(runs) + " drained runs of 1e6 tasks";
  return o;
}

// ---------------------------------------------------------------------------
// Step complexity, measured in direct simulation mode where every shared
// access is logged.

struct OpMaxima {
  std::uint64_t put_reads = 0;
  std::uint64_t put = 0;
  std::uint64_t take = 0;
  std::uint64_t steal = 0;
};

template <class Q, class Body>
OpMaxima measure(const QueueOptions& opt, Body&& body) {
  SimContext ctx;
  SimContext::Activation on(ctx);
  Q q(opt);
  auto owner = q.owner();
  auto thief = q.thief();
  OpMaxima m;
  auto run = [&](OpKind kind, Word arg) {
    ctx.clear_log();
    switch (kind) {
      case OpKind::kPut: owner.put(arg); break;
      case OpKind::kTake: (void)owner.take(); break;
      default: (void)thief.steal(); break;
    }
    const InstructionCount c = count_instructions(ctx.log());
    switch (kind) {
      case OpKind::kPut:
        m.put = std::max(m.put, c.total());
        m.put_reads = std::max(m.put_reads, c.reads);
        break;
      case OpKind::kTake: m.take = std::max(m.take, c.total()); break;
      default: m.steal = std::max(m.steal, c.total()); break;
    }
  };
  body(run);
  return m;
}

// Random mix of puts, takes and steals.
auto random_mix(std::size_t ops, std::uint64_t seed, Word max_puts) {
  return [=](auto& run) {
    std::mt19937_64 rng(seed);
    Word next = 1;
    for (std::size_t i = 0; i < ops; ++i) {
      const auto pick = rng() % 3;
      if (pick == 0 && next <= max_puts) {
        run(OpKind::kPut, next++);
      } else {
        run(pick == 1 ? OpKind::kTake : OpKind::kSteal, 0);
      }
    }
  };
}

// Fills the queue to capacity, then drains it alternating takes and steals, so
// Head passes through every value the register can hold.
auto fill_and_drain(Word puts) {
  return [=](auto& run) {
    for (Word x = 1; x <= puts; ++x) run(OpKind::kPut, x);
    for (Word x = 0; x <= puts + 1; ++x) run(x % 2 == 0 ? OpKind::kTake : OpKind::kSteal, 0);
  };
}

Finding criterion5() {
  Finding o;
  std::ostringstream detail;

  // Weak multiplicity: the maximum is the same for every corpus size.
  std::set<std::uint64_t> wmult_maxima;
  for (int k = 4; k <= 16; ++k) {
    const std::size_t ops = std::size_t{1} << k;
    QueueOptions opt;
    opt.buffer.flat_capacity = ops + 2;
    const OpMaxima m = measure<WsWMult<SimBackend, FlatBuffer>>(opt, random_mix(ops, static_cast<std::uint64_t>(k), ops));
    const OpMaxima f = measure<WsWMult<SimBackend, FlatBuffer>>(opt, fill_and_drain(static_cast<Word>(ops / 2)));
    wmult_maxima.insert(std::max({m.put, m.take, m.steal, f.put, f.take, f.steal}));
    if (m.put_reads != 0 || f.put_reads != 0) o.fail("ws-wmult put read shared memory");
  }
  if (wmult_maxima.size() != 1) o.fail("ws-wmult maximum varies with corpus size");
  detail << "ws-wmult max " << *wmult_maxima.rbegin() << " instructions; ";

  // Multiplicity: take/steal maxima against log2 of the register capacity.
  std::vector<double> xs;
  std::vector<double> ys;
  for (int k = 4; k <= 16; ++k) {
    const Word m = Word{1} << k;
    QueueOptions opt;
    opt.capacity = m;
    opt.buffer.flat_capacity = static_cast<std::size_t>(m) + 2;
    const OpMaxima a = measure<WsMult<SimBackend, FlatBuffer>>(opt, fill_and_drain(m - 1));
    const OpMaxima b = measure<WsMult<SimBackend, FlatBuffer>>(opt, random_mix(static_cast<std::size_t>(4 * m), 7, m - 1));
    if (a.put_reads != 0 || b.put_reads != 0) o.fail("ws-mult put read shared memory");
    xs.push_back(k);
    ys.push_back(static_cast<double>(std::max({a.take, a.steal, b.take, b.steal})));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double c = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double d = (sy - c * sx) / n;
  double worst_residual = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) worst_residual = std::max(worst_residual, std::abs(ys[i] - (c * xs[i] + d)));
  if (!(c > 0) || worst_residual > 1.0) {
    std::ostringstream why;
    why << "ws-mult maxima do not fit c*log2(m)+d (c=" << c << ", worst residual " << worst_residual << ")";
    o.fail(why.str());
  }
  char fit[128];
  std::snprintf(fit, sizeof fit, "ws-mult max %.0f..%.0f fits %.2f*log2(m)%+.2f (worst residual %.2f); ", ys.front(),
                ys.back(), c, d, worst_residual);
  detail << fit;

  // Put never reads shared memory in any variant, on flat or segmented
  // storage. Doubling growth copies the old array and so reads by design.
  QueueOptions opt;
  opt.capacity = 1 << 12;
  opt.buffer.segment_length = 8;
  opt.buffer.initial_capacity = 8;
  opt.buffer.flat_capacity = (1 << 12) + 2;
  const auto mix = random_mix(6000, 11, (1 << 12) - 1);
  std::uint64_t reads = 0;
  reads += measure<WsMult<SimBackend>>(opt, mix).put_reads;
  reads += measure<WsWMult<SimBackend>>(opt, mix).put_reads;
  reads += measure<BWsMult<SimBackend>>(opt, mix).put_reads;
  reads += measure<BWsWMult<SimBackend>>(opt, mix).put_reads;
  reads += measure<ExactWs<SimBackend>>(opt, mix).put_reads;
  reads += measure<WsMult<SimBackend, FlatBuffer>>(opt, mix).put_reads;
  reads += measure<WsWMult<SimBackend, FlatBuffer>>(opt, mix).put_reads;
  if (reads != 0) o.fail("a put read shared memory");
  detail << "put reads 0";
  if (o.pass) o.detail = detail.str();
  return o;
}

// ---------------------------------------------------------------------------

struct Tally {
  int takes = 0;
  int steals = 0;
};

Finding criterion6() {
  Finding o;
  const History h = replay_idempotent_counterexample(4);
  std::map<Word, Tally> t;
  for (const Operation& op : operations(h)) {
    if (!is_extraction(op.kind) || !op.result || *op.result == kEmpty) continue;
    (op.kind == OpKind::kTake ? t[*op.result].takes : t[*op.result].steals) += 1;
  }
  if (t.size() != 4) o.fail("expected 4 extracted tasks, got " + std::to_string(t.size()));
  for (int i = 0; i < 4; ++i) {
    const Tally x = t.count(i + 1) ? t.at(i + 1) : Tally{};
    if (x.takes != 1 || x.steals != i + 1) {
      o.fail("task index " + std::to_string(i) + ": " + std::to_string(x.takes) + " takes, " +
             std::to_string(x.steals) + " steals");
    }
  }
  const Verdict v = check_set_linearizable(h, MultiplicityQueueSpec{});
  if (v.accepted || v.inconclusive) o.fail("idempotent history not rejected under multiplicity");
  const History shape = replay_ws_mult_shape(4);
  const Verdict b = check_multiplicity_bounds(shape, BoundMode::kMult);
  if (!b.accepted) o.fail("ws-mult shape: " + b.reason);
  const Verdict s = check_set_linearizable(shape, MultiplicityQueueSpec{});
  if (!s.accepted) o.fail("ws-mult shape not set-linearizable: " + s.reason);
  if (o.pass) o.detail = "task i extracted by 1 take + (i+1) steals; rejected; ws-mult duplicates all concurrent";
  return o;
}

// ---------------------------------------------------------------------------

std::vector<bench::SuiteRow> spanning_rows;

std::vector<std::size_t> suite_threads() {
  const std::size_t hw = std::max<std::size_t>(std::thread::hardware_concurrency(), 1);
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t <= std::max<std::size_t>(hw, 4); ++t) out.push_back(t);
  return out;
}

bench::SuiteSpec spanning_suite() {
  bench::SuiteSpec s;
  for (bench::GraphKind k : {bench::GraphKind::kTorus2d, bench::GraphKind::kTorus2d60, bench::GraphKind::kTorus3d,
                             bench::GraphKind::kTorus3d40, bench::GraphKind::kRandom}) {
    for (bool directed : {false, true}) s.graphs.push_back({k, directed, 0});
  }
  s.algorithms.assign(std::begin(bench::kAllAlgorithms), std::end(bench::kAllAlgorithms));
  s.threads = suite_threads();
  s.vertices = 100'000;
  s.reps = 5;
  return s;
}

void write_csv(const std::string& name, const std::string& text) {
  std::ofstream(csv_dir + "/" + name) << text;
}

Finding criterion7() {
  Finding o;
  spanning_rows = bench::run_suite(spanning_suite());
  write_csv("acceptance_spanning_tree.csv", bench::suite_csv(spanning_rows));
  for (const bench::SuiteRow& r : spanning_rows) {
    if (!r.valid) {
      o.fail(r.graph + (r.directed ? " directed " : " undirected ") + r.algorithm + " T=" + std::to_string(r.threads) +
             ": " + r.error);
    }
  }
  if (o.pass) o.detail = std::to_string(spanning_rows.size()) + " valid cells at V=100000";
  return o;
}

// Methodology checks on one CSV: header, every row measured, the Chase-Lev
// baseline row of each experiment normalized to exactly 1, and every speedup
// equal to baseline / cell within print rounding.
void check_csv(Finding& o, const std::string& csv, const char* what) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  if (line != bench::kCsvHeader) o.fail(std::string(what) + ": bad header");
  std::map<std::string, double> baseline;
  struct Row {
    std::string key;
    double ms;
    double speedup;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (cells.size() != 7) {
      o.fail(std::string(what) + ": malformed row " + line);
      continue;
    }
    const std::string key = cells[0] + "," + cells[1];
    const double ms = std::strtod(cells[5].c_str(), nullptr);
    const double speedup = std::strtod(cells[6].c_str(), nullptr);
    if (!std::isfinite(ms) || ms <= 0) o.fail(std::string(what) + ": unmeasured row " + line);
    const bool base = cells[2] == "chase-lev" && (cells[4] == "1" || cells[0].rfind("zero-cost", 0) == 0);
    if (base) {
      baseline[key] = ms;
      if (cells[6] != "1.0000") o.fail(std::string(what) + ": baseline not normalized to 1 in " + line);
    }
    rows.push_back({key, ms, speedup});
  }
  for (const Row& r : rows) {
    auto it = baseline.find(r.key);
    if (it == baseline.end()) {
      o.fail(std::string(what) + ": no Chase-Lev baseline for " + r.key);
      continue;
    }
    const double expected = it->second / r.ms;
    if (std::abs(expected - r.speedup) > 1e-3 + 2e-3 * expected) o.fail(std::string(what) + ": inconsistent speedup");
  }
}

Finding criterion8() {
  Finding o;
  if (bench::trimmed_mean({10, 1, 2, 3, 100}) != 5.0) o.fail("trimmed mean does not drop the extremes");
  bench::SuiteSpec zc;
  zc.zero_cost_modes = {bench::ZeroCostMode::kPutTake, bench::ZeroCostMode::kPutSteal};
  zc.zero_cost_ops = 1'000'000;
  zc.algorithms.assign(std::begin(bench::kAllAlgorithms), std::end(bench::kAllAlgorithms));
  zc.reps = 5;
  const auto zrows = bench::run_suite(zc);
  for (const auto& r : zrows) {
    if (!r.valid) o.fail(r.graph + " " + r.algorithm + ": " + r.error);
  }
  const std::string zcsv = bench::suite_csv(zrows);
  write_csv("acceptance_zero_cost.csv", zcsv);
  check_csv(o, zcsv, "zero-cost");
  if (spanning_rows.empty()) spanning_rows = bench::run_suite(spanning_suite());
  check_csv(o, bench::suite_csv(spanning_rows), "spanning-tree");
  if (o.pass) {
    o.detail = "5 reps, trimmed means, Chase-Lev-normalized CSVs in " + csv_dir +
               " (acceptance_zero_cost.csv, acceptance_spanning_tree.csv)";
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Finding (*)()>> criteria = {
      {"exhaustive set-linearizability of ws-mult", criterion1},
      {"exhaustive linearizability of ws-wmult", criterion2},
      {"sequential exactness", criterion3},
      {"multiplicity bounds under native stress", criterion4},
      {"step complexity", criterion5},
      {"idempotent fifo duplicate extractions", criterion6},
      {"spanning-tree validity", criterion7},
      {"benchmark reporting methodology", criterion8},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--csv-dir" && i + 1 < argc) {
      csv_dir = argv[++i];
    } else {
      const int n = std::atoi(a.c_str());
      if (n < 1 || n > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "usage: acceptance [--csv-dir DIR] [criterion 1-8 ...]\n");
        return 2;
      }
      selected.insert(n);
    }
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(n)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Finding o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", n, criteria[i].first, s, o.detail.c_str());
    std::fflush(stdout);
    all &= o.pass;
  }
  return all ? 0 : 1;
}
