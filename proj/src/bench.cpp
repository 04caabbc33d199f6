#include "wsm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <random>
#include <thread>

#include "bench_dispatch.hpp"

namespace wsm::bench {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

constexpr std::pair<Algorithm, std::string_view> kAlgorithmNames[] = {
    {Algorithm::kWsMult, "ws-mult"},     {Algorithm::kWsWMult, "ws-wmult"}, {Algorithm::kBWsMult, "b-ws-mult"},
    {Algorithm::kBWsWMult, "b-ws-wmult"}, {Algorithm::kExact, "exact"},     {Algorithm::kChaseLev, "chase-lev"},
    {Algorithm::kIdempotentFifo, "idempotent-fifo"},
};

void wait_for(const std::atomic<bool>& flag) {
  while (!flag.load(std::memory_order_acquire)) std::this_thread::yield();
}

}  // namespace

std::string_view to_string(Algorithm a) {
  for (const auto& [k, n] : kAlgorithmNames) {
    if (k == a) return n;
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view s) {
  for (const auto& [k, n] : kAlgorithmNames) {
    if (n == s) return k;
  }
  return std::nullopt;
}

Guarantee guarantee_of(Algorithm a) {
  switch (a) {
    case Algorithm::kWsMult:
    case Algorithm::kWsWMult: return Guarantee::kRelaxed;
    case Algorithm::kBWsMult:
    case Algorithm::kBWsWMult: return Guarantee::kBounded;
    case Algorithm::kExact:
    case Algorithm::kChaseLev: return Guarantee::kExact;
    case Algorithm::kIdempotentFifo: return Guarantee::kIdempotent;
  }
  return Guarantee::kRelaxed;
}

std::string_view to_string(BufferKind b) { return b == BufferKind::kSegmented ? "segmented" : "doubling"; }

std::optional<BufferKind> parse_buffer(std::string_view s) {
  if (s == "segmented") return BufferKind::kSegmented;
  if (s == "doubling") return BufferKind::kDoubling;
  return std::nullopt;
}

std::string_view to_string(MemoryProfile p) { return p == MemoryProfile::kSeqCst ? "seq-cst" : "relaxed"; }

std::optional<MemoryProfile> parse_profile(std::string_view s) {
  if (s == "seq-cst") return MemoryProfile::kSeqCst;
  if (s == "relaxed") return MemoryProfile::kRelaxed;
  return std::nullopt;
}

std::string_view to_string(ZeroCostMode m) { return m == ZeroCostMode::kPutTake ? "put-take" : "put-steal"; }

std::optional<ZeroCostMode> parse_zero_cost_mode(std::string_view s) {
  if (s == "put-take") return ZeroCostMode::kPutTake;
  if (s == "put-steal") return ZeroCostMode::kPutSteal;
  return std::nullopt;
}

double trimmed_mean(std::vector<double> runs) {
  if (runs.empty()) return 0;
  std::sort(runs.begin(), runs.end());
  auto first = runs.begin();
  auto last = runs.end();
  if (runs.size() >= 3) {
    ++first;
    --last;
  }
  return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
}

// ---------------------------------------------------------------------------
// Zero-cost experiments
// ---------------------------------------------------------------------------

namespace {

template <class Q>
BenchReport zero_cost_for(const BenchConfig& cfg, ZeroCostMode mode) {
  BenchReport rep;
  const auto n = static_cast<Word>(cfg.ops);
  const bool lifo = cfg.algorithm == Algorithm::kChaseLev;
  const Guarantee g = guarantee_of(cfg.algorithm);
  for (std::size_t r = 0; r < std::max<std::size_t>(cfg.reps, 1); ++r) {
    auto q = detail::make_queue<Q>(n + 2, detail::buffer_options(cfg));
    auto owner = q->owner();
    std::uint64_t extracted = 0;
    double ms = 0;
    if (mode == ZeroCostMode::kPutTake) {
      bool in_order = true;
      const auto t0 = Clock::now();
      for (Word i = 1; i <= n; ++i) owner.put(i);
      for (Word i = 0; i < n; ++i) {
        if (auto x = owner.take()) {
          ++extracted;
          in_order &= *x == (lifo ? n - i : i + 1);
        }
      }
      ms = elapsed_ms(t0, Clock::now());
      if (extracted != cfg.ops || !in_order) {
        rep.ok = false;
        rep.error = "put-take did not return every task in order";
      }
    } else {
      const std::size_t thieves = std::max<std::size_t>(cfg.thieves, 1);
      std::atomic<bool> go{false};
      std::atomic<std::uint64_t> total{0};
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < thieves; ++t) {
        pool.emplace_back([&, thief = q->thief()]() mutable {
          wait_for(go);
          std::uint64_t mine = 0;
          while (thief.steal()) ++mine;
          total.fetch_add(mine);
        });
      }
      const auto t0 = Clock::now();
      for (Word i = 1; i <= n; ++i) owner.put(i);
      go.store(true, std::memory_order_release);
      for (auto& th : pool) th.join();
      ms = elapsed_ms(t0, Clock::now());
      extracted = total.load();
      const bool exactly = extracted == cfg.ops;
      const bool within = extracted >= cfg.ops && extracted <= cfg.ops * thieves;
      const bool good = (g == Guarantee::kExact || (g == Guarantee::kBounded)) ? exactly
                        : g == Guarantee::kRelaxed                               ? within
                                                                                 : extracted >= cfg.ops;
      if (!good) {
        rep.ok = false;
        rep.error = "put-steal extracted " + std::to_string(extracted) + " of " + std::to_string(cfg.ops) + " tasks";
      }
    }
    rep.run_ms.push_back(ms);
    rep.extracted = extracted;
  }
  rep.trimmed_mean_ms = trimmed_mean(rep.run_ms);
  return rep;
}

}  // namespace

BenchReport zero_cost(const BenchConfig& cfg, ZeroCostMode mode) {
  try {
    return detail::dispatch(cfg, [&](auto tag) { return zero_cost_for<typename decltype(tag)::type>(cfg, mode); });
  } catch (const std::exception& e) {
    BenchReport rep;
    rep.ok = false;
    rep.error = e.what();
    return rep;
  }
}

// ---------------------------------------------------------------------------
// Spanning tree
// ---------------------------------------------------------------------------

namespace {

// A worker gives up when the claim counter has not moved for this long while
// it found no work; the tree is then reported invalid rather than hanging.
constexpr auto kStallLimit = std::chrono::seconds(5);

template <class Q>
SpanningResult spanning_for(const Graph& g, std::uint32_t root, const BenchConfig& cfg) {
  SpanningResult out;
  out.valid = true;
  const std::size_t threads = std::max<std::size_t>(cfg.threads, 1);
  const std::uint64_t target = component_size(g, root) - 1;
  const std::uint32_t nv = g.vertices;

  for (std::size_t r = 0; r < std::max<std::size_t>(cfg.reps, 1); ++r) {
    auto parents = std::make_unique<std::atomic<std::uint32_t>[]>(nv);
    for (std::uint32_t v = 0; v < nv; ++v) parents[v].store(kNoParent, std::memory_order_relaxed);
    parents[root].store(root, std::memory_order_relaxed);

    std::vector<std::unique_ptr<Q>> queues;
    for (std::size_t t = 0; t < threads; ++t) {
      queues.push_back(detail::make_queue<Q>(static_cast<Word>(nv) + 2, detail::buffer_options(cfg)));
    }

    std::atomic<bool> go{false};
    std::atomic<std::uint64_t> claimed{0};
    std::atomic<std::uint64_t> extractions{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;

    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        auto owner = queues[t]->owner();
        std::vector<typename Q::Thief> victims;
        for (std::size_t u = 0; u < threads; ++u) {
          if (u != t) victims.push_back(queues[u]->thief());
        }
        std::mt19937_64 rng(cfg.seed * 0x9e3779b97f4a7c15ULL + t);
        std::uniform_int_distribution<std::size_t> pick(0, victims.empty() ? 0 : victims.size() - 1);
        if (t == 0) owner.put(static_cast<Word>(root) + 1);
        wait_for(go);

        std::uint64_t local_extractions = 0;
        auto expand = [&](std::uint32_t v) {
          for (std::uint32_t w : g.neighbors(v)) {
            if (parents[w].load(std::memory_order_relaxed) != kNoParent) continue;
            std::uint32_t expected = kNoParent;
            if (parents[w].compare_exchange_strong(expected, v, std::memory_order_acq_rel)) {
              owner.put(static_cast<Word>(w) + 1);
              claimed.fetch_add(1, std::memory_order_relaxed);
            }
          }
        };

        std::uint64_t last_claimed = 0;
        auto last_progress = Clock::now();
        std::uint32_t idle = 0;
        while (claimed.load(std::memory_order_relaxed) < target) {
          TakeResult x = owner.take();
          if (!x && !victims.empty()) x = victims[pick(rng)].steal();
          if (x) {
            ++local_extractions;
            expand(static_cast<std::uint32_t>(*x - 1));
            idle = 0;
            continue;
          }
          std::this_thread::yield();
          if (++idle % 1024 == 0) {
            const auto now_claimed = claimed.load(std::memory_order_relaxed);
            const auto now = Clock::now();
            if (now_claimed != last_claimed) {
              last_claimed = now_claimed;
              last_progress = now;
            } else if (now - last_progress > kStallLimit) {
              failed.store(true);
              break;
            }
          }
        }
        extractions.fetch_add(local_extractions);
      });
    }

    const auto t0 = Clock::now();
    go.store(true, std::memory_order_release);
    for (auto& th : pool) th.join();
    out.report.run_ms.push_back(elapsed_ms(t0, Clock::now()));

    out.parents.assign(nv, kNoParent);
    for (std::uint32_t v = 0; v < nv; ++v) out.parents[v] = parents[v].load(std::memory_order_relaxed);
    out.claims = claimed.load();
    out.extractions = extractions.load();
    const bool ok = !failed.load() && out.claims == target && verify_spanning_tree(g, out.parents, root);
    if (!ok) {
      out.valid = false;
      out.report.ok = false;
      out.report.error = failed.load() ? "workers stalled" : "invalid spanning tree";
    }
  }
  out.report.trimmed_mean_ms = trimmed_mean(out.report.run_ms);
  out.report.extracted = out.extractions;
  return out;
}

}  // namespace

SpanningResult spanning_tree(const Graph& g, std::uint32_t root, const BenchConfig& cfg) {
  if (root >= g.vertices) throw std::invalid_argument("root out of range");
  try {
    return detail::dispatch(cfg, [&](auto tag) { return spanning_for<typename decltype(tag)::type>(g, root, cfg); });
  } catch (const std::exception& e) {
    SpanningResult res;
    res.report.ok = false;
    res.report.error = e.what();
    return res;
  }
}

}  // namespace wsm::bench
