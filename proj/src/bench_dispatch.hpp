#pragma once

// Maps run-time benchmark choices onto concrete queue types.

#include <memory>
#include <type_traits>

#include "wsm/baselines.hpp"
#include "wsm/bench.hpp"
#include "wsm/wsqueue.hpp"

namespace wsm::bench::detail {

template <class Q>
std::unique_ptr<Q> make_queue(Word capacity, const BufferOptions& bo) {
  if constexpr (requires { Q::kHead; }) {
    QueueOptions o;
    o.capacity = capacity;
    o.buffer = bo;
    return std::make_unique<Q>(o);
  } else if constexpr (std::is_constructible_v<Q, const BufferOptions&>) {
    return std::make_unique<Q>(bo);
  } else {
    return std::make_unique<Q>(bo.initial_capacity);
  }
}

template <class B, template <class> class Buf, class F>
auto dispatch_algorithm(Algorithm a, F&& f) {
  switch (a) {
    case Algorithm::kWsMult: return f(std::type_identity<WsMult<B, Buf>>{});
    case Algorithm::kWsWMult: return f(std::type_identity<WsWMult<B, Buf>>{});
    case Algorithm::kBWsMult: return f(std::type_identity<BWsMult<B, Buf>>{});
    case Algorithm::kBWsWMult: return f(std::type_identity<BWsWMult<B, Buf>>{});
    case Algorithm::kExact: return f(std::type_identity<ExactWs<B, Buf>>{});
    case Algorithm::kChaseLev: return f(std::type_identity<ChaseLevDeque<B>>{});
    case Algorithm::kIdempotentFifo: return f(std::type_identity<IdempotentFifo<B, Buf>>{});
  }
  return f(std::type_identity<WsWMult<B, Buf>>{});
}

/// Calls f(std::type_identity<Q>{}) for the queue type selected by cfg.
template <class F>
auto dispatch(const BenchConfig& cfg, F&& f) {
  if (cfg.profile == MemoryProfile::kSeqCst) {
    if (cfg.buffer == BufferKind::kSegmented) return dispatch_algorithm<Native, SegmentedBuffer>(cfg.algorithm, f);
    return dispatch_algorithm<Native, DoublingBuffer>(cfg.algorithm, f);
  }
  if (cfg.buffer == BufferKind::kSegmented) return dispatch_algorithm<NativeRelaxed, SegmentedBuffer>(cfg.algorithm, f);
  return dispatch_algorithm<NativeRelaxed, DoublingBuffer>(cfg.algorithm, f);
}

inline BufferOptions buffer_options(const BenchConfig& cfg) {
  BufferOptions bo;
  bo.segment_length = cfg.segment_length;
  bo.initial_capacity = cfg.segment_length;
  return bo;
}

}  // namespace wsm::bench::detail
