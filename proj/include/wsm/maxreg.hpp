#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <memory>
#include <stdexcept>

#include "wsm/shmem.hpp"
#include "wsm/types.hpp"

namespace wsm {

/// Bounded wait-free max register built only from read/write bits.
///
/// Values 1..capacity live at leaf positions 0..capacity-1 of a complete
/// binary tree over bit_ceil(capacity) leaves. Each internal node holds one
/// bit meaning "a value in my right subtree has been written". A read walks
/// from the root, going right on 1 and left on 0. A write walks the path of
/// its own value reading every bit; if it would turn left at a node already
/// set, a larger value exists and it stops. Otherwise it sets the bits of the
/// right turns that read 0, deepest first. Reads issue height() reads; writes
/// issue at most height() reads followed by at most height() writes, never a
/// read after a write.
template <class B>
class TreeMaxRegister {
 public:
  using Cell = typename B::Cell;

  explicit TreeMaxRegister(Word capacity)
      : capacity_(capacity),
        leaves_(std::bit_ceil(static_cast<std::size_t>(capacity < 1 ? 1 : capacity))),
        height_(std::countr_zero(leaves_)),
        bits_(std::make_unique<Cell[]>(leaves_)) {
    if (capacity < 1) throw std::invalid_argument("max register capacity must be >= 1");
  }

  Word capacity() const { return capacity_; }
  int height() const { return height_; }

  Word max_read() const {
    std::size_t node = 1;
    Word low = 0;
    for (std::size_t span = leaves_; span > 1; span /= 2) {
      if (bits_[node].read() != 0) {
        low += static_cast<Word>(span / 2);
        node = 2 * node + 1;
      } else {
        node = 2 * node;
      }
    }
    return low + 1;
  }

  void max_write(Word v) {
    if (v < 1) throw std::invalid_argument("max register values start at 1");
    if (v > capacity_) throw CapacityError("max register value exceeds capacity");
    auto pos = static_cast<std::size_t>(v - 1);
    std::array<std::size_t, 64> pending{};
    int count = 0;
    std::size_t node = 1;
    for (std::size_t span = leaves_; span > 1; span /= 2) {
      const std::size_t half = span / 2;
      const bool set = bits_[node].read() != 0;
      if (pos >= half) {
        if (!set) pending[count++] = node;
        pos -= half;
        node = 2 * node + 1;
      } else {
        if (set) return;
        node = 2 * node;
      }
    }
    for (int i = count - 1; i >= 0; --i) bits_[pending[i]].write(kTrue);
  }

 private:
  Word capacity_;
  std::size_t leaves_;
  int height_;
  std::unique_ptr<Cell[]> bits_;  // heap order, index 0 unused
};

/// Relaxed max register: one shared word plus a private maximum per process.
/// A read returns something between the caller's last known value and the
/// largest value written so far; sequential executions behave exactly like a
/// max register.
template <class B>
class RangeMaxRegister {
 public:
  using Cell = typename B::Cell;

  /// Per-process view. Must not be used by two threads at once.
  class Handle {
   public:
    Handle() = default;
    explicit Handle(RangeMaxRegister* reg) : reg_(reg) {}

    Word rmax_read() {
      local_ = std::max(local_, reg_->shared_.read());
      return local_;
    }

    bool rmax_write(Word x) {
      if (reg_->refresh_on_write_) local_ = std::max(local_, reg_->shared_.read());
      if (x > local_) {
        local_ = x;
        reg_->shared_.write(x);
      }
      return true;
    }

    Word local() const { return local_; }

   private:
    RangeMaxRegister* reg_ = nullptr;
    Word local_ = 1;
  };

  /// `refresh_on_write` controls the read of the shared word at the start of
  /// rmax_write; dropping it keeps sequential exactness when every write is
  /// preceded by a read from the same process.
  explicit RangeMaxRegister(bool refresh_on_write = true) : shared_(1), refresh_on_write_(refresh_on_write) {}

  Handle handle() { return Handle(this); }

 private:
  Cell shared_;
  bool refresh_on_write_;
};

}  // namespace wsm
