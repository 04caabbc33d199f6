#pragma once

// Reference work-stealing algorithms used for comparison.

#include <cstddef>
#include <memory>
#include <stdexcept>

#include "wsm/shmem.hpp"
#include "wsm/taskbuf.hpp"
#include "wsm/types.hpp"

namespace wsm {

/// Chase-Lev deque over a growable circular array. The owner pushes and pops
/// at `bottom` (LIFO); thieves take from `top` with a CAS and retry after a
/// lost CAS. Every task is extracted exactly once.
template <class B>
class ChaseLevDeque {
 public:
  using Backend = B;
  using Cell = typename B::Cell;

  struct Array {
    Array(std::size_t cap, Array* before) : capacity(cap), prev(before), cells(std::make_unique<Cell[]>(cap)) {}
    const std::size_t capacity;  // power of two
    Array* const prev;
    std::unique_ptr<Cell[]> cells;
    Cell& at(Word i) { return cells[static_cast<std::size_t>(i) & (capacity - 1)]; }
  };

  class Owner {
   public:
    Owner() = default;
    explicit Owner(ChaseLevDeque* d) : d_(d), arr_(d->first_) {}

    bool put(TaskId x) {
      if (x < 1) throw std::invalid_argument("task ids start at 1");
      const Word b = d_->bottom_.read();
      const Word t = d_->top_.read();
      if (b - t >= static_cast<Word>(arr_->capacity) - 1) grow(b, t);
      arr_->at(b).write(x);
      d_->bottom_.write(b + 1);
      return true;
    }

    TakeResult take() {
      const Word b = d_->bottom_.read() - 1;
      d_->bottom_.write(b);
      B::fence();
      const Word t = d_->top_.read();
      if (t > b) {
        d_->bottom_.write(b + 1);
        return std::nullopt;
      }
      Word x = arr_->at(b).read();
      if (t == b) {
        if (!d_->top_.cas(t, t + 1)) x = kEmpty;
        d_->bottom_.write(b + 1);
        if (x == kEmpty) return std::nullopt;
      }
      return x;
    }

   private:
    void grow(Word b, Word t) {
      Array* bigger = B::template make<Array>(arr_->capacity * 2, arr_);
      for (Word i = t; i < b; ++i) bigger->at(i).write(arr_->at(i).read());
      d_->array_.write(pointer_to_word(bigger));
      arr_ = bigger;
    }

    ChaseLevDeque* d_ = nullptr;
    Array* arr_ = nullptr;  // owner's copy of the published array
  };

  class Thief {
   public:
    Thief() = default;
    explicit Thief(ChaseLevDeque* d) : d_(d) {}

    TakeResult steal() {
      for (;;) {
        const Word t = d_->top_.read();
        B::fence();
        const Word b = d_->bottom_.read();
        if (t >= b) return std::nullopt;
        Array* a = word_to_pointer<Array>(d_->array_.read());
        const Word x = a->at(t).read();
        if (d_->top_.cas(t, t + 1)) return x;
        B::on_retry();
      }
    }

   private:
    ChaseLevDeque* d_ = nullptr;
  };

  explicit ChaseLevDeque(std::size_t initial_capacity = 256) : top_(0), bottom_(0) {
    std::size_t cap = 2;
    while (cap < initial_capacity) cap *= 2;
    first_ = B::template make<Array>(cap, nullptr);
    array_.init(pointer_to_word(first_));
  }

  ~ChaseLevDeque() {
    if constexpr (!B::kSimulated) {
      Array* a = word_to_pointer<Array>(array_.read());
      while (a != nullptr) {
        Array* p = a->prev;
        B::destroy(a);
        a = p;
      }
    }
  }

  ChaseLevDeque(const ChaseLevDeque&) = delete;
  ChaseLevDeque& operator=(const ChaseLevDeque&) = delete;

  Owner owner() { return Owner(this); }
  Thief thief() { return Thief(this); }

 private:
  Cell top_;
  Cell bottom_;
  Cell array_;
  Array* first_ = nullptr;
};

/// Idempotent FIFO work stealing: shared `head` and `tail` indices over a
/// task array. The owner extracts with plain reads and a plain head write;
/// thieves advance head with a CAS. A task may be returned any number of
/// times, but never lost.
template <class B, template <class> class Buf = SegmentedBuffer>
class IdempotentFifo {
 public:
  using Backend = B;
  using Cell = typename B::Cell;
  using Tasks = Buf<B>;

  class Owner {
   public:
    Owner() = default;
    explicit Owner(IdempotentFifo* q) : q_(q) {}

    bool put(TaskId x) {
      if (x < 1) throw std::invalid_argument("task ids start at 1");
      const Word t = q_->tail_.read();
      q_->tasks_.owner_at(task_w_, t).write(x);
      q_->tail_.write(t + 1);
      return true;
    }

    TakeResult take() {
      const Word h = q_->head_.read();
      const Word t = q_->tail_.read();
      if (h >= t) return std::nullopt;
      const Word x = q_->tasks_.at(task_r_, h).read();
      q_->head_.write(h + 1);
      return x;
    }

   private:
    IdempotentFifo* q_ = nullptr;
    typename Tasks::OwnerCursor task_w_{};
    typename Tasks::ReaderCursor task_r_{};
  };

  class Thief {
   public:
    Thief() = default;
    explicit Thief(IdempotentFifo* q) : q_(q) {}

    TakeResult steal() {
      for (;;) {
        const Word h = q_->head_.read();
        const Word t = q_->tail_.read();
        if (h >= t) return std::nullopt;
        const Word x = q_->tasks_.at(task_r_, h).read();
        if (q_->head_.cas(h, h + 1)) return x;
        B::on_retry();
      }
    }

   private:
    IdempotentFifo* q_ = nullptr;
    typename Tasks::ReaderCursor task_r_{};
  };

  explicit IdempotentFifo(const BufferOptions& opt = {}) : tasks_(opt, kBottom), head_(1), tail_(1) {}

  IdempotentFifo(const IdempotentFifo&) = delete;
  IdempotentFifo& operator=(const IdempotentFifo&) = delete;

  Owner owner() { return Owner(this); }
  Thief thief() { return Thief(this); }

  Word head_value() const { return head_.read(); }

 private:
  Tasks tasks_;
  Cell head_;
  Cell tail_;
};

}  // namespace wsm
