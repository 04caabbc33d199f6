#pragma once

// FIFO work-stealing queues with relaxed extraction semantics.
//
// One skeleton covers every variant:
//   HeadKind::kTree   `Head` is a wait-free max register (multiplicity)
//   HeadKind::kRange  `Head` is a plain cell used through per-process local
//                     maxima (weak multiplicity)
//   ClaimMode         which extractions must win a Swap on a per-index flag
//                     before returning a task
//
// Tasks[i] for i = 1, 2, ... holds the i-th put task; the owner keeps the
// two slots after its tail at Bottom so a reader never mistakes an unwritten
// slot for a task. Handles are trivially copyable and must not be used by
// two threads at once.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <type_traits>

#include "wsm/maxreg.hpp"
#include "wsm/shmem.hpp"
#include "wsm/taskbuf.hpp"
#include "wsm/types.hpp"

namespace wsm {

enum class HeadKind { kTree, kRange };

enum class ClaimMode {
  kNone,       // no claims: multiplicity
  kStealOnly,  // steals claim: at most one steal per task
  kAll,        // takes and steals claim: exactly once
};

struct QueueOptions {
  /// Capacity of the tree register; at most capacity-1 puts are accepted.
  Word capacity = Word{1} << 20;
  BufferOptions buffer;
};

template <class B, template <class> class Buf, HeadKind H, ClaimMode C>
class WorkStealingQueue {
 public:
  using Backend = B;
  using Tasks = Buf<B>;
  using Claims = SegmentedBuffer<B>;
  using Cell = typename B::Cell;
  static constexpr HeadKind kHead = H;
  static constexpr ClaimMode kClaims = C;

 private:
  struct NoClaims {
    NoClaims(const BufferOptions&, Word) {}
    struct OwnerCursor {};
    struct ReaderCursor {};
  };
  using ClaimStore = std::conditional_t<C == ClaimMode::kNone, NoClaims, Claims>;
  using HeadReg = std::conditional_t<H == HeadKind::kTree, TreeMaxRegister<B>, Cell>;

  static HeadReg make_head(const QueueOptions& opt) {
    if constexpr (H == HeadKind::kTree) {
      return HeadReg(opt.capacity);
    } else {
      return HeadReg(1);
    }
  }

 public:
  class Owner {
   public:
    Owner() = default;
    explicit Owner(WorkStealingQueue* q) : q_(q) {}

    bool put(TaskId x) {
      if (x < 1) throw std::invalid_argument("task ids start at 1");
      if constexpr (H == HeadKind::kTree) {
        if (tail_ + 1 > q_->capacity_ - 1) throw CapacityError("queue capacity exceeded");
      }
      ++tail_;
      if constexpr (C != ClaimMode::kNone) q_->claims_.owner_at(claim_w_, tail_).write(kTrue);
      q_->tasks_.owner_at(task_w_, tail_).write(x);
      q_->tasks_.owner_at(task_w_, tail_ + 2).write(kBottom);
      return true;
    }

    TakeResult take() {
      if constexpr (C == ClaimMode::kAll) {
        return take_claiming();
      } else if constexpr (H == HeadKind::kTree) {
        const Word head = q_->head_.max_read();
        if (head > tail_) return std::nullopt;
        const Word x = q_->tasks_.at(task_r_, head).read();
        q_->head_.max_write(head + 1);
        return x;
      } else {
        head_ = std::max(head_, q_->head_.read());
        if (head_ > tail_) return std::nullopt;
        const Word x = q_->tasks_.at(task_r_, head_).read();
        q_->head_.write(head_ + 1);
        ++head_;
        return x;
      }
    }

    Word tail() const { return tail_; }

   private:
    TakeResult take_claiming() {
      Word head = read_head();
      for (;;) {
        if (head > tail_) return std::nullopt;
        const Word x = q_->tasks_.at(task_r_, head).read();
        if (q_->claims_.at(claim_r_, head).swap(kFalse) == kTrue) {
          advance_head(head);
          return x;
        }
        B::on_retry();
        head = std::max(head + 1, read_head());
      }
    }

    Word read_head() {
      if constexpr (H == HeadKind::kTree) {
        return q_->head_.max_read();
      } else {
        head_ = std::max(head_, q_->head_.read());
        return head_;
      }
    }

    void advance_head(Word head) {
      if constexpr (H == HeadKind::kTree) {
        q_->head_.max_write(head + 1);
      } else {
        q_->head_.write(head + 1);
        head_ = head + 1;
      }
    }

    WorkStealingQueue* q_ = nullptr;
    Word tail_ = 0;
    Word head_ = 1;  // local maximum, kRange only
    typename Tasks::OwnerCursor task_w_{};
    typename Tasks::ReaderCursor task_r_{};
    typename ClaimStore::OwnerCursor claim_w_{};
    typename ClaimStore::ReaderCursor claim_r_{};
  };

  class Thief {
   public:
    Thief() = default;
    explicit Thief(WorkStealingQueue* q) : q_(q) {}

    TakeResult steal() {
      if constexpr (C == ClaimMode::kNone) {
        const Word head = read_head();
        const Word x = q_->tasks_.at(task_r_, head).read();
        if (x == kBottom) return std::nullopt;
        advance_head(head);
        return x;
      } else {
        Word head = read_head();
        for (;;) {
          const Word x = q_->tasks_.at(task_r_, head).read();
          if (x == kBottom) return std::nullopt;
          if (q_->claims_.at(claim_r_, head).swap(kFalse) == kTrue) {
            advance_head(head);
            return x;
          }
          B::on_retry();
          head = std::max(head + 1, read_head());
        }
      }
    }

   private:
    Word read_head() {
      if constexpr (H == HeadKind::kTree) {
        return q_->head_.max_read();
      } else {
        head_ = std::max(head_, q_->head_.read());
        return head_;
      }
    }

    void advance_head(Word head) {
      if constexpr (H == HeadKind::kTree) {
        q_->head_.max_write(head + 1);
      } else {
        q_->head_.write(head + 1);
        head_ = head + 1;
      }
    }

    WorkStealingQueue* q_ = nullptr;
    Word head_ = 1;  // local maximum, kRange only
    typename Tasks::ReaderCursor task_r_{};
    typename ClaimStore::ReaderCursor claim_r_{};
  };

  explicit WorkStealingQueue(const QueueOptions& opt = {})
      : capacity_(opt.capacity),
        tasks_(opt.buffer, kBottom),
        claims_(opt.buffer, kTrue),
        head_(make_head(opt)) {}

  WorkStealingQueue(const WorkStealingQueue&) = delete;
  WorkStealingQueue& operator=(const WorkStealingQueue&) = delete;

  Owner owner() { return Owner(this); }
  Thief thief() { return Thief(this); }

  /// Current value of `Head` (shared reads).
  Word head_value() const {
    if constexpr (H == HeadKind::kTree) {
      return head_.max_read();
    } else {
      return head_.read();
    }
  }

  Tasks& tasks() { return tasks_; }

 private:
  Word capacity_;
  Tasks tasks_;
  [[no_unique_address]] ClaimStore claims_;
  HeadReg head_;
};

template <class B, template <class> class Buf = SegmentedBuffer>
using WsMult = WorkStealingQueue<B, Buf, HeadKind::kTree, ClaimMode::kNone>;
template <class B, template <class> class Buf = SegmentedBuffer>
using WsWMult = WorkStealingQueue<B, Buf, HeadKind::kRange, ClaimMode::kNone>;
template <class B, template <class> class Buf = SegmentedBuffer>
using BWsMult = WorkStealingQueue<B, Buf, HeadKind::kTree, ClaimMode::kStealOnly>;
template <class B, template <class> class Buf = SegmentedBuffer>
using BWsWMult = WorkStealingQueue<B, Buf, HeadKind::kRange, ClaimMode::kStealOnly>;
template <class B, template <class> class Buf = SegmentedBuffer>
using ExactWs = WorkStealingQueue<B, Buf, HeadKind::kTree, ClaimMode::kAll>;

}  // namespace wsm
