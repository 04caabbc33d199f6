#pragma once

// Unbounded task storage indexed by flat naturals 1, 2, 3, ...
//
// All buffers share one shape:
//   OwnerCursor / ReaderCursor   trivially copyable per-process state
//   owner_at(OwnerCursor&, i)    cell i, growing the buffer if needed (owner only)
//   at(ReaderCursor&, i)         cell i; i beyond the published frontier is a
//                                ContractViolation
// Every cell not yet written holds the buffer's fill value.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>

#include "wsm/shmem.hpp"
#include "wsm/types.hpp"

namespace wsm {

struct BufferOptions {
  std::size_t segment_length = 256;    // SegmentedBuffer
  std::size_t initial_capacity = 256;  // DoublingBuffer
  std::size_t flat_capacity = 1024;    // FlatBuffer
};

/// Preallocated fixed-size array; writes beyond the end raise CapacityError.
template <class B>
class FlatBuffer {
 public:
  using Cell = typename B::Cell;
  struct OwnerCursor {};
  struct ReaderCursor {};

  explicit FlatBuffer(const BufferOptions& opt = {}, Word fill = kBottom)
      : capacity_(std::max<std::size_t>(opt.flat_capacity, 2)), cells_(std::make_unique<Cell[]>(capacity_)) {
    if (fill != kBottom) {
      for (std::size_t i = 0; i < capacity_; ++i) cells_[i].init(fill);
    }
  }

  Cell& owner_at(OwnerCursor&, Word i) {
    if (i < 1 || static_cast<std::size_t>(i) > capacity_) throw CapacityError("flat buffer capacity exceeded");
    return cells_[i - 1];
  }

  Cell& at(ReaderCursor&, Word i) {
    if (i < 1 || static_cast<std::size_t>(i) > capacity_) throw ContractViolation("read beyond flat buffer");
    return cells_[i - 1];
  }

  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::unique_ptr<Cell[]> cells_;
};

/// Linked chain of fixed-length segments. Segments are appended by the owner
/// and never unlinked. A new segment is fully initialized, its first two
/// slots are rewritten with the fill value, and only then is it linked from
/// its predecessor, so a reader that can reach a segment sees its sentinels.
template <class B>
class SegmentedBuffer {
 public:
  using Cell = typename B::Cell;

  struct Segment {
    Segment(std::uint64_t ord, std::size_t length, Word fill, Segment* before)
        : ordinal(ord), prev(before), slots(std::make_unique<Cell[]>(length)) {
      next.init(0);
      if (fill != kBottom) {
        for (std::size_t i = 0; i < length; ++i) slots[i].init(fill);
      }
    }
    Cell next;                       // link to the successor, 0 until published
    const std::uint64_t ordinal;     // position in the chain, from 0
    Segment* const prev;             // immutable back link
    std::unique_ptr<Cell[]> slots;
  };

  /// Tuple index: a segment plus a 1-based offset within it.
  struct Position {
    const Segment* segment = nullptr;
    std::uint32_t offset = 1;

    friend std::strong_ordering operator<=>(const Position& a, const Position& b) {
      if (auto c = a.segment->ordinal <=> b.segment->ordinal; c != 0) return c;
      return a.offset <=> b.offset;
    }
    friend bool operator==(const Position& a, const Position& b) {
      return a.segment == b.segment && a.offset == b.offset;
    }
  };

  struct OwnerCursor {
    Segment* last = nullptr;  // newest segment, known privately to the owner
  };
  struct ReaderCursor {
    Segment* seg = nullptr;
  };

  explicit SegmentedBuffer(const BufferOptions& opt = {}, Word fill = kBottom)
      : length_(std::max<std::size_t>(opt.segment_length, 1)), fill_(fill) {
    first_ = B::template make<Segment>(0, length_, fill_, nullptr);
  }

  ~SegmentedBuffer() {
    if constexpr (!B::kSimulated) {
      Segment* s = first_;
      while (s != nullptr) {
        Segment* n = word_to_pointer<Segment>(s->next.read());
        B::destroy(s);
        s = n;
      }
    }
  }

  SegmentedBuffer(const SegmentedBuffer&) = delete;
  SegmentedBuffer& operator=(const SegmentedBuffer&) = delete;

  std::size_t segment_length() const { return length_; }

  Cell& owner_at(OwnerCursor& c, Word i) {
    if (i < 1) throw ContractViolation("buffer index must be >= 1");
    const auto ord = ordinal_of(i);
    if (c.last == nullptr) c.last = first_;
    while (c.last->ordinal < ord) grow(c);
    Segment* s = c.last;
    while (s->ordinal > ord) s = s->prev;
    return s->slots[offset_of(i) - 1];
  }

  Cell& at(ReaderCursor& c, Word i) {
    if (i < 1) throw ContractViolation("buffer index must be >= 1");
    Segment* s = locate(c.seg, ordinal_of(i));
    c.seg = s;
    return s->slots[offset_of(i) - 1];
  }

  // Tuple-index view.

  Position position(ReaderCursor& c, Word i) {
    Segment* s = locate(c.seg, ordinal_of(i));
    c.seg = s;
    return {s, static_cast<std::uint32_t>(offset_of(i))};
  }

  Word flat(const Position& p) const {
    return static_cast<Word>(p.segment->ordinal * length_ + p.offset);
  }

  /// Successor in index order; crossing into an unpublished segment is a
  /// ContractViolation.
  Position increment(const Position& p) const {
    if (p.offset < length_) return {p.segment, p.offset + 1};
    const Word link = p.segment->next.read();
    if (link == 0) throw ContractViolation("increment past the last published segment");
    return {word_to_pointer<Segment>(link), 1};
  }

  Cell& at(const Position& p) { return const_cast<Segment*>(p.segment)->slots[p.offset - 1]; }

  /// Number of published segments (walks the chain through shared reads).
  std::size_t segment_count() const {
    std::size_t n = 1;
    for (Word w = first_->next.read(); w != 0; w = word_to_pointer<Segment>(w)->next.read()) ++n;
    return n;
  }

 private:
  std::uint64_t ordinal_of(Word i) const { return static_cast<std::uint64_t>(i - 1) / length_; }
  std::size_t offset_of(Word i) const { return static_cast<std::size_t>(i - 1) % length_ + 1; }

  void grow(OwnerCursor& c) {
    Segment* s = B::template make<Segment>(c.last->ordinal + 1, length_, fill_, c.last);
    s->slots[0].write(fill_);
    if (length_ > 1) s->slots[1].write(fill_);
    c.last->next.write(pointer_to_word(s));
    c.last = s;
  }

  Segment* locate(Segment* from, std::uint64_t ord) {
    Segment* s = from != nullptr ? from : first_;
    while (s->ordinal > ord) s = s->prev;
    while (s->ordinal < ord) {
      const Word link = s->next.read();
      if (link == 0) throw ContractViolation("read beyond the initialized frontier of the task buffer");
      s = word_to_pointer<Segment>(link);
    }
    return s;
  }

  std::size_t length_;
  Word fill_;
  Segment* first_;
};

/// Single array that doubles when the owner writes past its end. The owner
/// copies the old contents, fills the two slots after the old end, then
/// publishes the new array through `current_`. Readers load `current_` on
/// every access; superseded arrays stay alive (and frozen) until destruction.
template <class B>
class DoublingBuffer {
 public:
  using Cell = typename B::Cell;

  struct Array {
    Array(std::size_t cap, Array* before, Word fill)
        : capacity(cap), prev(before), cells(std::make_unique<Cell[]>(cap)) {
      if (fill != kBottom) {
        for (std::size_t i = 0; i < cap; ++i) cells[i].init(fill);
      }
    }
    const std::size_t capacity;
    Array* const prev;
    std::unique_ptr<Cell[]> cells;
  };

  struct OwnerCursor {
    Array* arr = nullptr;
  };
  struct ReaderCursor {};

  explicit DoublingBuffer(const BufferOptions& opt = {}, Word fill = kBottom) : fill_(fill) {
    Array* a = B::template make<Array>(std::max<std::size_t>(opt.initial_capacity, 2), nullptr, fill_);
    first_ = a;
    current_.init(pointer_to_word(a));
  }

  ~DoublingBuffer() {
    if constexpr (!B::kSimulated) {
      Array* a = word_to_pointer<Array>(current_.read());
      while (a != nullptr) {
        Array* p = a->prev;
        B::destroy(a);
        a = p;
      }
    }
  }

  DoublingBuffer(const DoublingBuffer&) = delete;
  DoublingBuffer& operator=(const DoublingBuffer&) = delete;

  Cell& owner_at(OwnerCursor& c, Word i) {
    if (i < 1) throw ContractViolation("buffer index must be >= 1");
    if (c.arr == nullptr) c.arr = first_;
    while (static_cast<std::size_t>(i) > c.arr->capacity) grow(c);
    return c.arr->cells[i - 1];
  }

  Cell& at(ReaderCursor&, Word i) {
    if (i < 1) throw ContractViolation("buffer index must be >= 1");
    Array* a = word_to_pointer<Array>(current_.read());
    if (static_cast<std::size_t>(i) > a->capacity) {
      throw ContractViolation("read beyond the initialized frontier of the task buffer");
    }
    return a->cells[i - 1];
  }

  /// Capacity of the published array (shared read).
  std::size_t capacity() const { return word_to_pointer<Array>(current_.read())->capacity; }

 private:
  void grow(OwnerCursor& c) {
    Array* old = c.arr;
    Array* a = B::template make<Array>(old->capacity * 2, old, fill_);
    for (std::size_t k = 0; k < old->capacity; ++k) a->cells[k].write(old->cells[k].read());
    a->cells[old->capacity].write(fill_);
    a->cells[old->capacity + 1].write(fill_);
    current_.write(pointer_to_word(a));
    c.arr = a;
  }

  Word fill_;
  Array* first_;
  Cell current_;
};

}  // namespace wsm
