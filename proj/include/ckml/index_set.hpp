#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "ckml/error.hpp"

namespace ckml {

using Bits = boost::dynamic_bitset<std::uint64_t>;

/// A subset of a fixed universe {0, ..., universe()-1}.
///
/// The universe size binds the set to the objects or attributes of one
/// context; operations between sets over different universes throw
/// InvalidSetError. Tag keeps object sets and attribute sets apart at
/// compile time.
template <class Tag>
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::size_t universe) : bits_(universe) {}
  explicit IndexSet(Bits bits) : bits_(std::move(bits)) {}

  static IndexSet none(std::size_t universe) { return IndexSet(universe); }

  static IndexSet all(std::size_t universe) {
    IndexSet s(universe);
    s.bits_.set();
    return s;
  }

  static IndexSet of(std::size_t universe, std::initializer_list<std::size_t> indices) {
    return of(universe, std::vector<std::size_t>(indices));
  }

  static IndexSet of(std::size_t universe, const std::vector<std::size_t>& indices) {
    IndexSet s(universe);
    for (std::size_t i : indices) s.insert(i);
    return s;
  }

  std::size_t universe() const noexcept { return bits_.size(); }
  std::size_t count() const noexcept { return bits_.count(); }
  bool empty() const noexcept { return bits_.none(); }
  bool full() const noexcept { return bits_.all(); }

  bool contains(std::size_t i) const {
    check_index(i);
    return bits_.test(i);
  }

  IndexSet& insert(std::size_t i) {
    check_index(i);
    bits_.set(i);
    return *this;
  }

  IndexSet& erase(std::size_t i) {
    check_index(i);
    bits_.reset(i);
    return *this;
  }

  bool is_subset_of(const IndexSet& other) const {
    check_same_universe(other);
    return bits_.is_subset_of(other.bits_);
  }

  bool is_proper_subset_of(const IndexSet& other) const {
    check_same_universe(other);
    return bits_.is_proper_subset_of(other.bits_);
  }

  IndexSet& operator&=(const IndexSet& other) {
    check_same_universe(other);
    bits_ &= other.bits_;
    return *this;
  }

  IndexSet& operator|=(const IndexSet& other) {
    check_same_universe(other);
    bits_ |= other.bits_;
    return *this;
  }

  IndexSet& operator-=(const IndexSet& other) {
    check_same_universe(other);
    bits_ -= other.bits_;
    return *this;
  }

  friend IndexSet operator&(IndexSet a, const IndexSet& b) { return a &= b; }
  friend IndexSet operator|(IndexSet a, const IndexSet& b) { return a |= b; }
  friend IndexSet operator-(IndexSet a, const IndexSet& b) { return a -= b; }

  IndexSet complement() const { return IndexSet(~bits_); }

  friend bool operator==(const IndexSet& a, const IndexSet& b) { return a.bits_ == b.bits_; }

  // Lexicographic order on the underlying bit vectors; only meant for
  // ordered containers.
  friend bool operator<(const IndexSet& a, const IndexSet& b) {
    if (a.universe() != b.universe()) return a.universe() < b.universe();
    return a.bits_ < b.bits_;
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for (auto i = bits_.find_first(); i != Bits::npos; i = bits_.find_next(i)) out.push_back(i);
    return out;
  }

  template <class F>
  void for_each(F&& f) const {
    for (auto i = bits_.find_first(); i != Bits::npos; i = bits_.find_next(i)) f(i);
  }

  const Bits& bits() const noexcept { return bits_; }

  std::size_t hash() const noexcept {
    std::size_t h = std::hash<std::size_t>{}(bits_.size());
    boost::to_block_range(bits_, HashSink{&h});
    return h;
  }

 private:
  struct HashSink {
    std::size_t* h;
    HashSink& operator*() { return *this; }
    HashSink& operator++() { return *this; }
    HashSink operator++(int) { return *this; }
    HashSink& operator=(std::uint64_t block) {
      *h ^= std::hash<std::uint64_t>{}(block) + 0x9e3779b97f4a7c15ULL + (*h << 6) + (*h >> 2);
      return *this;
    }
  };

  void check_index(std::size_t i) const {
    if (i >= bits_.size()) {
      throw InvalidSetError("index " + std::to_string(i) + " out of range for universe of size " +
                            std::to_string(bits_.size()));
    }
  }

  void check_same_universe(const IndexSet& other) const {
    if (other.universe() != universe()) {
      throw InvalidSetError("sets over different universes (" + std::to_string(universe()) +
                            " vs " + std::to_string(other.universe()) + ")");
    }
  }

  Bits bits_;
};

struct ObjectTag {};
struct AttributeTag {};

using ObjectSet = IndexSet<ObjectTag>;
using AttributeSet = IndexSet<AttributeTag>;

struct IndexSetHash {
  template <class Tag>
  std::size_t operator()(const IndexSet<Tag>& s) const noexcept {
    return s.hash();
  }
};

}  // namespace ckml
