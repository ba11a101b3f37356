#pragma once

#include <cstddef>
#include <vector>

#include "regulattice/matrix.hpp"

namespace regulattice {

/// Partition of a ground set into an exceptional class and ordered,
/// nonempty, pairwise disjoint classes. Every list is kept sorted.
class Partition {
 public:
  Partition() = default;

  /// Throws DomainError unless exceptional and classes exactly cover ground
  /// without overlap. Classes and members are sorted; class order is kept.
  Partition(IndexList ground, std::vector<IndexList> classes, IndexList exceptional = {});

  /// Ground set taken as the union of the given classes.
  static Partition from_classes(std::vector<IndexList> classes, IndexList exceptional = {});

  /// k consecutive classes of floor(n/k) elements over [0, n); the remainder
  /// (the highest indices) becomes the exceptional class.
  static Partition equal_blocks(std::size_t n, std::size_t k);
  static Partition trivial(std::size_t n);
  static Partition singletons(std::size_t n);

  const IndexList& ground() const noexcept { return ground_; }
  const IndexList& exceptional() const noexcept { return exceptional_; }
  const std::vector<IndexList>& classes() const noexcept { return classes_; }
  const IndexList& operator[](std::size_t i) const noexcept { return classes_[i]; }

  /// Number of nonexceptional classes.
  std::size_t class_count() const noexcept { return classes_.size(); }
  std::size_t size() const noexcept { return ground_.size(); }
  bool balanced() const noexcept;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  IndexList ground_;
  IndexList exceptional_;
  std::vector<IndexList> classes_;
};

/// Row and column partitions of a matrix. Symmetric block partitions carry
/// identical row and column partitions.
class BlockPartition {
 public:
  BlockPartition() = default;
  BlockPartition(Partition rows, Partition cols);
  static BlockPartition symmetric_of(Partition p);

  const Partition& rows() const noexcept { return rows_; }
  const Partition& cols() const noexcept { return cols_; }
  bool symmetric() const noexcept { return symmetric_; }
  bool balanced() const noexcept { return rows_.balanced() && cols_.balanced(); }

  /// Throws DomainError if the partitions do not cover [0, rows) and [0, cols).
  void check_covers(const RealMatrix& a) const;

  friend bool operator==(const BlockPartition&, const BlockPartition&) = default;

 private:
  Partition rows_;
  Partition cols_;
  bool symmetric_ = false;
};

/// True iff fine's exceptional set contains coarse's and every class of fine
/// lies inside a single element (class or exceptional set) of coarse.
bool is_refinement(const Partition& fine, const Partition& coarse);

/// Nonempty intersections of one class from each input, ordered
/// lexicographically by the tuple of class positions.
Partition common_refinement(const std::vector<Partition>& parts);

/// Exceptional elements become singleton classes after the existing ones.
Partition split_exceptional_to_singletons(const Partition& p);

/// Chops every class into consecutive pieces of exactly `chunk` elements;
/// the tail of each class joins the exceptional set. Throws RebalanceError if
/// no class survives, DomainError if chunk is zero.
Partition rebalance(const Partition& p, std::size_t chunk);

}  // namespace regulattice
