#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace regulattice {

using Index = std::size_t;

/// Sorted, duplicate-free list of row or column indices.
using IndexList = std::vector<Index>;

class Partition;

/// Dense row-major real matrix. Immutable after construction.
class RealMatrix {
 public:
  /// Throws DomainError on zero dimensions, size mismatch or non-finite entries.
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static RealMatrix constant(std::size_t rows, std::size_t cols, double value);
  static RealMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double operator()(Index r, Index c) const noexcept { return data_[r * cols_ + c]; }
  std::span<const double> row(Index r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> entries() const noexcept { return data_; }

  RealMatrix scaled(double factor) const;
  RealMatrix transposed() const;
  bool symmetric() const noexcept;

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Sorts and validates a subset of [0, bound). Throws DomainError on
/// duplicates or out-of-range members.
IndexList make_subset(std::vector<Index> members, std::size_t bound);

/// Sum of absolute values of all entries.
double total_mass(const RealMatrix& a);

/// Signed sum of entries a(x, y) over x in rows, y in cols.
double block_weight(const RealMatrix& a, std::span<const Index> rows, std::span<const Index> cols);

/// block_weight divided by |rows| * |cols|. Throws DomainError if either is empty.
double block_density(const RealMatrix& a, std::span<const Index> rows,
                     std::span<const Index> cols);

/// Rescales so that the mean entry modulus is 1. Throws NormalizationError on
/// the zero matrix.
RealMatrix normalize(const RealMatrix& a);

/// Replaces every entry by the density of its block. The partitions may cover
/// subsets of the axes; the result is then indexed by the covered rows and
/// columns in increasing order. Partitions must have no exceptional set.
RealMatrix averaged_matrix(const RealMatrix& a, const Partition& rows, const Partition& cols);

/// Weight of every (row group, column group) block, computed in one pass over
/// the entries. Result is row-major, row_groups.size() x col_groups.size().
std::vector<double> block_weight_table(const RealMatrix& a,
                                       const std::vector<IndexList>& row_groups,
                                       const std::vector<IndexList>& col_groups);

}  // namespace regulattice
