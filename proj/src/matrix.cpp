#include "regulattice/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "regulattice/errors.hpp"
#include "regulattice/partition.hpp"

namespace regulattice {

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw DomainError("matrix dimensions must be positive");
  if (data_.size() != rows_ * cols_) {
    throw DomainError("matrix has " + std::to_string(data_.size()) + " entries, expected " +
                      std::to_string(rows_ * cols_));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw DomainError("matrix entries must be finite");
  }
}

RealMatrix RealMatrix::constant(std::size_t rows, std::size_t cols, double value) {
  return RealMatrix(rows, cols, std::vector<double>(rows * cols, value));
}

RealMatrix RealMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DomainError("matrix needs at least one row");
  const std::size_t cols = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw DomainError("ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return RealMatrix(rows.size(), cols, std::move(data));
}

RealMatrix RealMatrix::scaled(double factor) const {
  std::vector<double> data(data_);
  for (double& v : data) v *= factor;
  return RealMatrix(rows_, cols_, std::move(data));
}

RealMatrix RealMatrix::transposed() const {
  std::vector<double> data(data_.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) data[c * rows_ + r] = data_[r * cols_ + c];
  return RealMatrix(cols_, rows_, std::move(data));
}

bool RealMatrix::symmetric() const noexcept {
  if (!square()) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r + 1; c < cols_; ++c)
      if (data_[r * cols_ + c] != data_[c * cols_ + r]) return false;
  return true;
}

IndexList make_subset(std::vector<Index> members, std::size_t bound) {
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end())
    throw DomainError("subset has duplicate members");
  if (!members.empty() && members.back() >= bound)
    throw DomainError("subset member " + std::to_string(members.back()) + " out of range");
  return members;
}

double total_mass(const RealMatrix& a) {
  double s = 0.0;
  for (double v : a.entries()) s += std::abs(v);
  return s;
}

double block_weight(const RealMatrix& a, std::span<const Index> rows, std::span<const Index> cols) {
  double s = 0.0;
  for (Index r : rows) {
    const auto row = a.row(r);
    for (Index c : cols) s += row[c];
  }
  return s;
}

double block_density(const RealMatrix& a, std::span<const Index> rows,
                     std::span<const Index> cols) {
  if (rows.empty() || cols.empty()) throw DomainError("density of an empty block is undefined");
  return block_weight(a, rows, cols) /
         (static_cast<double>(rows.size()) * static_cast<double>(cols.size()));
}

RealMatrix normalize(const RealMatrix& a) {
  const double mass = total_mass(a);
  if (mass == 0.0) throw NormalizationError("cannot normalize the zero matrix");
  const double mean = mass / (static_cast<double>(a.rows()) * static_cast<double>(a.cols()));
  std::vector<double> data(a.entries().begin(), a.entries().end());
  for (double& v : data) v /= mean;
  return RealMatrix(a.rows(), a.cols(), std::move(data));
}

std::vector<double> block_weight_table(const RealMatrix& a,
                                       const std::vector<IndexList>& row_groups,
                                       const std::vector<IndexList>& col_groups) {
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> col_group(a.cols(), kNone);
  for (std::size_t h = 0; h < col_groups.size(); ++h)
    for (Index c : col_groups[h]) col_group[c] = h;

  const std::size_t width = col_groups.size();
  std::vector<double> table(row_groups.size() * width, 0.0);
  for (std::size_t g = 0; g < row_groups.size(); ++g) {
    double* out = table.data() + g * width;
    for (Index r : row_groups[g]) {
      const auto row = a.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (col_group[c] != kNone) out[col_group[c]] += row[c];
      }
    }
  }
  return table;
}

RealMatrix averaged_matrix(const RealMatrix& a, const Partition& rows, const Partition& cols) {
  if (!rows.exceptional().empty() || !cols.exceptional().empty())
    throw DomainError("averaged_matrix: split exceptional sets into singletons first");
  if (rows.size() == 0 || cols.size() == 0) throw DomainError("averaged_matrix: empty partition");
  if (rows.ground().back() >= a.rows() || cols.ground().back() >= a.cols())
    throw DomainError("averaged_matrix: partition exceeds matrix axes");

  const auto weights = block_weight_table(a, rows.classes(), cols.classes());

  // Position of each covered index in the (sorted) ground set.
  auto positions = [](const Partition& p, std::size_t bound) {
    std::vector<std::size_t> pos(bound, 0);
    for (std::size_t i = 0; i < p.ground().size(); ++i) pos[p.ground()[i]] = i;
    return pos;
  };
  const auto row_pos = positions(rows, a.rows());
  const auto col_pos = positions(cols, a.cols());

  const std::size_t m = rows.size();
  const std::size_t n = cols.size();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < rows.class_count(); ++i) {
    for (std::size_t j = 0; j < cols.class_count(); ++j) {
      const double d = weights[i * cols.class_count() + j] /
                       (static_cast<double>(rows[i].size()) * static_cast<double>(cols[j].size()));
      for (Index r : rows[i])
        for (Index c : cols[j]) out[row_pos[r] * n + col_pos[c]] = d;
    }
  }
  return RealMatrix(m, n, std::move(out));
}

}  // namespace regulattice
