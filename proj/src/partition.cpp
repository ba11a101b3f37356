#include "regulattice/partition.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "regulattice/errors.hpp"

namespace regulattice {

namespace {

void sort_unique_or_throw(IndexList& v, const char* what) {
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw DomainError(std::string(what) + " has duplicate members");
}

}  // namespace

Partition::Partition(IndexList ground, std::vector<IndexList> classes, IndexList exceptional)
    : ground_(std::move(ground)), exceptional_(std::move(exceptional)), classes_(std::move(classes)) {
  sort_unique_or_throw(ground_, "ground set");
  sort_unique_or_throw(exceptional_, "exceptional set");

  IndexList covered = exceptional_;
  for (auto& c : classes_) {
    if (c.empty()) throw DomainError("partition classes must be nonempty");
    sort_unique_or_throw(c, "partition class");
    covered.insert(covered.end(), c.begin(), c.end());
  }
  std::sort(covered.begin(), covered.end());
  if (std::adjacent_find(covered.begin(), covered.end()) != covered.end())
    throw DomainError("partition classes overlap");
  if (covered != ground_) throw DomainError("partition classes do not cover the ground set");
}

Partition Partition::from_classes(std::vector<IndexList> classes, IndexList exceptional) {
  IndexList ground = exceptional;
  for (const auto& c : classes) ground.insert(ground.end(), c.begin(), c.end());
  std::sort(ground.begin(), ground.end());
  ground.erase(std::unique(ground.begin(), ground.end()), ground.end());
  return Partition(std::move(ground), std::move(classes), std::move(exceptional));
}

Partition Partition::equal_blocks(std::size_t n, std::size_t k) {
  if (k == 0 || k > n) throw DomainError("equal_blocks: need 1 <= k <= n");
  const std::size_t chunk = n / k;
  IndexList ground(n);
  for (std::size_t i = 0; i < n; ++i) ground[i] = i;
  std::vector<IndexList> classes(k);
  for (std::size_t c = 0; c < k; ++c)
    classes[c].assign(ground.begin() + c * chunk, ground.begin() + (c + 1) * chunk);
  IndexList exceptional(ground.begin() + k * chunk, ground.end());
  return Partition(std::move(ground), std::move(classes), std::move(exceptional));
}

Partition Partition::trivial(std::size_t n) { return equal_blocks(n, 1); }

Partition Partition::singletons(std::size_t n) { return equal_blocks(n, n); }

bool Partition::balanced() const noexcept {
  for (const auto& c : classes_)
    if (c.size() != classes_.front().size()) return false;
  return true;
}

BlockPartition::BlockPartition(Partition rows, Partition cols)
    : rows_(std::move(rows)), cols_(std::move(cols)) {}

BlockPartition BlockPartition::symmetric_of(Partition p) {
  BlockPartition bp(p, p);
  bp.symmetric_ = true;
  return bp;
}

void BlockPartition::check_covers(const RealMatrix& a) const {
  auto covers = [](const Partition& p, std::size_t n) {
    if (p.size() != n) return false;
    return n == 0 || (p.ground().front() == 0 && p.ground().back() == n - 1);
  };
  if (!covers(rows_, a.rows()) || !covers(cols_, a.cols()))
    throw DomainError("block partition does not cover the matrix axes");
}

bool is_refinement(const Partition& fine, const Partition& coarse) {
  if (fine.ground() != coarse.ground())
    throw DomainError("is_refinement: partitions have different ground sets");
  if (!std::includes(fine.exceptional().begin(), fine.exceptional().end(),
                     coarse.exceptional().begin(), coarse.exceptional().end()))
    return false;

  // Owner of each ground element in coarse; 0 marks the exceptional set.
  std::map<Index, std::size_t> owner;
  for (Index v : coarse.exceptional()) owner[v] = 0;
  for (std::size_t i = 0; i < coarse.class_count(); ++i)
    for (Index v : coarse[i]) owner[v] = i + 1;

  for (const auto& c : fine.classes()) {
    const std::size_t o = owner.at(c.front());
    for (Index v : c)
      if (owner.at(v) != o) return false;
  }
  return true;
}

Partition common_refinement(const std::vector<Partition>& parts) {
  if (parts.empty()) throw DomainError("common_refinement: no partitions given");
  const IndexList& ground = parts.front().ground();
  for (const auto& p : parts) {
    if (p.ground() != ground) throw DomainError("common_refinement: ground sets differ");
    if (!p.exceptional().empty())
      throw DomainError("common_refinement: inputs must not have exceptional sets");
  }

  std::vector<std::map<Index, std::size_t>> owner(parts.size());
  for (std::size_t t = 0; t < parts.size(); ++t)
    for (std::size_t i = 0; i < parts[t].class_count(); ++i)
      for (Index v : parts[t][i]) owner[t][v] = i;

  std::map<std::vector<std::size_t>, IndexList> cells;
  std::vector<std::size_t> key(parts.size());
  for (Index v : ground) {
    for (std::size_t t = 0; t < parts.size(); ++t) key[t] = owner[t].at(v);
    cells[key].push_back(v);
  }

  std::vector<IndexList> classes;
  classes.reserve(cells.size());
  for (auto& [k, members] : cells) classes.push_back(std::move(members));
  return Partition(ground, std::move(classes));
}

Partition split_exceptional_to_singletons(const Partition& p) {
  std::vector<IndexList> classes = p.classes();
  for (Index v : p.exceptional()) classes.push_back({v});
  return Partition(p.ground(), std::move(classes));
}

Partition rebalance(const Partition& p, std::size_t chunk) {
  if (chunk == 0) throw DomainError("rebalance: chunk must be positive");
  IndexList exceptional = p.exceptional();
  std::vector<IndexList> classes;
  for (const auto& c : p.classes()) {
    const std::size_t pieces = c.size() / chunk;
    for (std::size_t q = 0; q < pieces; ++q)
      classes.emplace_back(c.begin() + q * chunk, c.begin() + (q + 1) * chunk);
    exceptional.insert(exceptional.end(), c.begin() + pieces * chunk, c.end());
  }
  if (classes.empty())
    throw RebalanceError("rebalance: chunk " + std::to_string(chunk) +
                         " leaves no nonexceptional class");
  return Partition(p.ground(), std::move(classes), std::move(exceptional));
}

}  // namespace regulattice
