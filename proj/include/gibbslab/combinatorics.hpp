#pragma once

// Occupation multi-indices (n_1, ..., n_K) and the counting helpers shared by
// the symmetric-tensor (classical moments) and Fock-space code.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gibbslab {

using MultiIndex = std::vector<int>;

// All multi-indices of length `modes` with entries summing to `total`, in
// colexicographic order (the last entry is the most significant).
std::vector<MultiIndex> colex_compositions(std::size_t modes, std::size_t total);

// Exact binomial coefficient; throws std::overflow_error past 2^64.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

double log_factorial(int n);

// k! / prod_j m_j!  with k = sum_j m_j, in log form.
double log_multinomial(const MultiIndex& m);

int total(const MultiIndex& m);

// Dense lookup from a multi-index to its position in a list. Keys are packed
// in mixed radix, so max_entry^modes must fit in 64 bits.
class MultiIndexTable {
 public:
  MultiIndexTable() = default;
  MultiIndexTable(const std::vector<MultiIndex>& entries, int max_entry);

  // Returns -1 when the multi-index is not in the table.
  std::ptrdiff_t find(const MultiIndex& m) const;

 private:
  std::uint64_t key(const MultiIndex& m) const;

  std::uint64_t radix_ = 1;
  std::vector<std::uint64_t> sorted_keys_;
  std::vector<std::size_t> positions_;
};

}  // namespace gibbslab
