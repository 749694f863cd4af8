#include "gibbslab/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gibbslab {

namespace {

void fill_compositions(std::size_t position, int remaining, MultiIndex& current,
                       std::vector<MultiIndex>& out) {
  // Walk from the most significant (last) entry down so the output is colex-ascending.
  if (position == 0) {
    current[0] = remaining;
    out.push_back(current);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    current[position] = v;
    fill_compositions(position - 1, remaining - v, current, out);
  }
}

}  // namespace

std::vector<MultiIndex> colex_compositions(std::size_t modes, std::size_t total_count) {
  if (modes == 0) throw std::invalid_argument("colex_compositions: need at least one mode");
  std::vector<MultiIndex> out;
  out.reserve(binomial(total_count + modes - 1, modes - 1));
  MultiIndex current(modes, 0);
  fill_compositions(modes - 1, static_cast<int>(total_count), current, out);
  return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t factor = n - k + i;
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t r = result / g;
    const std::uint64_t f = factor / (i / g);
    if (r != 0 && f > std::numeric_limits<std::uint64_t>::max() / r) {
      throw std::overflow_error("binomial coefficient overflows 64 bits");
    }
    result = r * f;
  }
  return result;
}

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double log_multinomial(const MultiIndex& m) {
  double value = log_factorial(total(m));
  for (int v : m) value -= log_factorial(v);
  return value;
}

int total(const MultiIndex& m) { return std::accumulate(m.begin(), m.end(), 0); }

MultiIndexTable::MultiIndexTable(const std::vector<MultiIndex>& entries, int max_entry)
    : radix_(static_cast<std::uint64_t>(max_entry) + 1) {
  if (!entries.empty()) {
    const double bits = static_cast<double>(entries.front().size()) * std::log2(double(radix_));
    if (bits >= 63.0) throw std::invalid_argument("MultiIndexTable: keys do not fit 64 bits");
  }
  std::vector<std::pair<std::uint64_t, std::size_t>> pairs;
  pairs.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) pairs.emplace_back(key(entries[i]), i);
  std::sort(pairs.begin(), pairs.end());
  sorted_keys_.reserve(pairs.size());
  positions_.reserve(pairs.size());
  for (const auto& [k, i] : pairs) {
    sorted_keys_.push_back(k);
    positions_.push_back(i);
  }
}

std::uint64_t MultiIndexTable::key(const MultiIndex& m) const {
  std::uint64_t k = 0;
  for (auto it = m.rbegin(); it != m.rend(); ++it) k = k * radix_ + static_cast<std::uint64_t>(*it);
  return k;
}

std::ptrdiff_t MultiIndexTable::find(const MultiIndex& m) const {
  for (int v : m) {
    if (v < 0 || static_cast<std::uint64_t>(v) >= radix_) return -1;
  }
  const std::uint64_t k = key(m);
  const auto it = std::lower_bound(sorted_keys_.begin(), sorted_keys_.end(), k);
  if (it == sorted_keys_.end() || *it != k) return -1;
  return static_cast<std::ptrdiff_t>(positions_[static_cast<std::size_t>(it - sorted_keys_.begin())]);
}

}  // namespace gibbslab
