#include "codap/codes.hpp"

#include <string>
#include <unordered_set>

#include "codap/error.hpp"

namespace codap {

Pattern::Pattern(std::vector<std::uint8_t> bits, int order)
    : bits_(std::move(bits)), order_(order) {
  for (auto b : bits_) {
    if (b > 1) throw ParameterError("pattern bits must be 0 or 1");
  }
  if (order_ < 1) throw ParameterError("pattern order must be positive");
}

Pattern Pattern::from_string(std::string_view text, int order) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw ParameterError("pattern string may only contain '0' and '1'");
    }
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  if (bits.empty()) throw ParameterError("pattern string is empty");
  return Pattern(std::move(bits), order);
}

std::string Pattern::to_string() const {
  std::string out(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out[i] = '1';
  }
  return out;
}

Pattern generate_de_bruijn(int order) {
  if (order < 1 || order > 20) {
    throw ParameterError("de Bruijn order must be in [1, 20]");
  }
  const auto n = static_cast<std::size_t>(order);
  std::vector<std::uint8_t> seq;
  seq.reserve(std::size_t{1} << n);

  // Iterative FKM over prenecklaces a[1..n]; emitting a[1..j] whenever
  // j divides n concatenates the Lyndon words in lexicographic order.
  std::vector<std::uint8_t> a(n + 1, 0);
  std::size_t j = 1;
  while (true) {
    if (n % j == 0) {
      for (std::size_t k = 1; k <= j; ++k) seq.push_back(a[k]);
    }
    j = n;
    while (j > 0 && a[j] == 1) --j;
    if (j == 0) break;
    a[j] = 1;
    for (std::size_t k = j + 1; k <= n; ++k) a[k] = a[k - j];
  }
  return Pattern(std::move(seq), order);
}

SubsequenceStats window_stats(const Pattern& pattern, std::size_t start, std::size_t length) {
  if (length == 0 || start + length > pattern.size()) {
    throw ParameterError("window out of bounds");
  }
  SubsequenceStats stats;
  stats.start_index = start;
  std::size_t zeros = 0;
  for (std::size_t k = start; k < start + length; ++k) {
    if (pattern[k] == 0) ++zeros;
    if (k > start && pattern[k] != pattern[k - 1]) ++stats.bit_flips;
  }
  stats.zeros_fraction = static_cast<double>(zeros) / static_cast<double>(length);
  return stats;
}

std::vector<SubsequenceStats> all_window_stats(const Pattern& pattern, std::size_t length) {
  if (length == 0 || length > pattern.size()) throw ParameterError("window out of bounds");
  std::vector<SubsequenceStats> out;
  out.reserve(pattern.size() - length + 1);
  for (std::size_t s = 0; s + length <= pattern.size(); ++s) {
    out.push_back(window_stats(pattern, s, length));
  }
  return out;
}

bool verify_uniqueness(const Pattern& pattern, std::size_t window) {
  if (window < 1 || window > pattern.size()) {
    throw ParameterError("uniqueness window must be in [1, pattern length]");
  }
  std::unordered_set<std::string> seen;
  const auto text = pattern.to_string();
  for (std::size_t s = 0; s + window <= text.size(); ++s) {
    if (!seen.insert(text.substr(s, window)).second) return false;
  }
  return true;
}

}  // namespace codap
