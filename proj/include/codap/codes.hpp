#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace codap {

/// Binary aperture code. Bit value 1 is an absorbing bar, 0 is open membrane.
/// Serialized as an ASCII '0'/'1' string, scan-start bit first.
class Pattern {
 public:
  Pattern() = default;
  Pattern(std::vector<std::uint8_t> bits, int order);

  /// Parses a '0'/'1' string. `order` is the uniqueness window the caller
  /// claims for it; it is not verified here.
  static Pattern from_string(std::string_view text, int order);

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return bits_.size(); }
  int order() const noexcept { return order_; }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }

  std::string to_string() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;

 private:
  std::vector<std::uint8_t> bits_;
  int order_ = 0;
};

struct SubsequenceStats {
  std::size_t start_index = 0;
  double zeros_fraction = 0.0;
  int bit_flips = 0;
};

/// Lexicographically least binary de Bruijn sequence of the given order
/// (Lyndon-word concatenation), as a linear pattern of length 2^order.
Pattern generate_de_bruijn(int order);

SubsequenceStats window_stats(const Pattern& pattern, std::size_t start, std::size_t length);

/// Stats for every linear window of `length` bits, in start order.
std::vector<SubsequenceStats> all_window_stats(const Pattern& pattern, std::size_t length);

/// True iff all linear windows of the given length are pairwise distinct.
bool verify_uniqueness(const Pattern& pattern, std::size_t window);

}  // namespace codap
