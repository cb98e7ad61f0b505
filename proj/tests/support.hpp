#pragma once

// Hand-rolled generators and small oracles shared by the test suites.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t bits(std::size_t n) {
    if (n == 0) return 0;
    const std::uint64_t v = rng_();
    return n >= 64 ? v : v & ((std::uint64_t{1} << n) - 1);
  }

  long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(range(0, static_cast<long>(n) - 1)); }

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  bool coin() { return (rng_() & 1U) != 0; }

  std::string word(const std::string& alphabet, std::size_t min_len, std::size_t max_len) {
    std::string s(static_cast<std::size_t>(range(static_cast<long>(min_len), static_cast<long>(max_len))), ' ');
    for (auto& ch : s) ch = alphabet[index(alphabet.size())];
    return s;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline std::uint64_t mask(std::size_t bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

inline std::size_t popcount_oracle(std::uint64_t v) {
  std::size_t n = 0;
  for (; v; v >>= 1) n += v & 1U;
  return n;
}

inline std::string fixture(const std::string& rel) { return std::string(FIXTURE_DIR) + "/" + rel; }

}  // namespace testing_support
