#pragma once

// Arithmetic and logic on comb words, built only from slot-wise signal
// combination (sums, products against the reference comb), beat-signal flips
// and PSI power reads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sigcomp/comb.hpp"
#include "sigcomp/error.hpp"

namespace sigcomp {

/// Slot amplitudes produced by combining two comb words. Entries may leave
/// the Manchester dictionary ("00", "11", "20", "02") and must be normalized
/// before they become a CombWord again.
struct PairPattern {
  std::vector<double> slots;
  double c0 = 1.0;

  std::size_t bits() const noexcept { return slots.size() / 2; }

  /// Pair k written in units of c0, e.g. "10", "00", "20".
  std::string pair(std::size_t k) const {
    std::string s;
    for (std::size_t n = 2 * k; n < 2 * k + 2; ++n)
      s += std::to_string(static_cast<long>(std::lround(slots.at(n) / c0)));
    return s;
  }
};

namespace detail {

inline void require_same_shape(const CombWord& x, const CombWord& y) {
  if (x.bits() != y.bits())
    throw LengthMismatch("operand lengths differ: " + std::to_string(x.bits()) + " vs " +
                         std::to_string(y.bits()));
  if (x.c0() != y.c0()) throw LengthMismatch("operands use different base amplitudes");
}

inline CombWord widened(CombWord w, std::size_t bits) {
  w.grow(bits);
  return w;
}

}  // namespace detail

/// Time-domain convolution, i.e. the slot-wise spectral product, normalized
/// by c0 so products share units with sums.
inline PairPattern conv_product(const CombWord& x, const CombWord& y) {
  detail::require_same_shape(x, y);
  PairPattern p{std::vector<double>(x.slots().size()), x.c0()};
  for (std::size_t n = 0; n < p.slots.size(); ++n) p.slots[n] = x.slots()[n] * y.slots()[n] / x.c0();
  return p;
}

inline PairPattern sum_pattern(const CombWord& x, const CombWord& y) {
  detail::require_same_shape(x, y);
  PairPattern p{std::vector<double>(x.slots().size()), x.c0()};
  for (std::size_t n = 0; n < p.slots.size(); ++n) p.slots[n] = x.slots()[n] + y.slots()[n];
  return p;
}

/// Occupied slots of x ⊗ (1 - y), counted from the product's total power.
inline std::size_t hamming_distance(const CombWord& x, const CombWord& y) {
  const PairPattern p = conv_product(x, complement(y));
  return static_cast<std::size_t>(std::llround(total_power(p.slots) / (x.c0() * x.c0())));
}

inline std::size_t digit_sum(const CombWord& x) {
  return hamming_distance(x, CombWord(x.bits(), x.c0(), x.dw()));
}

/// M(x + y - 2 x⊗y): equal bits leave "00", unequal bits leave "11"; the M
/// filter rewrites those to "10" and "01".
inline CombWord xor_op(const CombWord& x, const CombWord& y) {
  const PairPattern sum = sum_pattern(x, y);
  const PairPattern prod = conv_product(x, y);
  const double c0 = x.c0();
  std::vector<double> out(sum.slots.size());
  for (std::size_t k = 0; k < x.bits(); ++k) {
    const double lo = sum.slots[2 * k] - 2.0 * prod.slots[2 * k];
    const double hi = sum.slots[2 * k + 1] - 2.0 * prod.slots[2 * k + 1];
    const double tol = 1e-9 * c0;
    if (std::abs(lo) <= tol && std::abs(hi) <= tol) {
      out[2 * k] = c0;
    } else if (std::abs(lo - c0) <= tol && std::abs(hi - c0) <= tol) {
      out[2 * k + 1] = c0;
    } else {
      throw ProtocolError("M filter met a pattern outside {00, 11} at bit " + std::to_string(k));
    }
  }
  return CombWord::from_slots(std::move(out), c0, x.dw());
}

/// Adds 2^k to `acc` in place via beat signals. A vacant position is set
/// directly; an occupied one starts a carry ripple that clears the run of
/// ones and sets the first zero above it, growing the word when needed.
inline void add_power_of_two(CombWord& acc, std::size_t k, const PsiProbe& probe) {
  if (k >= acc.bits()) {
    acc.grow(k + 1);
    acc.beat(k);
    return;
  }
  if (!psi_read_bit(acc, k, probe)) {
    acc.beat(k);
    return;
  }
  std::size_t j = k;
  while (j < acc.bits() && psi_read_bit(acc, j, probe)) {
    acc.beat(j);
    ++j;
  }
  if (j == acc.bits()) acc.grow(j + 1);
  acc.beat(j);
}

/// Unbounded-precision serial adder. The operand with the smaller digit
/// sum is scanned (the first argument on ties); each of its set bits is
/// added into the other operand.
inline CombWord upsa_add(const CombWord& x, const CombWord& y) {
  if (x.c0() != y.c0()) throw LengthMismatch("operands use different base amplitudes");
  const PsiProbe probe = PsiProbe::defaults(x.c0());
  const bool scan_x = digit_sum(x) <= digit_sum(y);
  const CombWord& source = scan_x ? x : y;
  CombWord acc = detail::widened(scan_x ? y : x, std::max(x.bits(), y.bits()));
  for (std::size_t k = 0; k < source.bits(); ++k)
    if (psi_read_bit(source, k, probe)) add_power_of_two(acc, k, probe);
  return acc;
}

/// Three-way comparison by PSI scan from the most significant pair.
inline int compare_words(const CombWord& x, const CombWord& y) {
  const std::size_t bits = std::max(x.bits(), y.bits());
  const PsiProbe probe = PsiProbe::defaults(x.c0());
  for (std::size_t k = bits; k-- > 0;) {
    const bool a = k < x.bits() && psi_read_bit(x, k, probe);
    const bool b = k < y.bits() && psi_read_bit(y, k, probe);
    if (a != b) return a ? 1 : -1;
  }
  return 0;
}

/// Sign-magnitude value; the sign of zero is +1.
struct SignedWord {
  int sign = 1;
  CombWord magnitude;

  bool operator==(const SignedWord&) const = default;
};

namespace detail {

/// t(x, y) = NOT(NOT(x) + y) at fixed length, inner sum taken mod 2^L.
inline CombWord minus_branch(const CombWord& x, const CombWord& y) {
  const std::size_t bits = x.bits();
  CombWord inner = upsa_add(complement(x), y);
  inner.truncate(bits);
  return complement(inner);
}

}  // namespace detail

/// Branched subtractor: both operands are padded to a common length.
inline SignedWord minus(const CombWord& x, const CombWord& y) {
  const std::size_t bits = std::max(x.bits(), y.bits());
  const CombWord a = detail::widened(x, bits);
  const CombWord b = detail::widened(y, bits);
  if (compare_words(a, b) >= 0) return {1, detail::minus_branch(a, b)};
  return {-1, detail::minus_branch(b, a)};
}

enum class LogicKind { And, Or };

/// 2·AND = x + y - XOR and 2·OR = x + y + XOR, halved by a one-pair
/// downward shift.
inline CombWord linear_logic(LogicKind kind, const CombWord& x, const CombWord& y) {
  detail::require_same_shape(x, y);
  const CombWord sum = upsa_add(x, y);
  const CombWord x_or_y = xor_op(x, y);
  CombWord doubled = sum;
  if (kind == LogicKind::And) {
    const SignedWord d = minus(sum, x_or_y);
    if (d.sign < 0) throw ProtocolError("x + y fell below XOR(x, y)");
    doubled = d.magnitude;
  } else {
    doubled = upsa_add(sum, x_or_y);
  }
  CombWord half = shift_word(doubled, -1);
  half.truncate(x.bits());
  return half;
}

/// Shift-and-add multiplier. The operand with the smaller digit sum is
/// PSI-scanned (first argument on ties); for each set bit k a widened,
/// k-shifted copy of the other operand is added to the running product.
inline CombWord multiply(const CombWord& x, const CombWord& y) {
  if (x.c0() != y.c0()) throw LengthMismatch("operands use different base amplitudes");
  const PsiProbe probe = PsiProbe::defaults(x.c0());
  const bool scan_x = digit_sum(x) <= digit_sum(y);
  const CombWord& target = scan_x ? x : y;
  const CombWord& other = scan_x ? y : x;
  CombWord acc(std::max(x.bits(), y.bits()), x.c0(), x.dw());
  for (std::size_t k = 0; k < target.bits(); ++k) {
    if (!psi_read_bit(target, k, probe)) continue;
    const CombWord shifted =
        shift_word(detail::widened(other, other.bits() + k), static_cast<int>(k));
    acc = upsa_add(acc, shifted);
  }
  return acc;
}

}  // namespace sigcomp
