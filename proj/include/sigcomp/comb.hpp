#pragma once

// Frequency-comb word representation.
//
// An L-bit word occupies 2L harmonic slots. Slot n sits at (n+1)*dw rad/s.
// Bit k owns the slot pair (2k, 2k+1): the pattern (c0, 0) encodes 0 and
// (0, c0) encodes 1. Every valid word carries exactly L*c0^2 spectral power.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sigcomp/error.hpp"

namespace sigcomp {

class CombWord {
 public:
  /// The all-zero word: every pair carries the "10" pattern.
  explicit CombWord(std::size_t bits, double c0 = 1.0, double dw = 1.0)
      : c0_(c0), dw_(dw), slots_(2 * bits, 0.0) {
    if (bits == 0) throw RangeError("comb word needs at least one bit");
    if (!(c0 > 0.0) || !(dw > 0.0)) throw RangeError("comb amplitude and spacing must be positive");
    for (std::size_t k = 0; k < bits; ++k) slots_[2 * k] = c0_;
  }

  /// Adopts a raw slot vector, rejecting anything outside the Manchester dictionary.
  static CombWord from_slots(std::vector<double> slots, double c0 = 1.0, double dw = 1.0) {
    if (slots.empty() || slots.size() % 2 != 0)
      throw ProtocolError("slot count must be a positive even number, got " +
                          std::to_string(slots.size()));
    CombWord w(slots.size() / 2, c0, dw);
    for (std::size_t k = 0; k < w.bits(); ++k) {
      const double lo = slots[2 * k];
      const double hi = slots[2 * k + 1];
      const bool zero = lo == c0 && hi == 0.0;
      const bool one = lo == 0.0 && hi == c0;
      if (!zero && !one)
        throw ProtocolError("slot pair " + std::to_string(k) + " is not a Manchester pattern");
    }
    w.slots_ = std::move(slots);
    return w;
  }

  std::size_t bits() const noexcept { return slots_.size() / 2; }
  double c0() const noexcept { return c0_; }
  double dw() const noexcept { return dw_; }
  std::span<const double> slots() const noexcept { return slots_; }
  double frequency(std::size_t slot) const noexcept { return static_cast<double>(slot + 1) * dw_; }

  /// Adds the beat signal for pair k: removes the occupied harmonic and
  /// synthesizes the vacant one. Power is unchanged.
  void beat(std::size_t k) {
    if (k >= bits()) throw RangeError("bit index " + std::to_string(k) + " out of range");
    double& lo = slots_[2 * k];
    double& hi = slots_[2 * k + 1];
    if (lo != 0.0) {
      lo -= c0_;
      hi += c0_;
    } else {
      hi -= c0_;
      lo += c0_;
    }
  }

  /// Appends zero pairs at the top of the comb (adds their lowest harmonics).
  void grow(std::size_t bits_total) {
    if (bits_total <= bits()) return;
    const std::size_t old = bits();
    slots_.resize(2 * bits_total, 0.0);
    for (std::size_t k = old; k < bits_total; ++k) slots_[2 * k] = c0_;
  }

  /// Low-pass cut: keeps the lowest `bits_total` pairs (modulo 2^bits_total).
  void truncate(std::size_t bits_total) {
    if (bits_total == 0) throw RangeError("cannot truncate a comb word to zero bits");
    if (bits_total < bits()) slots_.resize(2 * bits_total);
  }

  bool operator==(const CombWord&) const = default;

 private:
  friend CombWord shift_word(const CombWord& w, int k);

  double c0_;
  double dw_;
  std::vector<double> slots_;
};

/// All 2L slots filled at c0; the reference signal for complementation.
struct ReferenceComb {
  std::size_t bits;
  double c0 = 1.0;
  double dw = 1.0;

  std::vector<double> slots() const { return std::vector<double>(2 * bits, c0); }
};

inline double total_power(std::span<const double> slots) {
  double p = 0.0;
  for (double a : slots) p += a * a;
  return p;
}

inline double total_power(const CombWord& w) { return total_power(w.slots()); }

inline double total_power(const ReferenceComb& r) { return total_power(r.slots()); }

/// Probe tones for perturbative spectral inference. The detector constants
/// are the perturbed pair powers for the two bit states.
struct PsiProbe {
  double c0 = 1.0;
  double c1 = 1.0;
  double c2 = 2.0;

  static PsiProbe defaults(double c0 = 1.0) { return PsiProbe{c0, c0, 2.0 * c0}; }

  /// Pair power when the first slot is vacant (bit 1).
  double delta_one() const { return c1 * c1 + (c2 + c0) * (c2 + c0); }
  /// Pair power when the first slot is occupied (bit 0).
  double delta_zero() const { return (c1 + c0) * (c1 + c0) + c2 * c2; }

  void validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw RangeError("probe amplitudes must be positive");
    // delta_one - delta_zero = 2*c0*(c2 - c1)
    if (c1 == c2) throw RangeError("probe amplitudes must differ to separate the bit states");
  }
};

/// Adds the probe pair onto slots (2k, 2k+1), measures total power and
/// subtracts the known power (L-1)*c0^2 of the untouched pairs.
inline double psi_measure(const CombWord& w, std::size_t k, const PsiProbe& probe) {
  if (k >= w.bits()) throw RangeError("bit index " + std::to_string(k) + " out of range");
  const auto slots = w.slots();
  double perturbed = 0.0;
  for (std::size_t n = 0; n < slots.size(); ++n) {
    double a = slots[n];
    if (n == 2 * k) a += probe.c1;
    if (n == 2 * k + 1) a += probe.c2;
    perturbed += a * a;
  }
  const double rest = static_cast<double>(w.bits() - 1) * w.c0() * w.c0();
  return perturbed - rest;
}

inline bool psi_read_bit(const CombWord& w, std::size_t k, const PsiProbe& probe) {
  const double measured = psi_measure(w, k, probe);
  const double one = probe.delta_one();
  const double zero = probe.delta_zero();
  const double tol = 1e-9 * std::max({1.0, one, zero});
  if (std::abs(measured - one) <= tol) return true;
  if (std::abs(measured - zero) <= tol) return false;
  throw ProtocolError("ambiguous PSI measurement " + std::to_string(measured) + " at bit " +
                      std::to_string(k));
}

inline bool psi_read_bit(const CombWord& w, std::size_t k) {
  return psi_read_bit(w, k, PsiProbe::defaults(w.c0()));
}

inline CombWord encode_word(std::uint64_t value, std::size_t bits, double c0 = 1.0,
                            double dw = 1.0) {
  if (bits < 64 && (value >> bits) != 0)
    throw OverflowError("value " + std::to_string(value) + " does not fit in " +
                        std::to_string(bits) + " bits");
  CombWord w(bits, c0, dw);
  for (std::size_t k = 0; k < bits && k < 64; ++k)
    if ((value >> k) & 1U) w.beat(k);
  return w;
}

inline std::uint64_t decode_word(const CombWord& w, const PsiProbe& probe) {
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < w.bits(); ++k) {
    if (!psi_read_bit(w, k, probe)) continue;
    if (k >= 64) throw OverflowError("decoded value exceeds 64 bits");
    v |= std::uint64_t{1} << k;
  }
  return v;
}

inline std::uint64_t decode_word(const CombWord& w) {
  return decode_word(w, PsiProbe::defaults(w.c0()));
}

inline CombWord flip_bit(const CombWord& w, std::size_t k) {
  CombWord out = w;
  out.beat(k);
  return out;
}

/// x̄ = 1 - x, slot by slot against the reference comb.
inline CombWord complement(const CombWord& w) {
  const auto ref = ReferenceComb{w.bits(), w.c0(), w.dw()}.slots();
  std::vector<double> out(ref.size());
  const auto in = w.slots();
  for (std::size_t n = 0; n < ref.size(); ++n) out[n] = ref[n] - in[n];
  return CombWord::from_slots(std::move(out), w.c0(), w.dw());
}

/// Translates the spectrum by 2k slots. Upward shifts drop the overflow
/// band and refill the low pairs with the zero pattern; downward shifts cut
/// the sub-band and refill the high pairs.
inline CombWord shift_word(const CombWord& w, int k) {
  const auto bits = static_cast<long>(w.bits());
  if (k > bits || -k > bits)
    throw RangeError("shift " + std::to_string(k) + " exceeds word length " +
                     std::to_string(bits));
  CombWord out(w.bits(), w.c0(), w.dw());
  const long n = 2 * bits;
  for (long s = 0; s < n; ++s) {
    const long src = s - 2L * k;
    if (src >= 0 && src < n) out.slots_[s] = w.slots_[src];
  }
  return out;
}

struct WaveformView {
  std::vector<double> samples;
  double sample_rate = 0.0;
  double duration = 0.0;

  double mean_square() const {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (double s : samples) acc += s * s;
    return acc / static_cast<double>(samples.size());
  }
};

/// Samples sum_n slot_n cos((n+1) dw t) over a whole number of fundamental
/// periods. The sample count is rounded up so samples tile the window exactly.
inline WaveformView synthesize_slots(std::span<const double> slots, double dw, double sample_rate,
                                     double duration) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double nyquist = 2.0 * static_cast<double>(slots.size() + 1) * dw / two_pi;
  if (!(sample_rate > nyquist))
    throw SamplingError("sample rate " + std::to_string(sample_rate) +
                        " does not exceed Nyquist bound " + std::to_string(nyquist));
  const double period = two_pi / dw;
  const double periods = duration / period;
  if (!(duration > 0.0) || std::round(periods) < 1.0 ||
      std::abs(periods - std::round(periods)) > 1e-9 * std::max(1.0, periods))
    throw SamplingError("duration must be a whole number of fundamental periods");

  const auto count = static_cast<std::size_t>(std::ceil(duration * sample_rate - 1e-9));
  WaveformView view;
  view.duration = duration;
  view.sample_rate = static_cast<double>(count) / duration;
  view.samples.assign(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = duration * static_cast<double>(i) / static_cast<double>(count);
    double acc = 0.0;
    for (std::size_t n = 0; n < slots.size(); ++n)
      if (slots[n] != 0.0) acc += slots[n] * std::cos(static_cast<double>(n + 1) * dw * t);
    view.samples[i] = acc;
  }
  return view;
}

inline WaveformView synthesize_waveform(const CombWord& w, double sample_rate, double duration) {
  return synthesize_slots(w.slots(), w.dw(), sample_rate, duration);
}

}  // namespace sigcomp
