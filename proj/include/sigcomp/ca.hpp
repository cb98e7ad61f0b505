#pragma once

// Binary cellular automata as "convolution then rule" filters, plus the
// root-pole transfer function that reproduces a rule table through a dB
// comparator.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "sigcomp/error.hpp"

namespace sigcomp::ca {

using Lattice = std::vector<std::uint8_t>;

class CaRule {
 public:
  CaRule(std::uint64_t number, std::size_t neighborhood = 3) : number_(number), d_(neighborhood) {
    if (d_ == 0 || d_ > 5) throw RangeError("neighborhood size must be in [1, 5]");
    const std::size_t codes = std::size_t{1} << d_;
    if (codes < 64 && (number >> codes) != 0)
      throw RangeError("rule " + std::to_string(number) + " needs more than 2^" +
                       std::to_string(d_) + " table bits");
  }

  std::uint64_t number() const noexcept { return number_; }
  std::size_t neighborhood() const noexcept { return d_; }
  std::size_t codes() const noexcept { return std::size_t{1} << d_; }
  bool output(std::size_t code) const { return (number_ >> code) & 1U; }
  std::size_t ones() const noexcept { return static_cast<std::size_t>(std::popcount(number_)); }

 private:
  std::uint64_t number_;
  std::size_t d_;
};

/// Cells to the left of the centre; the neighbourhood of cell i is
/// i - reach .. i - reach + D - 1, leftmost cell most significant.
inline std::size_t left_reach(std::size_t d) { return (d - 1) / 2; }

inline std::size_t neighborhood_code(const Lattice& lat, std::size_t i, std::size_t d) {
  const std::size_t w = lat.size();
  const std::size_t reach = left_reach(d);
  std::size_t code = 0;
  for (std::size_t t = 0; t < d; ++t) code = (code << 1) | lat[(i + w - reach + t) % w];
  return code;
}

inline Lattice ca_step_direct(const Lattice& lat, const CaRule& rule) {
  if (lat.size() < rule.neighborhood()) throw RangeError("lattice narrower than the neighborhood");
  Lattice next(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i)
    next[i] = rule.output(neighborhood_code(lat, i, rule.neighborhood())) ? 1 : 0;
  return next;
}

/// Length-w convolution mask c_θ. For D = 3 this is [2, 4, 0, ..., 0, 1];
/// in general tap (reach - t) mod w carries weight 2^(D-1-t).
inline std::vector<std::int64_t> conv_mask(std::size_t w, std::size_t d) {
  std::vector<std::int64_t> c(w, 0);
  const std::size_t reach = left_reach(d);
  for (std::size_t t = 0; t < d; ++t) c[(reach + w - t) % w] += std::int64_t{1} << (d - 1 - t);
  return c;
}

/// (c ⊛ s)_i = sum_k c[k] s[(i - k) mod w], visiting non-zero taps only.
inline std::vector<std::int64_t> circular_convolve(const std::vector<std::int64_t>& mask,
                                                   const Lattice& lat) {
  const std::size_t w = lat.size();
  if (mask.size() != w) throw DimensionError("mask and lattice widths differ");
  std::vector<std::int64_t> out(w, 0);
  for (std::size_t k = 0; k < w; ++k) {
    if (mask[k] == 0) continue;
    for (std::size_t i = 0; i < w; ++i) out[i] += mask[k] * lat[(i + w - k) % w];
  }
  return out;
}

inline Lattice ca_step_conv(const Lattice& lat, const CaRule& rule) {
  if (lat.size() < rule.neighborhood()) throw RangeError("lattice narrower than the neighborhood");
  const auto codes = circular_convolve(conv_mask(lat.size(), rule.neighborhood()), lat);
  Lattice next(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i)
    next[i] = rule.output(static_cast<std::size_t>(codes[i])) ? 1 : 0;
  return next;
}

/// Rational filter with a zero at every code the rule maps to 0 and a pole
/// at every code it maps to 1. Roots sit on the unit circle at
/// exp(2πi code / 2^D); the filter is read at the radially detuned point
/// (1 + detuning) * root(code).
struct TransferFunction {
  std::size_t neighborhood = 3;
  std::vector<std::size_t> zero_codes;
  std::vector<std::size_t> pole_codes;
  double detuning = 0.01;
  double threshold_db = 0.0;

  /// detuning 0 picks the largest step (at most 0.01) whose own root
  /// outweighs every other root by 20 dB at each probe point.
  static TransferFunction from_rule(const CaRule& rule, double detuning = 0.0,
                                    double threshold_db = 0.0) {
    TransferFunction tf;
    tf.neighborhood = rule.neighborhood();
    tf.threshold_db = threshold_db;
    for (std::size_t code = 0; code < rule.codes(); ++code)
      (rule.output(code) ? tf.pole_codes : tf.zero_codes).push_back(code);
    tf.detuning = detuning > 0.0 ? detuning : tf.safe_detuning();
    return tf;
  }

  double safe_detuning() const {
    double worst = 0.0;
    for (std::size_t c = 0; c < codes(); ++c) {
      double others = 0.0;
      for (std::size_t p : pole_codes)
        if (p != c) others -= 20.0 * std::log10(std::abs(root(c) - root(p)));
      for (std::size_t z : zero_codes)
        if (z != c) others += 20.0 * std::log10(std::abs(root(c) - root(z)));
      worst = std::max(worst, std::abs(others));
    }
    return std::min(0.01, std::pow(10.0, -(worst + 20.0) / 20.0));
  }

  std::size_t codes() const noexcept { return std::size_t{1} << neighborhood; }

  std::complex<double> root(std::size_t code) const {
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(code) /
                               static_cast<double>(codes()));
  }

  std::complex<double> probe_point(std::size_t code) const { return (1.0 + detuning) * root(code); }
};

/// 20 log10 |t_R| at the probe point of `code`.
inline double transfer_gain_db(std::size_t code, const TransferFunction& tf) {
  if (code >= tf.codes()) throw RangeError("neighborhood code " + std::to_string(code) + " out of range");
  const auto h = tf.probe_point(code);
  double db = 0.0;
  for (std::size_t p : tf.pole_codes) {
    const double dist = std::abs(h - tf.root(p));
    if (dist == 0.0) throw SingularityError("transfer function evaluated at a pole");
    db -= 20.0 * std::log10(dist);
  }
  for (std::size_t z : tf.zero_codes) {
    const double dist = std::abs(h - tf.root(z));
    if (dist == 0.0) return -HUGE_VAL;
    db += 20.0 * std::log10(dist);
  }
  return db;
}

/// Comparator: at or above the threshold reads as 1 (near a pole).
inline bool transfer_eval(std::size_t code, const TransferFunction& tf) {
  return transfer_gain_db(code, tf) >= tf.threshold_db;
}

/// Convolution step whose rule lookup is replaced by the filter comparator.
inline Lattice ca_step_filter(const Lattice& lat, const TransferFunction& tf) {
  const auto codes = circular_convolve(conv_mask(lat.size(), tf.neighborhood), lat);
  Lattice next(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i)
    next[i] = transfer_eval(static_cast<std::size_t>(codes[i]), tf) ? 1 : 0;
  return next;
}

}  // namespace sigcomp::ca
