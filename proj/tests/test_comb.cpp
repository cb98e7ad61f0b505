#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sigcomp/comb.hpp"
#include "support.hpp"

using namespace sigcomp;
using testing_support::Gen;
using testing_support::mask;

namespace {

std::vector<double> slots_of(const CombWord& w) { return {w.slots().begin(), w.slots().end()}; }

/// Pair power after adding probe tones, written out from the slot values.
double probe_oracle(double lo, double hi, double c1, double c2) {
  return (lo + c1) * (lo + c1) + (hi + c2) * (hi + c2);
}

}  // namespace

TEST(Encode, SingleZeroBitIsTenPattern) {
  EXPECT_EQ(slots_of(encode_word(0, 1)), (std::vector<double>{1, 0}));
}

TEST(Encode, FiveInThreeBits) {
  EXPECT_EQ(slots_of(encode_word(5, 3)), (std::vector<double>{0, 1, 1, 0, 0, 1}));
}

TEST(Encode, SevenInThreeBits) {
  EXPECT_EQ(slots_of(encode_word(7, 3)), (std::vector<double>{0, 1, 0, 1, 0, 1}));
}

TEST(Encode, ScalesWithAmplitude) {
  EXPECT_EQ(slots_of(encode_word(5, 3, 2.5)), (std::vector<double>{0, 2.5, 2.5, 0, 0, 2.5}));
}

TEST(Encode, OverflowRejected) {
  EXPECT_THROW(encode_word(8, 3), OverflowError);
  EXPECT_NO_THROW(encode_word(~std::uint64_t{0}, 64));
}

TEST(Encode, EveryPairHoldsOneTone) {
  Gen g(11);
  for (int i = 0; i < 500; ++i) {
    const std::size_t bits = 1 + g.index(64);
    const std::uint64_t v = g.bits(bits);
    const auto w = encode_word(v, bits);
    std::size_t occupied = 0;
    for (std::size_t k = 0; k < bits; ++k) {
      const double lo = w.slots()[2 * k], hi = w.slots()[2 * k + 1];
      EXPECT_TRUE((lo == 1 && hi == 0) || (lo == 0 && hi == 1));
      occupied += (lo != 0) + (hi != 0);
      EXPECT_EQ(hi != 0, ((v >> k) & 1U) != 0);
    }
    EXPECT_EQ(occupied, bits);
  }
}

TEST(FromSlots, RejectsPatternsOutsideTheDictionary) {
  EXPECT_THROW(CombWord::from_slots({1, 1}), ProtocolError);
  EXPECT_THROW(CombWord::from_slots({0, 0}), ProtocolError);
  EXPECT_THROW(CombWord::from_slots({1, 0, 0}), ProtocolError);
  EXPECT_THROW(CombWord::from_slots({}), ProtocolError);
  EXPECT_THROW(CombWord::from_slots({2, 0}, 1.0), ProtocolError);
  EXPECT_EQ(CombWord::from_slots({0, 1, 1, 0, 0, 1}), encode_word(5, 3));
}

TEST(Psi, ReadsBitOneAtTenUnits) {
  const auto w = encode_word(2, 2);
  EXPECT_TRUE(psi_read_bit(w, 1));
  EXPECT_DOUBLE_EQ(psi_measure(w, 1, PsiProbe::defaults()), 10.0);
}

TEST(Psi, ReadsBitZeroAtEightUnits) {
  const auto w = encode_word(2, 2);
  EXPECT_FALSE(psi_read_bit(w, 0));
  EXPECT_DOUBLE_EQ(psi_measure(w, 0, PsiProbe::defaults()), 8.0);
}

TEST(Psi, AllZeroWord) {
  const auto w = encode_word(0, 4);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_FALSE(psi_read_bit(w, k));
}

TEST(Psi, DetectorConstantsMatchDirectPairPower) {
  for (double c0 : {0.5, 1.0, 2.5, 7.0}) {
    const auto p = PsiProbe::defaults(c0);
    EXPECT_NEAR(p.delta_one(), probe_oracle(0, c0, c0, 2 * c0), 1e-12 * c0 * c0);
    EXPECT_NEAR(p.delta_zero(), probe_oracle(c0, 0, c0, 2 * c0), 1e-12 * c0 * c0);
    EXPECT_NEAR(p.delta_one(), 10 * c0 * c0, 1e-12 * c0 * c0);
    EXPECT_NEAR(p.delta_zero(), 8 * c0 * c0, 1e-12 * c0 * c0);
  }
}

TEST(Psi, MeasurementMatchesOracleForRandomWords) {
  Gen g(12);
  for (int i = 0; i < 300; ++i) {
    const std::size_t bits = 1 + g.index(20);
    const double c0 = g.real(0.25, 4.0);
    const auto w = encode_word(g.bits(bits), bits, c0);
    const std::size_t k = g.index(bits);
    const double expect = probe_oracle(w.slots()[2 * k], w.slots()[2 * k + 1], c0, 2 * c0);
    EXPECT_NEAR(psi_measure(w, k, PsiProbe::defaults(c0)), expect, 1e-9 * expect);
  }
}

TEST(Psi, OutOfRangeBit) { EXPECT_THROW(psi_read_bit(encode_word(1, 2), 2), RangeError); }

TEST(Psi, ProbeValidation) {
  EXPECT_NO_THROW(PsiProbe::defaults(1.0).validate());
  EXPECT_THROW((PsiProbe{1.0, 1.0, 1.0}).validate(), RangeError);
  EXPECT_THROW((PsiProbe{1.0, 0.0, 2.0}).validate(), RangeError);
}

TEST(Psi, CustomProbeStillClassifies) {
  const PsiProbe p{1.0, 0.5, 3.0};
  for (std::uint64_t v = 0; v < 16; ++v) EXPECT_EQ(decode_word(encode_word(v, 4), p), v);
}

TEST(Decode, Examples) {
  EXPECT_EQ(decode_word(encode_word(0, 8)), 0U);
  EXPECT_EQ(decode_word(encode_word(5, 3)), 5U);
}

TEST(Decode, ExhaustiveTenBits) {
  for (std::uint64_t v = 0; v < 1024; ++v) ASSERT_EQ(decode_word(encode_word(v, 10)), v);
}

TEST(Decode, RandomSixtyFourBitWords) {
  Gen g(13);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = g.bits(64);
    ASSERT_EQ(decode_word(encode_word(v, 64)), v);
  }
}

TEST(Decode, WiderThanSixtyFourBitsWithHighBitSet) {
  CombWord w(65);
  w.beat(64);
  EXPECT_THROW(decode_word(w), OverflowError);
  EXPECT_EQ(decode_word(CombWord(70)), 0U);
}

TEST(Flip, Examples) {
  EXPECT_EQ(flip_bit(encode_word(0, 1), 0), encode_word(1, 1));
  EXPECT_EQ(flip_bit(encode_word(5, 3), 1), encode_word(7, 3));
}

TEST(Flip, MatchesXorWithPowerOfTwoAndIsAnInvolution) {
  Gen g(14);
  for (int i = 0; i < 500; ++i) {
    const std::size_t bits = 1 + g.index(64);
    const std::uint64_t v = g.bits(bits);
    const std::size_t k = g.index(bits);
    const auto w = encode_word(v, bits);
    const auto f = flip_bit(w, k);
    EXPECT_EQ(decode_word(f), v ^ (std::uint64_t{1} << k));
    EXPECT_EQ(flip_bit(f, k), w);
    EXPECT_DOUBLE_EQ(total_power(f), total_power(w));
  }
}

TEST(Complement, Examples) {
  EXPECT_EQ(complement(encode_word(5, 3)), encode_word(2, 3));
  EXPECT_EQ(complement(encode_word(0, 4)), encode_word(15, 4));
}

TEST(Complement, MatchesBitwiseNot) {
  Gen g(15);
  for (int i = 0; i < 500; ++i) {
    const std::size_t bits = 1 + g.index(64);
    const std::uint64_t v = g.bits(bits);
    const auto w = encode_word(v, bits, 1.5);
    EXPECT_EQ(decode_word(complement(w)), ~v & mask(bits));
    EXPECT_EQ(complement(complement(w)), w);
  }
}

TEST(Shift, Examples) {
  EXPECT_EQ(shift_word(encode_word(3, 3), 1), encode_word(6, 3));
  EXPECT_EQ(shift_word(encode_word(3, 3), -1), encode_word(1, 3));
  const auto w = encode_word(5, 3);
  EXPECT_EQ(shift_word(w, 0), w);
}

TEST(Shift, MatchesIntegerShifts) {
  Gen g(16);
  for (int i = 0; i < 500; ++i) {
    const std::size_t bits = 1 + g.index(63);
    const std::uint64_t v = g.bits(bits);
    const int k = static_cast<int>(g.range(-static_cast<long>(bits), static_cast<long>(bits)));
    const auto s = shift_word(encode_word(v, bits), k);
    const std::uint64_t expect =
        k >= 0 ? (static_cast<std::size_t>(k) >= 64 ? 0 : (v << k) & mask(bits))
               : (static_cast<std::size_t>(-k) >= 64 ? 0 : v >> -k);
    EXPECT_EQ(decode_word(s), expect) << "v=" << v << " k=" << k << " L=" << bits;
    EXPECT_EQ(s.bits(), bits);
  }
}

TEST(Shift, TooFarThrows) {
  EXPECT_THROW(shift_word(encode_word(1, 3), 4), RangeError);
  EXPECT_THROW(shift_word(encode_word(1, 3), -4), RangeError);
}

TEST(Power, Examples) {
  Gen g(17);
  for (int i = 0; i < 20; ++i) EXPECT_DOUBLE_EQ(total_power(encode_word(g.bits(8), 8)), 8.0);
  EXPECT_DOUBLE_EQ(total_power(ReferenceComb{8}), 16.0);
  EXPECT_DOUBLE_EQ(total_power(std::span<const double>{}), 0.0);
}

TEST(Power, ConservedAlongRandomFlipSequences) {
  Gen g(18);
  for (int i = 0; i < 100; ++i) {
    const double c0 = g.real(0.5, 3.0);
    auto w = encode_word(g.bits(16), 16, c0);
    const double expect = total_power(w);
    EXPECT_NEAR(expect, 16 * c0 * c0, 1e-12 * expect);
    for (int t = 0; t < 50; ++t) {
      w.beat(g.index(16));
      ASSERT_EQ(total_power(w), expect);
    }
  }
}

TEST(Grow, AddsZeroPairsAndTruncateCuts) {
  auto w = encode_word(5, 3);
  w.grow(5);
  EXPECT_EQ(w, encode_word(5, 5));
  w.truncate(2);
  EXPECT_EQ(w, encode_word(1, 2));
  EXPECT_THROW(w.truncate(0), RangeError);
}

TEST(Waveform, SingleToneIsACosineAtTwiceTheSpacing) {
  const auto w = encode_word(1, 1);
  const double period = 2 * std::numbers::pi;
  const auto view = synthesize_waveform(w, 8.0, period);
  ASSERT_FALSE(view.samples.empty());
  for (std::size_t i = 0; i < view.samples.size(); ++i) {
    const double t = period * static_cast<double>(i) / static_cast<double>(view.samples.size());
    EXPECT_NEAR(view.samples[i], std::cos(2.0 * t), 1e-12);
  }
  EXPECT_NEAR(view.mean_square(), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(total_power(w), 1.0);
}

TEST(Waveform, ParsevalForFiveInThreeBits) {
  const auto view = synthesize_waveform(encode_word(5, 3), 10.0, 2 * std::numbers::pi);
  EXPECT_NEAR(2 * view.mean_square(), 3.0, 1e-6 * 3.0);
}

TEST(Waveform, ParsevalForRandomWords) {
  Gen g(19);
  for (int i = 0; i < 50; ++i) {
    const std::size_t bits = 1 + g.index(16);
    const double c0 = g.real(0.5, 2.0), dw = g.real(0.5, 3.0);
    const auto w = encode_word(g.bits(bits), bits, c0, dw);
    const double nyquist = 2.0 * static_cast<double>(2 * bits + 1) * dw / (2 * std::numbers::pi);
    const double periods = static_cast<double>(1 + g.index(3));
    const auto view = synthesize_waveform(w, nyquist * g.real(1.1, 3.0), periods * 2 * std::numbers::pi / dw);
    double slot_power = 0.0;
    for (double a : w.slots()) slot_power += a * a;
    EXPECT_NEAR(2 * view.mean_square(), slot_power, 1e-6 * slot_power);
  }
}

TEST(Waveform, ZeroAmplitudeCombIsSilent) {
  const std::vector<double> zeros(6, 0.0);
  const auto view = synthesize_slots(zeros, 1.0, 10.0, 2 * std::numbers::pi);
  for (double s : view.samples) EXPECT_EQ(s, 0.0);
}

TEST(Waveform, RejectsUndersamplingAndPartialPeriods) {
  const auto w = encode_word(5, 3);
  const double nyquist = 2.0 * 7.0 / (2 * std::numbers::pi);
  EXPECT_THROW(synthesize_waveform(w, nyquist, 2 * std::numbers::pi), SamplingError);
  EXPECT_THROW(synthesize_waveform(w, 10.0, 3.0), SamplingError);
  EXPECT_THROW(synthesize_waveform(w, 10.0, 0.0), SamplingError);
}

TEST(Word, RejectsDegenerateShapes) {
  EXPECT_THROW(CombWord(0), RangeError);
  EXPECT_THROW(CombWord(3, 0.0), RangeError);
  EXPECT_THROW(CombWord(3, 1.0, -1.0), RangeError);
  EXPECT_DOUBLE_EQ(encode_word(0, 3, 1.0, 2.0).frequency(5), 12.0);
}
