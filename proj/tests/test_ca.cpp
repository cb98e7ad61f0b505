#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sigcomp/ca.hpp"
#include "support.hpp"

using namespace sigcomp;
using namespace sigcomp::ca;
using testing_support::Gen;

namespace {

Lattice random_lattice(Gen& g, std::size_t w) {
  Lattice l(w);
  for (auto& c : l) c = g.coin();
  return l;
}

/// Elementary automaton written from the textbook definition.
Lattice eca_oracle(const Lattice& s, unsigned rule) {
  const std::size_t w = s.size();
  Lattice out(w);
  for (std::size_t i = 0; i < w; ++i) {
    const unsigned l = s[(i + w - 1) % w], c = s[i], r = s[(i + 1) % w];
    out[i] = (rule >> (4 * l + 2 * c + r)) & 1U;
  }
  return out;
}

}  // namespace

TEST(Rule, TableLookup) {
  const CaRule r110(110);
  EXPECT_TRUE(r110.output(3));
  EXPECT_FALSE(r110.output(0));
  EXPECT_FALSE(r110.output(4));
  EXPECT_FALSE(r110.output(7));
  EXPECT_EQ(r110.ones(), 5U);
  EXPECT_THROW(CaRule(256), RangeError);
  EXPECT_THROW(CaRule(1, 0), RangeError);
  EXPECT_THROW(CaRule(1, 6), RangeError);
}

TEST(Direct, QuiescentAndNullRules) {
  EXPECT_EQ(ca_step_direct(Lattice(16, 0), CaRule(110)), Lattice(16, 0));
  Gen g(61);
  EXPECT_EQ(ca_step_direct(random_lattice(g, 16), CaRule(0)), Lattice(16, 0));
}

TEST(Direct, MatchesTextbookDefinition) {
  Gen g(62);
  for (unsigned rule = 0; rule < 256; ++rule) {
    const auto s = random_lattice(g, 3 + g.index(40));
    ASSERT_EQ(ca_step_direct(s, CaRule(rule)), eca_oracle(s, rule)) << "rule " << rule;
  }
}

TEST(Mask, ThreeCellMaskLayout) {
  const auto m = conv_mask(8, 3);
  EXPECT_EQ(m, (std::vector<std::int64_t>{2, 4, 0, 0, 0, 0, 0, 1}));
}

TEST(Mask, ConvolutionGivesNeighborhoodCodes) {
  Gen g(63);
  for (std::size_t d = 1; d <= 5; ++d) {
    const auto s = random_lattice(g, 12);
    const auto codes = circular_convolve(conv_mask(12, d), s);
    for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(codes[i], static_cast<std::int64_t>(neighborhood_code(s, i, d)));
  }
}

TEST(Conv, EqualsDirectForAllElementaryRules) {
  Gen g(64);
  for (unsigned rule = 0; rule < 256; ++rule) {
    Lattice a = random_lattice(g, 64), b = a;
    for (int t = 0; t < 20; ++t) {
      a = ca_step_conv(a, CaRule(rule));
      b = ca_step_direct(b, CaRule(rule));
      ASSERT_EQ(a, b) << "rule " << rule << " step " << t;
    }
  }
}

TEST(Conv, WiderNeighborhoods) {
  Gen g(65);
  for (std::size_t d = 1; d <= 5; ++d) {
    for (int i = 0; i < 20; ++i) {
      const std::uint64_t number = g.bits(std::size_t{1} << d);
      const auto s = random_lattice(g, d + g.index(30));
      ASSERT_EQ(ca_step_conv(s, CaRule(number, d)), ca_step_direct(s, CaRule(number, d)));
    }
  }
}

TEST(Conv, Rule110SingleSeedTrajectory) {
  Lattice a(14, 0);
  a[7] = 1;
  Lattice b = a;
  for (int t = 0; t < 100; ++t) {
    a = ca_step_conv(a, CaRule(110));
    b = eca_oracle(b, 110);
    ASSERT_EQ(a, b);
  }
}

TEST(Conv, Rule204IsTheIdentity) {
  Gen g(66);
  const auto s = random_lattice(g, 33);
  EXPECT_EQ(ca_step_conv(s, CaRule(204)), s);
}

TEST(Transfer, Rule110RootsAndComparator) {
  const auto tf = TransferFunction::from_rule(CaRule(110));
  EXPECT_EQ(tf.pole_codes, (std::vector<std::size_t>{1, 2, 3, 5, 6}));
  EXPECT_EQ(tf.zero_codes, (std::vector<std::size_t>{0, 4, 7}));
  EXPECT_FALSE(transfer_eval(4, tf));
  for (std::size_t p : tf.pole_codes) EXPECT_TRUE(transfer_eval(p, tf));
}

TEST(Transfer, Rule0IsAllZeros) {
  const auto tf = TransferFunction::from_rule(CaRule(0));
  for (std::size_t c = 0; c < 8; ++c) EXPECT_FALSE(transfer_eval(c, tf));
}

TEST(Transfer, ReproducesEveryElementaryRuleTable) {
  for (unsigned rule = 0; rule < 256; ++rule) {
    const auto tf = TransferFunction::from_rule(CaRule(rule));
    for (std::size_t c = 0; c < 8; ++c) ASSERT_EQ(transfer_eval(c, tf), ((rule >> c) & 1U) != 0) << rule << "/" << c;
  }
}

TEST(Transfer, ReproducesRandomWiderRules) {
  Gen g(67);
  for (std::size_t d = 1; d <= 5; ++d)
    for (int i = 0; i < 30; ++i) {
      const CaRule rule(g.bits(std::size_t{1} << d), d);
      const auto tf = TransferFunction::from_rule(rule);
      for (std::size_t c = 0; c < rule.codes(); ++c) ASSERT_EQ(transfer_eval(c, tf), rule.output(c));
    }
}

TEST(Transfer, GainIsSignedByRootType) {
  const auto tf = TransferFunction::from_rule(CaRule(110));
  EXPECT_GT(transfer_gain_db(1, tf), 20.0);
  EXPECT_LT(transfer_gain_db(0, tf), -20.0);
  EXPECT_THROW(transfer_gain_db(8, tf), RangeError);
  TransferFunction exact = tf;
  exact.detuning = 0.0;
  EXPECT_THROW(transfer_gain_db(1, exact), SingularityError);
}

TEST(Transfer, FilterStepEqualsRuleStep) {
  Gen g(68);
  for (unsigned rule : {30U, 90U, 110U, 184U}) {
    Lattice s = random_lattice(g, 40);
    const auto tf = TransferFunction::from_rule(CaRule(rule));
    for (int t = 0; t < 20; ++t) {
      const auto next = ca_step_direct(s, CaRule(rule));
      ASSERT_EQ(ca_step_filter(s, tf), next);
      s = next;
    }
  }
}
