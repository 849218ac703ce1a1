// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dynprec/dynprec.hpp"
#include "rational_oracle.hpp"

namespace {

using namespace dynprec;

ConfigPtr sum_config() { return make_config(2, 8, 3, Rounding::truncate); }

struct SumInputs {
  GrossFloat x, y, z;
};

SumInputs first_inputs() {
  const ConfigPtr c = sum_config();
  return {from_binary_string(1, -1, "1.0001100000010111111001001110110", c),
          from_binary_string(1, 0, "1.0010101010110010110101001101011", c),
          from_binary_string(1, 0, "1.1011011010111011011011010111001", c)};
}

SumInputs cancelling_inputs() {
  const ConfigPtr c = sum_config();
  return {from_binary_string(1, 0, "1.0010101101010111111001001110110", c),
          from_binary_string(1, 0, "1.0010100010110010110101001101011", c),
          from_binary_string(1, -7, "1.0101000011011110010010110001010", c)};
}

const double kTarget = std::ldexp(1.0, -8);

TEST(AdaptiveSum, NoCancellationStaysAtSingleChunk) {
  const SumInputs in = first_inputs();
  OpCounter oc;
  const AdaptiveSumResult r = adaptive_sum({{in.x, 1}, {in.y, 1}, {in.z, 1}}, kTarget, &oc);
  EXPECT_EQ(r.value.to_literal(), "+2^1 : 1.1011011");
  EXPECT_EQ(r.prec, 1);
  EXPECT_EQ(oc.grossdigit_adds(), 2u);
  EXPECT_LT(r.rel_error, kTarget);
}

TEST(AdaptiveSum, CancellationRaisesPrecision) {
  const SumInputs in = first_inputs();
  OpCounter oc;
  const AdaptiveSumResult r = adaptive_sum({{in.x, 1}, {in.y, 1}, {in.z, -1}}, kTarget, &oc);
  EXPECT_EQ(r.value.trimmed().to_literal(), "+2^-15 : 1.1010110|1.0000000");
  EXPECT_EQ(oc.grossdigit_adds(), 6u);
  EXPECT_EQ(r.prec, 3);
  ASSERT_FALSE(r.steps.empty());
  EXPECT_EQ(r.steps.back().action, "final result");
  bool improved = false;
  for (const auto& s : r.steps) improved |= s.action == "improve the accuracy";
  EXPECT_TRUE(improved);
}

TEST(AdaptiveSum, CancellationAtEveryNode) {
  const SumInputs in = cancelling_inputs();
  OpCounter oc;
  const AdaptiveSumResult r = adaptive_sum({{in.x, 1}, {in.y, -1}, {in.z, -1}}, kTarget, &oc);
  EXPECT_EQ(r.value.trimmed().to_literal(), "+2^-15 : 1.1010101");
  EXPECT_EQ(oc.grossdigit_adds(), 5u);
  EXPECT_LT(r.rel_error, kTarget);
}

TEST(AdaptiveSum, ResultMeetsTargetAgainstOracle) {
  std::mt19937_64 rng(43);
  const ConfigPtr cfg = make_config(2, 8, 5, Rounding::truncate);
  for (int i = 0; i < 200; ++i) {
    std::vector<SumTerm> terms;
    mpq_class exact = 0;
    const int n = 2 + static_cast<int>(rng() % 4);
    for (int k = 0; k < n; ++k) {
      std::vector<Chunk> c(6);
      for (auto& v : c) v = rng() % 256;
      c[0] |= 128;
      const GrossFloat v(cfg, 1, static_cast<long>(rng() % 3), c);
      const int sign = rng() % 2 ? 1 : -1;
      terms.push_back({v, sign});
      exact += sign * oracle::value(v);
    }
    if (exact == 0) continue;
    try {
      const AdaptiveSumResult r = adaptive_sum(terms, kTarget);
      EXPECT_LE(abs((oracle::value(r.value) - exact) / exact), mpq_class(kTarget));
    } catch (const AccuracyExhausted& e) {
      EXPECT_GT(e.rel_error(), kTarget);
    }
  }
}

TEST(AdaptiveSum, ExhaustedTargetThrowsWithBestResult) {
  // The exact sum needs 41 digits; four chunks hold 32.
  const ConfigPtr c = sum_config();
  try {
    adaptive_sum({{GrossFloat::from_int(c, 1), 1}, {parse_literal("2^-40*1.0", c), 1}}, 1e-30);
    FAIL() << "expected AccuracyExhausted";
  } catch (const AccuracyExhausted& e) {
    EXPECT_FALSE(e.best().is_zero());
    EXPECT_GT(e.rel_error(), 1e-30);
    EXPECT_EQ(e.kind(), ArithmeticError::Kind::accuracy_exhausted);
  }
}

TEST(AdaptiveSum, ValidatesArguments) {
  EXPECT_THROW(adaptive_sum({}, kTarget), std::invalid_argument);
}

TEST(Cancellation, ThresholdIsHalfAChunk) {
  EXPECT_EQ(default_cancellation_threshold(*make_config(2, 8, 3)), 4);
  EXPECT_EQ(default_cancellation_threshold(*make_config(2, 53, 4)), 27);
  NormalizationReport r;
  r.shift = 3;
  EXPECT_FALSE(detect_cancellation(r, 4).triggered);
  r.shift = 4;
  EXPECT_TRUE(detect_cancellation(r, 4).triggered);
  r.shift = 0;
  r.zero = true;
  EXPECT_TRUE(detect_cancellation(r, 4).triggered);
}

TEST(RelativeErr, MatchesDefinition) {
  const ConfigPtr cfg = make_config(2, 53, 4);
  const GrossFloat a = from_decimal_string("1.5", cfg);
  const GrossFloat b = from_decimal_string("1.25", cfg);
  EXPECT_DOUBLE_EQ(relative_err(a, b), 0.25 / 1.5);
  EXPECT_EQ(relative_err(a, a), 0.0);
  EXPECT_THROW(relative_err(GrossFloat::zero(cfg), a), ArithmeticError);
}

TEST(ShouldEscalate, RuleAndCap) {
  PrecisionState s(4, 1.0, 1);
  EXPECT_FALSE(should_escalate(s, 1.0));
  s.err_history = {1e-3};
  EXPECT_FALSE(should_escalate(s, 1e-4));
  EXPECT_TRUE(should_escalate(s, 1e-3));
  EXPECT_TRUE(should_escalate(s, 2e-3));
  s.safety = 0.5;
  EXPECT_TRUE(should_escalate(s, 6e-4));
  s.prec = 5;
  EXPECT_FALSE(should_escalate(s, 1.0));
}

TEST(PrecisionState, Validation) {
  EXPECT_THROW(PrecisionState(-1), std::invalid_argument);
  EXPECT_THROW(PrecisionState(4, 0.0), std::invalid_argument);
  EXPECT_THROW(PrecisionState(4, 1.5), std::invalid_argument);
  EXPECT_THROW(PrecisionState(4, 1.0, 6), std::invalid_argument);
  EXPECT_NO_THROW(PrecisionState(4, 1.0, 5));
}

TEST(ReuseCache, ReusedSumsMatchFreshComputation) {
  std::mt19937_64 rng(47);
  const ConfigPtr cfg = make_config(2, 8, 3);
  for (int i = 0; i < 300; ++i) {
    std::vector<Chunk> xc(4);
    std::vector<Chunk> yc(4);
    for (auto& v : xc) v = rng() % 256;
    for (auto& v : yc) v = rng() % 256;
    xc[0] |= 128;
    yc[0] |= 128;
    const GrossFloat x(cfg, 1, 0, xc);
    const GrossFloat y(cfg, rng() % 2 ? 1 : -1, static_cast<long>(rng() % 3), yc);
    AddReuseCache cache;
    OpCounter reused;
    for (int q = 0; q <= 3; ++q) {
      const GrossFloat xs = section(x, q);
      const GrossFloat ys = section(y, q);
      const OpResult a = add(xs, ys, q, &reused, nullptr, &cache);
      const OpResult b = add(xs, ys, q);
      EXPECT_TRUE(a.value.identical(b.value));
    }
    // Each power is formed once across the four levels.
    EXPECT_LE(reused.grossdigit_adds(), 4u);
  }
}

}  // namespace
