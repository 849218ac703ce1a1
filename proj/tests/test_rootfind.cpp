// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dynprec/dynprec.hpp"
#include "rational_oracle.hpp"

namespace {

using namespace dynprec;

ConfigPtr quintuple() { return make_config(2, 53, 4); }

GrossFloat near_root(const ConfigPtr& cfg) {
  return from_binary_string(1, 0, "1.0000000000000000000000000000000000000000000001000010", cfg);
}

TEST(Horner, QuinticRowsNearTheRoot) {
  const ConfigPtr cfg = quintuple();
  OpCounter oc;
  std::vector<HornerStep> steps;
  const GrossFloat v = horner_eval(Polynomial::quintic_root_one(cfg), near_root(cfg), 4, &oc, &steps);
  const std::vector<std::string> want = {
      "+2^0 : 1.0000000000000000000000000000000000000000000000000000",
      "+2^0 : 1.0000000000000000000000000000000000000000000001000010",
      "-2^1 : 1.1111111111111111111111111111111111111111111111011111",
      "-2^2 : 1.0000000000000000000000000000000000000000000000110001|0.1111111111111111111111111111111111111111011101111110",
      "+2^2 : 1.0111111111111111111111111111111111111111111111001110|1.0000000000000000000000000000000000000000100010000010",
      "+2^2 : 1.1000000000000000000000000000000000000000000000110001|0.1111111111111111111111111111111111111110111011111100|0.0000000000000000000000000000000001000110001100001000",
      "-2^1 : 1.1111111111111111111111111111111111111111111110011101|0.0000000000000000000000000000000000000010001000000111|1.1111111111111111111111111111111101110011100111110000",
      "-2^2 : 1.0000000000000000000000000000000000000000000000010000|0.1111111111111111111111111111111111111111011101111110|0.0000000000000000000000000000000001000110001100000111|1.1111111111111111111111111101101111001110111111100000",
      "+2^-1 : 1.1111111111111111111111111111111111111111111101111100|0.0000000000000000000000000000000000000100010000001111|1.1111111111111111111111111111110111001110011111000000|0.0000000000000000000000010010000110001000000100000000",
      "+2^0 : 1.0000000000000000000000000000000000000000000000000000|0.0000000000000000000000000000000000000000000000000000|0.0000000000000000000000000000000000000000000000000000|0.0000000000000000000000000000000000000000000000000000|0.0000000000000000010010101010010100010100001000000000",
      "+2^-230 : 1.0010101010010100010100001000000000000000000000000000",
  };
  ASSERT_EQ(steps.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(steps[i].value.trimmed().to_literal(), want[i]) << i;
  EXPECT_EQ(steps[1].label, "p*x");
  EXPECT_EQ(steps[2].label, "p*x+a");
  EXPECT_EQ(oc.grossdigit_mults(), 15u);
  // (x - 1)^5 exactly: x - 1 = 2^-46 * 1.000010, fifth power 2^-230 * 1.000010^5.
  const mpq_class d = oracle::value(near_root(cfg)) - 1;
  EXPECT_EQ(oracle::value(v), d * d * d * d * d);
}

TEST(Horner, FixedQuintupleCost) {
  const ConfigPtr cfg = quintuple();
  OpCounter oc;
  const GrossFloat x = near_root(cfg).padded(5);
  horner_eval(Polynomial::quintic_root_one(cfg).padded(5), x, 4, &oc);
  EXPECT_EQ(oc.grossdigit_mults(), 125u);
}

TEST(Horner, MatchesOracleOnRandomPolynomials) {
  std::mt19937_64 rng(53);
  const ConfigPtr cfg = make_config(2, 8, 4);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::int64_t> coeffs(1 + rng() % 4);
    for (auto& c : coeffs) c = static_cast<std::int64_t>(rng() % 41) - 20;
    if (coeffs[0] == 0) coeffs[0] = 1;
    const Polynomial p = Polynomial::from_integers(cfg, coeffs);
    const GrossFloat x(cfg, rng() % 2 ? 1 : -1, static_cast<long>(rng() % 3) - 1, {128 + rng() % 128});
    // One-chunk x and small integer coefficients: nothing rounds at full precision.
    const GrossFloat v = horner_eval(p, x, 4);
    mpq_class want = 0;
    for (auto c : coeffs) want = want * oracle::value(x) + c;
    EXPECT_EQ(oracle::value(v), want);
  }
}

TEST(Polynomial, DerivativeIsExact) {
  const ConfigPtr cfg = quintuple();
  const Polynomial d = Polynomial::quintic_root_one(cfg).derivative();
  ASSERT_EQ(d.degree(), 4);
  const std::vector<int> want = {5, -20, 30, -20, 5};
  for (int i = 0; i <= 4; ++i) EXPECT_EQ(oracle::value(d.coefficients()[i]), want[i]);
  EXPECT_TRUE(horner_eval_derivative(Polynomial::quintic_root_one(cfg), GrossFloat::from_int(cfg, 1), 4).is_zero());
  EXPECT_THROW(Polynomial({}), std::invalid_argument);
  EXPECT_THROW(Polynomial({GrossFloat::zero(cfg), GrossFloat::from_int(cfg, 1)}), std::invalid_argument);
}

TEST(Newton, LinearConvergesInOneStep) {
  const ConfigPtr cfg = quintuple();
  const Polynomial p = Polynomial::from_integers(cfg, {1, -1});
  NewtonOptions opt;
  opt.tol = 0;
  opt.max_iter = 3;
  const SolveTrace t = newton_solve(p, GrossFloat::from_int(cfg, 7), SolveMode::fixed(0), opt);
  ASSERT_FALSE(t.steps.empty());
  EXPECT_EQ(oracle::value(t.steps.front().x), 1);
}

TEST(Newton, SimpleRootReachesTolerance) {
  const ConfigPtr cfg = quintuple();
  const Polynomial p = Polynomial::from_integers(cfg, {1, 0, -2});
  const SolveTrace t = newton_solve(p, GrossFloat::from_int(cfg, 1), SolveMode::fixed(0));
  EXPECT_EQ(t.termination, SolveTrace::Termination::converged);
  EXPECT_NEAR(t.solution().to_double(), std::sqrt(2.0), 1e-15);
}

TEST(Newton, FixedModeSaturatesAndOrders) {
  const ConfigPtr cfg = quintuple();
  const Polynomial p = Polynomial::quintic_root_one(cfg);
  NewtonOptions opt;
  opt.tol = 0;
  double prev = 1;
  for (int q = 0; q <= 2; ++q) {
    const SolveTrace t = newton_solve(p, GrossFloat::from_int(cfg, 2), SolveMode::fixed(q), opt);
    EXPECT_EQ(t.termination, SolveTrace::Termination::stagnated);
    double best = 1;
    for (const auto& s : t.steps) best = std::min(best, std::fabs(s.x.to_double() - 1));
    EXPECT_LT(best, prev);
    prev = best;
    for (const auto& s : t.steps) EXPECT_EQ(s.x.size(), static_cast<std::size_t>(q) + 1);
  }
}

TEST(Newton, DynamicModeEscalatesMonotonically) {
  const ConfigPtr cfg = quintuple();
  NewtonOptions opt;
  opt.tol = 0;
  const SolveTrace t = newton_solve(Polynomial::quintic_root_one(cfg), GrossFloat::from_int(cfg, 2),
                                    SolveMode::dynamic(), opt);
  int prec = 1;
  for (const auto& s : t.steps) {
    EXPECT_GE(s.prec, prec);
    EXPECT_LE(s.prec, 5);
    prec = s.prec;
    EXPECT_LE(s.x.size(), 1u);
  }
  EXPECT_EQ(prec, 5);
  EXPECT_LT(std::fabs(t.solution().to_double() - 1), 1e-15);
}

TEST(Newton, CsvLayout) {
  const ConfigPtr cfg = quintuple();
  NewtonOptions opt;
  opt.max_iter = 3;
  const SolveTrace t = newton_solve(Polynomial::quintic_root_one(cfg), GrossFloat::from_int(cfg, 2),
                                    SolveMode::fixed(0), opt);
  std::ostringstream os;
  write_csv(t, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "step,x_k,err_k,prec,cum_mults,cum_adds");
  std::getline(is, line);
  EXPECT_EQ(line.rfind("1,1.8000000000000000444", 0), 0u) << line;
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Newton, RejectsBadOptions) {
  const ConfigPtr cfg = quintuple();
  const Polynomial p = Polynomial::quintic_root_one(cfg);
  NewtonOptions opt;
  opt.max_iter = 0;
  EXPECT_THROW(newton_solve(p, GrossFloat::from_int(cfg, 2), SolveMode::dynamic(), opt), std::invalid_argument);
  EXPECT_THROW(newton_solve(p, GrossFloat::from_int(cfg, 2), SolveMode::fixed(5)), std::invalid_argument);
  opt = {};
  opt.safety = 2;
  EXPECT_THROW(newton_solve(p, GrossFloat::from_int(cfg, 2), SolveMode::dynamic(), opt), std::invalid_argument);
  EXPECT_THROW(newton_solve(Polynomial::from_integers(cfg, {1, 0, 1}), GrossFloat::zero(cfg), SolveMode::fixed(0)),
               ArithmeticError);
}

TEST(Conditioning, FifthOrderRootUnitRoundoff) {
  ConditioningEstimate e{5, std::ldexp(1.0, -53), 1, 120, 0};
  // Unit perturbation of the constant term: g = 1, f^(5) = 5! so the factorials cancel.
  const double d = predict_perturbation(e);
  EXPECT_NEAR(d, std::pow(std::ldexp(1.0, -53), 0.2), 1e-18);
  EXPECT_NEAR(d, 6.4e-4, 0.05 * 6.4e-4);
  EXPECT_EQ(e.delta_alpha, d);
  EXPECT_THROW(predict_perturbation(ConditioningEstimate{0, 1, 1, 1, 0}), std::invalid_argument);
  EXPECT_THROW(predict_perturbation(ConditioningEstimate{2, 1, 1, 0, 0}), std::invalid_argument);
}

}  // namespace
