// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

// Randomized comparison of add/sub/mul/div against the rational oracle.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dynprec/dynprec.hpp"
#include "rational_oracle.hpp"

namespace oracle {

struct CampaignStats {
  std::uint64_t cases = 0;
  std::uint64_t exact = 0;
  /// Off by exactly one unit in the last stored digit.
  std::uint64_t one_ulp = 0;
  /// Off by more; any entry here is a failure.
  std::uint64_t worse = 0;
  std::uint64_t div_cases = 0;
  std::uint64_t div_worse = 0;
  std::string first_failure;

  double discrepancy_rate() const { return cases ? static_cast<double>(one_ulp) / static_cast<double>(cases) : 0; }
};

inline dynprec::GrossFloat random_operand(const dynprec::ConfigPtr& cfg, std::mt19937_64& rng) {
  using dynprec::Chunk;
  const Chunk top = cfg->dark_grossone();
  const Chunk lead = cfg->pow(cfg->t());
  std::vector<Chunk> c(1 + rng() % (static_cast<unsigned>(cfg->max_section()) + 1));
  for (auto& v : c) v = rng() % top;
  c[0] = lead + rng() % (top - lead);
  // Occasional runs of extreme chunks exercise carries and cancellation.
  if (rng() % 8 == 0)
    for (std::size_t j = 1; j < c.size(); ++j) c[j] = rng() % 2 ? 0 : top - 1;
  const long spread = 3L * cfg->chunk_width();
  const long e = static_cast<long>(rng() % static_cast<unsigned long>(2 * spread + 1)) - spread;
  return dynprec::GrossFloat(cfg, rng() % 2 ? 1 : -1, e, c);
}

/// `n` cases of each of add, sub and mul, and n/10 divisions.
inline CampaignStats run_rounding_campaign(const dynprec::ConfigPtr& cfg, std::uint64_t n, std::uint64_t seed) {
  using namespace dynprec;
  std::mt19937_64 rng(seed);
  CampaignStats st;
  const bool nearest = cfg->rounding() == Rounding::nearest_even;
  auto check = [&](const char* op, const GrossFloat& x, const GrossFloat& y, const GrossFloat& got,
                   const mpq_class& exact, int rs) {
    ++st.cases;
    const long digits = static_cast<long>(rs + 1) * cfg->chunk_width();
    const mpq_class want = round(exact, cfg->base(), digits, nearest);
    const mpq_class have = value(got);
    if (have == want) {
      ++st.exact;
      return;
    }
    if (exact != 0 && abs(have - want) <= ulp(want == 0 ? exact : want, cfg->base(), digits)) {
      ++st.one_ulp;
      return;
    }
    ++st.worse;
    if (st.first_failure.empty())
      st.first_failure = std::string(op) + " " + x.to_literal() + " , " + y.to_literal() + " -> " + got.to_literal();
  };
  for (std::uint64_t i = 0; i < n; ++i) {
    // Near-equal operands for a share of the subtractions.
    const GrossFloat x = random_operand(cfg, rng);
    GrossFloat y = random_operand(cfg, rng);
    if (i % 5 == 0) {
      std::vector<Chunk> c(x.chunks().begin(), x.chunks().end());
      c.back() = rng() % cfg->dark_grossone();
      if (c.size() == 1) c[0] = cfg->pow(cfg->t()) + rng() % (cfg->dark_grossone() - cfg->pow(cfg->t()));
      y = GrossFloat(cfg, x.sign(), x.exponent(), std::move(c));
    }
    const int rs = static_cast<int>(rng() % (static_cast<unsigned>(cfg->max_section()) + 1));
    const mpq_class vx = value(x);
    const mpq_class vy = value(y);
    check("add", x, y, add(x, y, rs).value, vx + vy, rs);
    check("sub", x, y, sub(x, y, rs).value, vx - vy, rs);
    check("mul", x, y, mul(x, y, rs).value, vx * vy, rs);
    if (i % 10 == 0) {
      ++st.div_cases;
      const int ds = cfg->max_section();
      const mpq_class exact = vx / vy;
      const GrossFloat q = div(x, y, ds);
      if (abs(value(q) - exact) > 2 * ulp(exact, cfg->base(), static_cast<long>(ds + 1) * cfg->chunk_width())) {
        ++st.div_worse;
        if (st.first_failure.empty()) st.first_failure = "div " + x.to_literal() + " , " + y.to_literal();
      }
    }
  }
  return st;
}

}  // namespace oracle
