// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynprec {

/// One grossdigit: t+1 base-beta digits held as an integer in [0, beta^(t+1))
/// with an implied radix point after the first digit.
using Chunk = std::uint64_t;

/// Signed double-word used by the accumulation pipelines.
__extension__ using Wide = __int128;

enum class Rounding { truncate, nearest_even };

class ArithmeticError : public std::runtime_error {
 public:
  enum class Kind { overflow, division_by_zero, format, domain, accuracy_exhausted };

  ArithmeticError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Format parameters shared by every number of one arithmetic.
///
/// A number carries at most max_section()+1 grossdigits of chunk_width() digits
/// each, so the full significand has (T+1)(t+1) digits. The dark grossone
/// beta^(t+1) is the radix of the chunk expansion.
class ArithConfig {
 public:
  ArithConfig(int base, int chunk_width, int max_section, Rounding rounding = Rounding::nearest_even,
              std::int64_t exponent_min = -16384, std::int64_t exponent_max = 16383)
      : base_(base),
        chunk_width_(chunk_width),
        max_section_(max_section),
        rounding_(rounding),
        exponent_min_(exponent_min),
        exponent_max_(exponent_max) {
    if (base < 2) throw std::invalid_argument("base must be >= 2");
    if (base > 36) throw std::invalid_argument("base must be <= 36 (one character per digit)");
    if (chunk_width < 1) throw std::invalid_argument("chunk width must be >= 1");
    if (max_section < 0) throw std::invalid_argument("max section must be >= 0");
    if (exponent_min >= exponent_max) throw std::invalid_argument("empty exponent range");
    // beta * B^2 * (T+2) must fit the signed accumulator.
    const double bits = std::log2(static_cast<double>(base)) * (2.0 * chunk_width + 1.0) +
                        std::log2(static_cast<double>(max_section) + 3.0);
    if (bits > 125.0) throw std::invalid_argument("chunk too wide for 128-bit accumulation");
    powers_.resize(static_cast<std::size_t>(chunk_width) + 1);
    powers_[0] = 1;
    for (int i = 1; i <= chunk_width; ++i) powers_[i] = powers_[i - 1] * static_cast<Chunk>(base);
  }

  int base() const noexcept { return base_; }
  int chunk_width() const noexcept { return chunk_width_; }
  int t() const noexcept { return chunk_width_ - 1; }
  int max_section() const noexcept { return max_section_; }
  Rounding rounding() const noexcept { return rounding_; }
  std::int64_t exponent_min() const noexcept { return exponent_min_; }
  std::int64_t exponent_max() const noexcept { return exponent_max_; }

  /// N+1 = (T+1)(t+1)
  int total_digits() const noexcept { return (max_section_ + 1) * chunk_width_; }

  /// beta^(t+1)
  Chunk dark_grossone() const noexcept { return powers_.back(); }

  /// beta^k for 0 <= k <= t+1.
  Chunk pow(int k) const { return powers_.at(static_cast<std::size_t>(k)); }

  /// Products of chunks beyond the guard power are not formed by mul.
  bool skip_unobservable_products = false;

 private:
  int base_;
  int chunk_width_;
  int max_section_;
  Rounding rounding_;
  std::int64_t exponent_min_;
  std::int64_t exponent_max_;
  std::vector<Chunk> powers_;
};

using ConfigPtr = std::shared_ptr<const ArithConfig>;

inline ConfigPtr make_config(int base, int chunk_width, int max_section,
                             Rounding rounding = Rounding::nearest_even) {
  return std::make_shared<const ArithConfig>(base, chunk_width, max_section, rounding);
}

/// Same format with a different rounding mode.
inline ConfigPtr with_rounding(const ConfigPtr& cfg, Rounding r) {
  auto c = std::make_shared<ArithConfig>(cfg->base(), cfg->chunk_width(), cfg->max_section(), r,
                                         cfg->exponent_min(), cfg->exponent_max());
  c->skip_unobservable_products = cfg->skip_unobservable_products;
  return c;
}

/// Same format with a different section cap.
inline ConfigPtr with_max_section(const ConfigPtr& cfg, int max_section) {
  auto c = std::make_shared<ArithConfig>(cfg->base(), cfg->chunk_width(), max_section, cfg->rounding(),
                                         cfg->exponent_min(), cfg->exponent_max());
  c->skip_unobservable_products = cfg->skip_unobservable_products;
  return c;
}

}  // namespace dynprec
