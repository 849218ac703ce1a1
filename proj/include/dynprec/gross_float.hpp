// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <compare>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynprec/config.hpp"

namespace dynprec {

namespace detail {

inline char digit_char(unsigned d) {
  return static_cast<char>(d < 10 ? '0' + d : 'a' + (d - 10));
}

inline int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
  return -1;
}

/// Renders a fixed-point integer `n` carrying `frac` base-beta fraction digits,
/// e.g. 25 with frac 3 in base 2 is "11.001". At least one integer digit.
inline std::string format_fixed(const ArithConfig& cfg, Wide n, int frac) {
  const bool neg = n < 0;
  if (neg) n = -n;
  std::string rev;
  const Wide b = cfg.base();
  for (int i = 0; i < frac; ++i) {
    rev.push_back(digit_char(static_cast<unsigned>(n % b)));
    n /= b;
  }
  rev.push_back('.');
  do {
    rev.push_back(digit_char(static_cast<unsigned>(n % b)));
    n /= b;
  } while (n != 0);
  if (neg) rev.push_back('-');
  return {rev.rbegin(), rev.rend()};
}

/// Number of base-beta digits of a positive chunk value.
inline int digit_count(const ArithConfig& cfg, Chunk c) {
  int k = 0;
  while (k <= cfg.t() && c >= cfg.pow(k + 1)) ++k;
  return k + 1;
}

}  // namespace detail

/// View of one grossdigit c_j = sum_i d_i beta^-i.
class GrossDigit {
 public:
  GrossDigit(const ArithConfig& cfg, Chunk scaled) : cfg_(&cfg), scaled_(scaled) {}

  Chunk scaled() const noexcept { return scaled_; }

  /// Digit d_i, i in [0, t].
  unsigned digit(int i) const {
    return static_cast<unsigned>((scaled_ / cfg_->pow(cfg_->t() - i)) % cfg_->base());
  }

  long double value() const {
    return static_cast<long double>(scaled_) / static_cast<long double>(cfg_->pow(cfg_->t()));
  }

  std::string to_string() const { return detail::format_fixed(*cfg_, scaled_, cfg_->t()); }

 private:
  const ArithConfig* cfg_;
  Chunk scaled_;
};

/// A machine number +-beta^p * sum_j c_j G^-j with G = beta^(t+1).
///
/// Zero has no chunks. A nonzero value has a nonzero leading digit; trailing
/// zero chunks are kept because the chunk count is the precision the value
/// was computed at.
class GrossFloat {
 public:
  GrossFloat() = default;

  GrossFloat(ConfigPtr cfg, int sign, std::int64_t exponent, std::vector<Chunk> chunks)
      : cfg_(std::move(cfg)), sign_(sign < 0 ? -1 : 1), exponent_(exponent), chunks_(std::move(chunks)) {
    if (!cfg_) throw std::invalid_argument("GrossFloat needs a configuration");
    if (chunks_.size() > static_cast<std::size_t>(cfg_->max_section()) + 1)
      throw std::invalid_argument("more chunks than the configuration allows");
    for (Chunk c : chunks_)
      if (c >= cfg_->dark_grossone()) throw std::invalid_argument("chunk out of range");
    if (!chunks_.empty() && chunks_.front() < cfg_->pow(cfg_->t()))
      throw std::invalid_argument("leading digit must be nonzero");
    if (chunks_.empty()) {
      sign_ = 1;
      exponent_ = 0;
    }
  }

  static GrossFloat zero(ConfigPtr cfg) { return GrossFloat(std::move(cfg), 1, 0, {}); }

  /// Exact small integer.
  static GrossFloat from_int(ConfigPtr cfg, std::int64_t v);

  const ArithConfig& config() const { return *cfg_; }
  const ConfigPtr& config_ptr() const noexcept { return cfg_; }

  bool is_zero() const noexcept { return chunks_.empty(); }
  int sign() const noexcept { return sign_; }
  std::int64_t exponent() const noexcept { return exponent_; }
  std::span<const Chunk> chunks() const noexcept { return chunks_; }
  std::size_t size() const noexcept { return chunks_.size(); }

  /// Highest stored power index q (the section this value lives at).
  int section_index() const noexcept { return static_cast<int>(chunks_.size()) - 1; }

  GrossDigit grossdigit(std::size_t j) const { return GrossDigit(*cfg_, chunks_.at(j)); }

  GrossFloat operator-() const {
    GrossFloat r = *this;
    if (!r.is_zero()) r.sign_ = -r.sign_;
    return r;
  }

  GrossFloat abs() const {
    GrossFloat r = *this;
    r.sign_ = 1;
    return r;
  }

  /// Pads with zero chunks up to `count` chunks (never truncates).
  GrossFloat padded(std::size_t count) const {
    GrossFloat r = *this;
    if (!r.is_zero() && r.chunks_.size() < count) r.chunks_.resize(count, 0);
    return r;
  }

  /// Drops trailing zero chunks.
  GrossFloat trimmed() const {
    GrossFloat r = *this;
    while (r.chunks_.size() > 1 && r.chunks_.back() == 0) r.chunks_.pop_back();
    return r;
  }

  /// Approximate value; underflows to 0 and overflows to inf outside double range.
  double to_double() const {
    if (is_zero()) return 0.0;
    long double m = 0;
    long double scale = 1;
    const long double unit = static_cast<long double>(cfg_->pow(cfg_->t()));
    const long double g = static_cast<long double>(cfg_->dark_grossone());
    for (std::size_t j = 0; j < chunks_.size() && scale < 1e40L; ++j) {
      m += static_cast<long double>(chunks_[j]) / unit / scale;
      scale *= g;
    }
    long double r = m;
    if (cfg_->base() == 2) {
      r = std::ldexp(m, static_cast<int>(std::clamp<std::int64_t>(exponent_, -20000, 20000)));
    } else {
      r = m * std::pow(static_cast<long double>(cfg_->base()), static_cast<long double>(exponent_));
    }
    return static_cast<double>(sign_ * r);
  }

  /// Literal "+2^0 : 1.110|1.010|1.110"; zero is "0".
  std::string to_literal() const {
    if (is_zero()) return "0";
    std::string s = sign_ < 0 ? "-" : "+";
    s += std::to_string(cfg_->base()) + "^" + std::to_string(exponent_) + " : ";
    for (std::size_t j = 0; j < chunks_.size(); ++j) {
      if (j) s += '|';
      s += grossdigit(j).to_string();
    }
    return s;
  }

  /// Bit-exact identity: same sign, exponent and chunk sequence.
  bool identical(const GrossFloat& o) const {
    return sign_ == o.sign_ && exponent_ == o.exponent_ && chunks_ == o.chunks_;
  }

 private:
  ConfigPtr cfg_;
  int sign_ = 1;
  std::int64_t exponent_ = 0;
  std::vector<Chunk> chunks_;
};

inline GrossFloat GrossFloat::from_int(ConfigPtr cfg, std::int64_t v) {
  if (v == 0) return zero(std::move(cfg));
  const int sign = v < 0 ? -1 : 1;
  std::uint64_t mag = v < 0 ? 0 - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
  std::vector<unsigned> digits;  // most significant first
  for (; mag != 0; mag /= cfg->base()) digits.insert(digits.begin(), static_cast<unsigned>(mag % cfg->base()));
  const auto exponent = static_cast<std::int64_t>(digits.size()) - 1;
  while (digits.back() == 0) digits.pop_back();
  const int w = cfg->chunk_width();
  const std::size_t n = (digits.size() + w - 1) / w;
  if (n > static_cast<std::size_t>(cfg->max_section()) + 1)
    throw ArithmeticError(ArithmeticError::Kind::domain, "integer does not fit the format exactly");
  std::vector<Chunk> chunks(n, 0);
  for (std::size_t i = 0; i < digits.size(); ++i)
    chunks[i / w] += digits[i] * cfg->pow(cfg->t() - static_cast<int>(i % w));
  return GrossFloat(std::move(cfg), sign, exponent, std::move(chunks));
}

/// Truncation to chunks 0..q. No rounding.
inline GrossFloat section(const GrossFloat& x, int q) {
  if (q < 0 || q > x.config().max_section())
    throw ArithmeticError(ArithmeticError::Kind::domain, "section index out of range");
  if (x.is_zero() || x.section_index() <= q) return x;
  std::vector<Chunk> c(x.chunks().begin(), x.chunks().begin() + q + 1);
  return GrossFloat(x.config_ptr(), x.sign(), x.exponent(), std::move(c));
}

/// Compares magnitudes; missing chunks read as zero.
inline std::strong_ordering compare_magnitude(const GrossFloat& x, const GrossFloat& y) {
  if (x.is_zero() || y.is_zero()) return !x.is_zero() <=> !y.is_zero();
  if (x.exponent() != y.exponent()) return x.exponent() <=> y.exponent();
  const std::size_t n = std::max(x.size(), y.size());
  for (std::size_t j = 0; j < n; ++j) {
    const Chunk a = j < x.size() ? x.chunks()[j] : 0;
    const Chunk b = j < y.size() ? y.chunks()[j] : 0;
    if (a != b) return a <=> b;
  }
  return std::strong_ordering::equal;
}

/// Total order consistent with the represented real values.
inline std::strong_ordering compare(const GrossFloat& x, const GrossFloat& y) {
  const int sx = x.is_zero() ? 0 : x.sign();
  const int sy = y.is_zero() ? 0 : y.sign();
  if (sx != sy) return sx <=> sy;
  if (sx == 0) return std::strong_ordering::equal;
  const auto m = compare_magnitude(x, y);
  return sx > 0 ? m : 0 <=> m;
}

inline bool operator==(const GrossFloat& x, const GrossFloat& y) { return compare(x, y) == 0; }
inline std::strong_ordering operator<=>(const GrossFloat& x, const GrossFloat& y) { return compare(x, y); }

}  // namespace dynprec
