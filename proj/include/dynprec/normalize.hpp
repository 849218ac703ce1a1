// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "dynprec/gross_float.hpp"
#include "dynprec/profiler.hpp"

namespace dynprec {

/// Unnormalized per-power coefficients produced by the add, sub and mul
/// pipelines. Entry i holds the coefficient of G^-(top+i) in units of that
/// power's last digit, and may be negative or exceed beta^(t+1).
struct RawAccumulator {
  int sign = 1;
  std::int64_t exponent = 0;
  int top = 0;
  std::vector<Wide> wide;
};

struct NormalizationReport {
  /// Digits the mantissa moved left (cancellation); 0 if the raw leading digit
  /// was already in place.
  int shift = 0;
  /// Digits the mantissa moved right because of a carry out of the top.
  int carry_digits = 0;
  bool rounded = false;
  bool underflow = false;
  /// Exact zero result.
  bool zero = false;
};

namespace detail {

inline Wide floor_div(Wide a, Wide b) {
  Wide q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Propagates carries so every entry lies in [0, G). The top entry absorbs the
/// overall sign and grows upward as needed. Returns the number of carry steps.
inline std::uint64_t propagate_carries(RawAccumulator& raw, const ArithConfig& cfg) {
  const Wide g = cfg.dark_grossone();
  std::uint64_t carries = 0;
  for (;;) {
    for (std::size_t j = raw.wide.size(); j-- > 1;) {
      const Wide c = floor_div(raw.wide[j], g);
      if (c != 0) {
        raw.wide[j] -= c * g;
        raw.wide[j - 1] += c;
        ++carries;
      }
    }
    if (raw.wide.empty()) return carries;
    if (raw.wide.front() < 0) {
      for (auto& w : raw.wide) w = -w;
      raw.sign = -raw.sign;
      continue;
    }
    while (raw.wide.front() >= g) {
      const Wide c = raw.wide.front() / g;
      raw.wide.front() -= c * g;
      raw.wide.insert(raw.wide.begin(), c);
      --raw.top;
      ++carries;
    }
    return carries;
  }
}

/// True when the fraction represented by `rest` (chunks below the rounding
/// point, most significant first) must round the kept part up.
inline bool round_up(const ArithConfig& cfg, Rounding mode, std::span<const Chunk> rest, Chunk last_kept) {
  if (mode == Rounding::truncate || rest.empty()) return false;
  const Chunk g = cfg.dark_grossone();
  Chunk carry = 0;
  bool nonzero = false;
  for (std::size_t j = rest.size(); j-- > 0;) {
    const Wide d = static_cast<Wide>(rest[j]) * 2 + carry;
    carry = d >= g ? 1 : 0;
    if (d - carry * g != 0) nonzero = true;
  }
  if (carry == 0) return false;  // below one half
  if (nonzero) return true;      // above one half
  return (last_kept % static_cast<Chunk>(cfg.base())) % 2 == 1;
}

}  // namespace detail

/// Full output of the normalization stage, including the digit stream before
/// rounding (used for pipeline traces).
struct Normalized {
  GrossFloat value;
  NormalizationReport report;
  std::int64_t unrounded_exponent = 0;
  std::vector<Chunk> unrounded;
};

/// Carry propagation, left/right normalization, and rounding after chunk
/// `result_section`. The result keeps max(`retain`, significant chunks)
/// chunks, capped at result_section+1.
inline Normalized normalize_full(RawAccumulator raw, const ConfigPtr& cfg, int result_section, std::size_t retain,
                                 Rounding mode, OpCounter* counter = nullptr) {
  const ArithConfig& c = *cfg;
  Normalized out;
  const std::uint64_t carries = detail::propagate_carries(raw, c);
  if (counter) counter->record_carries(carries);

  std::size_t first = 0;
  while (first < raw.wide.size() && raw.wide[first] == 0) ++first;
  if (first == raw.wide.size()) {
    out.value = GrossFloat::zero(cfg);
    out.report.zero = true;
    return out;
  }

  const int w = c.chunk_width();
  const int lead_off = c.t() + 1 - detail::digit_count(c, static_cast<Chunk>(raw.wide[first]));
  const std::int64_t g = static_cast<std::int64_t>(raw.top + static_cast<int>(first)) * w + lead_off;
  out.report.shift = g > 0 ? static_cast<int>(g) : 0;
  out.report.carry_digits = g < 0 ? static_cast<int>(-g) : 0;
  std::int64_t exponent = raw.exponent - g;

  // Regroup the digit stream starting at the leading digit.
  const std::size_t avail_digits = (raw.wide.size() - first) * static_cast<std::size_t>(w) - lead_off;
  const std::size_t count = (avail_digits + w - 1) / w;
  const Chunk lo_mod = c.pow(w - lead_off);
  const Chunk hi_mul = c.pow(lead_off);
  std::vector<Chunk> digits(count);
  for (std::size_t m = 0; m < count; ++m) {
    const std::size_t a = first + m;
    const auto cur = static_cast<Chunk>(raw.wide[a]);
    const Chunk next = a + 1 < raw.wide.size() ? static_cast<Chunk>(raw.wide[a + 1]) : 0;
    digits[m] = (cur % lo_mod) * hi_mul + (lead_off == 0 ? 0 : next / lo_mod);
  }
  out.unrounded = digits;
  out.unrounded_exponent = exponent;

  const auto keep = static_cast<std::size_t>(result_section) + 1;
  if (digits.size() > keep) {
    std::span<const Chunk> rest(digits.data() + keep, digits.size() - keep);
    out.report.rounded = std::any_of(rest.begin(), rest.end(), [](Chunk x) { return x != 0; });
    const bool up = detail::round_up(c, mode, rest, digits[keep - 1]);
    digits.resize(keep);
    if (up) {
      std::size_t j = keep;
      while (j-- > 0) {
        if (++digits[j] < c.dark_grossone()) break;
        digits[j] = 0;
      }
      if (digits[0] == 0) {  // carried out of the leading chunk
        digits.assign(keep, 0);
        digits[0] = c.pow(c.t());
        ++exponent;
      }
    }
  }

  std::size_t significant = digits.size();
  while (significant > 1 && digits[significant - 1] == 0) --significant;
  digits.resize(std::min(keep, std::max(retain, significant)), 0);

  if (exponent > c.exponent_max())
    throw ArithmeticError(ArithmeticError::Kind::overflow, "exponent overflow");
  if (exponent < c.exponent_min()) {
    out.value = GrossFloat::zero(cfg);
    out.report.underflow = true;
    out.report.rounded = true;
    return out;
  }
  out.value = GrossFloat(cfg, raw.sign, exponent, std::move(digits));
  return out;
}

inline std::pair<GrossFloat, NormalizationReport> normalize(const RawAccumulator& raw, const ConfigPtr& cfg,
                                                            int result_section, Rounding mode) {
  auto n = normalize_full(raw, cfg, result_section, 0, mode);
  return {std::move(n.value), n.report};
}

/// Rounds a value to a lower section (nearest-even or truncation per mode).
inline GrossFloat round_to_section(const GrossFloat& x, int result_section, Rounding mode, std::size_t retain = 0) {
  if (x.is_zero() || x.section_index() <= result_section) return x;
  RawAccumulator raw{x.sign(), x.exponent(), 0, {x.chunks().begin(), x.chunks().end()}};
  return normalize_full(std::move(raw), x.config_ptr(), result_section, retain, mode).value;
}

}  // namespace dynprec
