// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "dynprec/gross_float.hpp"
#include "dynprec/normalize.hpp"
#include "dynprec/profiler.hpp"
#include "dynprec/trace.hpp"

namespace dynprec {

struct OpResult {
  GrossFloat value;
  NormalizationReport report;
};

/// Per-power sums remembered across re-evaluations of the same addition at
/// growing precision. A power is reused when both aligned operand chunks are
/// unchanged, and is not counted again as an addition when they changed.
struct AddReuseCache {
  std::int64_t exponent = 0;
  bool valid = false;
  std::vector<std::optional<std::tuple<Chunk, Chunk, Wide>>> powers;
};

namespace detail {

inline void check_compatible(const GrossFloat& x, const GrossFloat& y) {
  if (x.config().base() != y.config().base() || x.config().chunk_width() != y.config().chunk_width())
    throw std::invalid_argument("operands use different number formats");
}

/// Picks the configuration of the result: the first operand's unless it
/// cannot hold `result_section`.
inline const ConfigPtr& result_config(const GrossFloat& x, const GrossFloat& y, int result_section) {
  check_compatible(x, y);
  const ConfigPtr& c = x.config().max_section() >= result_section ? x.config_ptr() : y.config_ptr();
  if (result_section < 0 || result_section > c->max_section())
    throw ArithmeticError(ArithmeticError::Kind::domain, "result section out of range");
  return c;
}

/// Chunks of a mantissa moved right by `digits` digit positions, truncated to
/// `cap` chunks. `sticky` is set when nonzero digits fell off.
struct Aligned {
  std::vector<Chunk> chunks;
  bool sticky = false;
};

inline Aligned shift_right(const ArithConfig& cfg, std::span<const Chunk> src, std::int64_t digits, std::size_t cap) {
  Aligned out;
  const int w = cfg.chunk_width();
  const std::int64_t whole = digits / w;
  const int part = static_cast<int>(digits % w);
  if (whole >= static_cast<std::int64_t>(cap)) {
    out.sticky = std::any_of(src.begin(), src.end(), [](Chunk c) { return c != 0; });
    return out;
  }
  const std::size_t n = static_cast<std::size_t>(whole) + src.size() + (part ? 1 : 0);
  out.chunks.assign(n, 0);
  const Chunk div = cfg.pow(part);
  const Chunk mul = cfg.pow(w - part);
  for (std::size_t i = 0; i < src.size(); ++i) {
    const std::size_t at = static_cast<std::size_t>(whole) + i;
    out.chunks[at] += src[i] / div;
    if (part) out.chunks[at + 1] += (src[i] % div) * mul;
  }
  if (out.chunks.size() > cap) {
    out.sticky = std::any_of(out.chunks.begin() + static_cast<std::ptrdiff_t>(cap), out.chunks.end(),
                             [](Chunk c) { return c != 0; });
    out.chunks.resize(cap);
  }
  return out;
}

inline void trace_normalization(PipelineTrace& trace, const Normalized& n, const std::string& norm_label,
                                const std::string& round_label, int sign) {
  if (n.report.zero) {
    trace.add({norm_label, "0", {}});
    trace.add({round_label, "0", {}});
    return;
  }
  TraceRow nr{norm_label, scale_text(n.value.config(), sign, n.unrounded_exponent), {}};
  std::size_t last = n.unrounded.size();
  while (last > 1 && n.unrounded[last - 1] == 0) --last;
  for (std::size_t j = 0; j < last; ++j)
    nr.cells[static_cast<int>(j)] = GrossDigit(n.value.config(), n.unrounded[j]).to_string();
  trace.add(std::move(nr));
  TraceRow rr = value_row(round_label, n.value);
  trace.add(std::move(rr));
}

inline OpResult add_signed(const GrossFloat& x, const GrossFloat& y, int result_section, OpCounter* counter,
                           PipelineTrace* trace, AddReuseCache* cache) {
  const ConfigPtr& cfg = result_config(x, y, result_section);
  const ArithConfig& c = *cfg;
  const bool subtract = !x.is_zero() && !y.is_zero() && x.sign() != y.sign();

  if (trace) {
    trace->add(value_row("(a) data acquisition", x));
    trace->add(value_row("", y));
  }
  if (x.is_zero() && y.is_zero()) {
    if (counter) counter->record(OpKind::add, 0, 0, 0, 0);
    OpResult r{GrossFloat::zero(cfg), {}};
    r.report.zero = true;
    return r;
  }

  const std::int64_t exponent = x.is_zero() ? y.exponent() : y.is_zero() ? x.exponent()
                                                                          : std::max(x.exponent(), y.exponent());
  const std::size_t cap =
      std::max<std::size_t>(std::max(x.size(), y.size()) + 1, static_cast<std::size_t>(result_section) + 3);
  const Aligned ax = shift_right(c, x.chunks(), x.is_zero() ? 0 : exponent - x.exponent(), cap);
  const Aligned ay = shift_right(c, y.chunks(), y.is_zero() ? 0 : exponent - y.exponent(), cap);

  const int sx = x.is_zero() ? y.sign() : x.sign();
  const Wide ysign = subtract ? -1 : 1;
  const std::size_t len = std::max(ax.chunks.size(), ay.chunks.size());
  const std::size_t overlap = std::min(ax.chunks.size(), ay.chunks.size());

  if (cache && (!cache->valid || cache->exponent != exponent)) {
    cache->valid = true;
    cache->exponent = exponent;
    cache->powers.clear();
  }
  if (cache && cache->powers.size() < overlap) cache->powers.resize(overlap);

  RawAccumulator raw{sx, exponent, 0, std::vector<Wide>(len, 0)};
  std::uint64_t adds = 0;
  for (std::size_t j = 0; j < len; ++j) {
    const Chunk a = j < ax.chunks.size() ? ax.chunks[j] : 0;
    const Chunk b = j < ay.chunks.size() ? ay.chunks[j] : 0;
    if (j < overlap) {
      if (cache && cache->powers[j] && std::get<0>(*cache->powers[j]) == a && std::get<1>(*cache->powers[j]) == b) {
        raw.wide[j] = std::get<2>(*cache->powers[j]);
        continue;
      }
      raw.wide[j] = static_cast<Wide>(a) + ysign * static_cast<Wide>(b);
      // A power formed before at the same alignment changes only through
      // carries out of newly added lower powers; that is carry work.
      if (cache && cache->powers[j]) {
        if (counter) counter->record_carries(1);
      } else {
        ++adds;
      }
      if (cache) cache->powers[j] = std::make_tuple(a, b, raw.wide[j]);
    } else {
      raw.wide[j] = static_cast<Wide>(a) + ysign * static_cast<Wide>(b);
    }
  }
  // A value strictly between the truncated operand and its next multiple of
  // the last kept unit stands in for the dropped digits.
  // It sits below every kept chunk, whatever survived the alignment.
  if (ax.sticky || ay.sticky) {
    raw.wide.resize(cap, 0);
    raw.wide.push_back(ax.sticky ? 1 : ysign);
  }

  if (trace) {
    trace->add(wide_row("(b) alignment", c, exponent, 0, {ax.chunks.begin(), ax.chunks.end()}, c.t()));
    trace->add(wide_row("", c, exponent, 0, {ay.chunks.begin(), ay.chunks.end()}, c.t()));
    trace->add(wide_row("(c) sum", c, exponent, 0, raw.wide, c.t()));
  }

  // Redistribution: every power below the top hands its overflow to the
  // power above.
  const Wide g = c.dark_grossone();
  std::vector<TraceRow> redistribution;
  RawAccumulator summed = raw;
  for (std::size_t j = summed.wide.size(); j-- > 1;) {
    const Wide carry = floor_div(raw.wide[j], g);
    summed.wide[j] -= carry * g;
    summed.wide[j - 1] += carry;
  }
  if (trace) {
    for (std::size_t j = 0; j < raw.wide.size(); ++j) {
      TraceRow r{j == 0 ? "(d) redistribution" : "", scale_text(c, 1, exponent), {}};
      const Wide carry = j == 0 ? 0 : floor_div(raw.wide[j], g);
      if (carry != 0) r.cells[static_cast<int>(j) - 1] = format_fixed(c, carry, c.t());
      r.cells[static_cast<int>(j)] = format_fixed(c, raw.wide[j] - carry * g, c.t());
      redistribution.push_back(std::move(r));
    }
    trace->add_packed(redistribution);
    trace->add(wide_row("(e) sum", c, exponent, 0, summed.wide, c.t()));
  }

  Normalized n = normalize_full(std::move(summed), cfg, result_section, std::max(x.size(), y.size()), c.rounding(),
                                counter);
  if (trace) trace_normalization(*trace, n, "(f) normalization", "(g) rounding", n.value.sign());
  if (counter) counter->record(subtract ? OpKind::sub : OpKind::add, x.section_index(), y.section_index(), 0, adds);
  return {std::move(n.value), n.report};
}

}  // namespace detail

/// X + Y rounded after chunk `result_section`. Mixed signs subtract magnitudes.
inline OpResult add(const GrossFloat& x, const GrossFloat& y, int result_section, OpCounter* counter = nullptr,
                    PipelineTrace* trace = nullptr, AddReuseCache* cache = nullptr) {
  return detail::add_signed(x, y, result_section, counter, trace, cache);
}

/// X - Y. The normalization shift in the report measures cancellation.
inline OpResult sub(const GrossFloat& x, const GrossFloat& y, int result_section, OpCounter* counter = nullptr,
                    PipelineTrace* trace = nullptr, AddReuseCache* cache = nullptr) {
  return detail::add_signed(x, -y, result_section, counter, trace, cache);
}

/// X * Y by convolution of the chunk sequences.
inline OpResult mul(const GrossFloat& x, const GrossFloat& y, int result_section, OpCounter* counter = nullptr,
                    PipelineTrace* trace = nullptr) {
  const ConfigPtr& cfg = detail::result_config(x, y, result_section);
  const ArithConfig& c = *cfg;
  if (trace) {
    trace->add(value_row("(a) data acquisition", x));
    trace->add(value_row("", y));
  }
  if (x.is_zero() || y.is_zero()) {
    if (counter) counter->record(OpKind::mul, std::max(x.section_index(), 0), std::max(y.section_index(), 0), 0, 0);
    OpResult r{GrossFloat::zero(cfg), {}};
    r.report.zero = true;
    return r;
  }

  const int q = x.section_index();
  const int p = y.section_index();
  int last_power = q + p;
  if (c.skip_unobservable_products) last_power = std::min(last_power, result_section + 1);

  std::vector<Wide> conv(static_cast<std::size_t>(last_power) + 1, 0);
  std::uint64_t mults = 0;
  std::uint64_t adds = 0;
  for (int j = 0; j <= last_power; ++j) {
    int terms = 0;
    for (int i = std::max(0, j - p); i <= std::min(q, j); ++i) {
      conv[j] += static_cast<Wide>(x.chunks()[i]) * static_cast<Wide>(y.chunks()[j - i]);
      ++terms;
    }
    mults += static_cast<std::uint64_t>(terms);
    adds += static_cast<std::uint64_t>(terms - 1);
  }

  // Each double-width term spreads over the powers j-1, j, j+1.
  const Wide g = c.dark_grossone();
  RawAccumulator raw{x.sign() * y.sign(), x.exponent() + y.exponent(), -1,
                     std::vector<Wide>(static_cast<std::size_t>(last_power) + 3, 0)};
  std::vector<TraceRow> pieces;
  for (int j = 0; j <= last_power; ++j) {
    const Wide m = conv[j] * c.base();
    const Wide h2 = m / (g * g);
    const Wide h1 = (m / g) % g;
    const Wide h0 = m % g;
    raw.wide[j] += h2;
    raw.wide[j + 1] += h1;
    raw.wide[j + 2] += h0;
    if (trace) {
      TraceRow r{j == 0 ? "(c) redistribution" : "", scale_text(c, 1, raw.exponent), {}};
      r.cells[j - 1] = detail::format_fixed(c, h2, c.t());
      r.cells[j] = detail::format_fixed(c, h1, c.t());
      r.cells[j + 1] = detail::format_fixed(c, h0, c.t());
      pieces.push_back(std::move(r));
    }
  }
  if (trace) {
    trace->add(wide_row("(b) convolution product", c, raw.exponent, 0, conv, 2 * c.t()));
    trace->add_packed(pieces);
    RawAccumulator shown = raw;
    detail::propagate_carries(shown, c);
    trace->add(wide_row("(d) sum with redistribution", c, shown.exponent, shown.top, shown.wide, c.t()));
  }

  Normalized n = normalize_full(std::move(raw), cfg, result_section, x.size() + y.size(), c.rounding(), counter);
  if (trace) detail::trace_normalization(*trace, n, "(e) normalization", "(f) rounding", n.value.sign());
  if (counter) counter->record(OpKind::mul, q, p, mults, adds);
  return {std::move(n.value), n.report};
}

/// Positive num/den rounded after chunk `result_section`.
inline GrossFloat from_fraction(std::uint64_t num, std::uint64_t den, const ConfigPtr& cfg, int result_section) {
  if (den == 0) throw ArithmeticError(ArithmeticError::Kind::division_by_zero, "zero denominator");
  if (num == 0) return GrossFloat::zero(cfg);
  const ArithConfig& c = *cfg;
  Wide n = num;
  Wide d = den;
  std::int64_t e = 0;
  while (n >= d * c.base()) {
    d *= c.base();
    ++e;
  }
  while (n < d) {
    n *= c.base();
    --e;
  }
  // n/d in [1, beta): emit (result_section + 2) chunks, then a sticky chunk.
  const std::size_t chunks = static_cast<std::size_t>(result_section) + 2;
  RawAccumulator raw{1, e, 0, std::vector<Wide>(chunks, 0)};
  for (std::size_t j = 0; j < chunks; ++j) {
    Wide chunk = 0;
    for (int i = 0; i < c.chunk_width(); ++i) {
      const Wide digit = n / d;
      n = (n - digit * d) * c.base();
      chunk = chunk * c.base() + digit;
    }
    raw.wide[j] = chunk;
  }
  if (n != 0) raw.wide.push_back(1);
  return normalize_full(std::move(raw), cfg, result_section, 0, c.rounding()).value;
}

/// Reciprocal together with the scaled Newton iterates.
struct ReciprocalResult {
  GrossFloat value;
  /// Z_0..Z_k for the scaled divisor, at working precision (one guard chunk).
  std::vector<GrossFloat> iterates;
  GrossFloat scaled_divisor;
  /// 1/Y = beta^scale / scaled divisor
  std::int64_t scale = 0;
  int iterations = 0;
};

/// Number of Newton steps for `digits` correct base-beta digits from a seed
/// with relative error at most (beta-1)^2 / (beta^2 + 6 beta + 1).
inline int reciprocal_iterations(int base, int digits) {
  const double b = base;
  const double seed_error = (b - 1) * (b - 1) / (b * b + 6 * b + 1);
  const double bits = digits * std::log2(b);
  const double k = std::ceil(std::log2((bits + 1) / std::log2(1.0 / seed_error)) - 1e-12);
  return std::max(0, static_cast<int>(k));
}

namespace detail {

inline ReciprocalResult reciprocal_impl(const GrossFloat& y, int target_section, OpCounter* counter,
                                        PipelineTrace* trace) {
  if (y.is_zero()) throw ArithmeticError(ArithmeticError::Kind::division_by_zero, "reciprocal of zero");
  const ConfigPtr& cfg = y.config_ptr();
  const ArithConfig& c = *cfg;
  const int work = target_section + 1;
  const ConfigPtr wcfg = with_max_section(cfg, std::max(c.max_section(), work));

  ReciprocalResult out;
  // Scaled divisor in [1/beta, 1); for beta = 2 that is [0.5, 1).
  out.scale = -1 - y.exponent();
  out.scaled_divisor = GrossFloat(wcfg, 1, -1, {y.chunks().begin(), y.chunks().end()});
  const GrossFloat& yh = out.scaled_divisor;

  // Minimax linear seed on [1/beta, 1]; 48/17 - 32/17 y for beta = 2.
  const std::uint64_t b = static_cast<std::uint64_t>(c.base());
  const std::uint64_t den = b * b + 6 * b + 1;
  const GrossFloat c0 = from_fraction(8 * b * (b + 1), den, wcfg, work);
  const GrossFloat c1 = from_fraction(8 * b * b, den, wcfg, work);
  const GrossFloat one = GrossFloat::from_int(wcfg, 1);

  GrossFloat z = sub(c0, mul(c1, yh, work, counter).value, work, counter).value;
  out.iterates.push_back(z);
  out.iterations = reciprocal_iterations(c.base(), (target_section + 1) * c.chunk_width());
  for (int k = 0; k < out.iterations; ++k) {
    const GrossFloat e = sub(one, mul(yh, z, work, counter).value, work, counter).value;
    z = add(z, mul(z, e, work, counter).value, work, counter).value;
    out.iterates.push_back(z);
  }

  // Callers such as div may ask for more chunks than the divisor's format holds.
  const ConfigPtr& rcfg = target_section <= c.max_section() ? cfg : wcfg;
  const GrossFloat zr = round_to_section(z, target_section, c.rounding());
  const std::int64_t exponent = zr.exponent() + out.scale;
  if (exponent > c.exponent_max()) throw ArithmeticError(ArithmeticError::Kind::overflow, "reciprocal overflows");
  if (exponent < c.exponent_min()) {
    out.value = GrossFloat::zero(rcfg);
  } else {
    out.value = GrossFloat(rcfg, y.sign(), exponent, {zr.chunks().begin(), zr.chunks().end()});
  }

  if (trace) {
    trace->add(value_row("Y", y));
    trace->add(value_row("scaled Y", round_to_section(yh, target_section, c.rounding())));
    for (std::size_t k = 0; k < out.iterates.size(); ++k) {
      const GrossFloat shown = round_to_section(out.iterates[k], target_section, c.rounding())
                                   .padded(static_cast<std::size_t>(target_section) + 1);
      trace->add(value_row("Z_" + std::to_string(k), shown));
    }
    trace->add(value_row("1/Y", out.value));
  }
  return out;
}

}  // namespace detail

/// 1/Y by Newton iteration on f(Z) = 1/Z - Y from a minimax seed.
inline ReciprocalResult reciprocal_detailed(const GrossFloat& y, int target_section, OpCounter* counter = nullptr,
                                            PipelineTrace* trace = nullptr) {
  if (target_section < 0 || target_section > y.config().max_section())
    throw ArithmeticError(ArithmeticError::Kind::domain, "target section out of range");
  return detail::reciprocal_impl(y, target_section, counter, trace);
}

inline GrossFloat reciprocal(const GrossFloat& y, int target_section, OpCounter* counter = nullptr,
                             PipelineTrace* trace = nullptr) {
  return reciprocal_detailed(y, target_section, counter, trace).value;
}

/// X / Y = X * (1/Y) with the reciprocal carried one chunk further.
inline GrossFloat div(const GrossFloat& x, const GrossFloat& y, int result_section, OpCounter* counter = nullptr) {
  detail::check_compatible(x, y);
  if (y.is_zero()) throw ArithmeticError(ArithmeticError::Kind::division_by_zero, "division by zero");
  if (result_section < 0 || result_section > x.config().max_section())
    throw ArithmeticError(ArithmeticError::Kind::domain, "result section out of range");
  if (x.is_zero()) return GrossFloat::zero(x.config_ptr());
  const GrossFloat inv = detail::reciprocal_impl(y, result_section + 1, counter, nullptr).value;
  return mul(x, inv, result_section, counter).value;
}

}  // namespace dynprec
