// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "dynprec/gross_float.hpp"
#include "dynprec/normalize.hpp"

namespace dynprec {

using BigInt = boost::multiprecision::cpp_int;

/// Exact value of a GrossFloat as sign * num / den (den a power of beta).
struct ExactValue {
  int sign = 1;
  BigInt num = 0;
  BigInt den = 1;
};

inline ExactValue exact_value(const GrossFloat& x) {
  ExactValue v;
  if (x.is_zero()) return v;
  const ArithConfig& c = x.config();
  v.sign = x.sign();
  for (Chunk ch : x.chunks()) v.num = v.num * c.dark_grossone() + ch;
  const std::int64_t e = x.exponent() - c.t() - static_cast<std::int64_t>(x.size() - 1) * c.chunk_width();
  const BigInt b = c.base();
  if (e >= 0) {
    v.num *= boost::multiprecision::pow(b, static_cast<unsigned>(e));
  } else {
    v.den = boost::multiprecision::pow(b, static_cast<unsigned>(-e));
  }
  return v;
}

namespace detail {

inline ArithmeticError format_error(const std::string& what) {
  return ArithmeticError(ArithmeticError::Kind::format, what);
}

/// Positive num/den rounded to `result_section` per the configured mode.
inline GrossFloat from_rational(int sign, BigInt num, BigInt den, const ConfigPtr& cfg, int result_section) {
  if (den == 0) throw ArithmeticError(ArithmeticError::Kind::division_by_zero, "zero denominator");
  if (num == 0) return GrossFloat::zero(cfg);
  const ArithConfig& c = *cfg;
  const BigInt b = c.base();
  // beta^e <= num/den < beta^(e+1), found from bit lengths then corrected.
  const double log2b = std::log2(static_cast<double>(c.base()));
  std::int64_t e = static_cast<std::int64_t>(std::floor(
      (static_cast<double>(msb(num)) - static_cast<double>(msb(den))) / log2b));
  auto scaled_compare = [&](std::int64_t k) {  // sign of num/den - beta^k
    const BigInt p = boost::multiprecision::pow(b, static_cast<unsigned>(k < 0 ? -k : k));
    const BigInt lhs = k < 0 ? num * p : num;
    const BigInt rhs = k < 0 ? den : den * p;
    return lhs < rhs ? -1 : lhs == rhs ? 0 : 1;
  };
  while (scaled_compare(e) < 0) --e;
  while (scaled_compare(e + 1) >= 0) ++e;

  // One chunk beyond the kept ones, then a sticky chunk for the remainder.
  const int chunks = result_section + 2;
  const std::int64_t digits = static_cast<std::int64_t>(chunks) * c.chunk_width();
  const std::int64_t shift = digits - 1 - e;
  BigInt n = num;
  BigInt d = den;
  if (shift >= 0) {
    n *= boost::multiprecision::pow(b, static_cast<unsigned>(shift));
  } else {
    d *= boost::multiprecision::pow(b, static_cast<unsigned>(-shift));
  }
  BigInt q = n / d;
  const bool inexact = q * d != n;
  RawAccumulator raw{sign, e, 0, std::vector<Wide>(static_cast<std::size_t>(chunks), 0)};
  for (int j = chunks; j-- > 0;) {
    raw.wide[j] = static_cast<Wide>(static_cast<std::uint64_t>(q % c.dark_grossone()));
    q /= c.dark_grossone();
  }
  if (inexact) raw.wide.push_back(1);
  Normalized r = normalize_full(std::move(raw), cfg, result_section, 0, c.rounding());
  if (r.report.underflow) throw ArithmeticError(ArithmeticError::Kind::overflow, "exponent below range");
  return std::move(r.value);
}

}  // namespace detail

/// Digits in base beta, optionally with a radix point, read as
/// sign * digits * beta^exponent with the point after the first digit
/// ("1.11010101110"). Rounded after digit N per the configured mode.
inline GrossFloat from_binary_string(int sign, std::int64_t exponent, std::string_view mantissa_digits,
                                     const ConfigPtr& cfg) {
  const ArithConfig& c = *cfg;
  std::string digits;
  std::int64_t int_len = -1;
  for (char ch : mantissa_digits) {
    if (ch == '.') {
      if (int_len >= 0) throw detail::format_error("more than one radix point");
      int_len = static_cast<std::int64_t>(digits.size());
      continue;
    }
    const int d = detail::digit_value(ch);
    if (d < 0 || d >= c.base()) throw detail::format_error(std::string("invalid digit '") + ch + "'");
    digits.push_back(ch);
  }
  if (digits.empty()) throw detail::format_error("empty mantissa");
  if (int_len < 0) int_len = 1;
  const std::size_t lead = digits.find_first_not_of('0');
  if (lead == std::string::npos) return GrossFloat::zero(cfg);
  // Value of the first digit position is beta^(exponent + int_len - 1).
  const std::int64_t top = exponent + int_len - 1;
  const int w = c.chunk_width();
  const std::size_t nchunks = (digits.size() + w - 1) / w;
  RawAccumulator raw{sign, top, 0, std::vector<Wide>(nchunks, 0)};
  for (std::size_t i = 0; i < digits.size(); ++i)
    raw.wide[i / w] += static_cast<Wide>(detail::digit_value(digits[i])) * c.pow(c.t() - static_cast<int>(i % w));
  const std::size_t given = (digits.size() - lead + w - 1) / w;
  Normalized n = normalize_full(std::move(raw), cfg, c.max_section(), given, c.rounding());
  if (n.report.underflow) throw ArithmeticError(ArithmeticError::Kind::overflow, "exponent below range");
  return std::move(n.value);
}

/// Finite decimal with optional exponent ("-12.5e-3"), rounded once.
inline GrossFloat from_decimal_string(std::string_view text, const ConfigPtr& cfg) {
  std::size_t i = 0;
  int sign = 1;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) sign = text[i++] == '-' ? -1 : 1;
  BigInt mant = 0;
  std::int64_t frac = 0;
  bool point = false;
  bool any = false;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '.' && !point) {
      point = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      mant = mant * 10 + (ch - '0');
      any = true;
      if (point) ++frac;
    } else {
      break;
    }
  }
  if (!any) throw detail::format_error("not a decimal number: '" + std::string(text) + "'");
  std::int64_t exp10 = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    int es = 1;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) es = text[i++] == '-' ? -1 : 1;
    bool edig = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      exp10 = exp10 * 10 + (text[i] - '0');
      edig = true;
      if (exp10 > 1000000) throw ArithmeticError(ArithmeticError::Kind::overflow, "decimal exponent too large");
    }
    if (!edig) throw detail::format_error("missing exponent digits");
    exp10 *= es;
  }
  if (i != text.size()) throw detail::format_error("trailing characters in '" + std::string(text) + "'");
  exp10 -= frac;
  BigInt num = mant;
  BigInt den = 1;
  const BigInt ten = 10;
  if (exp10 >= 0) {
    num *= boost::multiprecision::pow(ten, static_cast<unsigned>(exp10));
  } else {
    den = boost::multiprecision::pow(ten, static_cast<unsigned>(-exp10));
  }
  return detail::from_rational(sign, num, den, cfg, cfg->max_section());
}

/// Decimal rendering with `digits` significant digits (round half even).
/// Trailing zeros are dropped; scientific notation outside 1e-6..1e21.
inline std::string to_decimal_string(const GrossFloat& x, int digits) {
  if (x.is_zero()) return "0";
  if (digits < 1) digits = 1;
  const ExactValue v = exact_value(x);
  const BigInt ten = 10;
  auto pow10 = [&](std::int64_t k) { return boost::multiprecision::pow(ten, static_cast<unsigned>(k)); };
  // 10^e <= num/den < 10^(e+1)
  std::int64_t e = static_cast<std::int64_t>(
      std::floor((static_cast<double>(msb(v.num)) - static_cast<double>(msb(v.den))) * 0.30102999566398120));
  auto ge_pow10 = [&](std::int64_t k) {
    return k >= 0 ? v.num >= v.den * pow10(k) : v.num * pow10(-k) >= v.den;
  };
  while (!ge_pow10(e)) --e;
  while (ge_pow10(e + 1)) ++e;

  auto scaled_round = [&](std::int64_t exp) {
    const std::int64_t s = digits - 1 - exp;
    BigInt n = v.num;
    BigInt d = v.den;
    if (s >= 0) {
      n *= pow10(s);
    } else {
      d *= pow10(-s);
    }
    BigInt q = n / d;
    const BigInt r2 = (n - q * d) * 2;
    if (r2 > d || (r2 == d && (q & 1) != 0)) ++q;
    return q;
  };
  BigInt q = scaled_round(e);
  if (q >= pow10(digits)) {
    ++e;
    q = scaled_round(e);
  }
  std::string ds = q.str();
  while (ds.size() > 1 && ds.back() == '0') ds.pop_back();

  std::string out = v.sign < 0 ? "-" : "";
  if (e >= -6 && e <= 20) {
    if (e < 0) {
      out += "0." + std::string(static_cast<std::size_t>(-e - 1), '0') + ds;
    } else if (static_cast<std::int64_t>(ds.size()) <= e + 1) {
      out += ds + std::string(static_cast<std::size_t>(e + 1) - ds.size(), '0');
    } else {
      out += ds.substr(0, static_cast<std::size_t>(e) + 1) + "." + ds.substr(static_cast<std::size_t>(e) + 1);
    }
  } else {
    out += ds.substr(0, 1);
    if (ds.size() > 1) out += "." + ds.substr(1);
    out += (e < 0 ? "e-" : "e+");
    const std::string es = std::to_string(e < 0 ? -e : e);
    out += (es.size() < 2 ? "0" : "") + es;
  }
  return out;
}

/// Parses "+2^0 : 1.110|1.010|1.110", "2^-3*1.11111001011", "0", or a
/// plain decimal number. The chunk form must match the configuration's
/// chunk width and is exact; the other forms round per the configuration.
inline GrossFloat parse_literal(std::string_view text, const ConfigPtr& cfg) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw detail::format_error("empty literal");
  const std::size_t caret = s.find('^');
  if (caret == std::string::npos) return from_decimal_string(s, cfg);

  std::size_t i = 0;
  int sign = 1;
  if (s[i] == '+' || s[i] == '-') sign = s[i++] == '-' ? -1 : 1;
  const std::string base_text = s.substr(i, caret - i);
  if (base_text != std::to_string(cfg->base()))
    throw detail::format_error("literal base " + base_text + " does not match configuration");
  i = caret + 1;
  std::size_t end = i;
  if (end < s.size() && (s[end] == '+' || s[end] == '-')) ++end;
  while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
  if (end == i) throw detail::format_error("missing exponent in '" + s + "'");
  std::int64_t exponent = 0;
  try {
    exponent = std::stoll(s.substr(i, end - i));
  } catch (const std::out_of_range&) {
    throw ArithmeticError(ArithmeticError::Kind::overflow, "exponent out of range");
  }
  if (end >= s.size() || (s[end] != ':' && s[end] != '*')) throw detail::format_error("expected ':' or '*' after exponent");
  const bool chunked = s[end] == ':';
  const std::string body = s.substr(end + 1);

  if (!chunked) return from_binary_string(sign, exponent, body, cfg);

  const ArithConfig& c = *cfg;
  std::vector<Chunk> chunks;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::size_t bar = std::min(body.find('|', pos), body.size());
    const std::string tok = body.substr(pos, bar - pos);
    if (tok.size() != static_cast<std::size_t>(c.chunk_width()) + 1 || tok[1] != '.')
      throw detail::format_error("chunk '" + tok + "' is not " + std::to_string(c.chunk_width()) + " digits d.ddd");
    Chunk v = 0;
    for (std::size_t k = 0; k < tok.size(); ++k) {
      if (k == 1) continue;
      const int d = detail::digit_value(tok[k]);
      if (d < 0 || d >= c.base()) throw detail::format_error(std::string("invalid digit '") + tok[k] + "'");
      v = v * static_cast<Chunk>(c.base()) + static_cast<Chunk>(d);
    }
    chunks.push_back(v);
    pos = bar + 1;
  }
  if (chunks.size() > static_cast<std::size_t>(c.max_section()) + 1)
    throw detail::format_error("literal has more chunks than the configuration allows");
  if (chunks.front() < c.pow(c.t())) throw detail::format_error("leading digit must be nonzero");
  if (exponent > c.exponent_max() || exponent < c.exponent_min())
    throw ArithmeticError(ArithmeticError::Kind::overflow, "exponent out of range");
  return GrossFloat(cfg, sign, exponent, std::move(chunks));
}

}  // namespace dynprec
