// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynprec/arithmetic.hpp"
#include "dynprec/io.hpp"

namespace dynprec {

/// Working precision of an iteration: prec = q + 1 active chunks.
struct PrecisionState {
  int prec = 1;
  double safety = 1.0;
  int max_section = 0;
  std::vector<double> err_history;

  PrecisionState() = default;
  PrecisionState(int max_section_, double safety_ = 1.0, int prec_ = 1)
      : prec(prec_), safety(safety_), max_section(max_section_) {
    if (max_section_ < 0) throw std::invalid_argument("max section must be >= 0");
    if (!(safety_ > 0.0 && safety_ <= 1.0)) throw std::invalid_argument("safety factor must lie in (0, 1]");
    if (prec_ < 1 || prec_ > max_section_ + 1) throw std::invalid_argument("precision level out of range");
  }
};

struct CancellationReport {
  int shift_digits = 0;
  int threshold_digits = 0;
  bool triggered = false;
};

/// Half a chunk of leading digits lost counts as cancellation.
inline int default_cancellation_threshold(const ArithConfig& cfg) { return (cfg.chunk_width() + 1) / 2; }

/// An exact zero result is total cancellation.
inline CancellationReport detect_cancellation(const NormalizationReport& r, int threshold_digits) {
  CancellationReport c;
  c.shift_digits = r.shift;
  c.threshold_digits = threshold_digits;
  c.triggered = r.zero || r.shift >= threshold_digits;
  return c;
}

/// |x_k - x_{k-1}| / |x_k| evaluated at the wider operand's precision.
inline double relative_err(const GrossFloat& x_k, const GrossFloat& x_km1) {
  if (x_k.is_zero()) throw ArithmeticError(ArithmeticError::Kind::domain, "relative error with respect to zero");
  const int rs = std::max(x_k.section_index(), std::max(x_km1.section_index(), 0));
  const GrossFloat d = sub(x_k, x_km1, rs).value;
  return std::fabs(d.to_double()) / std::fabs(x_k.to_double());
}

/// True iff err_k >= s * err_{k-1} and another chunk is available.
inline bool should_escalate(const PrecisionState& state, double err_k) {
  if (state.prec > state.max_section) return false;
  if (state.err_history.empty()) return false;
  return err_k >= state.safety * state.err_history.back();
}

/// Thrown when the target accuracy is not met with every operand at full
/// precision; carries the best available result.
class AccuracyExhausted : public ArithmeticError {
 public:
  AccuracyExhausted(GrossFloat best, double rel_error)
      : ArithmeticError(Kind::accuracy_exhausted, "target accuracy not reachable at maximum precision"),
        best_(std::move(best)),
        rel_error_(rel_error) {}

  const GrossFloat& best() const noexcept { return best_; }
  double rel_error() const noexcept { return rel_error_; }

 private:
  GrossFloat best_;
  double rel_error_;
};

struct SumTerm {
  GrossFloat value;
  int sign = 1;
};

/// One accept/escalate decision of adaptive_sum.
struct SumStep {
  int pass = 0;
  /// Index of the last term folded in; node 0 is the first term alone.
  int node = 0;
  int result_section = 0;
  GrossFloat value;
  double rel_error = 0;
  CancellationReport cancellation;
  std::string action;
};

struct AdaptiveSumResult {
  GrossFloat value;
  int prec = 1;
  std::vector<int> levels;
  double rel_error = 0;
  std::vector<SumStep> steps;
};

namespace detail {

using Rational = boost::multiprecision::cpp_rational;

inline Rational to_rational(const GrossFloat& x) {
  const ExactValue v = exact_value(x);
  Rational r(v.num, v.den);
  return v.sign < 0 ? Rational(-r) : r;
}

/// |exact - s| / |s| with the conventions 0/0 = 0 and e/0 = inf.
inline double relative_gap(const Rational& exact, const GrossFloat& s) {
  const Rational sv = to_rational(s);
  const Rational gap = abs(exact - sv);
  if (gap == 0) return 0.0;
  if (sv == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(Rational(gap / abs(sv)));
}

}  // namespace detail

/// Left-to-right signed sum that starts every operand at section 0 and
/// raises the section of the operands feeding a cancellation.
///
/// Each partial result is computed with truncation at the larger of its
/// operands' precisions. The error of a partial result is measured against
/// the exact sum of the stored operands. A partial result whose
/// normalization lost at least `threshold_digits` leading digits (or that is
/// exactly zero) and whose error exceeds the target sends every operand up to
/// that node one section higher, and the sum is re-evaluated. Per-power
/// chunk sums already formed are reused, so only new powers are counted.
inline AdaptiveSumResult adaptive_sum(const std::vector<SumTerm>& terms, double target_rel_accuracy,
                                      OpCounter* counter = nullptr, int threshold_digits = -1) {
  if (terms.empty()) throw std::invalid_argument("adaptive_sum needs at least one term");
  const ConfigPtr& cfg0 = terms.front().value.config_ptr();
  const int T = cfg0->max_section();
  const ConfigPtr cfg = with_rounding(cfg0, Rounding::truncate);
  if (threshold_digits < 0) threshold_digits = default_cancellation_threshold(*cfg);

  std::vector<GrossFloat> stored;
  for (const auto& term : terms) {
    detail::check_compatible(term.value, terms.front().value);
    GrossFloat v = term.value.is_zero() ? GrossFloat::zero(cfg)
                                        : GrossFloat(cfg, term.value.sign() * (term.sign < 0 ? -1 : 1),
                                                     term.value.exponent(),
                                                     {term.value.chunks().begin(), term.value.chunks().end()});
    stored.push_back(std::move(v));
  }
  std::vector<detail::Rational> exact_partial;
  detail::Rational acc = 0;
  for (const auto& v : stored) {
    acc += detail::to_rational(v);
    exact_partial.push_back(acc);
  }

  AdaptiveSumResult out;
  out.levels.assign(stored.size(), 0);
  std::vector<AddReuseCache> caches(stored.size());
  for (int pass = 0;; ++pass) {
    GrossFloat s = section(stored[0], out.levels[0]);
    double rel = detail::relative_gap(exact_partial[0], s);
    bool restarted = false;
    for (std::size_t i = 1; i < stored.size(); ++i) {
      const GrossFloat operand = section(stored[i], out.levels[i]);
      const int rs = std::max(static_cast<int>(s.size()), out.levels[i] + 1) - 1;
      OpResult r = add(s, operand, rs, counter, nullptr, &caches[i]);
      s = std::move(r.value);
      rel = detail::relative_gap(exact_partial[i], s);

      SumStep step{pass, static_cast<int>(i), rs, s, rel, detect_cancellation(r.report, threshold_digits), ""};
      const bool can_raise =
          std::any_of(out.levels.begin(), out.levels.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                      [T](int l) { return l < T; });
      if (step.cancellation.triggered && rel > target_rel_accuracy && can_raise) {
        step.action = "improve the accuracy";
        out.steps.push_back(std::move(step));
        for (std::size_t k = 0; k <= i; ++k) out.levels[k] = std::min(out.levels[k] + 1, T);
        restarted = true;
        break;
      }
      step.action = i + 1 == stored.size() ? "final result" : "accept the result";
      out.steps.push_back(std::move(step));
    }
    if (restarted) continue;

    if (rel > target_rel_accuracy) {
      if (std::all_of(out.levels.begin(), out.levels.end(), [T](int l) { return l >= T; }))
        throw AccuracyExhausted(s, rel);
      if (!out.steps.empty() && out.steps.back().pass == pass) out.steps.back().action = "improve the accuracy";
      for (auto& l : out.levels) l = std::min(l + 1, T);
      continue;
    }
    out.value = GrossFloat(cfg0, s.sign(), s.exponent(), {s.chunks().begin(), s.chunks().end()});
    out.rel_error = rel;
    out.prec = *std::max_element(out.levels.begin(), out.levels.end()) + 1;
    return out;
  }
}

}  // namespace dynprec
