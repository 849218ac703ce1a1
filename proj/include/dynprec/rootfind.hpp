// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynprec/arithmetic.hpp"
#include "dynprec/io.hpp"
#include "dynprec/precision_control.hpp"

namespace dynprec {

/// Polynomial with coefficients in degree-descending order.
class Polynomial {
 public:
  explicit Polynomial(std::vector<GrossFloat> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) throw std::invalid_argument("polynomial needs at least one coefficient");
    if (coeffs_.size() > 1 && coeffs_.front().is_zero())
      throw std::invalid_argument("leading coefficient must be nonzero");
  }

  static Polynomial from_integers(const ConfigPtr& cfg, const std::vector<std::int64_t>& coefficients) {
    std::vector<GrossFloat> c;
    for (auto v : coefficients) c.push_back(GrossFloat::from_int(cfg, v));
    return Polynomial(std::move(c));
  }

  /// (x - 1)^5 expanded.
  static Polynomial quintic_root_one(const ConfigPtr& cfg) { return from_integers(cfg, {1, -5, 10, -10, 5, -1}); }

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<GrossFloat>& coefficients() const noexcept { return coeffs_; }

  /// Exact derivative; coefficients must be exactly representable.
  Polynomial derivative() const {
    if (degree() == 0) return Polynomial({GrossFloat::zero(coeffs_.front().config_ptr())});
    std::vector<GrossFloat> d;
    const int T = coeffs_.front().config().max_section();
    for (int i = 0; i < degree(); ++i) {
      const GrossFloat k = GrossFloat::from_int(coeffs_[i].config_ptr(), degree() - i);
      OpResult r = mul(coeffs_[i], k, T);
      if (r.report.rounded) throw ArithmeticError(ArithmeticError::Kind::domain, "derivative not exact");
      d.push_back(r.value.trimmed());
    }
    return Polynomial(std::move(d));
  }

  /// Coefficients padded with zero chunks to `chunks` chunks each.
  Polynomial padded(std::size_t chunks) const {
    std::vector<GrossFloat> c;
    for (const auto& v : coeffs_) c.push_back(v.padded(chunks));
    return Polynomial(std::move(c));
  }

 private:
  std::vector<GrossFloat> coeffs_;
};

struct HornerStep {
  /// "p*x" after a multiplication, "p*x+a" after adding the next coefficient.
  std::string label;
  GrossFloat value;
};

/// Horner evaluation. Every operation keeps up to max_section+1 chunks, so a
/// j-chunk accumulator times a 1-chunk x grows to j+1 chunks until the cap.
inline GrossFloat horner_eval(const Polynomial& poly, const GrossFloat& x, int max_section,
                              OpCounter* counter = nullptr, std::vector<HornerStep>* trace = nullptr) {
  if (max_section < 0 || max_section > x.config().max_section())
    throw ArithmeticError(ArithmeticError::Kind::domain, "precision cap out of range");
  const auto& c = poly.coefficients();
  GrossFloat p = round_to_section(c.front(), max_section, x.config().rounding());
  if (trace) trace->push_back({"p", p});
  for (std::size_t i = 1; i < c.size(); ++i) {
    p = mul(p, x, max_section, counter).value;
    if (trace) trace->push_back({"p*x", p});
    p = add(p, c[i], max_section, counter).value;
    if (trace) trace->push_back({"p*x+a", p});
  }
  return p;
}

inline GrossFloat horner_eval_derivative(const Polynomial& poly, const GrossFloat& x, int max_section,
                                         OpCounter* counter = nullptr) {
  return horner_eval(poly.derivative(), x, max_section, counter);
}

/// Fixed(q): every quantity held at q+1 chunks. Dynamic: x_k at one chunk,
/// p and p' evaluated at the current precision, raised by the error rule.
struct SolveMode {
  enum class Kind { fixed, dynamic };
  Kind kind = Kind::dynamic;
  int section = 0;

  static SolveMode fixed(int q) { return {Kind::fixed, q}; }
  static SolveMode dynamic() { return {Kind::dynamic, 0}; }
};

struct NewtonOptions {
  double tol = 1e-15;
  int max_iter = 200;
  double safety = 1.0;
  /// Consecutive non-decreasing errors at capped precision before stopping.
  int stagnation_steps = 5;
};

struct SolveStep {
  int step = 0;
  GrossFloat x;
  double err = 0;
  /// Precision used for the evaluations that produced x.
  int prec = 1;
  /// Cumulative counts of the p(x) evaluations.
  std::uint64_t cum_mults = 0;
  std::uint64_t cum_adds = 0;
  /// Cumulative counts of all work (p, p', quotient, update).
  std::uint64_t total_mults = 0;
  std::uint64_t total_adds = 0;
};

struct SolveTrace {
  enum class Termination { converged, max_iter, stagnated };

  GrossFloat x0;
  std::vector<SolveStep> steps;
  Termination termination = Termination::max_iter;

  const GrossFloat& solution() const { return steps.empty() ? x0 : steps.back().x; }
};

inline std::string to_string(SolveTrace::Termination t) {
  switch (t) {
    case SolveTrace::Termination::converged: return "converged";
    case SolveTrace::Termination::max_iter: return "max_iter";
    case SolveTrace::Termination::stagnated: return "stagnated";
  }
  return "?";
}

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// step,x_k,err_k,prec,cum_mults,cum_adds
inline void write_csv(const SolveTrace& trace, std::ostream& os) {
  os << "step,x_k,err_k,prec,cum_mults,cum_adds\n";
  for (const auto& s : trace.steps)
    os << s.step << ',' << to_decimal_string(s.x, 40) << ',' << format_g17(s.err) << ',' << s.prec << ','
       << s.cum_mults << ',' << s.cum_adds << '\n';
}

/// Newton iteration x_{k+1} = x_k - p(x_k)/p'(x_k).
inline SolveTrace newton_solve(const Polynomial& poly, const GrossFloat& x0, SolveMode mode,
                               const NewtonOptions& opt = {}) {
  if (opt.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (x0.is_zero() && poly.degree() == 0) throw std::invalid_argument("constant polynomial");
  const ArithConfig& cfg = x0.config();
  const int T = cfg.max_section();
  const bool dynamic = mode.kind == SolveMode::Kind::dynamic;
  if (!dynamic && (mode.section < 0 || mode.section > T))
    throw std::invalid_argument("fixed precision section out of range");

  // Iterate precision and the shape of the coefficients.
  const int x_section = dynamic ? 0 : mode.section;
  const std::size_t width = static_cast<std::size_t>(x_section) + 1;
  Polynomial p = dynamic ? poly : poly.padded(width);
  Polynomial dp = dynamic ? poly.derivative() : poly.derivative().padded(width);

  PrecisionState state(T, opt.safety, dynamic ? 1 : mode.section + 1);
  OpCounter p_count(false);
  OpCounter total(false);

  SolveTrace trace;
  trace.x0 = round_to_section(x0, x_section, cfg.rounding()).padded(width);
  GrossFloat x = trace.x0;
  int stagnating = 0;
  for (int k = 1; k <= opt.max_iter; ++k) {
    GrossFloat px;
    GrossFloat dpx;
    for (;;) {
      OpCounter pc(false);
      px = horner_eval(p, x, state.prec - 1, &pc);
      dpx = horner_eval(dp, x, state.prec - 1, &total);
      // A vanishing value at low precision says nothing; look closer first.
      if (dynamic && (px.is_zero() || dpx.is_zero()) && state.prec <= T) {
        p_count.merge(pc);
        total.merge(pc);
        ++state.prec;
        continue;
      }
      p_count.merge(pc);
      total.merge(pc);
      break;
    }
    if (dpx.is_zero()) {
      if (px.is_zero()) {
        // x is a root to the working precision; the step is zero.
        dpx = GrossFloat::from_int(x.config_ptr(), 1);
      } else {
        throw ArithmeticError(ArithmeticError::Kind::domain, "derivative vanishes: singular Newton step");
      }
    }
    const GrossFloat quotient = div(px, dpx, x_section, &total);
    GrossFloat next = sub(x, quotient, x_section, &total).value;
    if (!dynamic) next = next.padded(width);

    const double err = next.is_zero() ? std::numeric_limits<double>::infinity() : relative_err(next, x);
    SolveStep s{k, next, err, state.prec, p_count.grossdigit_mults(), p_count.grossdigit_adds(),
                total.grossdigit_mults(), total.grossdigit_adds()};
    trace.steps.push_back(std::move(s));
    x = std::move(next);

    const bool capped = !dynamic || state.prec > T;
    if (err < opt.tol) {
      trace.termination = SolveTrace::Termination::converged;
      return trace;
    }
    if (!state.err_history.empty() && err >= opt.safety * state.err_history.back()) {
      stagnating = capped ? stagnating + 1 : 0;
    } else {
      stagnating = 0;
    }
    if (dynamic && should_escalate(state, err)) ++state.prec;
    state.err_history.push_back(err);
    if (capped && stagnating >= opt.stagnation_steps) {
      trace.termination = SolveTrace::Termination::stagnated;
      return trace;
    }
  }
  trace.termination = SolveTrace::Termination::max_iter;
  return trace;
}

/// Inputs of the first-order estimate of a multiple root's displacement.
struct ConditioningEstimate {
  int d = 1;
  double eps = 0;
  double g_alpha = 1;
  double fd_alpha = 1;
  double delta_alpha = 0;
};

/// |delta alpha| = (d! eps |g(alpha) / f^(d)(alpha)|)^(1/d), the leading term
/// of the root of f + eps g near a d-fold root alpha of f.
inline double predict_perturbation(ConditioningEstimate& est) {
  if (est.d < 1) throw std::invalid_argument("multiplicity must be >= 1");
  if (est.fd_alpha == 0) throw std::invalid_argument("f^(d)(alpha) must be nonzero");
  double factorial = 1;
  for (int i = 2; i <= est.d; ++i) factorial *= i;
  est.delta_alpha = std::pow(factorial * std::fabs(est.eps) * std::fabs(est.g_alpha / est.fd_alpha), 1.0 / est.d);
  return est.delta_alpha;
}

inline double predict_perturbation(const ConditioningEstimate& est) {
  ConditioningEstimate copy = est;
  return predict_perturbation(copy);
}

}  // namespace dynprec
