// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: pipeline step tables, adaptive sums, the Newton
// experiment on (x-1)^5 and its figure data.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dynprec/dynprec.hpp"

namespace {

using namespace dynprec;

enum ExitCode { kOk = 0, kUsage = 1, kArithmetic = 2, kAccuracy = 3 };

struct Common {
  int base = 2;
  int t = 52;
  int T = 4;
  std::string rounding = "nearest_even";
  std::string format = "table";
  std::string out;
};

struct SolveOpts {
  std::string mode = "dynamic";
  double tol = 1e-15;
  double safety = 1.0;
  int max_iter = 200;
  std::string poly = "1,-5,10,-10,5,-1";
  std::string x0 = "2";
};

ConfigPtr make_cfg(const Common& c) {
  Rounding r;
  if (c.rounding == "nearest_even") {
    r = Rounding::nearest_even;
  } else if (c.rounding == "truncate") {
    r = Rounding::truncate;
  } else {
    throw std::invalid_argument("unknown rounding '" + c.rounding + "'");
  }
  if (c.t < 0) throw std::invalid_argument("t must be >= 0");
  return make_config(c.base, c.t + 1, c.T, r);
}

/// Writes to --out when given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

Polynomial parse_poly(const std::string& text, const ConfigPtr& cfg) {
  std::vector<GrossFloat> coeffs;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) coeffs.push_back(parse_literal(tok, cfg));
  return Polynomial(std::move(coeffs));
}

SolveMode parse_mode(const std::string& m, int T) {
  if (m == "dynamic") return SolveMode::dynamic();
  if (m == "fixed") return SolveMode::fixed(T);
  if (m.rfind("fixed:", 0) == 0) return SolveMode::fixed(std::stoi(m.substr(6)));
  throw std::invalid_argument("mode must be dynamic, fixed or fixed:<q>");
}

void print_result(std::ostream& os, const GrossFloat& v) {
  os << "result: " << v.to_literal() << "\n";
  os << "decimal: " << to_decimal_string(v, 20) << "\n";
}

int cmd_demo(const Common& c, const std::string& op, const std::vector<std::string>& operands) {
  const ConfigPtr cfg = make_cfg(c);
  const std::size_t need = op == "recip" ? 1 : 2;
  if (operands.size() != need)
    throw std::invalid_argument("demo " + op + " takes " + std::to_string(need) + " operand(s)");
  std::vector<GrossFloat> v;
  for (const auto& s : operands) v.push_back(parse_literal(s, cfg));
  const int rs = cfg->max_section();

  PipelineTrace trace;
  GrossFloat result;
  if (op == "add") {
    result = add(v[0], v[1], rs, nullptr, &trace).value;
  } else if (op == "sub") {
    result = sub(v[0], v[1], rs, nullptr, &trace).value;
  } else if (op == "mul") {
    result = mul(v[0], v[1], rs, nullptr, &trace).value;
  } else if (op == "recip") {
    result = reciprocal(v[0], rs, nullptr, &trace);
  } else if (op == "div") {
    result = div(v[0], v[1], rs);
    const GrossFloat inv = reciprocal(v[1], rs, nullptr, &trace);
    (void)inv;
  } else {
    throw std::invalid_argument("unknown demo operation '" + op + "'");
  }
  Sink sink(c.out);
  if (c.format == "csv") {
    sink.os() << trace.render_csv();
  } else {
    sink.os() << trace.render();
    print_result(sink.os(), result);
  }
  return kOk;
}

int cmd_eval_sum(const Common& c, const std::vector<std::string>& terms, double target) {
  const ConfigPtr cfg = make_cfg(c);
  std::vector<SumTerm> st;
  for (const auto& s : terms) st.push_back({parse_literal(s, cfg), 1});
  if (!(target > 0)) target = std::ldexp(1.0, -(c.t + 1));
  OpCounter counter;
  Sink sink(c.out);
  std::ostream& os = sink.os();
  try {
    const AdaptiveSumResult r = adaptive_sum(st, target, &counter);
    if (c.format == "csv") {
      os << "pass,node,section,value,error,shift,action\n";
      for (const auto& s : r.steps)
        os << s.pass << ',' << s.node << ',' << s.result_section << ',' << s.value.to_literal() << ','
           << format_g17(s.rel_error) << ',' << s.cancellation.shift_digits << ',' << s.action << '\n';
    } else {
      for (const auto& s : r.steps) {
        char err[32];
        std::snprintf(err, sizeof err, "%.3g", s.rel_error);
        os << "(" << static_cast<char>('a' + s.pass) << ") S" << s.node << " at section " << s.result_section
           << " = " << s.value.to_literal() << " | error " << err << " | " << s.action << "\n";
      }
      print_result(os, r.value);
      os << "precision: " << r.prec << "\n";
      os << "grossdigit additions/subtractions: " << counter.grossdigit_adds() << "\n";
    }
  } catch (const AccuracyExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    os << "best: " << e.best().to_literal() << " (estimated relative error " << format_g17(e.rel_error()) << ")\n";
    return kAccuracy;
  }
  return kOk;
}

NewtonOptions newton_options(const SolveOpts& s) {
  NewtonOptions o;
  o.tol = s.tol;
  o.safety = s.safety;
  o.max_iter = s.max_iter;
  return o;
}

int cmd_newton(const Common& c, const SolveOpts& s) {
  const ConfigPtr cfg = make_cfg(c);
  const Polynomial poly = parse_poly(s.poly, cfg);
  const GrossFloat x0 = parse_literal(s.x0, cfg);
  const SolveTrace tr = newton_solve(poly, x0, parse_mode(s.mode, cfg->max_section()), newton_options(s));
  Sink sink(c.out);
  std::ostream& os = sink.os();
  if (c.format == "csv") {
    write_csv(tr, os);
    return kOk;
  }
  os << "step | x_k | err_k | prec | cum_mults | cum_adds\n";
  for (const auto& st : tr.steps)
    os << st.step << " | " << to_decimal_string(st.x, 20) << " | " << format_g17(st.err) << " | " << st.prec << " | "
       << st.cum_mults << " | " << st.cum_adds << "\n";
  const GrossFloat& x = tr.solution();
  os << "termination: " << to_string(tr.termination) << "\n";
  os << "steps: " << tr.steps.size() << "\n";
  os << "solution: " << x.to_literal() << "\n";
  os << "decimal: " << to_decimal_string(x, 40) << "\n";
  if (!tr.steps.empty()) {
    const auto& last = tr.steps.back();
    os << "final err: " << format_g17(last.err) << "\n";
    os << "precision: " << last.prec << "\n";
    os << "p(x) grossdigit multiplications: " << last.cum_mults << "\n";
    os << "all grossdigit multiplications: " << last.total_mults << "\n";
  }
  return kOk;
}

void write_solve(const std::filesystem::path& p, const SolveTrace& tr) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  write_csv(tr, f);
  std::cout << "wrote " << p.string() << " (" << tr.steps.size() << " rows)\n";
}

/// Newton on (x-1)^5 in binary64 arithmetic, as a reference curve.
void write_double_run(const std::filesystem::path& p, double x0, int max_iter) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  f << "step,x_k,err_k\n";
  double x = x0;
  for (int k = 1; k <= max_iter; ++k) {
    double px = 1;
    double dpx = 5;
    for (double a : {-5.0, 10.0, -10.0, 5.0, -1.0}) px = px * x + a;
    for (double a : {-20.0, 30.0, -20.0, 5.0}) dpx = dpx * x + a;
    const double next = dpx == 0 ? x : x - px / dpx;
    const double err = std::fabs((next - x) / next);
    f << k << ',' << format_g17(next) << ',' << format_g17(err) << '\n';
    x = next;
  }
  std::cout << "wrote " << p.string() << " (" << max_iter << " rows)\n";
}

int cmd_figure(const Common& c, SolveOpts s, int figure, bool tol_given) {
  if (figure != 1 && figure != 2) throw std::invalid_argument("figure must be 1 or 2");
  // The figures continue past convergence to show the last saturation level.
  if (!tol_given) s.tol = 0;
  const std::filesystem::path dir = c.out.empty() ? std::filesystem::path(".") : std::filesystem::path(c.out);
  std::filesystem::create_directories(dir);
  Common cc = c;
  const GrossFloat x0_probe = parse_literal(s.x0, make_cfg(cc));
  NewtonOptions opt = newton_options(s);
  opt.stagnation_steps = s.max_iter;
  if (figure == 1) {
    cc.T = 0;
    const ConfigPtr cfg = make_cfg(cc);
    write_solve(dir / "fig1_emulator.csv",
                newton_solve(parse_poly(s.poly, cfg), parse_literal(s.x0, cfg), SolveMode::fixed(0), opt));
    write_double_run(dir / "fig1_double.csv", x0_probe.to_double(), s.max_iter);
    return kOk;
  }
  const ConfigPtr cfg = make_cfg(cc);
  const Polynomial poly = parse_poly(s.poly, cfg);
  const GrossFloat x0 = parse_literal(s.x0, cfg);
  for (int q = 0; q <= cfg->max_section(); ++q)
    write_solve(dir / ("fig2_fixed_q" + std::to_string(q) + ".csv"), newton_solve(poly, x0, SolveMode::fixed(q), opt));
  write_solve(dir / "fig2_dynamic.csv", newton_solve(poly, x0, SolveMode::dynamic(), opt));
  return kOk;
}

int cmd_report(const Common& c, bool newton) {
  const ConfigPtr cfg = make_cfg(c);
  Sink sink(c.out);
  std::ostream& os = sink.os();
  if (newton) {
    const Polynomial poly = Polynomial::quintic_root_one(cfg);
    const GrossFloat x0 = GrossFloat::from_int(cfg, 2);
    const SolveTrace tr = newton_solve(poly, x0, SolveMode::dynamic());
    // Re-run the p(x) evaluations of each step with a detailed counter.
    OpCounter counter;
    GrossFloat x = tr.x0;
    for (const auto& st : tr.steps) {
      horner_eval(poly, x, st.prec - 1, &counter);
      x = st.x;
    }
    counter.write_csv(os);
    return kOk;
  }
  // Predicted versus measured cost of full-retention products and sums.
  os << "op,q,p,predicted_mults,measured_mults,predicted_adds,measured_adds\n";
  const ConfigPtr wide = with_max_section(cfg, 2 * cfg->max_section() + 1);
  const Chunk top = cfg->dark_grossone() - 1;
  for (int q = 0; q <= cfg->max_section(); ++q) {
    for (int p = q; p <= cfg->max_section(); ++p) {
      const GrossFloat x(wide, 1, 0, std::vector<Chunk>(static_cast<std::size_t>(q) + 1, top));
      const GrossFloat y(wide, 1, 0, std::vector<Chunk>(static_cast<std::size_t>(p) + 1, top));
      OpCounter m;
      mul(x, y, wide->max_section(), &m);
      const auto [pm, pa] = predict_mul_cost(q, p);
      os << "mul," << q << ',' << p << ',' << pm << ',' << m.grossdigit_mults() << ',' << pa << ','
         << m.grossdigit_adds() << '\n';
      OpCounter a;
      add(x, y, wide->max_section(), &a);
      os << "add," << q << ',' << p << ",0,0," << predict_add_cost(q, p) << ',' << a.grossdigit_adds() << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic precision floating-point arithmetic on chunked significands"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file (flags take precedence)");

  Common common;
  app.add_option("--base", common.base, "digit base beta")->check(CLI::Range(2, 36));
  app.add_option("--t", common.t, "digits after the point in one chunk (chunk width t+1)")->check(CLI::NonNegativeNumber);
  app.add_option("--T", common.T, "maximum section index (T+1 chunks)")->check(CLI::NonNegativeNumber);
  app.add_option("--rounding", common.rounding, "nearest_even or truncate")
      ->check(CLI::IsMember({"nearest_even", "truncate"}));
  app.add_option("--format", common.format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
  app.add_option("--out", common.out, "output file (directory for figure)");

  auto* demo = app.add_subcommand("demo", "step table of add, sub, mul, recip or div");
  std::string demo_op;
  std::vector<std::string> demo_operands;
  demo->add_option("op", demo_op, "operation")->required()->check(CLI::IsMember({"add", "sub", "mul", "recip", "div"}));
  demo->add_option("operands", demo_operands, "literals such as '+2^0 : 1.110|1.010', '2^-3*1.111' or decimals")
      ->required();

  auto* sum = app.add_subcommand("eval-sum", "adaptive-precision signed sum");
  std::vector<std::string> sum_terms;
  double target = 0;
  sum->add_option("terms", sum_terms, "signed terms")->required();
  sum->add_option("--target", target, "relative accuracy target (default beta^-(t+1))");

  SolveOpts solve;
  auto add_solve_opts = [&solve](CLI::App* sub) {
    sub->add_option("--mode", solve.mode, "dynamic, fixed or fixed:<q>");
    sub->add_option("--tol", solve.tol, "stop when err(k) < tol");
    sub->add_option("--safety", solve.safety, "escalation safety factor s in (0, 1]");
    sub->add_option("--max-iter", solve.max_iter, "iteration limit")->check(CLI::PositiveNumber);
    sub->add_option("--poly", solve.poly, "comma-separated coefficients, highest degree first");
    sub->add_option("--x0", solve.x0, "starting point");
  };
  auto* newton = app.add_subcommand("newton", "Newton iteration with per-step trace");
  add_solve_opts(newton);
  auto* figure = app.add_subcommand("figure", "CSV data for the error curves (1: single precision, 2: all modes)");
  int figure_id = 2;
  figure->add_option("id", figure_id, "1 or 2")->required()->check(CLI::IsMember({1, 2}));
  add_solve_opts(figure);
  auto* report = app.add_subcommand("report", "operation-count report");
  bool report_newton = false;
  report->add_flag("--newton", report_newton, "per-operation breakdown of a dynamic Newton run");

  for (auto* sc : {demo, sum, newton, figure, report}) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*demo) return cmd_demo(common, demo_op, demo_operands);
    if (*sum) return cmd_eval_sum(common, sum_terms, target);
    if (*newton) return cmd_newton(common, solve);
    if (*figure) return cmd_figure(common, solve, figure_id, figure->count("--tol") > 0);
    if (*report) return cmd_report(common, report_newton);
  } catch (const ArithmeticError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ArithmeticError::Kind::accuracy_exhausted ? kAccuracy
           : e.kind() == ArithmeticError::Kind::format         ? kUsage
                                                               : kArithmetic;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kArithmetic;
  }
  return kUsage;
}
