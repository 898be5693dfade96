#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nonlocal/limits.hpp"

namespace nonlocal {

/// One named measurement against a tolerance.
struct Check {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<", "<=", ">=", "flag" ...
  std::string note;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  std::vector<std::string> log;  // reported, not asserted
  double seconds = 0.0;

  CriterionResult() = default;
  CriterionResult(int i, std::string t) : id(i), title(std::move(t)) {}

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }
};

struct VerifyConfig {
  std::size_t N = 256;
  std::size_t N_fine = 512;
  double s = 0.75;
  std::uint64_t seed = 1;
};

namespace detail {

inline Check below(std::string name, double measured, double threshold, std::string note = {}) {
  return {std::move(name), measured < threshold, measured, threshold, "<", std::move(note)};
}

inline Check at_most(std::string name, double measured, double threshold, std::string note = {}) {
  return {std::move(name), measured <= threshold, measured, threshold, "<=", std::move(note)};
}

inline Check flag(std::string name, bool ok, double measured = 0.0, std::string note = {}) {
  return {std::move(name), ok, measured, 0.0, "flag", std::move(note)};
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

inline DomainSpec unit_interval() { return make_domain(DomainKind::Interval, 1, 1.0); }

inline GridFunction unit_random(const GridPtr& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  GridFunction f = sample(g, [&](double, double) { return nd(rng); });
  f.values /= weighted_norm(f, NormSpec::l2());
  return f;
}

// phi_1 / delta^gamma over the grid: {min, max}.
inline std::pair<double, double> phi1_bracket(const DiscreteModel& m) {
  const GridFunction p = m.spectrum.phi(1);
  const Eigen::ArrayXd q = p.values.array() / delta_of(*m.grid).array().pow(m.op.gamma);
  return {q.minCoeff(), q.maxCoeff()};
}

}  // namespace detail

/// Kernel exactness and symmetry.
inline CriterionResult criterion_1(const VerifyConfig& cfg) {
  CriterionResult c{1, "kernel exactness"};
  const auto half = make_operator(OperatorKind::RFL, 0.5, detail::unit_interval());
  const double exact = std::log(2.0 + std::sqrt(3.0)) / pi;
  c.checks.push_back(detail::below("G0(0,0.5) at s=1/2", std::abs(green_function(half, 0.0, 0.5) - exact), 1e-10));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-0.999, 0.999);
  for (double s : {0.5, cfg.s}) {
    const auto op = make_operator(OperatorKind::RFL, s, detail::unit_interval());
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const double x = u(rng), y = u(rng);
      if (x == y) continue;
      const double a = green_function(op, x, y), b = green_function(op, y, x);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
    c.checks.push_back(detail::below("symmetry s=" + detail::fmt(s), worst, 1e-12, "relative, 1000 pairs"));
  }
  return c;
}

/// M(1) (1-x^2)^{1-s} is constant.
inline CriterionResult criterion_2(const VerifyConfig& cfg) {
  CriterionResult c{2, "Martin harmonic identity"};
  const auto op = make_operator(OperatorKind::RFL, cfg.s, detail::unit_interval());
  const GridPtr g = build_grid(op.domain, cfg.N);
  const GridFunction m1 = martin_apply(op, g, BoundaryData::constant(1.0));
  Eigen::ArrayXd q(static_cast<Eigen::Index>(g->size()));
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double d = g->delta[i];
    q[static_cast<Eigen::Index>(i)] = m1[i] * std::pow(d * (2.0 - d), 1.0 - op.s);
  }
  const double mean = q.mean();
  const double sd = std::sqrt((q - mean).square().mean());
  c.checks.push_back(detail::below("coefficient of variation", sd / mean, 1e-8));
  c.log.push_back("M(1) (1-x^2)^{1-s} = " + detail::fmt(mean));
  return c;
}

/// SFL eigenvalues against ((k pi / 2)^2)^s.
inline CriterionResult criterion_3(const VerifyConfig& cfg) {
  CriterionResult c{3, "SFL spectrum"};
  const auto op = make_operator(OperatorKind::SFL, cfg.s, detail::unit_interval(), static_cast<int>(cfg.N));
  const DiscreteModel m = build_model(op, cfg.N, 1.0);
  double worst = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double exact = std::pow(dirichlet_eigenvalue(1.0, k), op.s);
    worst = std::max(worst, std::abs(m.spectrum.lambda(static_cast<std::size_t>(k)) - exact) / exact);
  }
  c.checks.push_back(detail::below("max relative error k<=10", worst, 1e-6, "uniform grid, M = N"));
  return c;
}

/// Orthonormality, positivity of phi_1 and the phi_1 / delta^gamma bracket.
inline CriterionResult criterion_4(const VerifyConfig& cfg) {
  CriterionResult c{4, "orthonormality and positivity"};
  const auto op = make_operator(OperatorKind::RFL, cfg.s, detail::unit_interval());
  const DiscreteModel m = build_model(op, cfg.N);
  const Eigen::MatrixXd& v = m.spectrum.eigenvectors;
  const Eigen::MatrixXd gram = v.transpose() * weights_of(*m.grid).asDiagonal() * v;
  const double gres = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  c.checks.push_back(detail::below("Gram residual", gres, 1e-8, "all retained modes"));
  const Eigen::VectorXd p1 = v.col(0);
  c.checks.push_back(detail::flag("min phi_1 >= -1e-8 max phi_1", p1.minCoeff() >= -1e-8 * p1.maxCoeff(),
                                  p1.minCoeff() / p1.maxCoeff()));
  const DiscreteModel fine = build_model(op, cfg.N_fine);
  const auto [lo0, hi0] = detail::phi1_bracket(m);
  const auto [lo1, hi1] = detail::phi1_bracket(fine);
  c.checks.push_back(detail::below("bracket min change", std::abs(lo1 / lo0 - 1.0), 0.25));
  c.checks.push_back(detail::below("bracket max change", std::abs(hi1 / hi0 - 1.0), 0.25));
  c.log.push_back("phi_1/delta^gamma in [" + detail::fmt(lo0) + ", " + detail::fmt(hi0) + "] at N=" +
                  std::to_string(cfg.N) + ", [" + detail::fmt(lo1) + ", " + detail::fmt(hi1) + "] at N=" +
                  std::to_string(cfg.N_fine));
  return c;
}

/// Integration by parts, Neumann route agreement and the notion residuals.
/// Data are drawn with unit L2 norm.
inline CriterionResult criterion_5(const VerifyConfig& cfg) {
  CriterionResult c{5, "operator identities"};
  const auto op = make_operator(OperatorKind::RFL, cfg.s, detail::unit_interval());
  const DiscreteModel m = build_model(op, cfg.N);
  const SpectralData& sd = m.spectrum;
  const double l1 = sd.lambda(1);
  std::mt19937_64 rng(cfg.seed);

  const LambdaContext half = lambda_context(sd, 0.5 * l1);
  double ibp_l = 0.0, ibp_0 = 0.0;
  for (int t = 0; t < 100; ++t) {
    const GridFunction f = detail::unit_random(m.grid, rng), g = detail::unit_random(m.grid, rng);
    ibp_l = std::max(ibp_l, std::abs(inner(f, apply_Glambda(sd, half, g)) - inner(g, apply_Glambda(sd, half, f))));
    ibp_0 = std::max(ibp_0, std::abs(inner(f, apply_G0(m.kernel, g)) - inner(g, apply_G0(m.kernel, f))));
  }
  c.checks.push_back(detail::below("by parts G_lambda", ibp_l, 1e-9, "lambda = 0.5 lambda_1, 100 pairs"));
  c.checks.push_back(detail::below("by parts G_0", ibp_0, 1e-9, "100 pairs"));

  double agree = 0.0;
  NotionResiduals worst_s, worst_n;
  auto fold = [](NotionResiduals& w, const NotionResiduals& r) {
    w.r1 = std::max(w.r1, r.r1);
    w.r5 = std::max(w.r5, r.r5);
    w.r6 = std::max(w.r6, r.r6);
  };
  for (int t = 0; t < 10; ++t) {
    const GridFunction f = detail::unit_random(m.grid, rng);
    const GridFunction us = apply_Glambda(sd, half, f), un = apply_Glambda_neumann(m.kernel, half, f);
    agree = std::max(agree, weighted_norm(GridFunction{m.grid, us.values - un.values}, NormSpec::l2()));
    fold(worst_s, notion_residuals(m, half, us, f));
    fold(worst_n, notion_residuals(m, half, un, f));
  }
  c.checks.push_back(detail::below("Neumann vs spectral", agree, 1e-8, "lambda = 0.5 lambda_1, 10 draws"));
  for (const auto& [tag, w] : {std::pair{"spectral", worst_s}, std::pair{"Neumann", worst_n}}) {
    c.checks.push_back(detail::below(std::string("r1 ") + tag, w.r1, 1e-8));
    c.checks.push_back(detail::below(std::string("r5 ") + tag, w.r5, 1e-8));
    c.checks.push_back(detail::below(std::string("r6 ") + tag, w.r6, 1e-8));
  }
  c.log.push_back("lambda_max / lambda_1 = " + detail::fmt(sd.eigenvalues.maxCoeff() / l1) +
                  " (r6 rounding floor scales with it)");
  return c;
}

/// Maximum principle and its negative control.
inline CriterionResult criterion_6(const VerifyConfig& cfg) {
  CriterionResult c{6, "maximum principle"};
  const auto op = make_operator(OperatorKind::RFL, cfg.s, detail::unit_interval());
  const DiscreteModel m = build_model(op, cfg.N);
  const double l1 = m.spectrum.lambda(1);
  for (double lam : {-5.0, 0.0, 0.9 * l1, 0.99 * l1}) {
    const auto rep = check_max_principle(m, lambda_context(m.spectrum, lam), 100, cfg.seed);
    c.checks.push_back(detail::flag("lambda=" + detail::fmt(lam) + " 100 trials", rep.failures == 0,
                                    rep.worst_ratio, "worst min/max"));
  }
  const double mid = 0.5 * (l1 + m.spectrum.lambda(2));
  const GridFunction u = apply_Glambda(m.spectrum, lambda_context(m.spectrum, mid), m.spectrum.phi(1));
  c.checks.push_back(detail::flag("negative control f=phi_1 in (lambda_1, lambda_2)", u.values.minCoeff() < 0.0,
                                  u.values.minCoeff()));
  return c;
}

inline CriterionResult criterion_7(const VerifyConfig& cfg) {
  CriterionResult c{7, "Poincare inequality"};
  const auto op = make_operator(OperatorKind::RFL, cfg.s, detail::unit_interval());
  const DiscreteModel m = build_model(op, cfg.N);
  const auto rep = check_poincare(m, 100, cfg.seed);
  c.checks.push_back(detail::flag("ratio <= 1 + 1e-8 on 100 trials", rep.failures == 0, rep.max_ratio));
  c.checks.push_back(detail::below("equality at phi_1", rep.extremal_defect, 1e-8));
  return c;
}

/// ||u_perp delta^gamma||_L1 stays in a narrow band as lambda -> lambda_1.
inline CriterionResult criterion_8(const VerifyConfig& cfg) {
  CriterionResult c{8, "uniform estimate on E-perp"};
  const auto op = make_operator(OperatorKind::RFL, cfg.s, detail::unit_interval());
  const DiscreteModel m = build_model(op, cfg.N);
  const SpectralData& sd = m.spectrum;
  const double l1 = sd.lambda(1);
  const GridFunction raw = sample(m.grid, [&](double, double d) { return std::pow(d, op.gamma); });
  const GridFunction fp = project_perp(sd, lambda_context(sd, 0.5 * l1), raw);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double k : {0.5, 0.9, 0.99, 0.999}) {
    const GridFunction u = apply_Glambda_perp(sd, lambda_context(sd, k * l1), fp);
    const double v = weighted_norm(u, NormSpec::l1_delta(op.gamma), op.gamma);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  c.checks.push_back(detail::at_most("max/min", hi / lo, 1.1, "f = (delta^gamma) projected off phi_1"));
  return c;
}

/// Case (b) sweep toward lambda_1 with g = 0, h = 1.
inline CriterionResult criterion_9(const VerifyConfig& cfg) {
  CriterionResult c{9, "Fredholm blow-up rate"};
  const auto op = make_operator(OperatorKind::RFL, 0.6, detail::unit_interval());
  const DiscreteModel m = build_model(op, cfg.N);
  const SpectralData& sd = m.spectrum;
  const double l1 = sd.lambda(1);
  const BoundaryData h = BoundaryData::constant(1.0);
  const GridFunction g = constant(m.grid, 0.0);
  const GridFunction phi1 = sd.phi(1);
  const double target = std::abs(l1 * inner(martin_apply(op, m.grid, h), phi1));

  const SolveReport r = solve_large(m, lambda_context(sd, 0.999 * l1), g, h);
  const double rate = std::abs(inner(r.v, phi1)) * (l1 - 0.999 * l1);
  c.checks.push_back(detail::below("rate error at 0.999 lambda_1", std::abs(rate - target) / target, 1e-3));

  std::vector<double> lams;
  for (int k = 1; k <= 5; ++k) lams.push_back(l1 * (1.0 - std::pow(10.0, -k)));
  const SweepReport sw = sweep_lambda(m, g, h, 1, lams);
  bool mono = true;
  for (std::size_t k = 1; k < sw.rows.size(); ++k) mono = mono && sw.rows[k].sup_K_Aplus > sw.rows[k - 1].sup_K_Aplus;
  c.checks.push_back(detail::flag("sup over K cap A+ increasing", mono, sw.rows.back().sup_K_Aplus));
  std::size_t first10 = sw.rows.size(), first100 = sw.rows.size();
  for (std::size_t k = 0; k < sw.rows.size(); ++k) {
    if (first10 == sw.rows.size() && sw.rows[k].inf_v > 10.0) first10 = k;
    if (first100 == sw.rows.size() && sw.rows[k].inf_v > 100.0) first100 = k;
  }
  c.checks.push_back(detail::flag("inf v exceeds 10", first10 < sw.rows.size(), sw.rows.back().inf_v));
  c.checks.push_back(detail::flag("inf v exceeds 100 afterwards", first100 < sw.rows.size() && first100 >= first10,
                                  sw.rows.back().inf_v));
  std::string row = "inf v along 1-lambda/lambda_1 = 1e-1..1e-5:";
  for (const auto& x : sw.rows) row += " " + detail::fmt(x.inf_v);
  c.log.push_back(row + " (s = 0.6)");
  return c;
}

/// Case (a): pre-projected g, h = 0; the same limit from both sides.
inline CriterionResult criterion_10(const VerifyConfig& cfg) {
  CriterionResult c{10, "Fredholm convergence case (a)"};
  const auto op = make_operator(OperatorKind::RFL, cfg.s, detail::unit_interval());
  const DiscreteModel m = build_model(op, cfg.N);
  const SpectralData& sd = m.spectrum;
  const double l1 = sd.lambda(1);
  const GridFunction one = constant(m.grid, 1.0);
  const GridFunction gp{m.grid, one.values - project_group(sd, 1, one).values};
  const auto fr = fredholm_diagnose(m, gp, BoundaryData{}, 1);
  c.checks.push_back(detail::flag("projection vanishes", fr.converges, fr.projection_L2));
  const GridFunction limit = detail::spectral_sum(sd, coefficients(sd, gp), l1, sd.group_of(1).second, sd.size());
  for (double sgn : {-1.0, 1.0}) {
    const SolveReport r = solve_dirichlet(m, lambda_context(sd, l1 * (1.0 + sgn * 1e-4)), gp);
    const double d = weighted_norm(GridFunction{m.grid, r.v.values - limit.values}, NormSpec::l1_delta(op.gamma),
                                   op.gamma);
    c.checks.push_back(detail::below(sgn < 0 ? "distance from below" : "distance from above", d, 1e-4));
  }
  return c;
}

/// s -> 1: ball Martin kernel, SFL ladder, vanishing boundary exponent.
inline CriterionResult criterion_11(const VerifyConfig& cfg) {
  CriterionResult c{11, "limit s -> 1"};
  {
    const auto ball = make_domain(DomainKind::Ball, 3, 1.0);
    const auto op = make_operator(OperatorKind::RFL, 0.995, ball);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto direction = [&] {
      Point p{nd(rng), nd(rng), nd(rng)};
      const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      for (double& x : p) x /= n;
      return p;
    };
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const Point z = direction();
      Point y = direction();
      const double rho = 0.75 * std::cbrt(u(rng));
      for (double& x : y) x *= rho;
      const double d = rfl_martin_kernel_ball(op, z, y), p = poisson_kernel_classical(ball, z, y);
      worst = std::max(worst, std::abs(d - p) / p);
    }
    c.checks.push_back(detail::below("ball n=3 Martin vs Poisson at s=0.995", worst, 0.02, "|y| <= 0.75, 200 pairs"));
  }
  const std::vector<double> ladder{0.7, 0.8, 0.9, 0.95, 0.99};
  {
    double prev = std::numeric_limits<double>::infinity();
    bool mono = true;
    std::string row = "|lambda_1(s) - pi^2/4|:";
    for (double s : ladder) {
      const auto op = make_operator(OperatorKind::SFL, s, detail::unit_interval(), static_cast<int>(cfg.N));
      const DiscreteModel m = build_model(op, cfg.N, 1.0);
      const double gap = std::abs(m.spectrum.lambda(1) - 0.25 * pi * pi);
      mono = mono && gap < prev;
      prev = gap;
      row += " " + detail::fmt(gap);
    }
    c.checks.push_back(detail::flag("SFL lambda_1 gap decreasing", mono, prev));
    c.log.push_back(row);
  }
  {
    OperatorFamily fam{OperatorKind::RFL, detail::unit_interval(), cfg.N};
    const auto rep = large_solution_limit_s(fam, ladder, 0.0, [](double, double) { return 0.0; },
                                            BoundaryData::constant(1.0));
    bool mono = true;
    std::string row = "boundary fit:";
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
      row += " " + detail::fmt(rep.rows[k].boundary_fit);
      if (k) mono = mono && std::abs(rep.rows[k].boundary_fit) < std::abs(rep.rows[k - 1].boundary_fit);
    }
    c.checks.push_back(detail::flag("|fit| decreasing along the ladder", mono));
    c.checks.push_back(detail::below("|fit| at s=0.99", std::abs(rep.rows.back().boundary_fit), 0.02));
    c.log.push_back(row);
  }
  return c;
}

/// Weighted trace of M(h) and the boundary constant, reported against both
/// candidate closed forms.
inline CriterionResult criterion_12(const VerifyConfig& cfg) {
  CriterionResult c{12, "weighted trace"};
  const auto op = make_operator(OperatorKind::RFL, cfg.s, detail::unit_interval());
  const GridPtr g = build_grid(op.domain, cfg.N_fine);
  const BoundaryData h{2.0, 5.0};
  const GridFunction v = martin_apply(op, g, h);
  const auto tm = weighted_trace(op, v, -1.0), tp = weighted_trace(op, v, 1.0);
  c.checks.push_back(detail::below("B M(h)(-1) vs 2", std::abs(tm.value - 2.0), 1e-3));
  c.checks.push_back(detail::below("B M(h)(+1) vs 5", std::abs(tp.value - 5.0), 1e-3));
  const double s = op.s, gs2 = std::pow(std::tgamma(s), 2);
  const double measured = martin_boundary_constant(op, g, 1.0).value;
  const double k1 = 1.0 / (s * gs2), k2 = 1.0 / (s * s * gs2);
  const double e1 = std::abs(measured / k1 - 1.0), e2 = std::abs(measured / k2 - 1.0);
  c.log.push_back("lim delta^{1-s} M(1) = " + detail::fmt(measured) + "; 1/(s Gamma(s)^2) = " + detail::fmt(k1) +
                  " (rel " + detail::fmt(e1) + "); 1/Gamma(1+s)^2 = " + detail::fmt(k2) + " (rel " +
                  detail::fmt(e2) + "); closer: " + (e1 < e2 ? "1/(s Gamma(s)^2)" : "1/Gamma(1+s)^2"));
  const auto te = weighted_trace(op, martin_apply(op, g, BoundaryData::constant(1.0)), 1.0, TraceMode::RflExplicit);
  c.log.push_back("explicit-mode trace of M(1) = " + detail::fmt(te.value));
  return c;
}

using CriterionFn = std::function<CriterionResult(const VerifyConfig&)>;

inline const std::vector<CriterionFn>& criteria() {
  static const std::vector<CriterionFn> all{criterion_1, criterion_2, criterion_3,  criterion_4,
                                            criterion_5, criterion_6, criterion_7,  criterion_8,
                                            criterion_9, criterion_10, criterion_11, criterion_12};
  return all;
}

/// Runs one criterion, timing it; library exceptions become a failed check.
inline CriterionResult run_criterion(int id, const VerifyConfig& cfg) {
  if (id < 1 || id > static_cast<int>(criteria().size())) throw InvalidArgument("run_criterion: unknown id");
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = criteria()[static_cast<std::size_t>(id - 1)](cfg);
  } catch (const std::exception& e) {
    r.id = id;
    r.title = "criterion " + std::to_string(id);
    r.checks.push_back(detail::flag("completed without error", false, 0.0, e.what()));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace nonlocal
