#pragma once

#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nonlocal/io.hpp"
#include "nonlocal/verify.hpp"

namespace nonlocal::cli {

enum ExitCode : int { Ok = 0, VerifyFailed = 1, BadConfig = 2, NumericFailure = 3, Singular = 4 };

struct RunConfig {
  std::string op = "rfl";
  double s = 0.75;
  std::string domain = "interval";
  int n = 1;
  double r = 1.0;
  std::size_t N = 256;
  double grade = 2.0;
  int M = 0;  // SFL truncation; 0 means N
  std::optional<double> lambda;
  std::vector<double> lambda_list;
  std::vector<double> s_list{0.7, 0.8, 0.9, 0.95, 0.99};
  std::string g = "zero";
  std::vector<double> h;  // one value (both ends / sphere) or two (-r, +r)
  std::size_t index = 1;
  double K_frac = default_K_fraction;
  std::string out = ".";
  std::uint64_t seed = 1;
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{{"op", c.op},       {"s", c.s},          {"domain", c.domain}, {"n", c.n},
                   {"r", c.r},         {"N", c.N},          {"grade", c.grade},   {"M", c.M},
                   {"g", c.g},         {"h", c.h},          {"index", c.index},   {"K_frac", c.K_frac},
                   {"seed", c.seed},   {"s_list", c.s_list}, {"lambda_list", c.lambda_list}};
  j["lambda"] = c.lambda ? nlohmann::json(*c.lambda) : nlohmann::json(nullptr);
  return j;
}

inline OperatorKind parse_kind(const std::string& s) {
  if (s == "rfl") return OperatorKind::RFL;
  if (s == "sfl") return OperatorKind::SFL;
  if (s == "classical") return OperatorKind::Classical;
  throw InvalidArgument("unknown operator '" + s + "'");
}

inline DomainSpec parse_domain(const RunConfig& c) {
  if (c.domain == "interval") return make_domain(DomainKind::Interval, c.n, c.r);
  if (c.domain == "ball") return make_domain(DomainKind::Ball, c.n, c.r);
  throw InvalidArgument("unknown domain '" + c.domain + "'");
}

inline OperatorSpec operator_of(const RunConfig& c) {
  const int m = c.M > 0 ? c.M : static_cast<int>(c.N);
  return make_operator(parse_kind(c.op), c.s, parse_domain(c), m);
}

inline BoundaryData boundary_of(const RunConfig& c, double fallback) {
  if (c.h.empty()) return BoundaryData::constant(fallback);
  if (c.h.size() == 1) return BoundaryData::constant(c.h[0]);
  if (c.h.size() == 2) return BoundaryData{c.h[0], c.h[1]};
  throw InvalidArgument("--h takes one or two values");
}

namespace detail {

inline std::optional<double> call_arg(const std::string& spec, const std::string& name) {
  if (spec.rfind(name + "(", 0) != 0 || spec.back() != ')') return std::nullopt;
  const std::string inner = spec.substr(name.size() + 1, spec.size() - name.size() - 2);
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(inner, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("bad argument in profile '" + spec + "'");
  }
  if (used != inner.size()) throw InvalidArgument("bad argument in profile '" + spec + "'");
  return v;
}

}  // namespace detail

/// Named data profiles: zero, one, delta_pow(a), eigmode(j), or a path to a
/// two-column (x, value) table.
inline GridFunction profile(const std::string& spec, const DiscreteModel& m) {
  if (spec == "zero") return constant(m.grid, 0.0);
  if (spec == "one") return constant(m.grid, 1.0);
  if (auto a = detail::call_arg(spec, "delta_pow")) {
    const double lim = -1.0 - m.op.gamma;
    if (!(*a > lim)) throw InvalidArgument("delta_pow exponent must exceed -1 - gamma");
    return sample(m.grid, [&](double, double d) { return std::pow(d, *a); });
  }
  if (auto j = detail::call_arg(spec, "eigmode")) {
    if (*j < 1 || *j != std::floor(*j) || *j > static_cast<double>(m.spectrum.size()))
      throw InvalidArgument("eigmode index out of range");
    return m.spectrum.phi(static_cast<std::size_t>(*j));
  }
  if (std::filesystem::exists(spec)) {
    const auto table = io::read_table(spec);
    return sample(m.grid, [&](double x, double) { return io::interpolate(table, x); });
  }
  throw InvalidArgument("unknown g profile '" + spec + "'");
}

inline std::string comment_line(const OperatorSpec& op, std::size_t N) {
  return "kind=" + to_string(op.kind) + " s=" + io::format_double(op.s) + " gamma=" +
         io::format_double(op.gamma) + " N=" + std::to_string(N);
}

inline std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
  return std::filesystem::path(c.out) / name;
}

inline void write_sidecar(const RunConfig& c, const std::string& stem, const std::string& command,
                          nlohmann::json extra = nlohmann::json::object()) {
  extra["command"] = command;
  extra["config"] = to_json(c);
  io::write_json(out_path(c, stem + ".json"), extra);
}

inline DiscreteModel model_of(const RunConfig& c) { return build_model(operator_of(c), c.N, c.grade); }

inline int cmd_eigen(const RunConfig& c) {
  const DiscreteModel m = model_of(c);
  const SpectralData& sd = m.spectrum;
  io::CsvTable t;
  t.comments.push_back(comment_line(m.op, c.N));
  t.columns = {"j", "lambda"};
  for (std::size_t i = 0; i < m.grid->size(); ++i) t.columns.push_back("phi_x" + std::to_string(i + 1));
  for (std::size_t j = 1; j <= sd.size(); ++j) {
    std::vector<double> row{static_cast<double>(j), sd.lambda(j)};
    const GridFunction p = sd.phi(j);
    row.insert(row.end(), p.values.data(), p.values.data() + p.values.size());
    t.rows.push_back(std::move(row));
  }
  io::write_csv(out_path(c, "eigen.csv"), t);

  io::CsvTable grid;
  grid.comments.push_back(comment_line(m.op, c.N));
  grid.columns = {"i", "x", "delta", "weight"};
  for (std::size_t i = 0; i < m.grid->size(); ++i)
    grid.rows.push_back({static_cast<double>(i + 1), m.grid->nodes[i], m.grid->delta[i], m.grid->weights[i]});
  io::write_csv(out_path(c, "grid.csv"), grid);

  const auto [lo, hi] = nonlocal::detail::phi1_bracket(m);
  std::vector<double> gaps;
  for (std::size_t j = 1; j < std::min<std::size_t>(sd.size(), 11); ++j) gaps.push_back(sd.lambda(j + 1) - sd.lambda(j));
  write_sidecar(c, "eigen", "eigen",
                {{"lambda_1", sd.lambda(1)},
                 {"gaps", gaps},
                 {"phi1_over_delta_gamma", {{"min", lo}, {"max", hi}}},
                 {"modes", sd.size()},
                 {"discarded", sd.discarded}});
  std::cout << "lambda_1 = " << io::format_double(sd.lambda(1)) << "\n";
  return Ok;
}

inline std::vector<double> as_vector(const GridFunction& f) {
  return {f.values.data(), f.values.data() + f.values.size()};
}

inline int cmd_solve(const RunConfig& c) {
  if (!c.lambda) throw InvalidArgument("solve needs --lambda");
  const DiscreteModel m = model_of(c);
  const LambdaContext ctx = lambda_context(m.spectrum, *c.lambda);
  const SolveReport r = solve_large(m, ctx, profile(c.g, m), boundary_of(c, 0.0), c.K_frac);
  io::CsvTable t;
  t.comments.push_back(comment_line(m.op, c.N) + " lambda=" + io::format_double(ctx.lambda));
  t.columns = {"x", "delta", "v_h", "explicit", "u_perp", "v"};
  for (std::size_t i = 0; i < m.grid->size(); ++i)
    t.rows.push_back({m.grid->nodes[i], m.grid->delta[i], r.v_h[i], r.explicit_part[i], r.u_perp[i], r.v[i]});
  io::write_csv(out_path(c, "profile.csv"), t);
  write_sidecar(c, "profile", "solve");
  const nlohmann::json rep{
      {"lambda", ctx.lambda},
      {"I", ctx.I},
      {"lambda_bar", std::isfinite(ctx.lambda_bar) ? nlohmann::json(ctx.lambda_bar) : nlohmann::json(nullptr)},
      {"dist", ctx.dist},
      {"lambda_1", ctx.lambda_1},
      {"h", {r.h.minus, r.h.plus}},
      {"v_L1_dgamma", r.v_L1_dgamma},
      {"uperp_L1_dgamma", r.uperp_L1_dgamma},
      {"sup_K", r.sup_K},
      {"inf_v", r.inf_v},
      {"green_residual", r.green_residual},
      {"orth_residual", r.orth_residual},
      {"uniform_constant", r.uniform_constant},
      {"x", m.grid->nodes},
      {"g", as_vector(r.g)},
      {"v_h", as_vector(r.v_h)},
      {"explicit", as_vector(r.explicit_part)},
      {"u_perp", as_vector(r.u_perp)},
      {"v", as_vector(r.v)}};
  write_sidecar(c, "solution", "solve", rep);
  std::cout << "sup_K v = " << io::format_double(r.sup_K) << ", inf v = " << io::format_double(r.inf_v) << "\n";
  return Ok;
}

inline int cmd_sweep(const RunConfig& c) {
  const DiscreteModel m = model_of(c);
  if (c.index < 1 || c.index > m.spectrum.size()) throw InvalidArgument("--index out of range");
  const double li = m.spectrum.lambda(c.index);
  std::vector<double> lams = c.lambda_list;
  if (lams.empty())
    for (int k = 2; k <= 5; ++k) lams.push_back(li * (1.0 - std::pow(10.0, -k)));
  const GridFunction g = profile(c.g, m);
  const BoundaryData h = boundary_of(c, 1.0);
  const SweepReport rep = sweep_lambda(m, g, h, c.index, lams, c.K_frac);
  const FredholmReport fr = fredholm_diagnose(m, g, h, c.index);
  io::CsvTable t;
  t.comments.push_back(comment_line(m.op, c.N) + " i=" + std::to_string(c.index) +
                       " lambda_i=" + io::format_double(li));
  t.columns = {"lambda", "supK", "supK_Aplus", "infOmega", "uperp_L1_dgamma", "proj_i"};
  for (const auto& r : rep.rows)
    t.rows.push_back({r.lambda, r.sup_K, r.sup_K_Aplus, r.inf_v, r.uperp_L1_dgamma, r.proj_i});
  t.footer.push_back("case=" + std::string(fr.converges ? "a" : "b"));
  t.footer.push_back("fitted_constant=" + io::format_double(rep.fitted_constant));
  t.footer.push_back("spread=" + io::format_double(rep.spread));
  t.footer.push_back("uperp_band=" + io::format_double(rep.uperp_band));
  io::write_csv(out_path(c, "sweep.csv"), t);
  write_sidecar(c, "sweep", "sweep",
                {{"lambda_i", li},
                 {"case", fr.converges ? "a" : "b"},
                 {"projection_L2", fr.projection_L2},
                 {"fitted_constant", rep.fitted_constant},
                 {"spread", rep.spread},
                 {"uperp_band", rep.uperp_band}});
  std::cout << "fitted constant = " << io::format_double(rep.fitted_constant)
            << ", spread = " << io::format_double(rep.spread) << "\n";
  return Ok;
}

inline int cmd_limit_s(const RunConfig& c) {
  OperatorFamily fam{parse_kind(c.op), parse_domain(c), c.N, c.grade, c.M};
  if (fam.kind == OperatorKind::Classical) throw InvalidArgument("limit-s needs --op rfl or sfl");
  const double lambda = c.lambda.value_or(0.0);
  std::optional<std::vector<std::pair<double, double>>> table;
  DataFn g;
  if (c.g == "zero") {
    g = [](double, double) { return 0.0; };
  } else if (c.g == "one") {
    g = [](double, double) { return 1.0; };
  } else if (auto a = detail::call_arg(c.g, "delta_pow")) {
    if (!(*a > -1.0)) throw InvalidArgument("limit-s: delta_pow exponent must exceed -1");
    const double e = *a;
    g = [e](double, double d) { return std::pow(d, e); };
  } else if (std::filesystem::exists(c.g)) {
    table = io::read_table(c.g);
    g = [&table](double x, double) { return io::interpolate(*table, x); };
  } else {
    throw InvalidArgument("limit-s: unsupported g profile '" + c.g + "'");
  }
  const SLimitReport rep = large_solution_limit_s(fam, c.s_list, lambda, g, boundary_of(c, 1.0), c.K_frac);
  io::CsvTable t;
  t.comments.push_back("kind=" + to_string(fam.kind) + " N=" + std::to_string(c.N) +
                       " lambda=" + io::format_double(lambda));
  t.columns = {"s", "lambda_1", "lambda_1_gap", "kernel_dist", "sol_dist", "b", "boundary_fit", "sup_K",
               "boundary_amp"};
  for (const auto& r : rep.rows)
    t.rows.push_back({r.s, r.lambda_1, r.lambda_1_gap, r.kernel_dist, r.sol_dist, r.b, r.boundary_fit, r.sup_K,
                      r.boundary_amp});
  t.footer.push_back("limit_lambda_1=" + io::format_double(rep.limit_lambda_1));
  t.footer.push_back(std::string("monotone=") + (rep.monotone ? "1" : "0"));
  io::write_csv(out_path(c, "ladder.csv"), t);
  write_sidecar(c, "ladder", "limit-s", {{"limit_lambda_1", rep.limit_lambda_1}, {"monotone", rep.monotone}});
  return Ok;
}

inline nlohmann::json to_json(const CriterionResult& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"measured", c.measured},
                      {"threshold", c.threshold},
                      {"relation", c.relation},
                      {"note", c.note}});
  return {{"id", r.id}, {"title", r.title}, {"passed", r.passed()}, {"checks", checks}, {"log", r.log}};
}

inline std::string short_num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Prints one line per criterion; with `detail` also the individual checks.
inline void print_result(std::ostream& os, const CriterionResult& r, bool detail) {
  os << (r.passed() ? "PASS" : "FAIL") << "  C" << r.id << "  " << r.title;
  // Tightest numeric check, or the first failing one.
  const Check* key = nullptr;
  double margin = -1.0;
  for (const auto& c : r.checks) {
    if (!c.passed) {
      key = &c;
      break;
    }
    if (c.relation == "flag" || !(c.threshold > 0.0)) continue;
    if (c.measured / c.threshold > margin) {
      margin = c.measured / c.threshold;
      key = &c;
    }
  }
  if (key) {
    os << "  (" << key->name << ": " << short_num(key->measured);
    if (key->relation != "flag") os << " " << key->relation << " " << short_num(key->threshold);
    os << ")";
  }
  os << "\n";
  if (!detail) return;
  for (const auto& c : r.checks) {
    os << "      " << (c.passed ? "ok  " : "FAIL") << " " << c.name << ": " << short_num(c.measured);
    if (c.relation != "flag") os << " " << c.relation << " " << short_num(c.threshold);
    if (!c.note.empty()) os << "  [" << c.note << "]";
    os << "\n";
  }
  for (const auto& l : r.log) os << "      note: " << l << "\n";
}

inline int cmd_verify(const RunConfig& c, bool detail = true) {
  VerifyConfig vc;
  vc.N = c.N;
  vc.N_fine = 2 * c.N;
  vc.s = c.s;
  vc.seed = c.seed;
  nlohmann::json all = nlohmann::json::array();
  io::CsvTable t;
  t.comments.push_back("acceptance suite N=" + std::to_string(vc.N) + " seed=" + std::to_string(vc.seed));
  t.columns = {"criterion", "check", "passed", "measured", "threshold"};
  bool ok = true;
  for (int id = 1; id <= static_cast<int>(criteria().size()); ++id) {
    const CriterionResult r = run_criterion(id, vc);
    print_result(std::cout, r, detail);
    ok = ok && r.passed();
    all.push_back(to_json(r));
    for (std::size_t k = 0; k < r.checks.size(); ++k)
      t.rows.push_back({static_cast<double>(id), static_cast<double>(k + 1), r.checks[k].passed ? 1.0 : 0.0,
                        r.checks[k].measured, r.checks[k].threshold});
  }
  io::write_csv(out_path(c, "verify.csv"), t);
  write_sidecar(c, "verify", "verify", {{"passed", ok}, {"criteria", all}});
  return ok ? Ok : VerifyFailed;
}

/// Maps library exceptions onto the exit-code contract.
template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const SingularLambda& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Singular;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return BadConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return NumericFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return BadConfig;
  }
}

}  // namespace nonlocal::cli
