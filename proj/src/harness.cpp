#include "edg/harness.hpp"

#include "edg/basis.hpp"
#include "edg/errors.hpp"
#include "edg/quadrature.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <optional>
#include <ostream>

namespace edg {
namespace {

struct ElementMap {
  Vec2 v0;
  Eigen::Matrix2d J;
  double detJ;
};

ElementMap element_map(const Mesh& mesh, int e) {
  ElementMap m;
  m.v0 = mesh.element_vertex(e, 0);
  const Vec2 d1 = mesh.element_vertex(e, 1) - m.v0;
  const Vec2 d2 = mesh.element_vertex(e, 2) - m.v0;
  m.J << d1.x(), d2.x(), d1.y(), d2.y();
  m.detJ = m.J.determinant();
  return m;
}

Mat reference_values(const TriangleBasis& basis, const QuadratureRule& rule) {
  Mat vals(basis.size(), rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    vals.col(q) = basis.eval(rule.points[q]).values;
  return vals;
}

} // namespace

double l2_error_scalar(const Vec& coeffs, const ScalarFn& exact,
                       const Mesh& mesh, const SpaceSet& spaces) {
  if (coeffs.size() != spaces.n_scalar)
    throw UsageError("l2_error_scalar: coefficient length mismatch");
  const TriangleBasis basis(spaces.k + 1);
  const QuadratureRule rule = triangle_quadrature(2 * (spaces.k + 2) + 4);
  const Mat vals = reference_values(basis, rule);
  const int m = basis.size();

  double acc = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementMap g = element_map(mesh, e);
    const auto ce = coeffs.segment(spaces.scalar_offset(e), m);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = g.v0 + g.J * rule.points[q];
      const double d = exact(x) - ce.dot(vals.col(static_cast<int>(q)));
      acc += rule.weights[q] * g.detJ * d * d;
    }
  }
  return std::sqrt(acc);
}

double l2_error_flux(const Vec& coeffs, const VectorFn& exact,
                     const Mesh& mesh, const SpaceSet& spaces) {
  if (coeffs.size() != spaces.n_flux)
    throw UsageError("l2_error_flux: coefficient length mismatch");
  const TriangleBasis basis(spaces.k);
  const QuadratureRule rule = triangle_quadrature(2 * (spaces.k + 2) + 4);
  const Mat vals = reference_values(basis, rule);
  const int mc = basis.size();

  double acc = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementMap g = element_map(mesh, e);
    const int f0 = spaces.flux_offset(e);
    const auto cx = coeffs.segment(f0, mc);
    const auto cy = coeffs.segment(f0 + mc, mc);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = g.v0 + g.J * rule.points[q];
      const Vec2 ex = exact(x);
      const double dx = ex.x() - cx.dot(vals.col(static_cast<int>(q)));
      const double dy = ex.y() - cy.dot(vals.col(static_cast<int>(q)));
      acc += rule.weights[q] * g.detJ * (dx * dx + dy * dy);
    }
  }
  return std::sqrt(acc);
}

namespace {

const char* const kFields[] = {"q", "p", "y", "z", "u"};

void validate(const RunConfig& cfg) {
  if (cfg.levels.empty())
    throw UsageError("levels must be nonempty");
  for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
    if (cfg.levels[i] < 1)
      throw UsageError("levels must be >= 1");
    if (i > 0 && cfg.levels[i] <= cfg.levels[i - 1])
      throw UsageError("levels must be strictly ascending");
  }
  if (cfg.k < 0 || cfg.k > 9)
    throw UsageError("k must be in [0, 9]");
  if (cfg.approach != "od" && cfg.approach != "do" && cfg.approach != "both")
    throw UsageError("approach must be od, do, or both");
}

std::vector<double> field_errors(const SolutionFields& sol,
                                 const ProblemData& data, const Mesh& mesh,
                                 const SpaceSet& sp) {
  return {l2_error_flux(sol.q, data.exact_q, mesh, sp),
          l2_error_flux(sol.p, data.exact_p, mesh, sp),
          l2_error_scalar(sol.y, data.exact_y, mesh, sp),
          l2_error_scalar(sol.z, data.exact_z, mesh, sp),
          l2_error_scalar(sol.u, data.exact_u, mesh, sp)};
}

std::string fmt_err(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.10e", v);
  return b;
}

std::string fmt_ord(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.5f", v);
  return b;
}

std::string fmt_h(int n) {
  char b[40];
  std::snprintf(b, sizeof b, "%.10e", 1.0 / n);
  return b;
}

struct Row {
  int level;
  std::string h, field, error, order;
};

// Shared row list so the CSV and the stdout table print identical values.
std::vector<Row> report_rows(const ConvergenceReport& rep) {
  std::vector<Row> rows;
  const bool prefixed = rep.approaches.size() > 1;
  for (const ApproachReport& ar : rep.approaches) {
    const std::string prefix = prefixed ? ar.approach + "_" : "";
    for (std::size_t i = 0; i < rep.levels.size(); ++i)
      for (const FieldHistory& fh : ar.fields)
        rows.push_back({rep.levels[i], fmt_h(rep.levels[i]), prefix + fh.field,
                        fmt_err(fh.errors[i]),
                        i > 0 ? fmt_ord(fh.orders[i - 1]) : ""});
  }
  for (std::size_t i = 0; i < rep.discrepancies.size(); ++i) {
    const CommutativityReport& d = rep.discrepancies[i];
    const std::pair<const char*, double> vals[] = {
        {"disc_q", d.q},         {"disc_p", d.p},         {"disc_y", d.y},
        {"disc_z", d.z},         {"disc_u", d.u},         {"disc_y_hat", d.y_hat},
        {"disc_z_hat", d.z_hat}};
    for (const auto& [name, v] : vals)
      rows.push_back(
          {rep.levels[i], fmt_h(rep.levels[i]), name, fmt_err(v), ""});
  }
  return rows;
}

} // namespace

ConvergenceReport run_convergence(const RunConfig& config) {
  validate(config);

  ProblemSpec spec = make_problem(config.problem);
  spec.gamma = config.gamma;
  spec.tau1 = config.tau1;
  const ProblemData data = derive_data(spec);
  EdgParams params = params_from(spec);
  params.tau2_override = config.tau2_override;

  ConvergenceReport rep;
  rep.config = config;
  rep.levels = config.levels;

  const std::vector<std::string> names =
      config.approach == "both" ? std::vector<std::string>{"od", "do"}
                                : std::vector<std::string>{config.approach};
  for (const std::string& name : names) {
    ApproachReport ar;
    ar.approach = name;
    for (const char* f : kFields)
      ar.fields.push_back({f, {}, {}});
    rep.approaches.push_back(std::move(ar));
  }

  for (int n : config.levels) {
    const Mesh mesh = build_structured(n);
    const SpaceSet sp = build_trace_dofmap(mesh, config.k);

    std::optional<SolutionFields> od_sol, do_sol;
    for (std::size_t ai = 0; ai < names.size(); ++ai) {
      SolutionFields sol = names[ai] == "od" ? solve_od(mesh, sp, params, data)
                                             : solve_do(mesh, sp, params, data);
      const std::vector<double> errs = field_errors(sol, data, mesh, sp);
      for (std::size_t j = 0; j < errs.size(); ++j)
        rep.approaches[ai].fields[j].errors.push_back(errs[j]);
      (names[ai] == "od" ? od_sol : do_sol) = std::move(sol);
    }
    if (od_sol && do_sol)
      rep.discrepancies.push_back(check_commutativity(*od_sol, *do_sol));
  }

  for (ApproachReport& ar : rep.approaches)
    for (FieldHistory& fh : ar.fields)
      for (std::size_t i = 1; i < fh.errors.size(); ++i) {
        const double e0 = fh.errors[i - 1], e1 = fh.errors[i];
        const double ratio =
            static_cast<double>(config.levels[i]) / config.levels[i - 1];
        fh.orders.push_back(e0 > 0.0 && e1 > 0.0
                                ? std::log(e0 / e1) / std::log(ratio)
                                : 0.0);
      }

  return rep;
}

void write_csv(const ConvergenceReport& report, std::ostream& os) {
  os << "level,h_over_sqrt2,field,error,order\n";
  for (const Row& r : report_rows(report))
    os << r.level << ',' << r.h << ',' << r.field << ',' << r.error << ','
       << r.order << '\n';
}

void write_json(const ConvergenceReport& report, std::ostream& os) {
  nlohmann::json j;
  j["config"]["problem"] = report.config.problem;
  j["config"]["k"] = report.config.k;
  j["config"]["approach"] = report.config.approach;
  j["config"]["levels"] = report.config.levels;
  j["config"]["gamma"] = report.config.gamma;
  j["config"]["tau1"] = report.config.tau1;
  if (report.config.tau2_override)
    j["config"]["tau2_override"] = *report.config.tau2_override;
  else
    j["config"]["tau2_override"] = nullptr;

  j["levels"] = report.levels;
  j["approaches"] = nlohmann::json::array();
  for (const ApproachReport& ar : report.approaches) {
    nlohmann::json ja;
    ja["approach"] = ar.approach;
    ja["fields"] = nlohmann::json::array();
    for (const FieldHistory& fh : ar.fields)
      ja["fields"].push_back(
          {{"field", fh.field}, {"errors", fh.errors}, {"orders", fh.orders}});
    j["approaches"].push_back(std::move(ja));
  }
  j["discrepancies"] = nlohmann::json::array();
  for (std::size_t i = 0; i < report.discrepancies.size(); ++i) {
    const CommutativityReport& d = report.discrepancies[i];
    j["discrepancies"].push_back({{"level", report.levels[i]},
                                  {"q", d.q},
                                  {"p", d.p},
                                  {"y", d.y},
                                  {"z", d.z},
                                  {"u", d.u},
                                  {"y_hat", d.y_hat},
                                  {"z_hat", d.z_hat}});
  }
  os << j.dump(2) << '\n';
}

void print_table(const ConvergenceReport& report, std::ostream& os) {
  const RunConfig& c = report.config;
  os << "problem " << c.problem << "  k " << c.k << "  approach " << c.approach
     << "  gamma " << c.gamma << "  tau1 " << c.tau1;
  if (c.tau2_override)
    os << "  tau2_override " << *c.tau2_override;
  os << '\n';
  os << std::left << std::setw(6) << "level" << std::setw(20) << "h_over_sqrt2"
     << std::setw(13) << "field" << std::setw(20) << "error" << "order\n";
  for (const Row& r : report_rows(report))
    os << std::left << std::setw(6) << r.level << std::setw(20) << r.h
       << std::setw(13) << r.field << std::setw(20) << r.error
       << (r.order.empty() ? "-" : r.order) << '\n';
}

} // namespace edg
