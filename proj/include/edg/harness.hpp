#pragma once

#include "edg/config.hpp"
#include "edg/mesh.hpp"
#include "edg/problem.hpp"
#include "edg/solve.hpp"
#include "edg/spaces.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace edg {

// L2 errors by elementwise quadrature with the high-order error rule
// (exactness 2(k+2)+4).
double l2_error_scalar(const Vec& coeffs, const ScalarFn& exact,
                       const Mesh& mesh, const SpaceSet& spaces);
double l2_error_flux(const Vec& coeffs, const VectorFn& exact,
                     const Mesh& mesh, const SpaceSet& spaces);

// One field's refinement history; orders has one entry fewer than errors,
// order_i = log(e_i / e_{i+1}) / log(n_{i+1} / n_i).
struct FieldHistory {
  std::string field; // q, p, y, z, u
  std::vector<double> errors;
  std::vector<double> orders;
};

struct ApproachReport {
  std::string approach; // od | do
  std::vector<FieldHistory> fields;
};

struct ConvergenceReport {
  RunConfig config;
  std::vector<int> levels;
  std::vector<ApproachReport> approaches;
  // Per level, only when both approaches run.
  std::vector<CommutativityReport> discrepancies;
};

// Solve every level with the configured approach(es) and fill the report.
ConvergenceReport run_convergence(const RunConfig& config);

// Deterministic CSV: header "level,h_over_sqrt2,field,error,order"; field is
// prefixed od_/do_ when both approaches run, plus disc_* discrepancy rows.
void write_csv(const ConvergenceReport& report, std::ostream& os);

// JSON mirror of ConvergenceReport.
void write_json(const ConvergenceReport& report, std::ostream& os);

// Human-readable rate table; cell values formatted exactly as in the CSV.
void print_table(const ConvergenceReport& report, std::ostream& os);

} // namespace edg
