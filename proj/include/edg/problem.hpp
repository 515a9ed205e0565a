#pragma once

#include "edg/types.hpp"

#include <string>
#include <vector>

namespace edg {

// A manufactured optimal-control problem on the unit square:
//
//   min 1/2 ||y - y_d||^2 + gamma/2 ||u||^2
//   s.t.  -Lap y + beta.grad y = f + u,   y = g on the boundary,
//
// specified through its exact state y and exact adjoint z (z must vanish on
// the boundary) plus the convection field beta with div(beta) <= 0. The data
// f, g, y_d are derived so that (y, z, u = -z/gamma) solves the first-order
// optimality system exactly.
struct ProblemSpec {
  std::string name;

  ScalarFn y;
  VectorFn grad_y;
  ScalarFn lap_y;

  ScalarFn z;
  VectorFn grad_z;
  ScalarFn lap_z;

  VectorFn beta;
  ScalarFn div_beta;

  double gamma = 1.0;
  double tau1 = 1.0;
};

struct ProblemData {
  ScalarFn f;
  ScalarFn g;
  ScalarFn y_d;

  ScalarFn exact_y;
  ScalarFn exact_z;
  ScalarFn exact_u;
  VectorFn exact_q; // -grad y
  VectorFn exact_p; // -grad z
};

// Close the optimality system around the chosen exact fields:
//   f   = -Lap y + beta.grad y - u,        u = -z/gamma,
//   g   = y restricted to the boundary,
//   y_d = y + Lap z + div(beta z).
// Validates div(beta) <= 0 and z = 0 on the boundary at sample points and
// throws InvalidProblemError on violation.
ProblemData derive_data(const ProblemSpec& spec);

// Built-in problems: "swirl" (rotational beta = (x2, x1), divergence free)
// and "sink" (contracting beta = (-x1, -x2), div beta = -2).
ProblemSpec make_problem(const std::string& name);

std::vector<std::string> problem_names();

} // namespace edg
