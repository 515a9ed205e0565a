#include "edg/problem.hpp"

#include "edg/errors.hpp"

#include <cmath>
#include <random>

namespace edg {
namespace {

void validate(const ProblemSpec& spec) {
  if (spec.gamma <= 0.0)
    throw InvalidProblemError("regularization gamma must be positive");
  if (spec.tau1 <= 0.0)
    throw InvalidProblemError("stabilization tau1 must be positive");

  // Sample div(beta) <= 0 on a grid plus random interior points, and check
  // the adjoint boundary condition z = 0 along the four sides.
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int grid = 9;
  for (int i = 0; i <= grid; ++i) {
    for (int j = 0; j <= grid; ++j) {
      const Vec2 x(double(i) / grid, double(j) / grid);
      if (spec.div_beta(x) > 1e-12)
        throw InvalidProblemError("div(beta) must be nonpositive on the domain");
    }
  }
  for (int s = 0; s < 100; ++s) {
    const Vec2 x(unif(rng), unif(rng));
    if (spec.div_beta(x) > 1e-12)
      throw InvalidProblemError("div(beta) must be nonpositive on the domain");
  }
  for (int i = 0; i <= grid; ++i) {
    const double t = double(i) / grid;
    for (const Vec2& x : {Vec2(t, 0.0), Vec2(t, 1.0), Vec2(0.0, t), Vec2(1.0, t)})
      if (std::abs(spec.z(x)) > 1e-12)
        throw InvalidProblemError("exact adjoint must vanish on the boundary");
  }
}

} // namespace

ProblemData derive_data(const ProblemSpec& spec) {
  validate(spec);

  ProblemData data;
  const double gamma = spec.gamma;
  data.exact_y = spec.y;
  data.exact_z = spec.z;
  data.exact_u = [z = spec.z, gamma](const Vec2& x) { return -z(x) / gamma; };
  data.exact_q = [gy = spec.grad_y](const Vec2& x) { return Vec2(-gy(x)); };
  data.exact_p = [gz = spec.grad_z](const Vec2& x) { return Vec2(-gz(x)); };

  data.f = [spec, gamma](const Vec2& x) {
    return -spec.lap_y(x) + spec.beta(x).dot(spec.grad_y(x)) + spec.z(x) / gamma;
  };
  data.g = spec.y;
  data.y_d = [spec](const Vec2& x) {
    return spec.y(x) + spec.lap_z(x) + spec.beta(x).dot(spec.grad_z(x)) +
           spec.div_beta(x) * spec.z(x);
  };
  return data;
}

ProblemSpec make_problem(const std::string& name) {
  ProblemSpec spec;
  spec.name = name;
  spec.y = [](const Vec2& x) { return std::sin(M_PI * x.x()); };
  spec.grad_y = [](const Vec2& x) {
    return Vec2(M_PI * std::cos(M_PI * x.x()), 0.0);
  };
  spec.lap_y = [](const Vec2& x) {
    return -M_PI * M_PI * std::sin(M_PI * x.x());
  };
  spec.z = [](const Vec2& x) {
    return std::sin(M_PI * x.x()) * std::sin(M_PI * x.y());
  };
  spec.grad_z = [](const Vec2& x) {
    return Vec2(M_PI * std::cos(M_PI * x.x()) * std::sin(M_PI * x.y()),
                M_PI * std::sin(M_PI * x.x()) * std::cos(M_PI * x.y()));
  };
  spec.lap_z = [](const Vec2& x) {
    return -2.0 * M_PI * M_PI * std::sin(M_PI * x.x()) * std::sin(M_PI * x.y());
  };

  if (name == "swirl") {
    spec.beta = [](const Vec2& x) { return Vec2(x.y(), x.x()); };
    spec.div_beta = [](const Vec2&) { return 0.0; };
  } else if (name == "sink") {
    spec.beta = [](const Vec2& x) { return Vec2(-x.x(), -x.y()); };
    spec.div_beta = [](const Vec2&) { return -2.0; };
  } else {
    throw UsageError("unknown problem '" + name + "'");
  }
  return spec;
}

std::vector<std::string> problem_names() { return {"swirl", "sink"}; }

} // namespace edg
