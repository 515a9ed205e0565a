#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edg/errors.hpp"
#include "edg/problem.hpp"

#include <cmath>
#include <random>

using namespace edg;

namespace {

// Residuals of the optimality system at a point, assembled from the spec
// closures independently of derive_data's algebra.
double state_residual(const ProblemSpec& s, const ProblemData& d, const Vec2& x) {
  const double conv = s.beta(x).dot(s.grad_y(x));
  return -s.lap_y(x) + conv - d.f(x) - d.exact_u(x);
}

double adjoint_residual(const ProblemSpec& s, const ProblemData& d, const Vec2& x) {
  const double div_bz = s.div_beta(x) * s.z(x) + s.beta(x).dot(s.grad_z(x));
  return -s.lap_z(x) - div_bz - (s.y(x) - d.y_d(x));
}

} // namespace

TEST_CASE("swirl problem spot values") {
  const ProblemSpec spec = make_problem("swirl");
  const ProblemData data = derive_data(spec);
  const Vec2 mid(0.5, 0.5);
  const double pi2 = M_PI * M_PI;

  CHECK(data.exact_y(mid) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(data.exact_z(mid) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(data.exact_u(mid) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(data.f(mid) == doctest::Approx(pi2 + 1.0).epsilon(1e-13));
  CHECK(data.y_d(mid) == doctest::Approx(1.0 - 2.0 * pi2).epsilon(1e-13));

  // Fluxes are the negative gradients.
  CHECK((data.exact_q(mid) - Vec2(0.0, 0.0)).norm() < 1e-13);
  CHECK((data.exact_p(mid) - Vec2(0.0, 0.0)).norm() < 1e-13);
  const Vec2 corner(0.25, 0.5);
  CHECK(data.exact_q(corner).x() ==
        doctest::Approx(-M_PI * std::cos(M_PI * 0.25)).epsilon(1e-13));
  CHECK(data.exact_q(corner).y() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("manufactured data closes the optimality system") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const char* name : {"swirl", "sink"}) {
    const ProblemSpec spec = make_problem(name);
    const ProblemData data = derive_data(spec);
    for (int trial = 0; trial < 100; ++trial) {
      const Vec2 x(unif(rng), unif(rng));
      CHECK(std::abs(state_residual(spec, data, x)) < 1e-12);
      CHECK(std::abs(adjoint_residual(spec, data, x)) < 1e-12);
      // Gradient condition z + gamma u = 0.
      CHECK(std::abs(data.exact_z(x) + spec.gamma * data.exact_u(x)) < 1e-13);
    }
  }
}

TEST_CASE("exact adjoint vanishes on the boundary") {
  const ProblemData data = derive_data(make_problem("swirl"));
  for (int i = 0; i <= 20; ++i) {
    const double t = i / 20.0;
    CHECK(std::abs(data.exact_z(Vec2(t, 0.0))) < 1e-14);
    CHECK(std::abs(data.exact_z(Vec2(t, 1.0))) < 1e-13);
    CHECK(std::abs(data.exact_z(Vec2(0.0, t))) < 1e-14);
    CHECK(std::abs(data.exact_z(Vec2(1.0, t))) < 1e-13);
  }
  // Dirichlet data g is the state trace.
  CHECK(data.g(Vec2(0.5, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(data.g(Vec2(0.0, 0.3)) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("sink problem has contracting convection") {
  const ProblemSpec spec = make_problem("sink");
  CHECK(spec.div_beta(Vec2(0.3, 0.7)) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK((spec.beta(Vec2(0.25, 0.5)) - Vec2(-0.25, -0.5)).norm() < 1e-14);
  CHECK_NOTHROW(derive_data(spec));
}

TEST_CASE("problem registry") {
  const auto names = problem_names();
  CHECK(names.size() == 2);
  CHECK_THROWS_AS(make_problem("unknown"), UsageError);
}

TEST_CASE("invalid specifications are rejected") {
  // Adjoint not vanishing on the boundary.
  ProblemSpec bad = make_problem("swirl");
  bad.z = [](const Vec2& x) { return std::cos(M_PI * x.x()); };
  bad.grad_z = [](const Vec2& x) {
    return Vec2(-M_PI * std::sin(M_PI * x.x()), 0.0);
  };
  bad.lap_z = [](const Vec2& x) {
    return -M_PI * M_PI * std::cos(M_PI * x.x());
  };
  CHECK_THROWS_AS(derive_data(bad), InvalidProblemError);

  // Expanding convection field violates div(beta) <= 0.
  ProblemSpec expanding = make_problem("swirl");
  expanding.beta = [](const Vec2& x) { return Vec2(x.x(), x.y()); };
  expanding.div_beta = [](const Vec2&) { return 2.0; };
  CHECK_THROWS_AS(derive_data(expanding), InvalidProblemError);

  ProblemSpec negative_gamma = make_problem("swirl");
  negative_gamma.gamma = -1.0;
  CHECK_THROWS_AS(derive_data(negative_gamma), InvalidProblemError);

  ProblemSpec zero_tau = make_problem("swirl");
  zero_tau.tau1 = 0.0;
  CHECK_THROWS_AS(derive_data(zero_tau), InvalidProblemError);
}
