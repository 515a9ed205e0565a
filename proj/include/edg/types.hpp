#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <functional>

namespace edg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Scalar and vector fields on the computational domain.
using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

} // namespace edg
