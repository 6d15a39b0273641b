#pragma once

// Norms, finite-difference Jacobians and the spectral norm.

#include "egsolve/core.hpp"
#include "egsolve/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace egsolve {

inline constexpr double kDefaultFdStep = 1e-5;
inline constexpr std::size_t kPowerIterationCap = 10000;
inline constexpr double kPowerIterationRelTol = 1e-10;
inline constexpr std::uint64_t kPowerIterationSeed = 0x5eed5eedULL;

inline double norm(const Vec& v) { return v.eigen().norm(); }
inline double norm(const Eigen::Ref<const Vector>& v) { return v.norm(); }

/// Central differences, column j = (F(x + h e_j) - F(x - h e_j)) / (2h).
inline Matrix finite_diff_jacobian(const OperatorInstance& op, const Vector& x, double h = kDefaultFdStep) {
  if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "finite-difference step must be > 0");
  if (!x.allFinite()) throw Error(Errc::NonFiniteValue, "finite_diff_jacobian: x must be finite");
  const Eigen::Index d = x.size();
  Matrix jac(d, d);
  Vector probe = x;
  for (Eigen::Index j = 0; j < d; ++j) {
    probe[j] = x[j] + h;
    const Vector fp = op.eval(probe);
    probe[j] = x[j] - h;
    const Vector fm = op.eval(probe);
    probe[j] = x[j];
    if (fp.size() != d || fm.size() != d) throw Error(Errc::DimensionMismatch, "operator changed dimension");
    if (!fp.allFinite() || !fm.allFinite())
      throw Error(Errc::NonFiniteEvaluation, "operator returned NaN/Inf during differencing");
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

inline Matrix finite_diff_jacobian(const OperatorInstance& op, const Vec& x, double h = kDefaultFdStep) {
  return finite_diff_jacobian(op, x.eigen(), h);
}

/// Analytic Jacobian when the operator carries one, central differences otherwise.
inline Matrix jacobian_at(const OperatorInstance& op, const Vector& x) {
  if (op.jacobian) return (*op.jacobian)(x);
  return finite_diff_jacobian(op, x);
}

/// Largest eigenvalue of the symmetric matrix [[a, b], [b, d]].
inline double sym2x2_max_eigenvalue(double a, double b, double d) {
  return 0.5 * ((a + d) + std::sqrt((a - d) * (a - d) + 4.0 * b * b));
}

/// Largest singular value. Closed form for d <= 2, power iteration on M^T M
/// (deterministic start) otherwise. A nearly repeated top singular value can
/// stall power iteration; past the cap the dense symmetric eigensolver decides.
inline double spectral_norm(const Matrix& m) {
  if (!m.allFinite()) throw Error(Errc::NonFiniteValue, "spectral_norm: matrix must be finite");
  if (m.rows() != m.cols()) throw Error(Errc::DimensionMismatch, "spectral_norm expects a square matrix");
  const Eigen::Index d = m.rows();
  if (d == 0) return 0.0;
  if (d == 1) return std::abs(m(0, 0));
  if (d == 2) {
    const double a = m(0, 0) * m(0, 0) + m(1, 0) * m(1, 0);
    const double b = m(0, 0) * m(0, 1) + m(1, 0) * m(1, 1);
    const double dd = m(0, 1) * m(0, 1) + m(1, 1) * m(1, 1);
    return std::sqrt(std::max(0.0, sym2x2_max_eigenvalue(a, b, dd)));
  }

  const Matrix gram = m.transpose() * m;
  Rng rng(kPowerIterationSeed);
  Vector v = rng.normal_vector(d);
  v.normalize();
  double lambda = v.dot(gram * v);
  for (std::size_t it = 0; it < kPowerIterationCap; ++it) {
    Vector w = gram * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    const double next = v.dot(gram * v);
    if (std::abs(next - lambda) <= kPowerIterationRelTol * std::abs(next)) return std::sqrt(std::max(0.0, next));
    lambda = next;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw Error(Errc::ConvergenceFailure, "power iteration and the eigensolver both failed");
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

}  // namespace egsolve
