#pragma once

// Problem zoo: every operator used by the experiments and the smoothness
// examples, each with an analytic Jacobian, its known root and declared
// class constants.

#include "egsolve/core.hpp"
#include "egsolve/linalg.hpp"
#include "egsolve/random.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace egsolve {

namespace detail {

inline double logistic_tail(double z) {
  // 1 / (1 + exp(z)), evaluated without overflow.
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

inline Matrix block_skew(const Matrix& b) {
  const Eigen::Index d = b.rows();
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  m.topRightCorner(d, d) = b;
  m.bottomLeftCorner(d, d) = -b.transpose();
  return m;
}

inline void require_square(const Matrix& m, const char* name) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw Error(Errc::DimensionMismatch, std::string(name) + " must be a non-empty square matrix");
}

inline void require_spd(const Matrix& m, const char* name) {
  require_square(m, name);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw Error(Errc::NotPositiveDefinite, std::string(name) + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0))
    throw Error(Errc::NotPositiveDefinite, std::string(name) + " is not positive definite");
}

inline double min_eigenvalue(const Matrix& spd) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(spd, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace detail

/// Gradient of f(x) = log(1 + exp(-a^T x)). Declared (1, 0, ||a||); root at infinity.
inline OperatorInstance logistic_gradient(const Vector& a) {
  if (a.size() < 1 || a.isZero(0.0)) throw Error(Errc::ZeroParameter, "logistic_gradient: a must be non-zero");
  if (!a.allFinite()) throw Error(Errc::NonFiniteValue, "logistic_gradient: a must be finite");
  OperatorInstance op;
  op.dim = static_cast<std::size_t>(a.size());
  op.label = "logistic";
  op.eval = [a](const Vector& x) -> Vector { return -a * detail::logistic_tail(a.dot(x)); };
  op.jacobian = [a](const Vector& x) -> Matrix {
    const double z = a.dot(x);
    const double s = detail::logistic_tail(z);
    return (a * a.transpose()) * (s * (1.0 - s));
  };
  op.smoothness = SmoothnessParams(1.0, 0.0, a.norm());
  op.monotonicity = MonotonicityParams::monotone();
  return registered(std::move(op));
}

/// F for 1/2 w1^2 + w1 w2 - 1/2 w2^2.
inline OperatorInstance quadratic_minmax() {
  OperatorInstance op;
  op.dim = 2;
  op.label = "quadratic";
  op.eval = [](const Vector& x) -> Vector {
    Vector f(2);
    f << x[0] + x[1], x[1] - x[0];
    return f;
  };
  op.jacobian = [](const Vector&) -> Matrix {
    Matrix j(2, 2);
    j << 1.0, 1.0, -1.0, 1.0;
    return j;
  };
  op.solution = Vec{0.0, 0.0};
  op.smoothness = SmoothnessParams(1.0, std::numbers::sqrt2, 0.0);
  op.monotonicity = MonotonicityParams::strongly_monotone(1.0);
  return registered(std::move(op));
}

/// F for 1/3 w1^3 + w1 w2 - 1/3 w2^3. Not monotone; (1, -1) is a second root.
inline OperatorInstance cubic_minmax_1d() {
  OperatorInstance op;
  op.dim = 2;
  op.label = "cubic1d";
  op.eval = [](const Vector& x) -> Vector {
    Vector f(2);
    f << x[0] * x[0] + x[1], x[1] * x[1] - x[0];
    return f;
  };
  op.jacobian = [](const Vector& x) -> Matrix {
    Matrix j(2, 2);
    j << 2.0 * x[0], 1.0, -1.0, 2.0 * x[1];
    return j;
  };
  op.solution = Vec{0.0, 0.0};
  op.smoothness = SmoothnessParams(1.0, 10.0, 10.0);
  op.monotonicity = MonotonicityParams::unspecified();
  return registered(std::move(op));
}

/// F(u) = (u1|u1| + u2, u2|u2| - u1), with constants (1, 1 + 2 sqrt2, 2 sqrt2).
/// Monotone; the Jacobian's symmetric part vanishes at the origin, so no
/// global strong-monotonicity constant is declared.
inline OperatorInstance sign_power_strongly_monotone() {
  OperatorInstance op;
  op.dim = 2;
  op.label = "signpower";
  op.eval = [](const Vector& x) -> Vector {
    Vector f(2);
    f << x[0] * std::abs(x[0]) + x[1], x[1] * std::abs(x[1]) - x[0];
    return f;
  };
  op.jacobian = [](const Vector& x) -> Matrix {
    Matrix j(2, 2);
    j << 2.0 * std::abs(x[0]), 1.0, -1.0, 2.0 * std::abs(x[1]);
    return j;
  };
  op.solution = Vec{0.0, 0.0};
  op.smoothness = SmoothnessParams(1.0, 1.0 + 2.0 * std::numbers::sqrt2, 2.0 * std::numbers::sqrt2);
  op.monotonicity = MonotonicityParams::monotone();
  return registered(std::move(op));
}

struct CubicMatrices {
  Matrix A, B, C;
};

/// A = G^T G / d + 0.1 I, C likewise, B = G^T G / d, with fresh standard
/// normal G for each, drawn in the order A, C, B.
inline CubicMatrices default_cubic_matrices(std::size_t d, std::uint64_t seed = 42) {
  if (d < 1) throw Error(Errc::InvalidArgument, "cubic matrices: d must be >= 1");
  const auto n = static_cast<Eigen::Index>(d);
  Rng rng(seed);
  const Matrix ga = rng.normal_matrix(n, n);
  const Matrix gc = rng.normal_matrix(n, n);
  const Matrix gb = rng.normal_matrix(n, n);
  const Matrix eye = Matrix::Identity(n, n);
  return {ga.transpose() * ga / static_cast<double>(d) + 0.1 * eye, gb.transpose() * gb / static_cast<double>(d),
          gc.transpose() * gc / static_cast<double>(d) + 0.1 * eye};
}

namespace detail {

// Hessian of 1/3 (w^T A w)^{3/2}: s A + (A w)(A w)^T / s with s = ||A^{1/2} w||.
inline Matrix cubic_form_hessian(const Matrix& a, const Vector& w) {
  const Vector aw = a * w;
  const double s = std::sqrt(std::max(0.0, w.dot(aw)));
  if (s == 0.0) return Matrix::Zero(a.rows(), a.cols());
  return s * a + (aw * aw.transpose()) / s;
}

}  // namespace detail

/// F for 1/3 (w1^T A w1)^{3/2} + w1^T B w2 - 1/3 (w2^T C w2)^{3/2}.
///
/// Declared constants follow from the Jacobian bound: with a = max(||A||, ||C||),
/// l = min(lambda_min(A), lambda_min(C)) and S = max(||A^{1/2}w1||, ||C^{1/2}w2||),
/// ||J|| <= 2aS + ||B|| and ||F|| >= S^2 sqrt(l/2), so F is 1-symmetric
/// (||B|| + a^2, sqrt(2/l))-Lipschitz.
inline OperatorInstance cubic_minmax_Rd(const Matrix& A, const Matrix& B, const Matrix& C) {
  detail::require_spd(A, "A");
  detail::require_spd(C, "C");
  detail::require_square(B, "B");
  if (A.rows() != B.rows() || A.rows() != C.rows())
    throw Error(Errc::DimensionMismatch, "cubic_minmax_Rd: A, B, C must share a dimension");
  const Eigen::Index d = A.rows();

  OperatorInstance op;
  op.dim = static_cast<std::size_t>(2 * d);
  op.label = "cubicRd";
  op.eval = [A, B, C, d](const Vector& x) -> Vector {
    const auto w1 = x.head(d);
    const auto w2 = x.tail(d);
    const Vector aw = A * w1;
    const Vector cw = C * w2;
    Vector f(2 * d);
    f.head(d) = std::sqrt(std::max(0.0, w1.dot(aw))) * aw + B * w2;
    f.tail(d) = std::sqrt(std::max(0.0, w2.dot(cw))) * cw - B.transpose() * w1;
    return f;
  };
  op.jacobian = [A, B, C, d](const Vector& x) -> Matrix {
    Matrix j(2 * d, 2 * d);
    j.topLeftCorner(d, d) = detail::cubic_form_hessian(A, x.head(d));
    j.topRightCorner(d, d) = B;
    j.bottomLeftCorner(d, d) = -B.transpose();
    j.bottomRightCorner(d, d) = detail::cubic_form_hessian(C, x.tail(d));
    return j;
  };
  op.solution = Vec::zeros(static_cast<std::size_t>(2 * d));
  const double a = std::max(spectral_norm(A), spectral_norm(C));
  const double l = std::min(detail::min_eigenvalue(A), detail::min_eigenvalue(C));
  op.smoothness = SmoothnessParams(1.0, spectral_norm(B) + a * a, std::sqrt(2.0 / l));
  op.monotonicity = MonotonicityParams::monotone();
  return registered(std::move(op));
}

/// F for 1/(p+1) ||w1||^{p+1} + w1^T B w2 - 1/(p+1) ||w2||^{p+1}.
inline OperatorInstance power_minmax(double p, const Matrix& B, double tau1) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(Errc::InvalidExponent, "power_minmax: p must be > 1");
  if (!(tau1 > 0.0)) throw Error(Errc::InvalidArgument, "power_minmax: tau1 must be > 0");
  detail::require_square(B, "B");
  const Eigen::Index d = B.rows();

  auto grad = [p](const Vector& w) -> Vector {
    const double r = w.norm();
    if (r == 0.0) return Vector::Zero(w.size());
    return std::pow(r, p - 1.0) * w;
  };
  auto hess = [p](const Vector& w) -> Matrix {
    const double r = w.norm();
    const Eigen::Index n = w.size();
    if (r == 0.0) return Matrix::Zero(n, n);
    return std::pow(r, p - 1.0) * Matrix::Identity(n, n) + (p - 1.0) * std::pow(r, p - 3.0) * (w * w.transpose());
  };

  OperatorInstance op;
  op.dim = static_cast<std::size_t>(2 * d);
  op.label = "power";
  op.eval = [B, d, grad](const Vector& x) -> Vector {
    Vector f(2 * d);
    f.head(d) = grad(x.head(d)) + B * x.tail(d);
    f.tail(d) = grad(x.tail(d)) - B.transpose() * x.head(d);
    return f;
  };
  op.jacobian = [B, d, hess](const Vector& x) -> Matrix {
    Matrix j(2 * d, 2 * d);
    j.topLeftCorner(d, d) = hess(x.head(d));
    j.topRightCorner(d, d) = B;
    j.bottomLeftCorner(d, d) = -B.transpose();
    j.bottomRightCorner(d, d) = hess(x.tail(d));
    return j;
  };
  op.solution = Vec::zeros(static_cast<std::size_t>(2 * d));
  const double tau0 = std::pow((p - 1.0) / tau1, p - 1.0);
  const double m_norm = spectral_norm(detail::block_skew(B));
  const double l1 = std::pow(2.0, (2.0 * p * p - 1.0) / (2.0 * p * p)) * tau1;
  op.smoothness = SmoothnessParams(1.0, 2.0 * tau0 + m_norm, l1);
  op.monotonicity = MonotonicityParams::monotone();
  return registered(std::move(op));
}

/// F(u) = (u1^2, u2^2): 1/2-symmetric (0, 2)-Lipschitz, not Lipschitz.
inline OperatorInstance square_component_operator() {
  OperatorInstance op;
  op.dim = 2;
  op.label = "square";
  op.eval = [](const Vector& x) -> Vector { return x.cwiseProduct(x); };
  op.jacobian = [](const Vector& x) -> Matrix { return (2.0 * x).asDiagonal(); };
  op.solution = Vec{0.0, 0.0};
  op.smoothness = SmoothnessParams(0.5, 0.0, 2.0);
  op.monotonicity = MonotonicityParams::unspecified();
  return registered(std::move(op));
}

inline constexpr double kForsakenRho = 0.119732;

inline double forsaken_psi_prime(double w) {
  const double w2 = w * w;
  return w * (12.0 * w2 * w2 / 21.0 - 4.0 * w2 / 3.0 + 2.0 / 3.0);
}

inline double forsaken_psi_second(double w) {
  const double w2 = w * w;
  return 60.0 * w2 * w2 / 21.0 - 4.0 * w2 + 2.0 / 3.0;
}

/// GlobalForsaken: L = w1 w2 + psi(w1) - psi(w2), psi(w) = 2w^6/21 - w^4/3 + w^2/3.
/// Declared (1, 2, 6): grid search needs L1 >= 5.05 when L0 = 2.
inline OperatorInstance global_forsaken() {
  OperatorInstance op;
  op.dim = 2;
  op.label = "forsaken";
  op.eval = [](const Vector& x) -> Vector {
    Vector f(2);
    f << x[1] + forsaken_psi_prime(x[0]), forsaken_psi_prime(x[1]) - x[0];
    return f;
  };
  op.jacobian = [](const Vector& x) -> Matrix {
    Matrix j(2, 2);
    j << forsaken_psi_second(x[0]), 1.0, -1.0, forsaken_psi_second(x[1]);
    return j;
  };
  op.solution = Vec{0.0, 0.0};
  op.smoothness = SmoothnessParams(1.0, 2.0, 6.0);
  op.monotonicity = MonotonicityParams::weak_minty(kForsakenRho);
  return registered(std::move(op));
}

/// A convex component of a bilinearly coupled problem: gradient, optional
/// Hessian and its (L0, L1)-smoothness constants.
struct SmoothComponent {
  OperatorFn grad;
  std::optional<JacobianFn> hess;
  double L0 = 0.0;
  double L1 = 0.0;
};

/// F(x) = (f'(w1) + B w2, g'(w2) - B^T w1), declared
/// (1, 2 L0 + (1 + 2 L1 R) ||M||, sqrt2 L1) from the components' (L0, L1) (the larger of f's and g's).
inline OperatorInstance bilinear_coupled(const SmoothComponent& f, const SmoothComponent& g, const Matrix& B,
                                         double R, MonotonicityParams cls = MonotonicityParams::unspecified()) {
  detail::require_square(B, "B");
  if (!(R > 0.0)) throw Error(Errc::InvalidArgument, "bilinear_coupled: R must be > 0");
  if (!f.grad || !g.grad) throw Error(Errc::InvalidArgument, "bilinear_coupled: missing gradient");
  const Eigen::Index d = B.rows();
  {
    const Vector zero = Vector::Zero(d);
    if (f.grad(zero).size() != d || g.grad(zero).size() != d)
      throw Error(Errc::DimensionMismatch, "bilinear_coupled: component gradients must match B");
  }

  OperatorInstance op;
  op.dim = static_cast<std::size_t>(2 * d);
  op.label = "bilinear";
  op.eval = [f, g, B, d](const Vector& x) -> Vector {
    Vector out(2 * d);
    out.head(d) = f.grad(x.head(d)) + B * x.tail(d);
    out.tail(d) = g.grad(x.tail(d)) - B.transpose() * x.head(d);
    return out;
  };
  if (f.hess && g.hess) {
    op.jacobian = [f, g, B, d](const Vector& x) -> Matrix {
      Matrix j(2 * d, 2 * d);
      j.topLeftCorner(d, d) = (*f.hess)(x.head(d));
      j.topRightCorner(d, d) = B;
      j.bottomLeftCorner(d, d) = -B.transpose();
      j.bottomRightCorner(d, d) = (*g.hess)(x.tail(d));
      return j;
    };
  }
  const double l0 = std::max(f.L0, g.L0);
  const double l1 = std::max(f.L1, g.L1);
  const double m_norm = spectral_norm(detail::block_skew(B));
  op.smoothness = SmoothnessParams(1.0, 2.0 * l0 + (1.0 + 2.0 * l1 * R) * m_norm, std::numbers::sqrt2 * l1);
  op.monotonicity = cls;
  if (f.grad(Vector::Zero(d)).isZero(0.0) && g.grad(Vector::Zero(d)).isZero(0.0))
    op.solution = Vec::zeros(static_cast<std::size_t>(2 * d));
  return registered(std::move(op));
}

inline SmoothComponent half_square_component(Eigen::Index d) {
  return {[](const Vector& w) -> Vector { return w; },
          JacobianFn([d](const Vector&) -> Matrix { return Matrix::Identity(d, d); }), 1.0, 0.0};
}

/// Logistic loss w -> log(1 + exp(-a^T w)) as a bilinear component, (0, ||a||)-smooth.
inline SmoothComponent logistic_component(const Vector& a) {
  return {[a](const Vector& w) -> Vector { return -a * detail::logistic_tail(a.dot(w)); },
          JacobianFn([a](const Vector& w) -> Matrix {
            const double s = detail::logistic_tail(a.dot(w));
            return (a * a.transpose()) * (s * (1.0 - s));
          }),
          0.0, a.norm()};
}

/// One player of an N-player game: the partial gradient of its loss with
/// respect to its own action, as a function of the joint action.
struct Player {
  std::size_t dim = 1;
  OperatorFn partial_grad;
  std::optional<JacobianFn> partial_jacobian;  // dim x (total dim)
};

/// Stacked operator (grad_1 f_1, ..., grad_N f_N). Each partial gradient is
/// declared (L0p, L1p)-Lipschitz; the game is declared (1, sqrt(2N) L0p, sqrt2 L1p).
inline OperatorInstance n_player_game(const std::vector<Player>& players, double L0p, double L1p,
                                      MonotonicityParams cls = MonotonicityParams::unspecified(),
                                      std::optional<Vec> solution = std::nullopt) {
  if (players.size() < 2) throw Error(Errc::InvalidArgument, "n_player_game: need N >= 2 players");
  std::vector<Eigen::Index> offsets;
  Eigen::Index total = 0;
  for (const auto& p : players) {
    if (p.dim < 1 || !p.partial_grad) throw Error(Errc::InvalidArgument, "n_player_game: malformed player");
    offsets.push_back(total);
    total += static_cast<Eigen::Index>(p.dim);
  }
  {
    const Vector zero = Vector::Zero(total);
    for (const auto& p : players)
      if (static_cast<std::size_t>(p.partial_grad(zero).size()) != p.dim)
        throw Error(Errc::DimensionMismatch, "n_player_game: partial gradient has wrong size");
  }

  OperatorInstance op;
  op.dim = static_cast<std::size_t>(total);
  op.label = "nplayer";
  op.eval = [players, offsets, total](const Vector& x) -> Vector {
    Vector out(total);
    for (std::size_t i = 0; i < players.size(); ++i)
      out.segment(offsets[i], static_cast<Eigen::Index>(players[i].dim)) = players[i].partial_grad(x);
    return out;
  };
  bool all_jac = true;
  for (const auto& p : players) all_jac = all_jac && p.partial_jacobian.has_value();
  if (all_jac) {
    op.jacobian = [players, offsets, total](const Vector& x) -> Matrix {
      Matrix j(total, total);
      for (std::size_t i = 0; i < players.size(); ++i)
        j.middleRows(offsets[i], static_cast<Eigen::Index>(players[i].dim)) = (*players[i].partial_jacobian)(x);
      return j;
    };
  }
  const double n = static_cast<double>(players.size());
  op.smoothness = SmoothnessParams(1.0, std::sqrt(2.0 * n) * L0p, std::numbers::sqrt2 * L1p);
  op.monotonicity = cls;
  if (solution && solution->dim() != op.dim)
    throw Error(Errc::DimensionMismatch, "n_player_game: solution has wrong dimension");
  op.solution = std::move(solution);
  return registered(std::move(op));
}

/// Cyclic game with scalar actions: player i's partial gradient is
/// w_i |w_i| + s (w_{i+1} - w_{i-1}). The self term is not globally
/// Lipschitz, so the per-player constant (sqrt((2R)^2 + 2 s^2), 0) is valid
/// on the box |w_i| <= R only.
inline OperatorInstance cyclic_cubic_game(std::size_t n, double s, double R) {
  if (n < 2) throw Error(Errc::InvalidArgument, "cyclic_cubic_game: need n >= 2");
  if (!(R > 0.0)) throw Error(Errc::InvalidArgument, "cyclic_cubic_game: R must be > 0");
  std::vector<Player> players;
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const auto next = static_cast<Eigen::Index>((i + 1) % n);
    const auto prev = static_cast<Eigen::Index>((i + n - 1) % n);
    const auto total = static_cast<Eigen::Index>(n);
    Player p;
    p.dim = 1;
    p.partial_grad = [idx, next, prev, s](const Vector& x) -> Vector {
      Vector g(1);
      g[0] = x[idx] * std::abs(x[idx]) + s * (x[next] - x[prev]);
      return g;
    };
    p.partial_jacobian = JacobianFn([idx, next, prev, s, total](const Vector& x) -> Matrix {
      Matrix row = Matrix::Zero(1, total);
      row(0, idx) += 2.0 * std::abs(x[idx]);
      row(0, next) += s;
      row(0, prev) -= s;
      return row;
    });
    players.push_back(std::move(p));
  }
  const double l0p = std::sqrt(4.0 * R * R + 2.0 * s * s);
  return n_player_game(players, l0p, 0.0, MonotonicityParams::monotone(), Vec::zeros(n));
}

// ---------------------------------------------------------------------------
// Registry

struct ZooParams {
  std::map<std::string, double> scalars;
  std::map<std::string, Matrix> matrices;
  std::uint64_t seed = 42;

  double scalar(const std::string& key, double fallback) const {
    auto it = scalars.find(key);
    return it == scalars.end() ? fallback : it->second;
  }
  Matrix matrix(const std::string& key, const Matrix& fallback) const {
    auto it = matrices.find(key);
    return it == matrices.end() ? fallback : it->second;
  }
};

struct ZooEntry {
  std::string key;
  std::function<OperatorInstance(const ZooParams&)> builder;
  std::string doc;
};

inline const std::vector<ZooEntry>& zoo() {
  static const std::vector<ZooEntry> entries = [] {
    std::vector<ZooEntry> e;
    e.push_back({"logistic",
                 [](const ZooParams& p) {
                   Matrix def(2, 1);
                   def << 1.0, 1.0;
                   return logistic_gradient(p.matrix("a", def).col(0));
                 },
                 "gradient of log(1+exp(-a^T x)); matrix param a (column), default (1,1)"});
    e.push_back({"quadratic", [](const ZooParams&) { return quadratic_minmax(); },
                 "1/2 w1^2 + w1 w2 - 1/2 w2^2"});
    e.push_back({"cubic1d", [](const ZooParams&) { return cubic_minmax_1d(); },
                 "1/3 w1^3 + w1 w2 - 1/3 w2^3"});
    e.push_back({"signpower", [](const ZooParams&) { return sign_power_strongly_monotone(); },
                 "(u1|u1| + u2, u2|u2| - u1)"});
    e.push_back({"cubicRd",
                 [](const ZooParams& p) {
                   const auto d = static_cast<std::size_t>(p.scalar("d", 10.0));
                   const CubicMatrices m = default_cubic_matrices(d, p.seed);
                   return cubic_minmax_Rd(p.matrix("A", m.A), p.matrix("B", m.B), p.matrix("C", m.C));
                 },
                 "1/3 (w1'Aw1)^{3/2} + w1'Bw2 - 1/3 (w2'Cw2)^{3/2}; scalar d (10), seeded matrices or A,B,C"});
    e.push_back({"power",
                 [](const ZooParams& p) {
                   return power_minmax(p.scalar("p", 2.0), p.matrix("B", Matrix::Identity(1, 1)),
                                       p.scalar("tau1", 1.0));
                 },
                 "1/(p+1)||w1||^{p+1} + w1'Bw2 - 1/(p+1)||w2||^{p+1}; p (2), tau1 (1), B ([[1]])"});
    e.push_back({"square", [](const ZooParams&) { return square_component_operator(); }, "(u1^2, u2^2)"});
    e.push_back({"forsaken", [](const ZooParams&) { return global_forsaken(); },
                 "GlobalForsaken w1 w2 + psi(w1) - psi(w2)"});
    e.push_back({"bilinear",
                 [](const ZooParams& p) {
                   const Matrix b = p.matrix("B", Matrix::Identity(1, 1));
                   const double r = p.scalar("R", 5.0);
                   if (p.scalar("quadratic", 0.0) != 0.0) {
                     return bilinear_coupled(half_square_component(b.rows()), half_square_component(b.rows()), b, r,
                                             MonotonicityParams::monotone());
                   }
                   const Vector a = Vector::Constant(b.rows(), p.scalar("a", 1.0));
                   return bilinear_coupled(logistic_component(a), logistic_component(a), b, r,
                                           MonotonicityParams::monotone());
                 },
                 "f(w1) + w1'Bw2 - g(w2) with logistic f = g (or quadratic=1 for 1/2||.||^2); R (5), B ([[1]])"});
    e.push_back({"nplayer",
                 [](const ZooParams& p) {
                   return cyclic_cubic_game(static_cast<std::size_t>(p.scalar("N", 3.0)), p.scalar("s", 1.0),
                                            p.scalar("R", 5.0));
                 },
                 "cyclic cubic N-player game; N (3), coupling s (1), box radius R (5)"});
    return e;
  }();
  return entries;
}

inline std::string zoo_keys() {
  std::ostringstream os;
  bool first = true;
  for (const auto& e : zoo()) {
    os << (first ? "" : ", ") << e.key;
    first = false;
  }
  return os.str();
}

inline OperatorInstance build_operator(const std::string& key, const ZooParams& params = {}) {
  for (const auto& e : zoo())
    if (e.key == key) return e.builder(params);
  throw Error(Errc::UnknownKey, "unknown operator '" + key + "' (valid: " + zoo_keys() + ")");
}

}  // namespace egsolve
