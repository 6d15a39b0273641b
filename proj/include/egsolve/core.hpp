#pragma once

// Shared domain types: checked vectors, class constants, operator
// descriptors, solver configuration and traces.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace egsolve {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Errc {
  NonFiniteValue,
  NonFiniteEvaluation,
  NonFiniteIterate,
  ConvergenceFailure,
  DimensionMismatch,
  InvalidArgument,
  ZeroParameter,
  NotPositiveDefinite,
  InvalidExponent,
  InvalidAlpha,
  BracketFailure,
  MissingConstant,
  MissingSolution,
  ZeroOperatorAtExtrapolation,
  IncompatiblePolicy,
  EmptyTrace,
  DegenerateSamples,
  UnknownKey,
  ParseError,
  RegistrationFailure,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case Errc::NonFiniteIterate: return "NonFiniteIterate";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ZeroParameter: return "ZeroParameter";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::InvalidExponent: return "InvalidExponent";
    case Errc::InvalidAlpha: return "InvalidAlpha";
    case Errc::BracketFailure: return "BracketFailure";
    case Errc::MissingConstant: return "MissingConstant";
    case Errc::MissingSolution: return "MissingSolution";
    case Errc::ZeroOperatorAtExtrapolation: return "ZeroOperatorAtExtrapolation";
    case Errc::IncompatiblePolicy: return "IncompatiblePolicy";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::DegenerateSamples: return "DegenerateSamples";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::ParseError: return "ParseError";
    case Errc::RegistrationFailure: return "RegistrationFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::size_t> iteration = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), iteration_(iteration) {}

  Errc code() const noexcept { return code_; }
  /// Iteration index for errors raised inside the solver loop.
  std::optional<std::size_t> iteration() const noexcept { return iteration_; }

 private:
  Errc code_;
  std::optional<std::size_t> iteration_;
};

inline bool all_finite(const Eigen::Ref<const Vector>& v) { return v.allFinite(); }

/// Dense real vector with finite entries and a fixed dimension >= 1.
class Vec {
 public:
  Vec(std::initializer_list<double> entries) : data_(static_cast<Eigen::Index>(entries.size())) {
    Eigen::Index i = 0;
    for (double e : entries) data_[i++] = e;
    validate();
  }
  explicit Vec(Vector entries) : data_(std::move(entries)) { validate(); }
  explicit Vec(const std::vector<double>& entries)
      : data_(Eigen::Map<const Vector>(entries.data(), static_cast<Eigen::Index>(entries.size()))) {
    validate();
  }

  static Vec zeros(std::size_t dim) { return Vec(Vector::Zero(static_cast<Eigen::Index>(dim))); }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(data_.size()); }
  double operator[](std::size_t i) const { return data_[static_cast<Eigen::Index>(i)]; }
  const Vector& eigen() const noexcept { return data_; }
  std::vector<double> to_std() const { return {data_.data(), data_.data() + data_.size()}; }

  friend bool operator==(const Vec& a, const Vec& b) {
    return a.data_.size() == b.data_.size() && a.data_ == b.data_;
  }

 private:
  void validate() const {
    if (data_.size() < 1) throw Error(Errc::InvalidArgument, "vector dimension must be >= 1");
    if (!data_.allFinite()) throw Error(Errc::NonFiniteValue, "vector entries must be finite");
  }

  Vector data_;
};

/// Constants (alpha, L0, L1) of the alpha-symmetric (L0, L1)-Lipschitz class.
struct SmoothnessParams {
  double alpha = 1.0;
  double L0 = 0.0;
  double L1 = 0.0;

  SmoothnessParams() = default;
  SmoothnessParams(double a, double l0, double l1) : alpha(a), L0(l0), L1(l1) { validate(); }

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(Errc::InvalidAlpha, "alpha must lie in (0, 1]");
    if (!(L0 >= 0.0) || !(L1 >= 0.0)) throw Error(Errc::InvalidArgument, "L0 and L1 must be >= 0");
    if (!(L0 + L1 > 0.0)) throw Error(Errc::InvalidArgument, "L0 + L1 must be > 0");
    if (!std::isfinite(L0) || !std::isfinite(L1)) throw Error(Errc::NonFiniteValue, "L0, L1 must be finite");
  }
};

enum class MonotoneClass { StronglyMonotone, Monotone, WeakMinty, Unspecified };

inline const char* to_string(MonotoneClass c) {
  switch (c) {
    case MonotoneClass::StronglyMonotone: return "strongly-monotone";
    case MonotoneClass::Monotone: return "monotone";
    case MonotoneClass::WeakMinty: return "weak-minty";
    case MonotoneClass::Unspecified: return "unspecified";
  }
  return "unknown";
}

/// Monotonicity class of an operator. mu > 0 only for StronglyMonotone,
/// rho >= 0 only for WeakMinty.
class MonotonicityParams {
 public:
  static MonotonicityParams strongly_monotone(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw Error(Errc::InvalidArgument, "mu must be > 0");
    return {MonotoneClass::StronglyMonotone, mu, 0.0};
  }
  static MonotonicityParams monotone() { return {MonotoneClass::Monotone, 0.0, 0.0}; }
  static MonotonicityParams weak_minty(double rho) {
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw Error(Errc::InvalidArgument, "rho must be >= 0");
    return {MonotoneClass::WeakMinty, 0.0, rho};
  }
  static MonotonicityParams unspecified() { return {MonotoneClass::Unspecified, 0.0, 0.0}; }

  MonotoneClass kind() const noexcept { return kind_; }
  double mu() const noexcept { return mu_; }
  double rho() const noexcept { return rho_; }

  /// rho usable by weak-Minty rules: monotone operators are weak Minty with rho = 0.
  std::optional<double> effective_rho() const {
    if (kind_ == MonotoneClass::WeakMinty) return rho_;
    if (kind_ == MonotoneClass::Monotone || kind_ == MonotoneClass::StronglyMonotone) return 0.0;
    return std::nullopt;
  }

 private:
  MonotonicityParams(MonotoneClass k, double mu, double rho) : kind_(k), mu_(mu), rho_(rho) {}

  MonotoneClass kind_;
  double mu_;
  double rho_;
};

using OperatorFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

/// An operator F: R^d -> R^d together with what is known about it.
/// eval must be a pure function of its input.
struct OperatorInstance {
  std::size_t dim = 0;
  OperatorFn eval;
  std::optional<JacobianFn> jacobian;
  std::optional<Vec> solution;
  SmoothnessParams smoothness;
  MonotonicityParams monotonicity = MonotonicityParams::unspecified();
  std::string label;

  Vector operator()(const Vector& x) const { return eval(x); }
};

inline constexpr double kSolutionResidualTol = 1e-12;

/// Checks the registration invariants; returns the instance unchanged on success.
inline OperatorInstance registered(OperatorInstance op) {
  if (op.dim < 1) throw Error(Errc::RegistrationFailure, op.label + ": dim must be >= 1");
  if (!op.eval) throw Error(Errc::RegistrationFailure, op.label + ": missing eval");
  op.smoothness.validate();
  const Vector probe = op.solution ? op.solution->eigen() : Vector::Zero(static_cast<Eigen::Index>(op.dim));
  if (static_cast<std::size_t>(probe.size()) != op.dim)
    throw Error(Errc::DimensionMismatch, op.label + ": solution has wrong dimension");
  const Vector value = op.eval(probe);
  if (static_cast<std::size_t>(value.size()) != op.dim)
    throw Error(Errc::DimensionMismatch, op.label + ": eval does not preserve dimension");
  if (op.solution) {
    if (!value.allFinite() || value.norm() > kSolutionResidualTol)
      throw Error(Errc::RegistrationFailure, op.label + ": ||F(x*)|| exceeds 1e-12");
  }
  return op;
}

struct SolveConfig {
  std::size_t max_iters = 1000;
  double stop_tol = 1e-14;
  Vec x0 = Vec{0.0};
  bool record_trace = true;
  /// Record every n-th visited iterate (the final one is always kept).
  std::size_t trace_stride = 1;
  /// Run even when the policy does not match the operator's declared class.
  bool force = false;

  void validate() const {
    if (max_iters < 1) throw Error(Errc::InvalidArgument, "max_iters must be >= 1");
    if (!(stop_tol > 0.0)) throw Error(Errc::InvalidArgument, "stop_tol must be > 0");
    if (trace_stride < 1) throw Error(Errc::InvalidArgument, "trace_stride must be >= 1");
  }
};

struct TraceRow {
  std::size_t k = 0;
  std::optional<Vec> x;      // absent when parsed back from CSV
  std::optional<Vec> xhat;
  double gamma = 0.0;
  double omega = 0.0;
  double norm_F_x = 0.0;
  double norm_F_xhat = 0.0;
  std::optional<double> dist_sq;
};

enum class StopReason { Tolerance, MaxIters, ExtrapolationRoot };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Tolerance: return "tolerance";
    case StopReason::MaxIters: return "max_iters";
    case StopReason::ExtrapolationRoot: return "extrapolation_root";
  }
  return "unknown";
}

struct TraceSummary {
  std::size_t iterations_run = 0;
  double min_norm_F_xk = std::numeric_limits<double>::infinity();
  std::size_t argmin_norm_F_xk = 0;
  double min_norm_F_xhatk = std::numeric_limits<double>::infinity();
  std::size_t argmin_norm_F_xhatk = 0;
  std::optional<double> initial_dist_sq;
  std::optional<double> final_dist_sq;
  StopReason reason = StopReason::MaxIters;
};

struct SolveTrace {
  std::vector<TraceRow> rows;
  TraceSummary summary;
  std::optional<Vec> final_x;
  std::vector<std::string> warnings;
};

}  // namespace egsolve
