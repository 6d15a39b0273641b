#pragma once

// The extragradient loop
//   xhat_k = x_k - gamma_k F(x_k),   x_{k+1} = x_k - omega_k F(xhat_k)
// with pluggable step-size policies and per-iterate invariant checks.

#include "egsolve/core.hpp"
#include "egsolve/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

namespace egsolve {

struct IterationState {
  std::size_t k = 0;
  Vector x;
  Vector F_x;
  double norm_F_x = 0.0;
  double gamma = 0.0;
  Vector xhat;
  Vector F_xhat;
  double norm_F_xhat = 0.0;
  double omega = 0.0;
  Vector x_next;
  /// F(xhat) = 0 under the Pethick rule; omega is then set to gamma and the
  /// update is not applied.
  bool extrapolation_root = false;
};

namespace detail {

inline Vector checked_eval(const OperatorInstance& op, const Vector& x, std::size_t k, const char* what) {
  Vector f = op.eval(x);
  if (static_cast<std::size_t>(f.size()) != op.dim)
    throw Error(Errc::DimensionMismatch, std::string(what) + " has wrong dimension", k);
  if (!f.allFinite()) throw Error(Errc::NonFiniteIterate, std::string(what) + " is not finite", k);
  return f;
}

inline void require_finite(double v, std::size_t k, const char* what) {
  if (!std::isfinite(v)) throw Error(Errc::NonFiniteIterate, std::string(what) + " is not finite", k);
}

}  // namespace detail

/// One extragradient step from x_k. F(x_k) may be passed in when already known.
inline IterationState eg_step(const OperatorInstance& op, const Vector& x_k, const StepSizePolicy& policy,
                              std::size_t k = 0, const Vector* F_x_k = nullptr) {
  if (static_cast<std::size_t>(x_k.size()) != op.dim)
    throw Error(Errc::DimensionMismatch, "iterate dimension differs from the operator's", k);
  if (!x_k.allFinite()) throw Error(Errc::NonFiniteIterate, "x_k is not finite", k);
  IterationState st;
  st.k = k;
  st.x = x_k;
  st.F_x = F_x_k ? *F_x_k : detail::checked_eval(op, x_k, k, "F(x_k)");
  st.norm_F_x = st.F_x.norm();
  detail::require_finite(st.norm_F_x, k, "||F(x_k)||");
  st.gamma = gamma(policy, st.norm_F_x, op.smoothness, op.monotonicity);
  detail::require_finite(st.gamma, k, "gamma_k");
  st.xhat = x_k - st.gamma * st.F_x;
  if (!st.xhat.allFinite()) throw Error(Errc::NonFiniteIterate, "xhat_k is not finite", k);
  st.F_xhat = detail::checked_eval(op, st.xhat, k, "F(xhat_k)");
  st.norm_F_xhat = st.F_xhat.norm();
  detail::require_finite(st.norm_F_xhat, k, "||F(xhat_k)||");

  std::optional<PethickContext> ctx;
  if (policy.omega_rule == OmegaRule::Pethick) {
    std::optional<double> rho = policy.rho ? policy.rho : op.monotonicity.effective_rho();
    if (!rho) throw Error(Errc::MissingConstant, "Pethick rule needs rho", k);
    ctx = PethickContext{st.F_xhat, x_k - st.xhat, *rho};
    if (st.norm_F_xhat == 0.0) {
      st.extrapolation_root = true;
      st.omega = st.gamma;
      st.x_next = st.xhat;
      return st;
    }
  }
  st.omega = omega(policy, st.gamma, ctx);
  detail::require_finite(st.omega, k, "omega_k");
  if (!(st.omega > 0.0)) throw Error(Errc::ConvergenceFailure, "update step omega_k is not positive", k);
  st.x_next = x_k - st.omega * st.F_xhat;
  if (!st.x_next.allFinite()) throw Error(Errc::NonFiniteIterate, "x_{k+1} is not finite", k + 1);
  return st;
}

using IterationObserver = std::function<void(const IterationState&)>;

/// Runs the loop over iterates k = 0, 1, ..., max_iters - 1, stopping early
/// once ||F(x_k)|| <= stop_tol. Every visited iterate gets a full step state;
/// the update from the last one is not applied.
inline SolveTrace solve(const OperatorInstance& op, const StepSizePolicy& policy, const SolveConfig& cfg,
                        const IterationObserver& observer = {}) {
  cfg.validate();
  policy.validate();
  if (cfg.x0.dim() != op.dim) throw Error(Errc::DimensionMismatch, "x0 dimension differs from the operator's");

  SolveTrace trace;
  if (auto why = incompatibility(policy, op.smoothness, op.monotonicity)) {
    if (!cfg.force) throw Error(Errc::IncompatiblePolicy, *why + " (use the force override to run anyway)");
    trace.warnings.push_back(*why);
  }

  const std::optional<Vector> xs = op.solution ? std::optional<Vector>(op.solution->eigen()) : std::nullopt;
  auto dist_sq = [&](const Vector& x) -> std::optional<double> {
    if (!xs) return std::nullopt;
    return (x - *xs).squaredNorm();
  };

  TraceSummary& sum = trace.summary;
  Vector x = cfg.x0.eigen();
  sum.initial_dist_sq = dist_sq(x);
  for (std::size_t k = 0;; ++k) {
    const IterationState st = eg_step(op, x, policy, k);
    if (observer) observer(st);

    if (st.norm_F_x < sum.min_norm_F_xk) {
      sum.min_norm_F_xk = st.norm_F_x;
      sum.argmin_norm_F_xk = k;
    }
    if (st.norm_F_xhat < sum.min_norm_F_xhatk) {
      sum.min_norm_F_xhatk = st.norm_F_xhat;
      sum.argmin_norm_F_xhatk = k;
    }

    std::optional<StopReason> stop;
    if (st.norm_F_x <= cfg.stop_tol) stop = StopReason::Tolerance;
    else if (st.extrapolation_root) stop = StopReason::ExtrapolationRoot;
    else if (k + 1 >= cfg.max_iters) stop = StopReason::MaxIters;

    if (cfg.record_trace && (k % cfg.trace_stride == 0 || stop)) {
      TraceRow row;
      row.k = k;
      row.x = Vec(st.x);
      row.xhat = Vec(st.xhat);
      row.gamma = st.gamma;
      row.omega = st.omega;
      row.norm_F_x = st.norm_F_x;
      row.norm_F_xhat = st.norm_F_xhat;
      row.dist_sq = dist_sq(st.x);
      trace.rows.push_back(std::move(row));
    }

    if (stop) {
      sum.reason = *stop;
      sum.iterations_run = k;
      sum.final_dist_sq = dist_sq(st.x);
      trace.final_x = Vec(st.x);
      break;
    }
    x = st.x_next;
  }
  return trace;
}

struct DescentReport {
  std::size_t pairs_checked = 0;
  std::size_t violations = 0;
  /// Largest lhs - rhs over checked pairs; <= slack when everything holds.
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t worst_k = 0;
  /// Weak Minty only: the step-size margin of the local guarantee.
  std::optional<double> delta1;
  bool guarantee_void = false;
};

inline constexpr double kDescentSlack = 1e-10;

/// Checks the class's per-iterate distance inequality on every pair of
/// consecutive recorded rows (k, k+1):
///   strongly monotone  d_{k+1} <= (1 - gamma_k mu) d_k
///   monotone           d_{k+1} <= d_k - gamma_k^2 / 2 ||F(x_k)||^2
///   weak Minty         d_{k+1} <= d_k - gamma_k / 4 (gamma_k - 4 rho) ||F(xhat_k)||^2, when gamma_k > 4 rho
/// where d_k = ||x_k - x*||^2. Slack is 1e-10 relative to max(1, d_k).
/// `constants` feeds delta1 and defaults to the operator's declared ones.
inline DescentReport check_descent_invariants(const SolveTrace& trace, const OperatorInstance& op,
                                              const MonotonicityParams& m,
                                              std::optional<SmoothnessParams> constants = std::nullopt) {
  if (!op.solution) throw Error(Errc::MissingSolution, "descent invariants need a known solution");
  if (m.kind() == MonotoneClass::Unspecified)
    throw Error(Errc::InvalidArgument, "no descent inequality for an unspecified class");
  const Vector& xs = op.solution->eigen();
  DescentReport rep;

  if (m.kind() == MonotoneClass::WeakMinty && !trace.rows.empty() && trace.rows.front().x) {
    const SmoothnessParams c = constants ? *constants : op.smoothness;
    const double r0 = (trace.rows.front().x->eigen() - xs).norm();
    rep.delta1 = nu(NuKind::WeakMinty_A1) / (c.L0 * (1.0 + c.L1 * r0 * std::exp(c.L1 * r0))) - 4.0 * m.rho();
    rep.guarantee_void = !(*rep.delta1 > 0.0);
  }

  for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i) {
    const TraceRow& a = trace.rows[i];
    const TraceRow& b = trace.rows[i + 1];
    if (b.k != a.k + 1 || !a.x || !b.x) continue;
    const double dk = (a.x->eigen() - xs).squaredNorm();
    const double dk1 = (b.x->eigen() - xs).squaredNorm();
    double rhs = 0.0;
    switch (m.kind()) {
      case MonotoneClass::StronglyMonotone: rhs = (1.0 - a.gamma * m.mu()) * dk; break;
      case MonotoneClass::Monotone: rhs = dk - 0.5 * a.gamma * a.gamma * a.norm_F_x * a.norm_F_x; break;
      case MonotoneClass::WeakMinty:
        if (!(a.gamma > 4.0 * m.rho())) continue;
        rhs = dk - 0.25 * a.gamma * (a.gamma - 4.0 * m.rho()) * a.norm_F_xhat * a.norm_F_xhat;
        break;
      case MonotoneClass::Unspecified: break;
    }
    const double excess = dk1 - rhs;
    ++rep.pairs_checked;
    if (excess > kDescentSlack * std::max(1.0, dk)) ++rep.violations;
    if (excess > rep.worst) {
      rep.worst = excess;
      rep.worst_k = a.k;
    }
  }
  return rep;
}

}  // namespace egsolve
