#pragma once

// Step-size policies: the adaptive rules per operator class, nu-equation
// roots, the K-constants of the fractional-alpha bound and the baseline schedules.

#include "egsolve/core.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace egsolve {

enum class NuKind { StrongMono_A1, StrongMono_Cor, StrongMono_A01, Mono_A1, WeakMinty_A1 };

inline constexpr std::array<NuKind, 5> kAllNuKinds = {NuKind::StrongMono_A1, NuKind::StrongMono_Cor,
                                                      NuKind::StrongMono_A01, NuKind::Mono_A1,
                                                      NuKind::WeakMinty_A1};

inline const char* to_string(NuKind k) {
  switch (k) {
    case NuKind::StrongMono_A1: return "StrongMono_A1";
    case NuKind::StrongMono_Cor: return "StrongMono_Cor";
    case NuKind::StrongMono_A01: return "StrongMono_A01";
    case NuKind::Mono_A1: return "Mono_A1";
    case NuKind::WeakMinty_A1: return "WeakMinty_A1";
  }
  return "unknown";
}

inline std::optional<NuKind> parse_nu_kind(std::string_view s) {
  for (NuKind k : kAllNuKinds)
    if (s == to_string(k)) return k;
  return std::nullopt;
}

inline double nu_residual(NuKind kind, double v) {
  switch (kind) {
    case NuKind::StrongMono_A1: return 1.0 - 2.0 * v - v * v * std::exp(2.0 * v);
    case NuKind::StrongMono_Cor: return 1.0 - 4.0 * v - 2.0 * v * v * std::exp(2.0 * v);
    case NuKind::StrongMono_A01: return 1.0 - v - v * v;
    case NuKind::Mono_A1: return v * std::exp(v) - 1.0 / std::numbers::sqrt2;
    case NuKind::WeakMinty_A1: return v * std::exp(v) - 1.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline constexpr double kNuBracketLo = 1e-9;
inline constexpr double kNuBracketHi = 1.0;

/// Bisection on [1e-9, 1]. Stops once |residual| <= tol or the bracket
/// cannot shrink further in double precision.
inline double solve_nu(NuKind kind, double tol = 1e-15) {
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "solve_nu: tol must be > 0");
  double lo = kNuBracketLo;
  double hi = kNuBracketHi;
  double rlo = nu_residual(kind, lo);
  const double rhi = nu_residual(kind, hi);
  if (!(rlo * rhi < 0.0)) throw Error(Errc::BracketFailure, std::string("no sign change for ") + to_string(kind));
  double best = lo;
  double best_r = std::abs(rlo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double rmid = nu_residual(kind, mid);
    if (std::abs(rmid) < best_r) {
      best = mid;
      best_r = std::abs(rmid);
    }
    if (best_r <= tol || mid <= lo || mid >= hi) break;
    if ((rmid < 0.0) == (rlo < 0.0)) {
      lo = mid;
      rlo = rmid;
    } else {
      hi = mid;
    }
  }
  return best;
}

/// Root at full double precision, computed once per kind.
inline double nu(NuKind kind) {
  static const std::array<double, 5> roots = [] {
    std::array<double, 5> r{};
    for (std::size_t i = 0; i < kAllNuKinds.size(); ++i) r[i] = solve_nu(kAllNuKinds[i], 1e-300);
    return r;
  }();
  return roots[static_cast<std::size_t>(kind)];
}

struct KConstants {
  double K0 = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double alpha = 0.5;
};

inline KConstants k_constants(const SmoothnessParams& s) {
  if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw Error(Errc::InvalidAlpha, "k_constants needs alpha in (0, 1)");
  const double a = s.alpha;
  const double t = std::pow(2.0, a * a / (1.0 - a));
  KConstants k;
  k.alpha = a;
  k.K0 = s.L0 * (t + 1.0);
  k.K1 = s.L1 * t;
  k.K2 = s.L1 == 0.0 ? 0.0
                     : std::pow(s.L1, 1.0 / (1.0 - a)) * t * std::pow(3.0, a) * std::pow(1.0 - a, a / (1.0 - a));
  return k;
}

/// r^alpha as exp(alpha ln r), with 0^alpha = 0.
inline double pow_alpha(double r, double alpha) {
  if (r == 0.0) return 0.0;
  return std::exp(alpha * std::log(r));
}

enum class PolicyKind {
  Constant,
  AdaptiveGeneral,
  Theorem3,
  Corollary1,
  Theorem4,
  Theorem5,
  Theorem7,
  Theorem8,
  Theorem9,
  VankovBaseline,
  PethickAdaptive,
  EGplusConstant,
};

enum class OmegaRule { EqualGamma, HalfGamma, Pethick };

inline const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Constant: return "Constant";
    case PolicyKind::AdaptiveGeneral: return "AdaptiveGeneral";
    case PolicyKind::Theorem3: return "Theorem3";
    case PolicyKind::Corollary1: return "Corollary1";
    case PolicyKind::Theorem4: return "Theorem4";
    case PolicyKind::Theorem5: return "Theorem5";
    case PolicyKind::Theorem7: return "Theorem7";
    case PolicyKind::Theorem8: return "Theorem8";
    case PolicyKind::Theorem9: return "Theorem9";
    case PolicyKind::VankovBaseline: return "VankovBaseline";
    case PolicyKind::PethickAdaptive: return "PethickAdaptive";
    case PolicyKind::EGplusConstant: return "EGplusConstant";
  }
  return "unknown";
}

inline OmegaRule forced_omega_rule(PolicyKind k) {
  switch (k) {
    case PolicyKind::Theorem8:
    case PolicyKind::Theorem9:
    case PolicyKind::EGplusConstant: return OmegaRule::HalfGamma;
    case PolicyKind::PethickAdaptive: return OmegaRule::Pethick;
    default: return OmegaRule::EqualGamma;
  }
}

/// A rule (||F(x_k)||, constants) -> (gamma_k, omega_k).
///
/// Theorem kinds read (alpha, L0, L1) from `constants` when set and from the
/// operator's declared constants otherwise.
struct StepSizePolicy {
  PolicyKind kind = PolicyKind::Constant;
  OmegaRule omega_rule = OmegaRule::EqualGamma;
  double step = 0.1;  // Constant, EG+ and Pethick extrapolation step
  double c0 = 0.0;    // AdaptiveGeneral
  double c1 = 0.0;
  double alpha = 1.0;
  std::optional<SmoothnessParams> constants;
  std::optional<double> mu;   // Vankov; falls back to the operator's declared mu
  std::optional<double> rho;  // Pethick; falls back to the operator's effective rho
  double relaxation = 1.0;    // Pethick: omega is scaled by this factor
  std::string key;

  static StepSizePolicy constant(double gamma, OmegaRule rule = OmegaRule::EqualGamma) {
    StepSizePolicy p;
    p.kind = PolicyKind::Constant;
    p.omega_rule = rule;
    p.step = gamma;
    p.validate();
    return p;
  }
  static StepSizePolicy eg_plus(double gamma) {
    StepSizePolicy p;
    p.kind = PolicyKind::EGplusConstant;
    p.omega_rule = OmegaRule::HalfGamma;
    p.step = gamma;
    p.validate();
    return p;
  }
  static StepSizePolicy adaptive(double c0, double c1, double alpha = 1.0, OmegaRule rule = OmegaRule::EqualGamma) {
    StepSizePolicy p;
    p.kind = PolicyKind::AdaptiveGeneral;
    p.omega_rule = rule;
    p.c0 = c0;
    p.c1 = c1;
    p.alpha = alpha;
    p.validate();
    return p;
  }
  static StepSizePolicy theorem(PolicyKind kind, std::optional<SmoothnessParams> constants = std::nullopt) {
    StepSizePolicy p;
    p.kind = kind;
    p.omega_rule = forced_omega_rule(kind);
    p.constants = constants;
    p.validate();
    return p;
  }
  static StepSizePolicy vankov(std::optional<double> mu = std::nullopt,
                               std::optional<SmoothnessParams> constants = std::nullopt) {
    StepSizePolicy p;
    p.kind = PolicyKind::VankovBaseline;
    p.mu = mu;
    p.constants = constants;
    p.validate();
    return p;
  }
  static StepSizePolicy pethick(double gamma, double relaxation = 1.0, std::optional<double> rho = std::nullopt) {
    StepSizePolicy p;
    p.kind = PolicyKind::PethickAdaptive;
    p.omega_rule = OmegaRule::Pethick;
    p.step = gamma;
    p.relaxation = relaxation;
    p.rho = rho;
    p.validate();
    return p;
  }

  bool is_theorem() const {
    switch (kind) {
      case PolicyKind::Theorem3:
      case PolicyKind::Corollary1:
      case PolicyKind::Theorem4:
      case PolicyKind::Theorem5:
      case PolicyKind::Theorem7:
      case PolicyKind::Theorem8:
      case PolicyKind::Theorem9: return true;
      default: return false;
    }
  }

  void validate() const {
    const bool fixed_step = kind == PolicyKind::Constant || kind == PolicyKind::EGplusConstant ||
                            kind == PolicyKind::PethickAdaptive;
    if (fixed_step && !(step > 0.0 && std::isfinite(step)))
      throw Error(Errc::InvalidArgument, "step size must be finite and > 0");
    if (kind == PolicyKind::AdaptiveGeneral) {
      if (!(c0 >= 0.0) || !(c1 >= 0.0) || !(c0 + c1 > 0.0) || !std::isfinite(c0 + c1))
        throw Error(Errc::InvalidArgument, "adaptive policy needs c0, c1 >= 0 with c0 + c1 > 0");
      if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(Errc::InvalidAlpha, "adaptive alpha must lie in (0, 1]");
    }
    if (kind != PolicyKind::Constant && kind != PolicyKind::AdaptiveGeneral && omega_rule != forced_omega_rule(kind))
      throw Error(Errc::InvalidArgument, std::string(to_string(kind)) + " fixes its omega rule");
    if (omega_rule == OmegaRule::Pethick && kind != PolicyKind::PethickAdaptive)
      throw Error(Errc::InvalidArgument, "the Pethick omega rule belongs to the Pethick policy");
    if (mu && !(*mu > 0.0)) throw Error(Errc::InvalidArgument, "mu must be > 0");
    if (rho && !(*rho >= 0.0)) throw Error(Errc::InvalidArgument, "rho must be >= 0");
    if (!(relaxation > 0.0 && relaxation <= 1.0)) throw Error(Errc::InvalidArgument, "relaxation must lie in (0, 1]");
    if (constants) constants->validate();
  }
};

namespace detail {

inline double checked_step(double denom) {
  if (!(denom > 0.0) || !std::isfinite(denom))
    throw Error(Errc::MissingConstant, "step-size denominator is zero; constants too small for this point");
  return 1.0 / denom;
}

}  // namespace detail

/// gamma_k for the policy at ||F(x_k)|| = normF.
inline double gamma(const StepSizePolicy& policy, double normF, const SmoothnessParams& s,
                    const MonotonicityParams& m) {
  if (!(normF >= 0.0) || !std::isfinite(normF)) throw Error(Errc::NonFiniteValue, "gamma: normF must be finite");
  const SmoothnessParams& c = policy.constants ? *policy.constants : s;
  switch (policy.kind) {
    case PolicyKind::Constant:
    case PolicyKind::EGplusConstant:
    case PolicyKind::PethickAdaptive: return policy.step;
    case PolicyKind::AdaptiveGeneral:
      return detail::checked_step(policy.c0 + policy.c1 * pow_alpha(normF, policy.alpha));
    case PolicyKind::Theorem3: return nu(NuKind::StrongMono_A1) * detail::checked_step(c.L0 + c.L1 * normF);
    case PolicyKind::Corollary1: return nu(NuKind::StrongMono_Cor) * detail::checked_step(c.L0 + c.L1 * normF);
    case PolicyKind::Theorem5: return nu(NuKind::Mono_A1) * detail::checked_step(c.L0 + c.L1 * normF);
    case PolicyKind::Theorem8: return nu(NuKind::WeakMinty_A1) * detail::checked_step(c.L0 + c.L1 * normF);
    case PolicyKind::Theorem4:
    case PolicyKind::Theorem7:
    case PolicyKind::Theorem9: {
      if (!(c.alpha < 1.0)) throw Error(Errc::MissingConstant, "K-constants need alpha < 1");
      const KConstants k = k_constants(c);
      const double ra = pow_alpha(normF, c.alpha);
      const double k2 = k.K2 == 0.0 ? 0.0 : std::pow(k.K2, 1.0 - c.alpha);
      if (policy.kind == PolicyKind::Theorem4) {
        const double denom = 2.0 * k.K0 + (2.0 * k.K1 + std::pow(2.0, 1.0 - c.alpha) * k2) * ra;
        return nu(NuKind::StrongMono_A01) * detail::checked_step(denom);
      }
      const double r8 = 2.0 * std::numbers::sqrt2;
      const double denom = r8 * k.K0 + (r8 * k.K1 + std::pow(2.0, 1.5 * (1.0 - c.alpha)) * k2) * ra;
      return detail::checked_step(denom);
    }
    case PolicyKind::VankovBaseline: {
      std::optional<double> mu = policy.mu;
      if (!mu && m.kind() == MonotoneClass::StronglyMonotone) mu = m.mu();
      if (!mu) throw Error(Errc::MissingConstant, "Vankov baseline needs mu");
      const double e = std::numbers::e;
      double g = 1.0 / (4.0 * *mu);
      if (c.L0 > 0.0) g = std::min(g, 1.0 / (2.0 * std::numbers::sqrt2 * e * c.L0));
      if (c.L1 * normF > 0.0) g = std::min(g, 1.0 / (2.0 * std::numbers::sqrt2 * e * c.L1 * normF));
      return g;
    }
  }
  throw Error(Errc::InvalidArgument, "unknown policy kind");
}

/// Quantities the Pethick rule reads at the extrapolated point.
struct PethickContext {
  Vector F_xhat;
  Vector x_minus_xhat;
  double rho = 0.0;
};

inline double omega(const StepSizePolicy& policy, double gamma_k, const std::optional<PethickContext>& ctx = {}) {
  if (!(gamma_k > 0.0)) throw Error(Errc::InvalidArgument, "omega: gamma must be > 0");
  switch (policy.omega_rule) {
    case OmegaRule::EqualGamma: return gamma_k;
    case OmegaRule::HalfGamma: return 0.5 * gamma_k;
    case OmegaRule::Pethick: {
      if (!ctx) throw Error(Errc::InvalidArgument, "Pethick rule needs the extrapolation context");
      const double fsq = ctx->F_xhat.squaredNorm();
      if (fsq == 0.0) throw Error(Errc::ZeroOperatorAtExtrapolation, "F(xhat) = 0");
      return policy.relaxation * (ctx->rho + ctx->F_xhat.dot(ctx->x_minus_xhat) / fsq);
    }
  }
  throw Error(Errc::InvalidArgument, "unknown omega rule");
}

/// Why `policy` does not match an operator with these constants and class,
/// or nullopt when it does. Generic schedules match every operator.
inline std::optional<std::string> incompatibility(const StepSizePolicy& policy, const SmoothnessParams& s,
                                                  const MonotonicityParams& m) {
  const SmoothnessParams& c = policy.constants ? *policy.constants : s;
  const MonotoneClass cls = m.kind();
  const bool strong = cls == MonotoneClass::StronglyMonotone;
  const bool mono = strong || cls == MonotoneClass::Monotone;
  const bool minty = mono || cls == MonotoneClass::WeakMinty;
  const std::string name = to_string(policy.kind);
  switch (policy.kind) {
    case PolicyKind::Constant:
    case PolicyKind::AdaptiveGeneral:
    case PolicyKind::EGplusConstant: return std::nullopt;
    case PolicyKind::Theorem3:
    case PolicyKind::Corollary1:
      if (!strong) return name + " needs a strongly monotone operator";
      break;
    case PolicyKind::Theorem4:
      if (!strong) return name + " needs a strongly monotone operator";
      break;
    case PolicyKind::Theorem5:
    case PolicyKind::Theorem7:
      if (!mono) return name + " needs a monotone operator";
      break;
    case PolicyKind::Theorem8:
    case PolicyKind::Theorem9:
    case PolicyKind::PethickAdaptive:
      if (!minty) return name + " needs a weak Minty operator";
      break;
    case PolicyKind::VankovBaseline:
      if (!strong) return name + " needs a strongly monotone operator";
      break;
  }
  const bool wants_alpha_one = policy.kind == PolicyKind::Theorem3 || policy.kind == PolicyKind::Corollary1 ||
                               policy.kind == PolicyKind::Theorem5 || policy.kind == PolicyKind::Theorem8 ||
                               policy.kind == PolicyKind::VankovBaseline;
  const bool wants_alpha_below_one = policy.kind == PolicyKind::Theorem4 || policy.kind == PolicyKind::Theorem7 ||
                                     policy.kind == PolicyKind::Theorem9;
  if (wants_alpha_one && c.alpha != 1.0) return name + " needs alpha = 1";
  if (wants_alpha_below_one && !(c.alpha < 1.0)) return name + " needs alpha < 1";
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Text keys

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_real(const std::string& s, const std::string& context) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty())
    throw Error(Errc::ParseError, "'" + s + "' is not a number in '" + context + "'");
  return v;
}

}  // namespace detail

inline constexpr const char* kPolicyKeyHelp =
    "thm3[:L0:L1], cor1[:L0:L1], thm5[:L0:L1], thm8[:L0:L1], thm4[:alpha:L0:L1], thm7[:alpha:L0:L1], "
    "thm9[:alpha:L0:L1], strongly-monotone, monotone, weak-minty, vankov[:mu[:L0:L1]], pethick:gamma[:lambda], "
    "egplus:gamma, const:gamma, adaptive:c0:c1:alpha[:half]";

/// Parses a policy key such as "thm3", "const:0.1" or "adaptive:10:10:1".
inline StepSizePolicy parse_policy(const std::string& key) {
  const auto parts = detail::split(key, ':');
  const std::string& head = parts[0];
  auto arg = [&](std::size_t i) { return detail::parse_real(parts.at(i), key); };
  auto bad = [&]() -> Error {
    return Error(Errc::UnknownKey, "unknown policy '" + key + "' (valid: " + kPolicyKeyHelp + ")");
  };
  const std::size_t n = parts.size() - 1;

  StepSizePolicy p;
  auto alpha_one = [&](PolicyKind kind) {
    if (n == 0) return StepSizePolicy::theorem(kind);
    if (n == 2) return StepSizePolicy::theorem(kind, SmoothnessParams(1.0, arg(1), arg(2)));
    throw bad();
  };
  auto alpha_free = [&](PolicyKind kind) {
    if (n == 0) return StepSizePolicy::theorem(kind);
    if (n == 3) return StepSizePolicy::theorem(kind, SmoothnessParams(arg(1), arg(2), arg(3)));
    throw bad();
  };

  if (head == "thm3") p = alpha_one(PolicyKind::Theorem3);
  else if (head == "cor1" || (head == "strongly-monotone" && n == 0)) p = alpha_one(PolicyKind::Corollary1);
  else if (head == "thm5" || (head == "monotone" && n == 0)) p = alpha_one(PolicyKind::Theorem5);
  else if (head == "thm8" || (head == "weak-minty" && n == 0)) p = alpha_one(PolicyKind::Theorem8);
  else if (head == "thm4") p = alpha_free(PolicyKind::Theorem4);
  else if (head == "thm7") p = alpha_free(PolicyKind::Theorem7);
  else if (head == "thm9") p = alpha_free(PolicyKind::Theorem9);
  else if (head == "vankov") {
    if (n == 0) p = StepSizePolicy::vankov();
    else if (n == 1) p = StepSizePolicy::vankov(arg(1));
    else if (n == 3) p = StepSizePolicy::vankov(arg(1), SmoothnessParams(1.0, arg(2), arg(3)));
    else throw bad();
  } else if (head == "pethick") {
    if (n == 1) p = StepSizePolicy::pethick(arg(1));
    else if (n == 2) p = StepSizePolicy::pethick(arg(1), arg(2));
    else throw bad();
  } else if (head == "egplus") {
    if (n != 1) throw bad();
    p = StepSizePolicy::eg_plus(arg(1));
  } else if (head == "const") {
    if (n != 1) throw bad();
    p = StepSizePolicy::constant(arg(1));
  } else if (head == "adaptive") {
    if (n == 3) p = StepSizePolicy::adaptive(arg(1), arg(2), arg(3));
    else if (n == 4 && parts[4] == "half") p = StepSizePolicy::adaptive(arg(1), arg(2), arg(3), OmegaRule::HalfGamma);
    else throw bad();
  } else {
    throw bad();
  }
  p.key = key;
  return p;
}

}  // namespace egsolve
