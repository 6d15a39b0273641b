#pragma once

// Empirical smoothness tools: Jacobian/operator scatter, grid and segment
// checks of the (L0, L1) condition, two-point growth-bound sampling, envelope fits
// and closed-form iteration bounds.

#include "egsolve/core.hpp"
#include "egsolve/linalg.hpp"
#include "egsolve/parallel.hpp"
#include "egsolve/random.hpp"
#include "egsolve/stepsize.hpp"
#include "egsolve/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace egsolve {

struct ScatterSample {
  double norm_F = 0.0;
  double norm_J = 0.0;
  long iterate_index = -1;  // -1 for grid samples
};

struct SmoothnessFit {
  double alpha_hat = 1.0;
  double L0_hat = 0.0;
  double L1_hat = 0.0;
  /// min over samples of L0 + L1 ||F||^alpha - ||J||; negative means violated.
  double max_violation = 0.0;
  std::vector<ScatterSample> samples;
};

inline constexpr double kConditionSlack = 1e-10;

inline bool passes(const SmoothnessFit& fit) { return fit.max_violation >= -kConditionSlack; }

/// Axis-aligned box lo <= x <= hi.
struct Box {
  Vector lo;
  Vector hi;

  static Box cube(std::size_t dim, double radius) {
    const auto d = static_cast<Eigen::Index>(dim);
    return {Vector::Constant(d, -radius), Vector::Constant(d, radius)};
  }
  std::size_t dim() const { return static_cast<std::size_t>(lo.size()); }
  void validate() const {
    if (lo.size() < 1 || lo.size() != hi.size()) throw Error(Errc::DimensionMismatch, "box bounds differ in size");
    if (!lo.allFinite() || !hi.allFinite() || (hi - lo).minCoeff() < 0.0)
      throw Error(Errc::InvalidArgument, "box needs finite bounds with lo <= hi");
  }
};

namespace detail {

inline void require_box_dim(const OperatorInstance& op, const Box& box) {
  box.validate();
  if (box.dim() != op.dim) throw Error(Errc::DimensionMismatch, "box dimension differs from the operator's");
}

inline constexpr std::size_t kMaxGridPoints = 100'000'000;

inline std::size_t grid_size(std::size_t n, std::size_t d) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (total > kMaxGridPoints / n) throw Error(Errc::InvalidArgument, "grid has more than 1e8 points");
    total *= n;
  }
  return total;
}

inline Vector grid_point(const Box& box, std::size_t n, std::size_t flat) {
  Vector x(box.lo.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const std::size_t idx = flat % n;
    flat /= n;
    const double t = static_cast<double>(idx) / static_cast<double>(n - 1);
    x[j] = box.lo[j] + t * (box.hi[j] - box.lo[j]);
  }
  return x;
}

inline double g_value(const OperatorInstance& op, const SmoothnessParams& s, const Vector& x) {
  const double nf = op.eval(x).norm();
  const double nj = spectral_norm(jacobian_at(op, x));
  return s.L0 + s.L1 * pow_alpha(nf, s.alpha) - nj;
}

inline constexpr std::size_t kChunk = 1024;

}  // namespace detail

/// One sample per recorded iterate, ||J(x_k)|| by spectral_norm.
inline std::vector<ScatterSample> scatter_from_trace(const OperatorInstance& op, const SolveTrace& trace) {
  if (trace.rows.empty()) throw Error(Errc::EmptyTrace, "trace has no rows");
  std::vector<ScatterSample> out;
  out.reserve(trace.rows.size());
  for (const TraceRow& r : trace.rows) {
    if (!r.x) throw Error(Errc::InvalidArgument, "trace rows carry no iterates");
    const Vector& x = r.x->eigen();
    out.push_back({op.eval(x).norm(), spectral_norm(jacobian_at(op, x)), static_cast<long>(r.k)});
  }
  return out;
}

/// One sample per point of the grid_n^d grid over box.
inline std::vector<ScatterSample> scatter_from_grid(const OperatorInstance& op, const Box& box, std::size_t grid_n) {
  detail::require_box_dim(op, box);
  if (grid_n < 2) throw Error(Errc::InvalidArgument, "grid_n must be >= 2");
  const std::size_t total = detail::grid_size(grid_n, box.dim());
  std::vector<ScatterSample> out(total);
  parallel_for((total + detail::kChunk - 1) / detail::kChunk, [&](std::size_t c) {
    for (std::size_t i = c * detail::kChunk; i < std::min(total, (c + 1) * detail::kChunk); ++i) {
      const Vector x = detail::grid_point(box, grid_n, i);
      out[i] = {op.eval(x).norm(), spectral_norm(jacobian_at(op, x)), -1};
    }
  });
  return out;
}

/// Evaluates g(x) = L0 + L1 ||F(x)||^alpha - ||J(x)|| on the grid_n^d grid
/// over box; max_violation is the minimum of g. The fit echoes s.
inline SmoothnessFit verify_condition(const OperatorInstance& op, const SmoothnessParams& s, const Box& box,
                                      std::size_t grid_n) {
  detail::require_box_dim(op, box);
  if (grid_n < 2) throw Error(Errc::InvalidArgument, "grid_n must be >= 2");
  s.validate();
  const std::size_t total = detail::grid_size(grid_n, box.dim());
  const auto mins = map_chunks<double>(total, detail::kChunk, [&](std::size_t b, std::size_t e) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = b; i < e; ++i) m = std::min(m, detail::g_value(op, s, detail::grid_point(box, grid_n, i)));
    return m;
  });
  SmoothnessFit fit{s.alpha, s.L0, s.L1, *std::min_element(mins.begin(), mins.end()), {}};
  return fit;
}

/// Same check at n seeded uniform points, for boxes too high-dimensional to grid.
inline SmoothnessFit verify_condition_sampled(const OperatorInstance& op, const SmoothnessParams& s, const Box& box,
                                              std::size_t n, std::uint64_t seed = 42) {
  detail::require_box_dim(op, box);
  if (n < 1) throw Error(Errc::InvalidArgument, "need at least one sample");
  s.validate();
  Rng rng(seed);
  std::vector<Vector> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(rng.uniform_vector(box.lo, box.hi));
  const auto mins = map_chunks<double>(n, 64, [&](std::size_t b, std::size_t e) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = b; i < e; ++i) m = std::min(m, detail::g_value(op, s, pts[i]));
    return m;
  });
  return {s.alpha, s.L0, s.L1, *std::min_element(mins.begin(), mins.end()), {}};
}

struct PairReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// Largest lhs - rhs over all pairs.
  double worst_excess = -std::numeric_limits<double>::infinity();

  bool passed() const { return violations == 0; }
};

namespace detail {

using PairBound = std::function<double(const Vector& x, const Vector& y)>;

inline PairReport check_pairs(const OperatorInstance& op, const Box& box, std::size_t pairs, std::uint64_t seed,
                              double slack, const PairBound& rhs) {
  require_box_dim(op, box);
  if (pairs < 1) throw Error(Errc::InvalidArgument, "pairs must be >= 1");
  Rng rng(seed);
  std::vector<std::pair<Vector, Vector>> xy;
  xy.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    Vector x = rng.uniform_vector(box.lo, box.hi);
    Vector y = rng.uniform_vector(box.lo, box.hi);
    xy.emplace_back(std::move(x), std::move(y));
  }
  const auto parts = map_chunks<PairReport>(pairs, 64, [&](std::size_t b, std::size_t e) {
    PairReport r;
    for (std::size_t i = b; i < e; ++i) {
      const auto& [x, y] = xy[i];
      const double lhs = (op.eval(x) - op.eval(y)).norm();
      const double bound = rhs(x, y);
      const double excess = lhs - bound;
      ++r.checked;
      if (excess > slack * std::max(1.0, bound)) ++r.violations;
      r.worst_excess = std::max(r.worst_excess, excess);
    }
    return r;
  });
  PairReport total;
  for (const PairReport& p : parts) {
    total.checked += p.checked;
    total.violations += p.violations;
    total.worst_excess = std::max(total.worst_excess, p.worst_excess);
  }
  return total;
}

}  // namespace detail

/// Discretized check of ||F(x) - F(y)|| <= (L0 + L1 max_theta ||F(theta x + (1 - theta) y)||^alpha) ||x - y||
/// on seeded pairs, the maximum taken over a uniform theta grid. Slack 1e-10
/// relative to max(1, rhs).
inline PairReport verify_segment_condition(const OperatorInstance& op, const SmoothnessParams& s, std::size_t pairs,
                                           std::size_t theta_grid, const Box& box, std::uint64_t seed = 42) {
  if (theta_grid < 2) throw Error(Errc::InvalidArgument, "theta_grid must be >= 2");
  s.validate();
  return detail::check_pairs(op, box, pairs, seed, kConditionSlack, [&](const Vector& x, const Vector& y) {
    double seg = 0.0;
    for (std::size_t t = 0; t < theta_grid; ++t) {
      const double th = static_cast<double>(t) / static_cast<double>(theta_grid - 1);
      seg = std::max(seg, op.eval(th * x + (1.0 - th) * y).norm());
    }
    return (s.L0 + s.L1 * pow_alpha(seg, s.alpha)) * (x - y).norm();
  });
}

/// Right-hand side of the segment-free bound at (x, y): the exponential form
/// for alpha = 1, the K-constant form for alpha < 1.
inline double proposition1_rhs(const SmoothnessParams& s, double norm_F_x, double dist) {
  if (s.alpha == 1.0) return (s.L0 + s.L1 * norm_F_x) * std::exp(s.L1 * dist) * dist;
  const KConstants k = k_constants(s);
  return (k.K0 + k.K1 * pow_alpha(norm_F_x, s.alpha) + k.K2 * std::pow(dist, s.alpha / (1.0 - s.alpha))) * dist;
}

inline constexpr double kTwoPointSlack = 1e-9;

inline PairReport verify_proposition1(const OperatorInstance& op, const SmoothnessParams& s, std::size_t pairs,
                                      const Box& box, std::uint64_t seed = 42) {
  s.validate();
  return detail::check_pairs(op, box, pairs, seed, kTwoPointSlack, [&](const Vector& x, const Vector& y) {
    return proposition1_rhs(s, op.eval(x).norm(), (x - y).norm());
  });
}

/// Checks the realized ratio on consecutive recorded iterates of a trace.
inline PairReport verify_trace_proposition1(const OperatorInstance& op, const SmoothnessParams& s,
                                            const SolveTrace& trace) {
  PairReport rep;
  for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i) {
    const TraceRow& a = trace.rows[i];
    const TraceRow& b = trace.rows[i + 1];
    if (b.k != a.k + 1 || !a.x || !b.x) continue;
    const Vector& x = a.x->eigen();
    const Vector& y = b.x->eigen();
    const Vector fx = op.eval(x);
    const double lhs = (fx - op.eval(y)).norm();
    const double bound = proposition1_rhs(s, fx.norm(), (x - y).norm());
    ++rep.checked;
    if (lhs - bound > kTwoPointSlack * std::max(1.0, bound)) ++rep.violations;
    rep.worst_excess = std::max(rep.worst_excess, lhs - bound);
  }
  return rep;
}

inline double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw Error(Errc::InvalidArgument, "spearman needs equal sizes >= 2");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j);
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = 0.5 * (n - 1.0);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - mean) * (rb[i] - mean);
    da += (ra[i] - mean) * (ra[i] - mean);
    db += (rb[i] - mean) * (rb[i] - mean);
  }
  if (da == 0.0 || db == 0.0) return 0.0;
  return num / std::sqrt(da * db);
}

/// Envelope fit. For each alpha: least squares of norm_J on (1, norm_F^alpha)
/// with both coefficients clipped at 0, then L0 raised just enough that every
/// sample satisfies the bound. Returns the alpha with the smallest L0 + L1
/// (first on ties). A heuristic, not an estimator with guarantees.
inline SmoothnessFit fit_constants(const std::vector<ScatterSample>& samples, const std::vector<double>& alpha_grid) {
  if (samples.size() < 3) throw Error(Errc::DegenerateSamples, "need at least 3 samples");
  if (alpha_grid.empty()) throw Error(Errc::InvalidArgument, "alpha grid is empty");
  for (double a : alpha_grid)
    if (!(a > 0.0 && a <= 1.0)) throw Error(Errc::InvalidAlpha, "alpha grid must lie in (0, 1]");
  for (const auto& s : samples)
    if (!std::isfinite(s.norm_F) || !std::isfinite(s.norm_J) || s.norm_F < 0.0 || s.norm_J < 0.0)
      throw Error(Errc::NonFiniteValue, "scatter samples must be finite and >= 0");
  const bool all_equal = std::all_of(samples.begin(), samples.end(),
                                     [&](const ScatterSample& s) { return s.norm_F == samples.front().norm_F; });
  if (all_equal) throw Error(Errc::DegenerateSamples, "all samples share the same ||F||");

  const double n = static_cast<double>(samples.size());
  SmoothnessFit best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (double a : alpha_grid) {
    double sr = 0.0, srr = 0.0, sj = 0.0, srj = 0.0;
    for (const auto& s : samples) {
      const double r = pow_alpha(s.norm_F, a);
      sr += r;
      srr += r * r;
      sj += s.norm_J;
      srj += r * s.norm_J;
    }
    const double det = n * srr - sr * sr;
    double l0 = 0.0, l1 = 0.0;
    if (det > 0.0) {
      l1 = (n * srj - sr * sj) / det;
      l0 = (sj - l1 * sr) / n;
    }
    if (det <= 0.0 || l1 < 0.0) {
      l1 = 0.0;
      l0 = sj / n;
    } else if (l0 < 0.0) {
      l0 = 0.0;
      l1 = srr > 0.0 ? srj / srr : 0.0;
    }
    double lift = 0.0;
    for (const auto& s : samples) lift = std::max(lift, s.norm_J - l0 - l1 * pow_alpha(s.norm_F, a));
    l0 += lift;
    double minimum = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) minimum = std::min(minimum, l0 + l1 * pow_alpha(s.norm_F, a) - s.norm_J);
    if (l0 + l1 < best_obj) {
      best_obj = l0 + l1;
      best.alpha_hat = a;
      best.L0_hat = l0;
      best.L1_hat = l1;
      best.max_violation = minimum;
    }
  }
  best.samples = samples;
  return best;
}

struct TheoryBounds {
  PolicyKind kind = PolicyKind::Theorem3;
  double r0 = 0.0;  // ||x0 - x*||
  std::optional<double> nu;
  /// Theorem3 / Corollary1 policy step-size floor nu / (L0 (1 + L1 e^{L1 r0} r0)).
  std::optional<double> zeta;
  /// Linear contraction factor per iteration (strongly monotone kinds).
  std::optional<double> rate;
  std::optional<double> term1;
  std::optional<double> term2;
  /// Iterations sufficient for ||x_K - x*||^2 <= epsilon (Corollary1 policy).
  std::optional<double> iterations;
  /// C with min_k ||F||^2 <= C / (K + 1) (monotone and weak Minty kinds).
  std::optional<double> constant;
  /// Delta_1 or Delta_alpha (weak Minty kinds).
  std::optional<double> delta;
  bool guarantee_void = false;

  std::optional<double> bound_at(std::size_t K) const {
    if (!constant || guarantee_void) return std::nullopt;
    return *constant / static_cast<double>(K + 1);
  }
};

/// Closed-form rate constants for a policy kind. `constants` and `mu`
/// override the operator's declared values.
inline TheoryBounds theoretical_bounds(const OperatorInstance& op, PolicyKind kind, const Vec& x0, double epsilon,
                                       std::optional<SmoothnessParams> constants = std::nullopt,
                                       std::optional<double> mu_override = std::nullopt) {
  if (!op.solution) throw Error(Errc::MissingSolution, "bounds need a known solution");
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be > 0");
  if (x0.dim() != op.dim) throw Error(Errc::DimensionMismatch, "x0 dimension differs from the operator's");
  const SmoothnessParams c = constants ? *constants : op.smoothness;
  TheoryBounds b;
  b.kind = kind;
  b.r0 = (x0.eigen() - op.solution->eigen()).norm();
  const double r0 = b.r0;
  const double growth = 1.0 + c.L1 * std::exp(c.L1 * r0) * r0;

  auto need_mu = [&]() {
    if (mu_override) return *mu_override;
    if (op.monotonicity.kind() == MonotoneClass::StronglyMonotone) return op.monotonicity.mu();
    throw Error(Errc::MissingConstant, "strongly monotone bounds need mu");
  };
  auto need_rho = [&]() {
    const auto rho = op.monotonicity.effective_rho();
    if (!rho) throw Error(Errc::MissingConstant, "weak Minty bounds need rho");
    return *rho;
  };
  auto need_L0 = [&]() {
    if (!(c.L0 > 0.0)) throw Error(Errc::MissingConstant, "bound needs L0 > 0");
  };
  // (K0 + K2 r0^{a/(1-a)})^a r0^a and the K-dependent pieces shared by the alpha < 1 bounds.
  auto alpha_terms = [&](KConstants& k, double& spread) {
    if (!(c.alpha < 1.0)) throw Error(Errc::MissingConstant, "alpha < 1 bounds need K-constants");
    k = k_constants(c);
    spread = pow_alpha(k.K0 + k.K2 * std::pow(r0, c.alpha / (1.0 - c.alpha)), c.alpha) * pow_alpha(r0, c.alpha);
  };
  auto k2pow = [&](const KConstants& k) { return k.K2 == 0.0 ? 0.0 : std::pow(k.K2, 1.0 - c.alpha); };

  switch (kind) {
    case PolicyKind::Theorem3:
    case PolicyKind::Corollary1: {
      need_L0();
      const double mu = need_mu();
      b.nu = nu(kind == PolicyKind::Theorem3 ? NuKind::StrongMono_A1 : NuKind::StrongMono_Cor);
      b.zeta = *b.nu / (c.L0 * growth);
      b.rate = 1.0 - *b.zeta * mu;
      if (kind == PolicyKind::Corollary1) {
        b.term1 = 2.0 * c.L0 / (*b.nu * mu) * std::log(r0 * r0 / epsilon);
        b.term2 = c.L1 == 0.0 ? 0.0
                              : 1.0 / (*b.zeta * mu) *
                                    std::log(2.0 * c.L1 * r0 * r0 / (*b.zeta * *b.zeta * c.L0));
        b.iterations = *b.term1 + *b.term2;
      }
      break;
    }
    case PolicyKind::Theorem4: {
      const double mu = need_mu();
      KConstants k;
      double spread = 0.0;
      alpha_terms(k, spread);
      b.nu = nu(NuKind::StrongMono_A01);
      b.rate = 1.0 - *b.nu * mu /
                         (2.0 * k.K0 + (2.0 * k.K1 + std::pow(2.0, 1.0 - c.alpha) * k2pow(k)) * spread);
      break;
    }
    case PolicyKind::Theorem5: {
      need_L0();
      b.nu = nu(NuKind::Mono_A1);
      b.constant = 2.0 * c.L0 * c.L0 * growth * growth * r0 * r0 / (*b.nu * *b.nu);
      break;
    }
    case PolicyKind::Theorem7: {
      KConstants k;
      double spread = 0.0;
      alpha_terms(k, spread);
      const double inner = k.K0 + (k.K1 + std::pow(2.0, -1.5) * k2pow(k)) * spread;
      b.constant = 16.0 * inner * inner * r0 * r0;
      break;
    }
    case PolicyKind::Theorem8: {
      need_L0();
      const double rho = need_rho();
      b.nu = nu(NuKind::WeakMinty_A1);
      b.delta = *b.nu / (c.L0 * growth) - 4.0 * rho;
      b.guarantee_void = !(*b.delta > 0.0);
      b.constant = 4.0 * c.L0 * growth * r0 * r0 / (*b.nu * *b.delta);
      break;
    }
    case PolicyKind::Theorem9: {
      const double rho = need_rho();
      KConstants k;
      double spread = 0.0;
      alpha_terms(k, spread);
      const double r8 = 2.0 * std::numbers::sqrt2;
      const double inner = k.K1 + std::pow(2.0, -1.5) * k2pow(k);
      b.delta = 1.0 / (r8 * k.K0 + r8 * inner * spread) - 4.0 * rho;
      b.guarantee_void = !(*b.delta > 0.0);
      b.constant = 4.0 * (k.K0 + inner * spread) * r0 * r0 / *b.delta;
      break;
    }
    default: throw Error(Errc::InvalidArgument, std::string("no closed-form bound for ") + to_string(kind));
  }
  return b;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kScatterHeader = "norm_F,norm_J,k";
inline constexpr const char* kFitHeader = "alpha,L0,L1,max_violation";

inline void write_scatter_csv(std::ostream& os, const std::vector<ScatterSample>& samples) {
  os << kScatterHeader << '\n';
  for (const auto& s : samples) os << fmt_real(s.norm_F) << ',' << fmt_real(s.norm_J) << ',' << s.iterate_index << '\n';
}

inline std::vector<ScatterSample> read_scatter_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kScatterHeader) throw Error(Errc::ParseError, "missing scatter header");
  std::vector<ScatterSample> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 3) throw Error(Errc::ParseError, "scatter row needs 3 fields");
    long k = 0;
    try {
      std::size_t used = 0;
      k = std::stol(f[2], &used);
      if (used != f[2].size()) throw Error(Errc::ParseError, "bad index");
    } catch (const std::logic_error&) {
      throw Error(Errc::ParseError, "bad index '" + f[2] + "'");
    }
    out.push_back({detail::parse_csv_real(f[0]), detail::parse_csv_real(f[1]), k});
  }
  return out;
}

inline void write_fit_csv(std::ostream& os, const SmoothnessFit& fit) {
  os << kFitHeader << '\n'
     << fmt_real(fit.alpha_hat) << ',' << fmt_real(fit.L0_hat) << ',' << fmt_real(fit.L1_hat) << ','
     << fmt_real(fit.max_violation) << '\n';
}

inline SmoothnessFit read_fit_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kFitHeader) throw Error(Errc::ParseError, "missing fit header");
  if (!std::getline(is, line)) throw Error(Errc::ParseError, "missing fit record");
  const auto f = detail::split_fields(line);
  if (f.size() != 4) throw Error(Errc::ParseError, "fit record needs 4 fields");
  SmoothnessFit fit;
  fit.alpha_hat = detail::parse_csv_real(f[0]);
  fit.L0_hat = detail::parse_csv_real(f[1]);
  fit.L1_hat = detail::parse_csv_real(f[2]);
  fit.max_violation = detail::parse_csv_real(f[3]);
  return fit;
}

}  // namespace egsolve
