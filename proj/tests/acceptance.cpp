// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Every tolerance used below is pinned here.

#include "egsolve/analysis.hpp"
#include "egsolve/experiments.hpp"
#include "egsolve/operators.hpp"
#include "egsolve/solver.hpp"
#include "egsolve/stepsize.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace egsolve;

namespace {

constexpr double kNuResidualTol = 1e-12;
constexpr double kNuApproxTol = 5e-3;
constexpr double kNuTableTol = 0.01;
constexpr double kGoldenTol = 1e-12;
constexpr double kSpectralTol = 1e-9;
constexpr double kFdRelTol = 1e-5;
constexpr double kKConstTol = 1e-9;
constexpr double kBoundRelSlack = 1e-9;
constexpr double kForsakenRhoTarget = -0.1197;
constexpr double kForsakenRhoTol = 1e-3;
constexpr std::size_t kForsakenGrid = 2001;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

SolveTrace run(const OperatorInstance& op, const StepSizePolicy& p, const Vec& x0, std::size_t iters,
               double tol = 1e-12) {
  SolveConfig c;
  c.x0 = x0;
  c.max_iters = iters;
  c.stop_tol = tol;
  return solve(op, p, c);
}

Vec unit_start(std::size_t dim, std::uint64_t seed) {
  egtest::Gen g(seed);
  Vector x = g.vec(static_cast<Eigen::Index>(dim), -1, 1);
  return Vec(Vector(x / x.norm()));
}

// 1. Roots of the step-size equations.
void nu_roots(Outcome& o) {
  for (NuKind k : kAllNuKinds) {
    const double r = std::abs(nu_residual(k, nu(k)));
    o.require(r <= kNuResidualTol, std::string("residual ") + to_string(k));
  }
  const double a1 = nu(NuKind::StrongMono_A1), m1 = nu(NuKind::Mono_A1), cor = nu(NuKind::StrongMono_Cor);
  const double a01 = nu(NuKind::StrongMono_A01);
  o.require(std::abs(a1 - 0.363) <= kNuApproxTol, "StrongMono_A1 ~ 0.363");
  o.require(std::abs(m1 - 0.45) <= kNuApproxTol, "Mono_A1 ~ 0.45");
  o.require(std::abs(cor - 0.21) <= kNuTableTol, "Corollary root ~ 0.21");
  o.require(std::abs(a01 - (std::sqrt(5.0) - 1.0) / 2.0) <= kGoldenTol, "StrongMono_A01 golden ratio");
  o.detail << "A1=" << a1 << " Cor=" << cor << " A01=" << a01 << " Mono=" << m1
           << " WM=" << nu(NuKind::WeakMinty_A1);
}

// 2. Jacobian identities.
void jacobians(Outcome& o) {
  const auto q = quadratic_minmax();
  egtest::Gen g(2024);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vector x = g.vec(2, -100, 100);
    worst = std::max(worst, std::abs(spectral_norm((*q.jacobian)(x)) - std::numbers::sqrt2));
  }
  o.require(worst <= kSpectralTol, "quadratic spectral norm");

  double worst_rel = 0.0;
  for (const auto& e : zoo()) {
    const auto op = build_operator(e.key);
    egtest::Gen gz(7);
    for (int i = 0; i < 50; ++i) {
      const Vector x = gz.vec(static_cast<Eigen::Index>(op.dim), -2, 2);
      const Matrix exact = (*op.jacobian)(x);
      const Matrix fd = finite_diff_jacobian(op, x);
      const double rel = (exact - fd).norm() / std::max(1.0, exact.norm());
      worst_rel = std::max(worst_rel, rel);
      if (rel > kFdRelTol) o.require(false, "fd vs analytic on " + e.key);
    }
  }
  o.detail << "max |norm - sqrt2|=" << worst << " max fd rel err=" << worst_rel;
}

// 3. Condition verification and grid/segment agreement.
void conditions(Outcome& o) {
  const auto c1 = cubic_minmax_1d();
  const auto pass = verify_condition(c1, SmoothnessParams(1, 10, 10), Box::cube(2, 50), 201);
  const auto fail = verify_condition(c1, SmoothnessParams(1, 1, 0.1), Box::cube(2, 50), 201);
  o.require(pass.max_violation > 0.0, "cubic1d (1,10,10) stays positive");
  o.require(!passes(fail), "cubic1d (1,1,0.1) fails");
  std::size_t agree = 0, total = 0;
  for (const auto& e : zoo()) {
    const auto op = build_operator(e.key);
    const Box box = Box::cube(op.dim, 2.0);
    for (double shrink : {1.0, 20.0}) {
      const SmoothnessParams s(op.smoothness.alpha, op.smoothness.L0 / shrink, op.smoothness.L1 / shrink);
      const bool jac = passes(op.dim <= 3 ? verify_condition(op, s, box, op.dim == 2 ? 201 : 41)
                                          : verify_condition_sampled(op, s, box, 20000));
      const bool seg = verify_segment_condition(op, s, shrink == 1.0 ? 1000 : 4000, 101, box).passed();
      ++total;
      if (jac == seg) ++agree;
      else o.require(false, "verdicts differ on " + e.key);
      if (shrink == 1.0) o.require(jac, "declared constants pass on " + e.key);
    }
  }
  o.detail << "cubic1d min g=" << pass.max_violation << " small-constant min g=" << fail.max_violation
           << " agreement " << agree << "/" << total;
}

// 4. K-constants and the two-point growth bound.
void proposition1(Outcome& o) {
  const auto k = k_constants(SmoothnessParams(0.5, 1, 2));
  // Derived oracle: 2^{alpha^2/(1-alpha)} = sqrt2 at alpha = 1/2.
  const double K0 = 1.0 + std::numbers::sqrt2;
  const double K1 = 2.0 * std::numbers::sqrt2;
  const double K2 = 4.0 * std::numbers::sqrt2 * std::sqrt(3.0) * 0.5;
  o.require(std::abs(k.K0 - K0) <= kKConstTol && std::abs(k.K0 - 2.41421) <= 1e-5, "K0");
  o.require(std::abs(k.K1 - K1) <= kKConstTol && std::abs(k.K1 - 2.82843) <= 1e-5, "K1");
  o.require(std::abs(k.K2 - K2) <= kKConstTol && std::abs(k.K2 - 4.89898) <= 1e-5, "K2");
  const auto z = k_constants(SmoothnessParams(0.5, 1, 0));
  o.require(z.K1 == 0.0 && z.K2 == 0.0, "L1 = 0 gives K1 = K2 = 0");
  const auto lg = logistic_gradient(v2(1, 1));
  const auto sq = square_component_operator();
  const auto rl = verify_proposition1(lg, lg.smoothness, 1000, Box::cube(2, 3));
  const auto rs = verify_proposition1(sq, SmoothnessParams(0.5, 0, 2), 1000, Box::cube(2, 3));
  o.require(rl.checked == 1000 && rl.violations == 0, "logistic pairs");
  o.require(rs.checked == 1000 && rs.violations == 0, "square pairs");
  o.detail << "K=(" << k.K0 << "," << k.K1 << "," << k.K2 << ") violations logistic=" << rl.violations
           << " square=" << rs.violations;
}

// 5. Per-iterate distance inequalities.
void descent(Outcome& o) {
  const auto q = quadratic_minmax();
  const auto ra = check_descent_invariants(run(q, parse_policy("thm3"), Vec{1.0, 1.0}, 500), q, q.monotonicity);
  const auto rd = build_operator("cubicRd");
  o.require(rd.dim == 20, "cubicRd with d = 10");
  const auto rb = check_descent_invariants(run(rd, parse_policy("thm5"), unit_start(rd.dim, 31), 2000), rd,
                                           rd.monotonicity);
  const auto f = global_forsaken();
  const auto p8 = parse_policy("thm8:1:1");
  const auto rc = check_descent_invariants(run(f, p8, Vec{1.0, 1.0}, 2000), f, f.monotonicity, p8.constants);
  o.require(ra.pairs_checked > 0 && ra.violations == 0, "strongly monotone");
  o.require(rb.pairs_checked > 0 && rb.violations == 0, "monotone");
  o.require(rc.pairs_checked > 0 && rc.violations == 0, "weak Minty");
  o.detail << "pairs/violations thm3=" << ra.pairs_checked << "/" << ra.violations << " thm5=" << rb.pairs_checked
           << "/" << rb.violations << " thm8=" << rc.pairs_checked << "/" << rc.violations;
}

// 6. Rate envelopes.
void rates(Outcome& o) {
  const auto q = quadratic_minmax();
  const Vec x0{1.0, 1.0};
  const auto b3 = theoretical_bounds(q, PolicyKind::Theorem3, x0, 1e-12);
  const auto t3 = run(q, parse_policy("thm3"), x0, 501, 1e-300);
  o.require(t3.rows.size() > 500, "Theorem3 run reaches K = 500");
  if (t3.rows.size() > 500) {
    const double d0 = *t3.rows.front().dist_sq;
    for (std::size_t K : {10u, 100u, 500u}) {
      const double env = std::pow(*b3.rate, static_cast<double>(K)) * d0;
      o.require(*t3.rows[K].dist_sq <= env * (1.0 + kBoundRelSlack), "linear envelope at K=" + std::to_string(K));
    }
  }

  const auto rd = build_operator("cubicRd");
  const Vec r0 = unit_start(rd.dim, 7);
  const auto b5 = theoretical_bounds(rd, PolicyKind::Theorem5, r0, 1e-12);
  const auto t5 = run(rd, parse_policy("thm5"), r0, 1001);
  double best = 1e300;
  for (std::size_t k = 0; k <= 1000 && k < t5.rows.size(); ++k) best = std::min(best, t5.rows[k].norm_F_x);
  const double lhs = best * best * 1001.0;
  o.require(lhs <= *b5.constant, "sublinear envelope at K=1000");
  o.detail << "rate=" << *b3.rate << " min||F||^2(K+1)=" << lhs << " <= C=" << *b5.constant;
}

// 7. Experiment orderings.
void experiments(Outcome& o) {
  const auto f3 = reproduce_fig3({});
  const auto f4 = reproduce_fig4({});
  const auto f5 = reproduce_fig5({});
  for (const auto* r : {&f3.report, &f4.report, &f5.report})
    for (const Check& c : r->checks) {
      o.require(c.passed, r->name + ": " + c.name);
      o.detail << " " << r->name << ":" << (c.passed ? "ok" : "no");
    }
}

// 8. Weak Minty parameter of GlobalForsaken on a dense grid.
void forsaken_rho(Outcome& o) {
  const auto f = global_forsaken();
  double ratio = 1e300;
  for (std::size_t i = 0; i < kForsakenGrid; ++i)
    for (std::size_t j = 0; j < kForsakenGrid; ++j) {
      const double step = 4.0 / static_cast<double>(kForsakenGrid - 1);
      const Vector x = v2(-2.0 + step * static_cast<double>(i), -2.0 + step * static_cast<double>(j));
      const Vector fx = f(x);
      const double n2 = fx.squaredNorm();
      if (n2 > 0.0) ratio = std::min(ratio, fx.dot(x) / n2);
    }
  o.require(std::abs(ratio - kForsakenRhoTarget) <= kForsakenRhoTol, "min ratio");
  o.detail << "min <F(x),x>/||F(x)||^2=" << ratio;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// 9. Byte-identical reruns.
void determinism(Outcome& o) {
  const auto base = std::filesystem::temp_directory_path() / "egsolve_acceptance";
  std::filesystem::remove_all(base);
  Fig4Config c;
  c.seed = 42;
  const auto a = reproduce_fig4(c, base / "a").report;
  const auto b = reproduce_fig4(c, base / "b").report;
  o.require(a.files == b.files, "same file list");
  std::size_t csv = 0;
  for (const auto& name : a.files) {
    if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
    ++csv;
    o.require(slurp(base / "a" / name) == slurp(base / "b" / name), name + " identical");
  }
  o.require(csv > 0, "some CSV written");
  o.detail << csv << " CSV files compared";
  std::filesystem::remove_all(base);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"nu roots", nu_roots},
      {"Jacobian identities", jacobians},
      {"condition verification", conditions},
      {"K-constants and two-point bound", proposition1},
      {"per-iterate invariants", descent},
      {"rate envelopes", rates},
      {"experiment reproductions", experiments},
      {"GlobalForsaken rho", forsaken_rho},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::printf("%s %zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.str().c_str());
    if (!o.ok) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
