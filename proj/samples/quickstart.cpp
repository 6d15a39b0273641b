// Solve the GlobalForsaken problem with the weak-Minty step size and print the
// distance to the equilibrium every few iterations.

#include "egsolve/operators.hpp"
#include "egsolve/solver.hpp"

#include <cstdio>

int main() {
  using namespace egsolve;
  const OperatorInstance op = global_forsaken();
  const StepSizePolicy policy = parse_policy("thm8:1:1");

  SolveConfig cfg;
  cfg.x0 = Vec{1.0, 1.0};
  cfg.max_iters = 200;
  cfg.trace_stride = 20;

  const SolveTrace trace = solve(op, policy, cfg);
  for (const TraceRow& row : trace.rows)
    std::printf("k=%4zu  gamma=%.4f  ||F(x)||=%.3e  ||x-x*||^2=%.3e\n", row.k, row.gamma, row.norm_F_x,
                row.dist_sq.value_or(0.0));
  std::printf("stopped: %s after %zu iterations\n", to_string(trace.summary.reason), trace.summary.iterations_run);
  return 0;
}
