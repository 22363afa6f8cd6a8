#pragma once

// Dense two-phase simplex for small linear programs.

#include <vector>

namespace combind {

/// minimize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0.
struct LinearProgram {
    std::vector<double> c;
    std::vector<std::vector<double>> A_ub;
    std::vector<double> b_ub;
    std::vector<std::vector<double>> A_eq;
    std::vector<double> b_eq;
};

struct LpSolution {
    enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };
    Status status = Status::Infeasible;
    std::vector<double> x;
    double value = 0.0;
    int pivots = 0;
};

/// Falls back to Bland's rule on long degenerate runs, so it terminates.
LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-9, int max_pivots = 200000);

}  // namespace combind
