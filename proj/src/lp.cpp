#include "combind/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "combind/errors.hpp"

namespace combind {

namespace {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    // objective row is the last row; it stores reduced costs and -value
    double& obj(std::size_t c) { return at(rows_, c); }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t rows_, cols_;
    std::vector<double> t_;
};

// Simplex on columns [0, usable). Dantzig pricing with a Harris two-pass
// ratio test that prefers large pivots; after a long run of degenerate
// pivots pricing falls back to Bland's rule, which cannot cycle.
LpSolution::Status run(Tableau& T, std::vector<std::size_t>& basis, std::size_t usable, double tol, int& pivots,
                       int max_pivots) {
    int degenerate = 0;
    while (true) {
        const bool bland = degenerate > 50;
        std::size_t pc = usable;
        double most = -tol;
        for (std::size_t c = 0; c < usable; ++c) {
            if (T.obj(c) < most) {
                pc = c;
                most = T.obj(c);
                if (bland) break;
            }
        }
        if (pc == usable) return LpSolution::Status::Optimal;
        double theta = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < T.rows(); ++r) {
            const double a = T.at(r, pc);
            if (a > tol) theta = std::min(theta, (std::max(0.0, T.rhs(r)) + tol) / a);
        }
        if (!std::isfinite(theta)) return LpSolution::Status::Unbounded;
        std::size_t pr = T.rows();
        for (std::size_t r = 0; r < T.rows(); ++r) {
            const double a = T.at(r, pc);
            if (a <= tol || std::max(0.0, T.rhs(r)) / a > theta) continue;
            if (pr == T.rows()) {
                pr = r;
                continue;
            }
            const double b = T.at(pr, pc);
            if (bland ? basis[r] < basis[pr] : (a > b || (a == b && basis[r] < basis[pr]))) pr = r;
        }
        if (++pivots > max_pivots) return LpSolution::Status::IterationLimit;
        degenerate = std::max(0.0, T.rhs(pr)) / T.at(pr, pc) <= tol ? degenerate + 1 : 0;
        T.pivot(pr, pc);
        basis[pr] = pc;
        for (std::size_t r = 0; r < T.rows(); ++r)
            if (T.rhs(r) < 0.0 && T.rhs(r) > -tol) T.rhs(r) = 0.0;
    }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tol, int max_pivots) {
    const std::size_t n = lp.c.size();
    const std::size_t mu = lp.A_ub.size(), me = lp.A_eq.size();
    if (lp.b_ub.size() != mu || lp.b_eq.size() != me) throw InvalidModel("LP right-hand sides do not match");
    for (const auto& row : lp.A_ub)
        if (row.size() != n) throw InvalidModel("LP row length differs from the objective");
    for (const auto& row : lp.A_eq)
        if (row.size() != n) throw InvalidModel("LP row length differs from the objective");

    // columns: x (n), slacks (mu), artificials (one per row needing one)
    const std::size_t rows = mu + me;
    std::vector<int> sign(rows, 1);
    std::vector<bool> needs_art(rows, false);
    std::size_t arts = 0;
    for (std::size_t i = 0; i < mu; ++i)
        if (lp.b_ub[i] < 0.0) {
            sign[i] = -1;
            needs_art[i] = true;
            ++arts;
        }
    for (std::size_t i = 0; i < me; ++i) {
        if (lp.b_eq[i] < 0.0) sign[mu + i] = -1;
        needs_art[mu + i] = true;
        ++arts;
    }
    const std::size_t cols = n + mu + arts;
    Tableau T(rows, cols);
    std::vector<std::size_t> basis(rows);
    std::size_t next_art = n + mu;
    for (std::size_t i = 0; i < rows; ++i) {
        const bool ub = i < mu;
        const auto& row = ub ? lp.A_ub[i] : lp.A_eq[i - mu];
        const double b = ub ? lp.b_ub[i] : lp.b_eq[i - mu];
        for (std::size_t j = 0; j < n; ++j) T.at(i, j) = sign[i] * row[j];
        if (ub) T.at(i, n + i) = sign[i];
        T.rhs(i) = sign[i] * b;
        if (needs_art[i]) {
            T.at(i, next_art) = 1.0;
            basis[i] = next_art++;
        } else {
            basis[i] = n + i;
        }
    }

    LpSolution sol;
    int pivots = 0;
    if (arts > 0) {
        // phase I: minimize the sum of artificials
        for (std::size_t c = 0; c <= cols; ++c) T.obj(c) = 0.0;
        for (std::size_t i = 0; i < rows; ++i)
            if (basis[i] >= n + mu)
                for (std::size_t c = 0; c <= cols; ++c)
                    if (c < n + mu || c == cols) T.obj(c) -= T.at(i, c);
        auto st = run(T, basis, n + mu, tol, pivots, max_pivots);
        if (st == LpSolution::Status::IterationLimit) {
            sol.status = st;
            sol.pivots = pivots;
            return sol;
        }
        if (-T.obj(cols) > 1e-7) {
            sol.status = LpSolution::Status::Infeasible;
            sol.pivots = pivots;
            return sol;
        }
        // drive remaining artificials out of the basis
        for (std::size_t i = 0; i < rows; ++i) {
            if (basis[i] < n + mu) continue;
            std::size_t pc = n + mu;
            for (std::size_t c = 0; c < n + mu; ++c)
                if (std::abs(T.at(i, c)) > tol && (pc == n + mu || std::abs(T.at(i, c)) > std::abs(T.at(i, pc)))) pc = c;
            if (pc < n + mu) {
                T.pivot(i, pc);
                basis[i] = pc;
            }
        }
    }
    // phase II
    for (std::size_t c = 0; c <= cols; ++c) T.obj(c) = 0.0;
    for (std::size_t j = 0; j < n; ++j) T.obj(j) = lp.c[j];
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t b = basis[i];
        if (b >= n + mu) continue;  // redundant row kept on an artificial at zero
        const double f = T.obj(b);
        if (f == 0.0) continue;
        for (std::size_t c = 0; c <= cols; ++c) T.obj(c) -= f * T.at(i, c);
    }
    auto st = run(T, basis, n + mu, tol, pivots, max_pivots);
    sol.pivots = pivots;
    sol.status = st;
    if (st != LpSolution::Status::Optimal) return sol;
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        if (basis[i] < n) sol.x[basis[i]] = T.rhs(i);
    sol.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.value += lp.c[j] * sol.x[j];
    return sol;
}

}  // namespace combind
