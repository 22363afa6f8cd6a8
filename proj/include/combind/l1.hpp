#pragma once

// l1-equivalence constants of finite function families, certified lower
// bounds from independence certificates, and l1-isomorphism sets of shift
// families.

#include <cstdint>
#include <vector>

#include "combind/independence.hpp"
#include "combind/measure.hpp"
#include "combind/symbolic.hpp"

namespace combind {

/// Real functions on a finite probability space. values[i][p] is the value of
/// the i-th function at point p; keys[i] is the group element it belongs to.
struct FunctionFamily {
    std::vector<double> weights;
    std::vector<int> keys;
    std::vector<std::vector<double>> values;

    std::size_t size() const { return values.size(); }
    /// Throws InvalidModel unless weights sum to 1 within 1e-12, are
    /// nonnegative, and every value is finite.
    void validate() const;
    double sup_norm(std::size_t i) const;  // over points of positive weight
    FunctionFamily subfamily(const std::vector<std::size_t>& idx) const;
};

struct L1Report {
    double c_star = 0.0;  // min ||sum c_s g_s||_inf over ||c||_1 = 1
    double lambda = 0.0;  // 1 / c_star, infinity when c_star = 0
    std::vector<double> optimizer;
    bool rank_deficient = false;
    std::uint64_t lps = 0;
};

/// Exact minimum. Linearly dependent families give 0 through a kernel vector;
/// otherwise one LP per facet of the l1 sphere (signs up to a global flip).
/// Throws Degenerate for the empty family and BudgetExceeded when more than
/// `lp_budget` LPs would be needed.
L1Report l1_constant(const FunctionFamily& fam, std::uint64_t lp_budget = std::uint64_t{1} << 16);

/// ||sum c_s g_s||_inf for the given coefficients.
double l1_evaluate(const FunctionFamily& fam, const std::vector<double>& c);

struct Interval {
    double lo = 0.0, hi = 0.0;
    double diam() const { return hi - lo; }
};

struct RosenthalDorBound {
    double bound = 0.0;         // (d - diam1 - diam2) / 2
    double bound_tenth = 0.0;   // the same constant in the 10/eps convention
    double distance = 0.0;
    std::vector<int> J;
};

/// Certified lower bound on the l1 constant of the functions keyed by cert.J,
/// after checking that every sigma: J -> {1,2} is realized at some point with
/// g_s in B_sigma(s). Throws InvalidModel when the intervals are too close
/// (d <= diam1 + diam2) and CertificateInvalid when a sigma is not realized.
RosenthalDorBound rosenthal_dor_bound(const IndependenceCertificate& cert, const FunctionFamily& fam, Interval B1,
                                      Interval B2);

/// One point per certificate witness, uniform weights, with g_s drawn
/// uniformly from B_sigma(s) at the witness of sigma.
FunctionFamily certificate_family(const IndependenceCertificate& cert, Interval B1, Interval B2, std::uint64_t seed);

/// f(x) = table[word_code(x[0, depth))].
struct GermFunction {
    int alphabet = 2;
    int depth = 1;
    std::vector<double> table;

    double operator()(std::span<const Symbol> w) const;
    static GermFunction symbol_indicator(int alphabet, Symbol s);
    static GermFunction constant(int alphabet, double v);
};

/// {f o shift^s - E f : s in F} on the support of m over the coordinates the
/// family reads. The centering makes constant functions vanish.
FunctionFamily shift_family(const GermFunction& f, const MeasureModel& m, const Window& F);

struct L1IsoResult {
    std::vector<int> I;
    double c_star = 0.0;  // of the returned set (infinity for the empty set)
    bool lower_bound = false;  // budget ran out; I passes but may not be maximum
    std::uint64_t lps = 0;
};

/// Largest subset I with l1 constant >= 1/lambda, lexicographically least
/// among the largest. Points listed in `removed` are zeroed first (a
/// projection dropping small atoms).
L1IsoResult l1_isomorphism_set(const FunctionFamily& fam, double lambda, const std::vector<std::size_t>& removed = {},
                               std::uint64_t lp_budget = std::uint64_t{1} << 22);
L1IsoResult l1_isomorphism_set(const GermFunction& f, const MeasureModel& m, const Window& F, double lambda,
                               std::uint64_t lp_budget = std::uint64_t{1} << 22);

struct PerturbStats {
    std::vector<double> densities;  // |I|/|F| per trial
    double mean = 0.0, min = 0.0, max = 0.0;
    int budget_flags = 0;

    double fraction_at_least(double d) const;
};

/// Each trial adds to every shift an independent random depth-(r+1) cylinder
/// function with L2(m) norm 0.999 delta and runs l1_isomorphism_set.
PerturbStats perturb_and_test(const GermFunction& f, const MeasureModel& m, const Window& F, double delta,
                              double lambda, int trials, std::uint64_t seed);

}  // namespace combind
