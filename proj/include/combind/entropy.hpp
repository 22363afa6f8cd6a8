#pragma once

// Partition and cover entropy: H(P), joins over windows, dynamical and
// sequence entropy, Katok-style cover numbers, the h^- proxy and the
// partition construction bounding the c.p. approximation rank.

#include <cstdint>
#include <map>
#include <vector>

#include "combind/measure.hpp"
#include "combind/symbolic.hpp"

namespace combind {

/// Joined partitions with more atoms than this are refused.
inline constexpr std::size_t kAtomCap = std::size_t{1} << 18;

/// Finite cover of X by Borel-like sets.
struct Cover {
    std::vector<BorelLikeSet> members;

    /// Throws InvalidModel unless every admissible word on the members' span
    /// lies in some member.
    void validate(const SubshiftSpec& spec) const;
    static Cover from_partition(const Partition& P);
};

/// Masses of the nonempty atoms of a join, keyed by label tuples.
using AtomMasses = std::map<std::vector<int>, double>;

/// Atoms of the join of P shifted by every s in `shifts` (repeats allowed),
/// i.e. the partition generated by x -> (label of x[s + anchor, ...)).
AtomMasses joined_atoms(const Partition& P, const MeasureModel& m, std::span<const int> shifts);

/// Sum of -mu ln mu over the given masses, with 0 ln 0 = 0.
double entropy_of_masses(const AtomMasses& atoms);

double shannon_entropy(const Partition& P, const MeasureModel& m);

/// The common refinement of the shifts of P over F as a depth-|span| partition.
/// Atoms are numbered in order of their lexicographically least word.
Partition join_over_window(const SubshiftSpec& spec, const Partition& P, const Window& F);

/// H(P^F)/|F| for each window.
std::vector<double> dynamical_entropy_curve(const Partition& P, const MeasureModel& m,
                                            const std::vector<Window>& windows);

/// H(P v Q) - H(Q).
double conditional_entropy(const Partition& P, const Partition& Q, const MeasureModel& m);

/// (1/n) H(join_{i<=n} s_i^{-1} P) for n = 1..n_max.
std::vector<double> sequence_entropy_curve(const Partition& P, const MeasureModel& m, const std::vector<int>& s,
                                           int n_max);

struct CoverNumberResult {
    int value = 0;
    std::vector<std::vector<int>> members;  // member index per element of F
    double removed_mass = 0.0;
};

/// Minimum over removals of atoms of total mass <= delta of the number of
/// members of U^F needed to cover the rest. Atoms live on the coordinates
/// touched by the shifted members; null atoms are always removable.
CoverNumberResult cover_number_N(const Cover& U, const Window& F, double delta, const MeasureModel& m,
                                 std::uint64_t node_budget = std::uint64_t{1} << 24);

struct HMinusPoint {
    int window_size = 0;
    double value = 0.0;  // (1/|F|) H(U^F)
    bool exact = true;   // false: greedy assignment, value is an upper bound
};

/// inf H(Q)/|F| over partitions Q refining U^F, by assigning each atom to a
/// member containing it. Splitting an atom never helps since entropy is
/// concave in the split. Exact when at most `exact_limit` assignments exist.
std::vector<HMinusPoint> h_minus_proxy(const Cover& U, const MeasureModel& m, const std::vector<Window>& windows,
                                       std::uint64_t exact_limit = 1000000);

struct CpaReport {
    int n = 0;
    double delta = 0.0;
    int rank = 1;
    double achieved_error = 0.0;  // max L2 error over the symbol indicators
    bool bound_ok = true;
    double entropy = 0.0;  // H(P^[0,n))
    int large_atoms = 0;
    double remainder_mass = 0.0;
};

/// Conditional expectation onto the span of the atoms of P^[0,n) with mass at
/// least e^{-n delta} plus the indicator of the remaining small atoms. The
/// error is measured on 1{x_j in p} for p in P and 0 <= j < n. Throws
/// PremiseFailed when H(P^[0,n)) > n delta^2.
CpaReport cpa_from_partition(const Partition& P, const MeasureModel& m, int n, double delta);

struct HcpaPoint {
    int n = 0;
    double value = 0.0;  // upper bound on (1/n) ln rank
    int rank = 1;
    bool from_cpa = false;  // rank from the small-atom construction, else atom count
};

/// Upper estimate of the c.p. approximation entropy of the functions measurable
/// for the join of the family: per n the smaller of the construction's rank
/// (when its premise holds) and the number of positive atoms of the join.
std::vector<HcpaPoint> hcpa_upper_estimate(const std::vector<Partition>& family, const MeasureModel& m, double delta,
                                           const std::vector<int>& ns);

/// -sum pi_i P_ij ln P_ij for Markov models, H(p) for Bernoulli. Throws
/// InvalidModel for empirical models.
double markov_entropy_rate(const MeasureModel& m);

}  // namespace combind
