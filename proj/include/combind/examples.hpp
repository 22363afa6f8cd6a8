#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "combind/measure.hpp"
#include "combind/symbolic.hpp"

namespace combind {

/// One extension step of the tame example: block [a, a_prime] placed at step m.
struct TameStep {
    int m = 1;
    long long a = 0;
    long long a_prime = 0;
    long long h = 0;
    int branch = 0;  // m mod 3 with 0 meaning the pair-realization branch
    int pair_length = 0;
    Word f, g;       // the realized pair, branch 0 only
};

struct TameExample {
    Word p;  // p[0, L)
    Word q;  // q[0, L)
    std::vector<TameStep> schedule;
    /// Ordered pairs of ones in p[0, L) at a distance h_j - h_i; zero when the
    /// sets h_i V are disjoint as far as the prefix can tell.
    long long v_disjointness_violations = 0;
};

/// Weakly mixing subshift with invariant measure at the fixed point 0^Z: p and
/// q are extended block by block with the smallest schedule meeting
/// a_{m+1} > max(m, a'_m), h_{m+1} > h_m + a'_m - a_1 and
/// a_{m+1} > a'_m + h_{m+1} - h_1. Throws std::logic_error if an invariant
/// fails at any step.
TameExample build_tame_example(int length);

/// For d = 1..max_d, the fraction of ordered pairs of length-d words of
/// p[0, L) that appear jointly in (p, q)[0, L).
std::vector<double> tame_pair_coverage(const TameExample& ex, int max_d);

/// Golden-mean SFT (forbidden "11") with its Parry measure.
std::pair<SubshiftSpec, MeasureModel> golden_mean_system();

/// Maximal-entropy Markov measure of an irreducible one-step SFT (all
/// forbidden words of length <= 2).
MeasureModel parry_measure(const SubshiftSpec& spec);

}  // namespace combind
