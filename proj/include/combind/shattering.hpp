#pragma once

// Finite pattern combinatorics: shattered subsets, Karpovsky-Milman
// thresholds, cover numbers by one-symbol-excluded boxes, and the selection
// steps used to pass between independence and shattering.

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "combind/independence.hpp"

namespace combind {

/// Distinct patterns Z -> {0, 1, ..., k} with Z = {0, ..., n-1}, stored as
/// packed rows in lexicographic order. Zero is the "no information" symbol;
/// shattering only counts the values 1..k.
class PatternSet {
public:
    PatternSet(int n, int k);
    static PatternSet from_rows(int n, int k, const std::vector<std::vector<int>>& rows);
    /// {1..k}^n
    static PatternSet full(int n, int k);

    int n() const { return n_; }
    int k() const { return k_; }
    std::size_t size() const { return rows_.size() / static_cast<std::size_t>(n_); }
    std::span<const std::uint8_t> row(std::size_t i) const {
        return {rows_.data() + i * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
    }
    /// Inserts keeping the rows sorted and distinct; returns false for duplicates.
    bool insert(std::span<const std::uint8_t> pattern);
    std::vector<std::vector<int>> rows() const;

private:
    int n_, k_;
    std::vector<std::uint8_t> rows_;
};

/// S restricted to I contains {1..k}^I.
bool shatters(const PatternSet& S, std::span<const int> I);

/// Largest shattered I (lexicographically least among the largest). n <= 24.
std::vector<int> largest_shattered_subset(const PatternSet& S);

using BigInt = boost::multiprecision::cpp_int;

/// sum_{i<t} C(n,i) (k-1)^(n-i), the largest |S| for S in {1..k}^n with no
/// shattered set of size t. For k = 2 this is the Sauer-Shelah bound.
BigInt km_threshold(int n, int k, int t);

/// The extremal family: patterns with fewer than t coordinates equal to k.
PatternSet km_extremal(int n, int k, int t);

struct CoverResult {
    int value = 0;
    bool exact = true;  // false: budget ran out, value is an upper bound
    std::vector<std::vector<int>> boxes;  // i for each chosen prod_z {i_z}^c
};

/// Minimum number of boxes prod_z {i_z}^c (1 <= i_z <= k) covering S.
CoverResult cover_number(const PatternSet& S, std::uint64_t node_budget = std::uint64_t{1} << 24);

/// An I with |I| >= a_target*n shattered by S, or nothing. Throws InvalidModel
/// when some pattern has more than b*n zeros.
std::optional<std::vector<int>> density_lemma_search(const PatternSet& S, double a_target, double b);

struct SplitResult {
    std::vector<int> J_prime;
    int branch = 1;  // 1: A_{1,1}, 2: A_{1,2}
    double ratio = 0.0;
    std::size_t branch1_size = 0, branch2_size = 0;
    bool lower_bound = false;
};

/// Given a certificate on J for (A11 u A12, A2, ...), the larger of the maximal
/// independence subsets of J for (A11, A2, ...) and (A12, A2, ...); ties go to
/// branch 1. Throws CertificateInvalid when the certificate does not check.
SplitResult split_selection(IndependenceSolver& solver, const BorelLikeSet& A11, const BorelLikeSet& A12,
                            const std::vector<BorelLikeSet>& rest, const IndependenceCertificate& cert,
                            const ConstraintModel& D = ConstraintModel::everything());

struct SeparatedResult {
    bool found = false;
    double t = 0.0;
    double epsilon = 0.0;
    std::vector<int> J;
    std::string side = "real";  // or "imaginary"
};

/// Grid t in {-1, -1 + 1/64, ..., 1}; for each t the coordinates of E are
/// read as 1 (below t) or 2 (above t) and the largest shattered J is taken.
/// The best (largest J, then largest epsilon, then least t) is returned;
/// epsilon is the largest margin such that every sign pattern on J is met by
/// some v with v_j <= t - eps or v_j >= t + eps accordingly.
SeparatedResult separated_to_shattered(const std::vector<std::vector<double>>& E, double delta);
SeparatedResult separated_to_shattered(const std::vector<std::vector<std::complex<double>>>& E, double delta);

/// Re-checks a result against E independently of the search.
bool separated_result_valid(const std::vector<std::vector<double>>& E, const SeparatedResult& r);

}  // namespace combind
