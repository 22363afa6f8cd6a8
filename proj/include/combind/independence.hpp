#pragma once

// Independence sets of a tuple of cylinder unions relative to a constraint
// model, maximal independence subsets and the finite-window density proxies.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "combind/measure.hpp"
#include "combind/symbolic.hpp"

namespace combind {

/// The constraint D: everything, a single set D = X \ removed, or a family
/// D_s = X \ removed_at[s] (missing s means D_s = X).
struct ConstraintModel {
    enum class Kind { Everything, Fixed, PerElement };

    Kind kind = Kind::Everything;
    BorelLikeSet removed;
    std::map<int, BorelLikeSet> removed_at;
    std::string description = "everything";

    static ConstraintModel everything() { return {}; }
    static ConstraintModel fixed(BorelLikeSet removed, std::string description = "fixed");
    static ConstraintModel per_element(std::map<int, BorelLikeSet> removed_at, std::string description = "per-element");
};

struct Witness {
    Segment segment;
    /// Orbit-sample mode: the shift t with x = shift^t(reference).
    std::optional<long long> shift;
};

struct IndependenceCertificate {
    std::vector<int> J;
    /// One witness per sigma: J -> {1..arity}, in lexicographic order of sigma.
    std::vector<std::pair<std::vector<int>, Witness>> witnesses;
};

struct IndependenceResult {
    bool independent = false;
    std::optional<IndependenceCertificate> certificate;
    std::vector<int> failing_sigma;  // lexicographically least, values in 1..arity
    std::uint64_t checks = 0;
};

struct MaxSubsetResult {
    std::vector<int> J;
    IndependenceCertificate certificate;
    /// Set when the search budget ran out: J is only a lower bound.
    bool lower_bound = false;
    std::uint64_t checks = 0;
};

struct SolverOptions {
    std::uint64_t sigma_cap = std::uint64_t{1} << 20;
    std::uint64_t search_budget = std::uint64_t{1} << 26;
};

/// Witness semantics: language mode decides feasibility exactly for full
/// shifts and SFTs; orbit-sample mode only accepts shifts of a reference
/// segment (needed for generator specs).
class IndependenceSolver {
public:
    explicit IndependenceSolver(const SubshiftSpec& spec, SolverOptions options = {});
    IndependenceSolver(const SubshiftSpec& spec, Segment sample, SolverOptions options = {});

    bool orbit_mode() const { return sample_.has_value(); }
    int alphabet_size() const { return k_; }
    const SolverOptions& options() const { return options_; }
    /// Throws BudgetExceeded when arity^|J| exceeds the sigma cap.
    IndependenceResult check(const SetTuple& A, const Window& J, const ConstraintModel& D);
    MaxSubsetResult max_subset(const SetTuple& A, const Window& F, const ConstraintModel& D);
    std::optional<Witness> find_witness(const std::vector<Requirement>& reqs);
    /// Re-derives every stored witness independently of the memo.
    bool revalidate(const IndependenceCertificate& cert, const SetTuple& A, const ConstraintModel& D) const;
    /// The words of length r that removal families may remove.
    std::vector<Word> atoms(int r) const;

private:
    std::optional<Witness> solve_uncached(const std::vector<Requirement>& reqs) const;

    SubshiftSpec spec_;
    int k_;
    std::optional<FeasibilityEngine> engine_;
    std::optional<Segment> sample_;
    SolverOptions options_;
    std::unordered_map<std::string, std::optional<Witness>> memo_;
    std::uint64_t* budget_ = nullptr;  // set during max_subset
};

std::vector<Requirement> sigma_requirements(const SetTuple& A, const std::vector<int>& J, const std::vector<int>& sigma,
                                            const ConstraintModel& D);

IndependenceResult is_independence_set(const SubshiftSpec& spec, const SetTuple& A, const Window& J,
                                       const ConstraintModel& D, SolverOptions options = {});
MaxSubsetResult max_independence_subset(const SubshiftSpec& spec, const SetTuple& A, const Window& F,
                                        const ConstraintModel& D, SolverOptions options = {});

/// Explicit constraint families standing in for all D with mu(D) >= 1 - delta.
/// Members remove unions of depth-r atoms either at one anchor near the window
/// or at every anchor of the window region; the per-element variant adds
/// D_s removing atoms at s + offset. Exact enumeration when the number of
/// removal sets is at most exact_limit, greedy adversary otherwise.
struct ConstraintFamily {
    enum class Kind { ExactAtoms, GreedyAdversary };

    Kind kind = Kind::ExactAtoms;
    int depth = 1;
    int passes = 4;
    bool per_element = false;
    std::size_t exact_limit = 4096;

    std::string describe() const;
};

struct DensityReport {
    Window window;
    double delta = 0.0;
    int phi_hat = 0;
    double density = 0.0;
    std::string mode;    // "language" | "orbit-sample"
    std::string family;  // description of the explicit family
    /// phi over the constant family; equals phi_hat unless per_element is set.
    int phi_hat_fixed = 0;
    std::string minimizer;
    std::vector<int> minimizer_J;
    std::size_t family_size = 0;
    bool greedy = false;
    bool lower_bound = false;  // a budget ran out somewhere
};

/// Every member of the explicit family for window F (exact variant only).
std::vector<ConstraintModel> enumerate_family(IndependenceSolver& solver, const SetTuple& A, const Window& F,
                                              double delta, const MeasureModel& m, const ConstraintFamily& family,
                                              bool per_element);

/// min over the explicit family of the maximal independence subset size; an
/// upper bound on the true density function since the family is a subset.
DensityReport phi_density(IndependenceSolver& solver, const SetTuple& A, const Window& F, double delta,
                          const MeasureModel& m, const ConstraintFamily& family = {});

struct DensityCurve {
    std::vector<DensityReport> reports;
    double max_density = 0.0;  // upper density proxy
    double min_density = 0.0;  // lower density proxy
};

DensityCurve upper_density_estimate(IndependenceSolver& solver, const SetTuple& A, double delta, const MeasureModel& m,
                                    const std::vector<Window>& windows, const ConstraintFamily& family = {});

/// Same computation over arbitrary index sets of strictly increasing size.
DensityCurve sequential_density_estimate(IndependenceSolver& solver, const SetTuple& A, double delta,
                                         const MeasureModel& m, const std::vector<Window>& index_sets,
                                         const ConstraintFamily& family = {});

struct IeVerdict {
    bool positive = false;
    double final_density = 0.0;
    double threshold = 0.01;
    /// (depth, curve) for each depth at which the neighbourhoods are disjoint.
    std::vector<std::pair<int, DensityCurve>> evidence;
    std::string note = "finite-scale proxy; not a limit over Folner windows";
};

/// Germs are central (2r+1)-words; neighbourhoods are the cylinders they
/// define at depths 0..r. Throws NonDisjointNeighbourhoods when the germs
/// agree at the full depth.
IeVerdict detect_ie_pair(IndependenceSolver& solver, const MeasureModel& m, const Word& germ1, const Word& germ2,
                         int depth, double delta, const std::vector<Window>& windows, double threshold = 0.01,
                         const ConstraintFamily& family = {});

}  // namespace combind
