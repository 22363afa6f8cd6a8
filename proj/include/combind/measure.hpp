#pragma once

#include <span>
#include <variant>
#include <vector>

#include "combind/symbolic.hpp"

namespace combind {

struct Bernoulli {
    std::vector<double> weights;
};

struct Markov {
    std::vector<std::vector<double>> transition;
    std::vector<double> stationary;
};

/// Sliding-window frequencies over a finite segment; answers only for
/// patterns spanning at most `max_length` coordinates.
struct Empirical {
    int alphabet = 2;
    Word segment;
    int max_length = 1;
};

class MeasureModel {
public:
    static MeasureModel bernoulli(std::vector<double> weights);
    static MeasureModel markov(std::vector<std::vector<double>> transition, std::vector<double> stationary);
    static MeasureModel empirical(int alphabet, Word segment, int max_length);

    const std::variant<Bernoulli, Markov, Empirical>& kind() const { return kind_; }
    int alphabet_size() const;
    /// Exactly shift invariant (Bernoulli, Markov).
    bool is_exact() const { return !std::holds_alternative<Empirical>(kind_); }

private:
    explicit MeasureModel(std::variant<Bernoulli, Markov, Empirical> k) : kind_(std::move(k)) {}
    std::variant<Bernoulli, Markov, Empirical> kind_;
};

/// A point pattern on finitely many coordinates.
struct Pattern {
    std::vector<int> coords;  // sorted, unique
    Word symbols;
};

struct WeightedWord {
    Word symbols;
    double mass = 0.0;
};

double cylinder_measure(const MeasureModel& m, const Cylinder& c);

/// Measure of {x : x[coords[i]] = symbols[i] for all i}.
double pattern_measure(const MeasureModel& m, const Pattern& p);

/// Every pattern on the (sorted, unique) coordinates with positive measure, in
/// lexicographic order. Throws WordTooLong for empirical models when the
/// coordinates span more than max_length, DepthCapExceeded above `cap`.
std::vector<WeightedWord> support(const MeasureModel& m, std::span<const int> coords,
                                  std::size_t cap = std::size_t{1} << 22);

/// Measure of a union of cylinders, by summing over the support on its span.
double set_measure(const MeasureModel& m, const BorelLikeSet& set);

}  // namespace combind
