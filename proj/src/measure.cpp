#include "combind/measure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "combind/errors.hpp"

namespace combind {

namespace {

constexpr double kSumTol = 1e-12;
constexpr double kStationaryTol = 1e-9;

void check_distribution(const std::vector<double>& p, const char* what) {
    if (p.empty()) throw InvalidModel(std::string(what) + " is empty");
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidModel(std::string(what) + " has a negative or non-finite entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kSumTol) throw InvalidModel(std::string(what) + " does not sum to 1");
}

}  // namespace

MeasureModel MeasureModel::bernoulli(std::vector<double> weights) {
    check_distribution(weights, "Bernoulli weights");
    if (weights.size() > 256) throw InvalidModel("too many symbols");
    return MeasureModel(Bernoulli{std::move(weights)});
}

MeasureModel MeasureModel::markov(std::vector<std::vector<double>> transition, std::vector<double> stationary) {
    const std::size_t k = stationary.size();
    check_distribution(stationary, "stationary vector");
    if (transition.size() != k) throw InvalidModel("transition matrix must be square and match the stationary vector");
    for (const auto& row : transition) {
        if (row.size() != k) throw InvalidModel("transition matrix must be square");
        check_distribution(row, "transition row");
    }
    for (std::size_t j = 0; j < k; ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i) v += stationary[i] * transition[i][j];
        if (std::abs(v - stationary[j]) > kStationaryTol) throw InvalidModel("stationary vector is not invariant");
    }
    return MeasureModel(Markov{std::move(transition), std::move(stationary)});
}

MeasureModel MeasureModel::empirical(int alphabet, Word segment, int max_length) {
    Alphabet a(alphabet);
    if (max_length < 1) throw InvalidModel("empirical max length must be >= 1");
    if (static_cast<int>(segment.size()) < max_length)
        throw InvalidModel("empirical segment must be at least max_length long");
    for (Symbol s : segment)
        if (s >= a.size) throw InvalidModel("segment symbol outside the alphabet");
    return MeasureModel(Empirical{alphabet, std::move(segment), max_length});
}

int MeasureModel::alphabet_size() const {
    return std::visit(
        [](const auto& k) -> int {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Bernoulli>) return static_cast<int>(k.weights.size());
            else if constexpr (std::is_same_v<T, Markov>) return static_cast<int>(k.stationary.size());
            else return k.alphabet;
        },
        kind_);
}

namespace {

class MatrixPowers {
public:
    explicit MatrixPowers(const Markov& mk) {
        const auto k = static_cast<Eigen::Index>(mk.stationary.size());
        base_.resize(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j) base_(i, j) = mk.transition[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

    const Eigen::MatrixXd& power(int d) {
        auto it = cache_.find(d);
        if (it != cache_.end()) return it->second;
        Eigen::MatrixXd r = Eigen::MatrixXd::Identity(base_.rows(), base_.cols());
        Eigen::MatrixXd b = base_;
        for (int e = d; e > 0; e >>= 1) {
            if (e & 1) r = r * b;
            b = b * b;
        }
        return cache_.emplace(d, std::move(r)).first->second;
    }

private:
    Eigen::MatrixXd base_;
    std::map<int, Eigen::MatrixXd> cache_;
};

void check_coords(std::span<const int> coords) {
    for (std::size_t i = 1; i < coords.size(); ++i)
        if (coords[i] <= coords[i - 1]) throw InvalidModel("pattern coordinates must be sorted and unique");
}

void check_empirical_span(const Empirical& e, int span) {
    if (span > e.max_length)
        throw WordTooLong("empirical measure answers patterns up to length " + std::to_string(e.max_length) +
                          ", got " + std::to_string(span));
}

}  // namespace

double pattern_measure(const MeasureModel& m, const Pattern& p) {
    check_coords(p.coords);
    if (p.coords.size() != p.symbols.size()) throw InvalidModel("pattern coordinates and symbols differ in length");
    if (p.coords.empty()) return 1.0;
    const int k = m.alphabet_size();
    for (Symbol s : p.symbols)
        if (s >= k) return 0.0;
    return std::visit(
        [&](const auto& kind) -> double {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                double r = 1.0;
                for (Symbol s : p.symbols) r *= kind.weights[s];
                return r;
            } else if constexpr (std::is_same_v<T, Markov>) {
                MatrixPowers pw(kind);
                double r = kind.stationary[p.symbols[0]];
                for (std::size_t i = 1; i < p.coords.size() && r > 0.0; ++i)
                    r *= pw.power(p.coords[i] - p.coords[i - 1])(p.symbols[i - 1], p.symbols[i]);
                return r;
            } else {
                const int span = p.coords.back() - p.coords.front() + 1;
                check_empirical_span(kind, span);
                const int n = static_cast<int>(kind.segment.size());
                const int windows = n - span + 1;
                int hits = 0;
                for (int t = 0; t < windows; ++t) {
                    bool ok = true;
                    for (std::size_t i = 0; i < p.coords.size() && ok; ++i)
                        ok = kind.segment[static_cast<std::size_t>(t + p.coords[i] - p.coords.front())] == p.symbols[i];
                    hits += ok ? 1 : 0;
                }
                return static_cast<double>(hits) / static_cast<double>(windows);
            }
        },
        m.kind());
}

double cylinder_measure(const MeasureModel& m, const Cylinder& c) {
    if (c.word.empty()) return 1.0;
    if (const auto* e = std::get_if<Empirical>(&m.kind()))
        check_empirical_span(*e, static_cast<int>(c.word.size()));
    Pattern p;
    p.symbols = c.word;
    for (std::size_t i = 0; i < c.word.size(); ++i) p.coords.push_back(c.anchor + static_cast<int>(i));
    return pattern_measure(m, p);
}

std::vector<WeightedWord> support(const MeasureModel& m, std::span<const int> coords, std::size_t cap) {
    check_coords(coords);
    std::vector<WeightedWord> out;
    if (coords.empty()) {
        out.push_back({{}, 1.0});
        return out;
    }
    const int k = m.alphabet_size();
    const std::size_t n = coords.size();
    Word cur;
    cur.reserve(n);

    if (const auto* e = std::get_if<Empirical>(&m.kind())) {
        const int span = coords.back() - coords.front() + 1;
        check_empirical_span(*e, span);
        const int len = static_cast<int>(e->segment.size());
        const int windows = len - span + 1;
        std::map<Word, int> counts;
        for (int t = 0; t < windows; ++t) {
            cur.clear();
            for (int c : coords) cur.push_back(e->segment[static_cast<std::size_t>(t + c - coords.front())]);
            ++counts[cur];
        }
        for (auto& [w, c] : counts) out.push_back({w, static_cast<double>(c) / static_cast<double>(windows)});
        if (out.size() > cap) throw DepthCapExceeded("support larger than the configured cap");
        return out;
    }

    std::optional<MatrixPowers> powers;
    if (const auto* mk = std::get_if<Markov>(&m.kind())) powers.emplace(*mk);

    auto rec = [&](auto&& self, std::size_t i, double mass) -> void {
        if (i == n) {
            if (out.size() >= cap) throw DepthCapExceeded("support larger than the configured cap");
            out.push_back({cur, mass});
            return;
        }
        for (int s = 0; s < k; ++s) {
            double next;
            if (const auto* b = std::get_if<Bernoulli>(&m.kind())) {
                next = mass * b->weights[static_cast<std::size_t>(s)];
            } else {
                const auto& mk = std::get<Markov>(m.kind());
                if (i == 0) next = mk.stationary[static_cast<std::size_t>(s)];
                else next = mass * powers->power(coords[i] - coords[i - 1])(cur.back(), s);
            }
            if (next <= 0.0) continue;
            cur.push_back(static_cast<Symbol>(s));
            self(self, i + 1, next);
            cur.pop_back();
        }
    };
    rec(rec, 0, 1.0);
    return out;
}

double set_measure(const MeasureModel& m, const BorelLikeSet& set) {
    if (set.cylinders.empty()) return 0.0;
    for (const auto& c : set.cylinders)
        if (c.word.empty()) return 1.0;
    if (set.cylinders.size() == 1) return cylinder_measure(m, set.cylinders.front());
    auto [lo, hi] = set.span();
    std::vector<int> coords(static_cast<std::size_t>(hi - lo));
    std::iota(coords.begin(), coords.end(), lo);
    double total = 0.0;
    for (const auto& ww : support(m, coords)) {
        Segment seg{lo, ww.symbols};
        bool hit = std::any_of(set.cylinders.begin(), set.cylinders.end(),
                               [&](const Cylinder& c) { return matches(c, seg); });
        if (hit) total += ww.mass;
    }
    return total;
}

}  // namespace combind
