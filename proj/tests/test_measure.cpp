#include <doctest.h>

#include <cmath>
#include <random>

#include "combind/errors.hpp"
#include "combind/examples.hpp"
#include "combind/measure.hpp"

using namespace combind;

TEST_CASE("Bernoulli cylinder measure is a product") {
    auto m = MeasureModel::bernoulli({0.5, 0.5});
    CHECK(cylinder_measure(m, {0, {0, 1}}) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(cylinder_measure(m, {5, {}}) == 1.0);
}

TEST_CASE("Parry measure of the golden mean shift") {
    auto [spec, m] = golden_mean_system();
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    // Maximal-entropy chain: mu[1] = 1/(phi^2 + 1).
    CHECK(std::abs(cylinder_measure(m, {0, {1}}) - 1.0 / (phi * phi + 1.0)) < 1e-15);
    CHECK(cylinder_measure(m, {0, {1, 1}}) == 0.0);
    auto computed = parry_measure(spec);
    for (Word w : {Word{0}, Word{1}, Word{0, 1}, Word{1, 0, 0}, Word{0, 1, 0, 1}})
        CHECK(std::abs(cylinder_measure(computed, {0, w}) - cylinder_measure(m, {0, w})) < 1e-12);
}

TEST_CASE("empirical measure uses sliding windows") {
    auto m = MeasureModel::empirical(2, Word{0, 1, 0, 1}, 2);
    CHECK(cylinder_measure(m, {0, {0, 1}}) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(cylinder_measure(m, {0, {0, 1, 0}}), WordTooLong);
}

TEST_CASE("invalid models are rejected") {
    CHECK_THROWS_AS(MeasureModel::bernoulli({0.5, 0.6}), InvalidModel);
    CHECK_THROWS_AS(MeasureModel::markov({{0.5, 0.5}, {1.0, 0.0}}, {0.5, 0.5}), InvalidModel);
    CHECK_THROWS_AS(MeasureModel::markov({{0.5, 0.6}, {1.0, 0.0}}, {2.0 / 3.0, 1.0 / 3.0}), InvalidModel);
}

TEST_CASE("depth-1 cylinders sum to one and measures are shift invariant") {
    auto [spec, golden] = golden_mean_system();
    auto bern = MeasureModel::bernoulli({0.2, 0.3, 0.5});
    for (const auto* m : {&golden, &bern}) {
        double s = 0.0;
        for (int a = 0; a < m->alphabet_size(); ++a) s += cylinder_measure(*m, {3, {static_cast<Symbol>(a)}});
        CHECK(std::abs(s - 1.0) < 1e-12);
        Word w{0, 1, 0};
        CHECK(cylinder_measure(*m, {0, w}) == cylinder_measure(*m, {-17, w}));
    }
}

TEST_CASE("sparse pattern measures marginalize the gaps") {
    std::vector<std::vector<double>> P{{0.1, 0.6, 0.3}, {0.5, 0.2, 0.3}, {0.3, 0.3, 0.4}};
    std::vector<double> pi{1.0 / 3, 1.0 / 3, 1.0 / 3};
    for (int it = 0; it < 500; ++it) {
        std::vector<double> next(3, 0.0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) next[static_cast<std::size_t>(j)] += pi[static_cast<std::size_t>(i)] * P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        pi = next;
    }
    pi[2] = 1.0 - pi[0] - pi[1];
    auto m = MeasureModel::markov(P, pi);
    const std::vector<int> coords{0, 2, 5};
    auto sup = support(m, coords);
    CHECK(sup.size() == 27);
    double total = 0.0;
    for (const auto& ww : sup) {
        // brute force: sum the full 6-word cylinders agreeing on the coordinates
        double brute = 0.0;
        for (std::uint64_t c = 0; c < 729; ++c) {
            Word w = word_from_code(c, 6, 3);
            if (w[0] == ww.symbols[0] && w[2] == ww.symbols[1] && w[5] == ww.symbols[2]) brute += cylinder_measure(m, {0, w});
        }
        CHECK(std::abs(brute - ww.mass) < 1e-14);
        CHECK(std::abs(pattern_measure(m, {coords, ww.symbols}) - ww.mass) < 1e-15);
        total += ww.mass;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("set measure of a union counts overlaps once") {
    auto m = MeasureModel::bernoulli({0.5, 0.5});
    BorelLikeSet u{{Cylinder{0, {1}}, Cylinder{1, {1}}}};
    CHECK(std::abs(set_measure(m, u) - 0.75) < 1e-15);
}
