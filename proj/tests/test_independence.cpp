#include <doctest.h>

#include <algorithm>
#include <random>

#include "combind/errors.hpp"
#include "combind/examples.hpp"
#include "combind/independence.hpp"

using namespace combind;

namespace {

const SetTuple kSymbols{{BorelLikeSet::single({0, {0}}), BorelLikeSet::single({0, {1}})}};

SubshiftSpec golden() { return SubshiftSpec::sft(2, {{1, 1}}); }

std::vector<Word> golden_words(int n) {
    std::vector<Word> out;
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c) {
        Word w = word_from_code(c, n, 2);
        bool ok = true;
        for (int i = 0; i + 1 < n; ++i) ok = ok && !(w[static_cast<std::size_t>(i)] && w[static_cast<std::size_t>(i + 1)]);
        if (ok) out.push_back(w);
    }
    return out;
}

// Largest J in [0,n) such that every 0/1 assignment on J occurs in a golden word.
std::size_t golden_oracle(int n) {
    auto words = golden_words(n);
    std::size_t best = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<int> J;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) J.push_back(i);
        if (J.size() <= best) continue;
        bool all = true;
        for (std::uint64_t s = 0; s < (std::uint64_t{1} << J.size()) && all; ++s) {
            bool found = false;
            for (const auto& w : words) {
                bool ok = true;
                for (std::size_t i = 0; i < J.size() && ok; ++i)
                    ok = w[static_cast<std::size_t>(J[i])] == ((s >> i) & 1);
                if (ok) {
                    found = true;
                    break;
                }
            }
            all = found;
        }
        if (all) best = J.size();
    }
    return best;
}

}  // namespace

TEST_CASE("independence set examples") {
    auto full = SubshiftSpec::full_shift(2);
    auto r = is_independence_set(full, kSymbols, Window::interval(0, 6), ConstraintModel::everything());
    CHECK(r.independent);
    REQUIRE(r.certificate);
    CHECK(r.certificate->witnesses.size() == 64);

    auto g = is_independence_set(golden(), kSymbols, Window::interval(0, 2), ConstraintModel::everything());
    CHECK_FALSE(g.independent);
    CHECK(g.failing_sigma == std::vector<int>{2, 2});

    auto D = ConstraintModel::fixed(BorelLikeSet::single({0, {1, 1}}));
    auto f = is_independence_set(full, kSymbols, Window::interval(0, 2), D);
    CHECK_FALSE(f.independent);
    CHECK(f.failing_sigma == std::vector<int>{2, 2});
}

TEST_CASE("sigma cap is enforced") {
    SolverOptions opt;
    opt.sigma_cap = 16;
    CHECK_THROWS_AS(is_independence_set(SubshiftSpec::full_shift(2), kSymbols, Window::interval(0, 5),
                                        ConstraintModel::everything(), opt),
                    BudgetExceeded);
}

TEST_CASE("maximal independence subsets") {
    auto full = SubshiftSpec::full_shift(2);
    CHECK(max_independence_subset(full, kSymbols, Window::interval(0, 8), ConstraintModel::everything()).J.size() == 8);
    auto g = max_independence_subset(golden(), kSymbols, Window::interval(0, 2), ConstraintModel::everything());
    CHECK(g.J == std::vector<int>{0});
    SetTuple with_empty{{BorelLikeSet::single({0, {0}}), BorelLikeSet{}}};
    CHECK(max_independence_subset(full, with_empty, Window::interval(0, 5), ConstraintModel::everything()).J.empty());
    // ties go to the lexicographically least subset
    auto t = max_independence_subset(golden(), kSymbols, Window::interval(0, 4), ConstraintModel::everything());
    CHECK(t.J == std::vector<int>{0, 2});
}

TEST_CASE("solver matches exhaustive oracle on golden mean windows") {
    for (int n = 1; n <= 8; ++n) {
        auto r = max_independence_subset(golden(), kSymbols, Window::interval(0, n), ConstraintModel::everything());
        CHECK(r.J.size() == golden_oracle(n));
        CHECK_FALSE(r.lower_bound);
    }
}

TEST_CASE("search budget produces a flagged lower bound") {
    SolverOptions opt;
    opt.search_budget = 20;
    auto r = max_independence_subset(SubshiftSpec::full_shift(2), kSymbols, Window::interval(0, 8),
                                     ConstraintModel::everything(), opt);
    CHECK(r.lower_bound);
    CHECK(r.J.size() < 8);
}

TEST_CASE("certificates revalidate and are downward closed") {
    std::mt19937_64 rng(5);
    auto spec = golden();
    IndependenceSolver solver(spec);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<int> J;
        int pos = static_cast<int>(rng() % 3);
        for (int i = 0; i < 4; ++i) {
            J.push_back(pos);
            pos += 2 + static_cast<int>(rng() % 3);
        }
        auto r = solver.check(kSymbols, Window(J), ConstraintModel::everything());
        REQUIRE(r.independent);
        CHECK(solver.revalidate(*r.certificate, kSymbols, ConstraintModel::everything()));
        std::vector<int> sub;
        for (int e : J)
            if (rng() % 2) sub.push_back(e);
        CHECK(solver.check(kSymbols, Window(sub), ConstraintModel::everything()).independent);
    }
}

TEST_CASE("tampered certificates fail revalidation") {
    IndependenceSolver solver(golden());
    auto r = solver.check(kSymbols, Window({0, 2}), ConstraintModel::everything());
    REQUIRE(r.independent);
    auto cert = *r.certificate;
    cert.witnesses[3].second.segment.symbols[1] = 1;  // creates "11"
    CHECK_FALSE(solver.revalidate(cert, kSymbols, ConstraintModel::everything()));
}

TEST_CASE("phi density on the full shift") {
    IndependenceSolver solver(SubshiftSpec::full_shift(2));
    auto m = MeasureModel::bernoulli({0.5, 0.5});
    auto F = Window::interval(0, 4);
    CHECK(phi_density(solver, kSymbols, F, 0.0, m).phi_hat == 4);
    CHECK(phi_density(solver, kSymbols, F, 0.25, m).phi_hat == 4);

    // delta = 1/2 admits removing one symbol at one anchor; the oracle enumerates
    // those removals and solves each exactly.
    auto rep = phi_density(solver, kSymbols, F, 0.5, m);
    int oracle = 4;
    for (int a = -0; a < 4; ++a)
        for (Symbol s : {Symbol{0}, Symbol{1}}) {
            auto D = ConstraintModel::fixed(BorelLikeSet::single({a, {s}}));
            oracle = std::min(oracle, static_cast<int>(solver.max_subset(kSymbols, F, D).J.size()));
        }
    CHECK(rep.phi_hat == oracle);
    CHECK(rep.phi_hat == 3);
    CHECK(rep.density == doctest::Approx(0.75));
    CHECK(rep.mode == "language");
}

TEST_CASE("phi density is shift covariant and monotone in delta") {
    std::mt19937_64 rng(9);
    auto [spec, parry] = golden_mean_system();
    IndependenceSolver solver(spec);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const int t = static_cast<int>(rng() % 40) - 20;
        const double delta = 0.05 * static_cast<double>(rng() % 12);
        auto F = Window::interval(0, n);
        auto a = phi_density(solver, kSymbols, F, delta, parry);
        auto b = phi_density(solver, kSymbols, F.shifted(t), delta, parry);
        CHECK(a.phi_hat == b.phi_hat);
        auto c = phi_density(solver, kSymbols, F, std::min(0.95, delta + 0.2), parry);
        CHECK(c.phi_hat <= a.phi_hat);
    }
}

TEST_CASE("per-element family never exceeds the fixed family") {
    IndependenceSolver solver(SubshiftSpec::full_shift(2));
    auto m = MeasureModel::bernoulli({0.7, 0.3});
    ConstraintFamily fam;
    fam.per_element = true;
    for (double delta : {0.0, 0.3, 0.5, 0.75}) {
        auto rep = phi_density(solver, kSymbols, Window::interval(0, 4), delta, m, fam);
        CHECK(rep.phi_hat <= rep.phi_hat_fixed);
    }
    // removing [1] at every s kills all sigma with value 2
    auto rep = phi_density(solver, kSymbols, Window::interval(0, 4), 0.3, m, fam);
    CHECK(rep.phi_hat == 0);
    CHECK(rep.phi_hat_fixed == 3);
}

TEST_CASE("point mass on the fixed point has density zero") {
    IndependenceSolver solver(SubshiftSpec::full_shift(2));
    auto m = MeasureModel::empirical(2, Word(64, 0), 32);
    auto curve = upper_density_estimate(solver, kSymbols, 0.1, m,
                                        {Window::interval(0, 2), Window::interval(0, 4), Window::interval(0, 8)});
    for (const auto& r : curve.reports) CHECK(r.phi_hat == 0);
    CHECK(curve.max_density == 0.0);
}

TEST_CASE("upper density examples") {
    IndependenceSolver full(SubshiftSpec::full_shift(2));
    auto m = MeasureModel::bernoulli({0.5, 0.5});
    auto c = upper_density_estimate(full, kSymbols, 0.0, m,
                                    {Window::interval(0, 2), Window::interval(0, 4), Window::interval(0, 8)});
    for (const auto& r : c.reports) CHECK(r.density == 1.0);

    auto [spec, parry] = golden_mean_system();
    IndependenceSolver gs(spec);
    auto g = upper_density_estimate(gs, kSymbols, 0.0, parry, {Window::interval(0, 3), Window::interval(0, 6)});
    CHECK(g.reports[0].phi_hat == static_cast<int>(golden_oracle(3)));
    CHECK(g.reports[1].phi_hat == static_cast<int>(golden_oracle(6)));
}

TEST_CASE("sequential density on spaced and consecutive sets") {
    auto [spec, parry] = golden_mean_system();
    IndependenceSolver solver(spec);
    std::vector<Window> spaced, consecutive;
    for (int n = 1; n <= 5; ++n) {
        std::vector<int> s;
        for (int i = 0; i < n; ++i) s.push_back(2 * i);
        spaced.emplace_back(s);
        consecutive.push_back(Window::interval(0, n + 1));
    }
    auto a = sequential_density_estimate(solver, kSymbols, 0.0, parry, spaced);
    for (const auto& r : a.reports) CHECK(r.density == 1.0);
    auto b = sequential_density_estimate(solver, kSymbols, 0.0, parry, consecutive);
    for (std::size_t i = 0; i < b.reports.size(); ++i)
        CHECK(b.reports[i].phi_hat == static_cast<int>(golden_oracle(static_cast<int>(i) + 2)));
    CHECK_THROWS_AS(sequential_density_estimate(solver, kSymbols, 0.0, parry, {Window({0, 1}), Window({5})}),
                    InvalidModel);
}

TEST_CASE("common witnesses for a single set of positive measure") {
    // One-component tuple: an independence set is a set of shifts with a common witness.
    SetTuple A{{BorelLikeSet::single({0, {1}})}};
    IndependenceSolver solver(SubshiftSpec::full_shift(2));
    for (double p : {0.3, 0.5}) {
        auto m = MeasureModel::bernoulli({1.0 - p, p});
        for (double d : {0.1, 0.2, p - 0.05}) {
            const double delta = 1.0 - (1.0 - p) / (1.0 - d) - 1e-6;
            for (int r : {1, 2}) {
                ConstraintFamily fam;
                fam.depth = r;
                for (int n : {4, 8, 12}) {
                    auto rep = phi_density(solver, A, Window::interval(0, n), delta, m, fam);
                    CHECK(rep.phi_hat >= d * n);
                }
            }
        }
    }
}

TEST_CASE("IE pair detection") {
    IndependenceSolver full(SubshiftSpec::full_shift(2));
    auto bern = MeasureModel::bernoulli({0.5, 0.5});
    auto v = detect_ie_pair(full, bern, Word{0}, Word{1}, 0, 0.0, {Window::interval(0, 4), Window::interval(0, 8)});
    CHECK(v.positive);
    CHECK(v.final_density == 1.0);

    // The fixed point 0^Z: the [1] cylinder is empty, so nothing is independent.
    IndependenceSolver fixed(SubshiftSpec::sft(2, {{1}}));
    auto point = MeasureModel::empirical(2, Word(16, 0), 8);
    auto z = detect_ie_pair(fixed, point, Word{0}, Word{1}, 0, 0.0, {Window::interval(0, 4)});
    CHECK_FALSE(z.positive);
    CHECK(z.final_density == 0.0);
    CHECK_THROWS_AS(detect_ie_pair(full, bern, Word{1}, Word{1}, 0, 0.0, {Window::interval(0, 4)}),
                    NonDisjointNeighbourhoods);

    auto [spec, parry] = golden_mean_system();
    IndependenceSolver gs(spec);
    auto g = detect_ie_pair(gs, parry, Word{0}, Word{1}, 0, 0.0, {Window::interval(0, 6), Window::interval(0, 12)});
    CHECK(g.positive);
    CHECK(g.final_density == doctest::Approx(static_cast<double>(golden_oracle(12)) / 12.0));
}

TEST_CASE("orbit-sample mode uses shifts of the reference segment") {
    auto spec = SubshiftSpec::generator(2, Generator{"periodic", {}, Word{0, 1}});
    auto sample = generate_segment(spec, 0, 20, 0);
    IndependenceSolver solver(spec, sample);
    auto one = solver.check(kSymbols, Window({3}), ConstraintModel::everything());
    REQUIRE(one.independent);
    CHECK(solver.revalidate(*one.certificate, kSymbols, ConstraintModel::everything()));
    auto two = solver.check(kSymbols, Window({0, 1}), ConstraintModel::everything());
    CHECK_FALSE(two.independent);
    CHECK(two.failing_sigma == std::vector<int>{1, 1});
    auto spaced = solver.check(kSymbols, Window({0, 3}), ConstraintModel::everything());
    CHECK_FALSE(spaced.independent);
    CHECK_THROWS_AS(IndependenceSolver{spec}, UnsupportedSpec);
}
