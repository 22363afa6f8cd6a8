#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <map>
#include <random>

#include "combind/entropy.hpp"
#include "combind/errors.hpp"
#include "combind/examples.hpp"

using namespace combind;

namespace {

const double kLn2 = std::log(2.0);
const double kLnPhi = std::log((1.0 + std::sqrt(5.0)) / 2.0);

MeasureModel point_mass() { return MeasureModel::empirical(2, Word(64, 0), 32); }

// H of the symbol join over the given coordinates, from cylinder masses of
// every admissible word on their hull.
double oracle_join_entropy(const SubshiftSpec& spec, const MeasureModel& m, const std::vector<int>& coords) {
    const int lo = *std::min_element(coords.begin(), coords.end());
    const int hi = *std::max_element(coords.begin(), coords.end()) + 1;
    std::map<Word, double> marg;
    for (const auto& w : Language(spec).words(hi - lo)) {
        const double mu = cylinder_measure(m, Cylinder{lo, w});
        Word key;
        for (int c : coords) key.push_back(w[static_cast<std::size_t>(c - lo)]);
        marg[key] += mu;
    }
    double h = 0.0;
    for (auto& [w, mu] : marg)
        if (mu > 0.0) h -= mu * std::log(mu);
    return h;
}

Partition random_partition(const SubshiftSpec& spec, int depth, int labels, std::mt19937_64& rng) {
    const auto words = Language(spec).words(depth);
    std::vector<int> lab;
    for (std::size_t i = 0; i < words.size(); ++i) lab.push_back(static_cast<int>(rng() % labels));
    return Partition::from_labels(spec, depth, lab);
}

// Least number of members of U^F covering all but delta of the mass, by
// trying every subset of U^F.
int oracle_cover_number(const Cover& U, const Window& F, double delta, const MeasureModel& m) {
    std::set<int> cs;
    for (int f : F.elements)
        for (const auto& mem : U.members)
            for (const auto& c : mem.cylinders)
                for (int j = c.anchor; j < c.end(); ++j) cs.insert(j + f);
    std::vector<int> coords(cs.begin(), cs.end());
    auto atoms = support(m, coords);
    const int nu = static_cast<int>(U.members.size());
    std::vector<std::vector<int>> tuples{{}};
    for (int f = 0; f < F.size(); ++f) {
        std::vector<std::vector<int>> next;
        for (auto& t : tuples)
            for (int u = 0; u < nu; ++u) {
                next.push_back(t);
                next.back().push_back(u);
            }
        tuples = next;
    }
    auto in_member = [&](const Word& w, int u, int f) {
        for (const auto& c : U.members[static_cast<std::size_t>(u)].cylinders) {
            bool ok = true;
            for (std::size_t j = 0; j < c.word.size(); ++j) {
                auto it = std::find(coords.begin(), coords.end(), c.anchor + f + static_cast<int>(j));
                ok = ok && w[static_cast<std::size_t>(it - coords.begin())] == c.word[j];
            }
            if (ok) return true;
        }
        return false;
    };
    int best = 1 << 30;
    const std::size_t T = tuples.size();
    REQUIRE(T <= 16);
    for (std::uint32_t mask = 0; mask < (1u << T); ++mask) {
        double mass = 0.0;
        for (const auto& a : atoms) {
            bool cov = false;
            for (std::size_t t = 0; t < T && !cov; ++t) {
                if (!(mask >> t & 1u)) continue;
                bool all = true;
                for (int f = 0; f < F.size() && all; ++f)
                    all = in_member(a.symbols, tuples[t][static_cast<std::size_t>(f)], F.elements[static_cast<std::size_t>(f)]);
                cov = all;
            }
            if (cov) mass += a.mass;
        }
        if (mass >= 1.0 - delta - 1e-12) best = std::min(best, __builtin_popcount(mask));
    }
    return best;
}

}  // namespace

TEST_CASE("shannon entropy examples") {
    auto spec = SubshiftSpec::full_shift(2);
    auto P = Partition::symbol_partition(spec);
    CHECK(shannon_entropy(P, MeasureModel::bernoulli({0.5, 0.5})) == doctest::Approx(kLn2).epsilon(1e-14));
    CHECK(shannon_entropy(Partition::trivial(spec), MeasureModel::bernoulli({0.5, 0.5})) == 0.0);
    CHECK(std::abs(shannon_entropy(P, MeasureModel::bernoulli({0.25, 0.75})) - 0.5623351446188083) < 1e-12);
    CHECK_THROWS_AS(shannon_entropy(P, MeasureModel::bernoulli({0.2, 0.3, 0.5})), InvalidModel);
    auto deep = Partition::from_labels(spec, 4, std::vector<int>(16, 0));
    CHECK_THROWS_AS(shannon_entropy(deep, MeasureModel::empirical(2, Word{0, 1, 0, 1}, 2)), WordTooLong);
}

TEST_CASE("join over window") {
    auto spec = SubshiftSpec::full_shift(2);
    auto P = Partition::symbol_partition(spec);
    auto J0 = join_over_window(spec, P, Window({0}));
    CHECK(J0.num_labels == 2);
    CHECK(J0.labels == P.labels);
    auto J3 = join_over_window(spec, P, Window::interval(0, 3));
    CHECK(J3.num_labels == 8);
    CHECK(J3.depth == 3);
    auto [golden, parry] = golden_mean_system();
    auto G2 = join_over_window(golden, Partition::symbol_partition(golden), Window::interval(0, 2));
    CHECK(G2.num_labels == 3);
    CHECK(G2.label_of(Word{1, 1}) == -1);
    // entropy of the joined partition equals the entropy of the join
    CHECK(std::abs(shannon_entropy(G2, parry) -
                   dynamical_entropy_curve(Partition::symbol_partition(golden), parry, {Window::interval(0, 2)})[0] * 2) <
          1e-12);
}

TEST_CASE("dynamical entropy curves") {
    auto spec = SubshiftSpec::full_shift(2);
    auto P = Partition::symbol_partition(spec);
    std::vector<Window> ws;
    for (int n = 1; n <= 16; ++n) ws.push_back(Window::interval(0, n));
    for (double v : dynamical_entropy_curve(P, MeasureModel::bernoulli({0.5, 0.5}), ws))
        CHECK(std::abs(v - kLn2) < 1e-12);
    for (double v : dynamical_entropy_curve(P, point_mass(), ws)) CHECK(v == 0.0);

    auto [golden, parry] = golden_mean_system();
    auto G = Partition::symbol_partition(golden);
    auto curve = dynamical_entropy_curve(G, parry, ws);
    const double h = markov_entropy_rate(parry);
    CHECK(std::abs(h - kLnPhi) < 1e-9);
    const double h0 = shannon_entropy(G, parry);
    for (int n = 1; n <= 16; ++n) {
        // stationary Markov: H(P^[0,n)) = H(pi) + (n-1) h
        CHECK(std::abs(curve[static_cast<std::size_t>(n - 1)] * n - (h0 + (n - 1) * h)) < 1e-10);
        if (n > 1) CHECK(curve[static_cast<std::size_t>(n - 1)] < curve[static_cast<std::size_t>(n - 2)]);
        CHECK(curve[static_cast<std::size_t>(n - 1)] > h);
    }
    for (int n = 1; n <= 8; ++n) {
        std::vector<int> c;
        for (int i = 0; i < n; ++i) c.push_back(i);
        CHECK(std::abs(curve[static_cast<std::size_t>(n - 1)] * n - oracle_join_entropy(golden, parry, c)) < 1e-12);
    }
}

TEST_CASE("conditional entropy") {
    auto spec = SubshiftSpec::full_shift(2);
    auto m = MeasureModel::bernoulli({0.5, 0.5});
    auto P = Partition::symbol_partition(spec);
    auto Q = P;
    Q.anchor = 1;
    CHECK(std::abs(conditional_entropy(P, Partition::trivial(spec), m) - kLn2) < 1e-12);
    CHECK(conditional_entropy(P, P, m) < 1e-12);
    CHECK(std::abs(conditional_entropy(P, Q, m) - kLn2) < 1e-12);
}

TEST_CASE("sequence entropy curves") {
    auto spec = SubshiftSpec::full_shift(2);
    auto m = MeasureModel::bernoulli({0.5, 0.5});
    auto P = Partition::symbol_partition(spec);
    auto c1 = sequence_entropy_curve(P, m, {1, 2, 3, 4, 5, 6}, 6);
    for (double v : c1) CHECK(std::abs(v - kLn2) < 1e-12);
    auto c0 = sequence_entropy_curve(P, m, {0, 0, 0, 0}, 4);
    for (int n = 1; n <= 4; ++n) CHECK(std::abs(c0[static_cast<std::size_t>(n - 1)] - kLn2 / n) < 1e-12);

    auto [golden, parry] = golden_mean_system();
    std::vector<int> pow2{1, 2, 4, 8, 16, 32, 64, 128};
    auto c2 = sequence_entropy_curve(Partition::symbol_partition(golden), parry, pow2, 8);
    for (int n = 1; n <= 5; ++n) {
        std::vector<int> coords(pow2.begin(), pow2.begin() + n);
        CHECK(std::abs(c2[static_cast<std::size_t>(n - 1)] * n - oracle_join_entropy(golden, parry, coords)) < 1e-12);
    }
    CHECK(c2[7] <= shannon_entropy(Partition::symbol_partition(golden), parry) + 1e-12);
    CHECK_THROWS_AS(sequence_entropy_curve(P, m, {1, 2}, 3), InvalidModel);
}

TEST_CASE("entropy inequalities on random partitions") {
    std::mt19937_64 rng(7);
    auto spec = SubshiftSpec::full_shift(2);
    auto [golden, parry] = golden_mean_system();
    for (int trial = 0; trial < 60; ++trial) {
        const bool g = trial % 2 == 1;
        const auto& sp = g ? golden : spec;
        MeasureModel m = g ? parry : MeasureModel::bernoulli({0.3, 0.7});
        auto P = random_partition(sp, 1 + static_cast<int>(rng() % 4), 2 + static_cast<int>(rng() % 3), rng);
        auto Q = random_partition(sp, 1 + static_cast<int>(rng() % 4), 2 + static_cast<int>(rng() % 3), rng);
        Q.anchor = static_cast<int>(rng() % 3);
        const double hp = shannon_entropy(P, m), hq = shannon_entropy(Q, m);
        int atoms = 0;
        for (const auto& [k, mu] : joined_atoms(P, m, std::vector<int>{0})) atoms += mu > 0.0 ? 1 : 0;
        CHECK(hp >= 0.0);
        CHECK(hp <= std::log(static_cast<double>(atoms)) + 1e-12);
        const double c = conditional_entropy(P, Q, m);
        CHECK(c >= 0.0);
        CHECK(c <= hp + 1e-12);
        CHECK(c + hq <= hp + hq + 1e-12);
        // P v Q refines P
        CHECK(conditional_entropy(P, P, m) < 1e-12);
        // subadditivity over disjoint windows
        const int a = 1 + static_cast<int>(rng() % 4), b = 1 + static_cast<int>(rng() % 4);
        std::vector<int> Fa, Fb, Fab;
        for (int i = 0; i < a; ++i) Fa.push_back(i);
        for (int i = 0; i < b; ++i) Fb.push_back(a + 2 * i);
        Fab = Fa;
        Fab.insert(Fab.end(), Fb.begin(), Fb.end());
        CHECK(entropy_of_masses(joined_atoms(P, m, Fab)) <=
              entropy_of_masses(joined_atoms(P, m, Fa)) + entropy_of_masses(joined_atoms(P, m, Fb)) + 1e-12);
    }
}

TEST_CASE("cover numbers") {
    auto spec = SubshiftSpec::full_shift(2);
    auto m = MeasureModel::bernoulli({0.5, 0.5});
    Cover U{{BorelLikeSet::single({0, {1}}), BorelLikeSet::single({0, {0}})}};  // [0]^c, [1]^c
    U.validate(spec);
    CHECK(cover_number_N(U, Window({0}), 0.0, m).value == 2);
    CHECK(cover_number_N(U, Window({0}), 0.6, m).value == 1);
    CHECK(cover_number_N(U, Window({0}), 0.6, m).removed_mass == doctest::Approx(0.5));

    auto P = Partition::symbol_partition(spec);
    auto asCover = Cover::from_partition(P);
    for (int n = 1; n <= 4; ++n)
        CHECK(cover_number_N(asCover, Window::interval(0, n), 0.0, m).value == (1 << n));

    Cover bad{{BorelLikeSet::single({0, {0}})}};
    CHECK_THROWS_AS(bad.validate(spec), InvalidModel);

    // against exhaustive subsets of U^F on small instances
    std::mt19937_64 rng(3);
    auto [golden, parry] = golden_mean_system();
    for (int trial = 0; trial < 40; ++trial) {
        const bool g = trial % 2 == 0;
        const auto& sp = g ? golden : spec;
        MeasureModel mm = g ? parry : MeasureModel::bernoulli({0.35, 0.65});
        Cover V;
        const auto words = Language(sp).words(2);
        const int members = 2 + static_cast<int>(rng() % 3);
        V.members.resize(static_cast<std::size_t>(members));
        for (const auto& w : words) {
            V.members[rng() % static_cast<std::size_t>(members)].cylinders.push_back({0, w});
            if (rng() % 3 == 0) V.members[rng() % static_cast<std::size_t>(members)].cylinders.push_back({0, w});
        }
        std::erase_if(V.members, [](const BorelLikeSet& b) { return b.cylinders.empty(); });
        V.validate(sp);
        Window F = members <= 2 && trial % 3 == 0 ? Window({0, 1, 3}) : Window({0, 2});
        if (std::pow(static_cast<double>(V.members.size()), F.size()) > 16) F = Window({0});
        double prev = 1e9;
        for (double delta : {0.0, 0.1, 0.3, 0.6}) {
            const int v = cover_number_N(V, F, delta, mm).value;
            CHECK(v == oracle_cover_number(V, F, delta, mm));
            CHECK(v <= prev);
            CHECK(v <= std::pow(static_cast<double>(V.members.size()), F.size()));
            prev = v;
        }
    }
}

TEST_CASE("h minus proxy") {
    auto spec = SubshiftSpec::full_shift(2);
    auto m = MeasureModel::bernoulli({0.5, 0.5});
    auto P = Partition::symbol_partition(spec);
    auto asCover = Cover::from_partition(P);
    std::vector<Window> ws{Window({0}), Window::interval(0, 3)};
    auto hp = h_minus_proxy(asCover, m, ws);
    for (const auto& pt : hp) {
        CHECK(pt.exact);
        CHECK(std::abs(pt.value - kLn2) < 1e-12);
    }
    Cover XA{{BorelLikeSet::everything(), BorelLikeSet::single({0, {1}})}};
    for (const auto& pt : h_minus_proxy(XA, m, ws)) CHECK(pt.value == 0.0);
    Cover U{{BorelLikeSet::single({0, {1}}), BorelLikeSet::single({0, {0}})}};
    CHECK(std::abs(h_minus_proxy(U, m, {Window({0})})[0].value - kLn2) < 1e-12);

    // greedy never beats the exact infimum
    auto [golden, parry] = golden_mean_system();
    Cover V{{BorelLikeSet{{{0, {0, 0}}, {0, {0, 1}}}}, BorelLikeSet{{{0, {0, 1}}, {0, {1, 0}}}},
             BorelLikeSet{{{0, {1, 0}}, {0, {0, 0}}}}}};
    V.validate(golden);
    for (int n = 1; n <= 2; ++n) {
        auto ex = h_minus_proxy(V, parry, {Window::interval(0, n)})[0];
        auto gr = h_minus_proxy(V, parry, {Window::interval(0, n)}, 1)[0];
        CHECK(ex.exact);
        CHECK_FALSE(gr.exact);
        CHECK(gr.value >= ex.value - 1e-12);
        CHECK(ex.value <= dynamical_entropy_curve(Partition::symbol_partition(golden), parry,
                                                  {Window::interval(0, n + 1)})[0] * (n + 1) / n + 1e-12);
    }
}

TEST_CASE("cpa construction") {
    auto spec = SubshiftSpec::full_shift(2);
    auto P = Partition::symbol_partition(spec);
    auto r = cpa_from_partition(P, point_mass(), 10, 0.1);
    CHECK(r.rank == 2);
    CHECK(r.achieved_error == 0.0);
    CHECK(r.bound_ok);

    auto r2 = cpa_from_partition(P, MeasureModel::bernoulli({0.99, 0.01}), 4, 0.3);
    CHECK(r2.rank <= 4);
    CHECK(r2.bound_ok);
    CHECK(r2.entropy == doctest::Approx(4 * (-0.99 * std::log(0.99) - 0.01 * std::log(0.01))));
    // one large atom 0000; the rest has mass 1 - 0.99^4 and is split evenly per coordinate
    const double R = 1.0 - std::pow(0.99, 4);
    const double g = 0.01;
    CHECK(std::abs(r2.achieved_error - std::sqrt(g * (R - g) / R)) < 1e-12);

    try {
        cpa_from_partition(P, MeasureModel::bernoulli({0.5, 0.5}), 4, 0.1);
        FAIL("premise should fail");
    } catch (const PremiseFailed& e) {
        CHECK(std::abs(e.actual_rate() - kLn2) < 1e-12);
    }

    std::mt19937_64 rng(11);
    int tested = 0;
    for (int trial = 0; trial < 400 && tested < 50; ++trial) {
        std::uniform_real_distribution<double> u(0.0, 0.08);
        const double e = u(rng);
        auto m = MeasureModel::bernoulli({1.0 - e, e});
        auto Pr = random_partition(spec, 1 + static_cast<int>(rng() % 2), 2, rng);
        const int n = 1 + static_cast<int>(rng() % 8);
        const double delta = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
        try {
            auto rr = cpa_from_partition(Pr, m, n, delta);
            CHECK(rr.bound_ok);
            CHECK(rr.rank <= std::exp(n * delta) + 1.0);
            CHECK(rr.achieved_error <= std::sqrt(delta * delta + 4 * delta));
            ++tested;
        } catch (const PremiseFailed&) {
        }
    }
    CHECK(tested == 50);
}

TEST_CASE("hcpa upper estimate") {
    auto spec = SubshiftSpec::full_shift(2);
    auto P = Partition::symbol_partition(spec);
    std::vector<int> ns{1, 2, 4, 8};
    for (const auto& pt : hcpa_upper_estimate({Partition::trivial(spec)}, MeasureModel::bernoulli({0.5, 0.5}), 0.1, ns))
        CHECK(pt.value == 0.0);
    for (const auto& pt : hcpa_upper_estimate({P}, point_mass(), 0.1, ns)) CHECK(pt.value == 0.0);
    for (const auto& pt : hcpa_upper_estimate({P}, MeasureModel::bernoulli({0.5, 0.5}), 0.1, ns))
        CHECK(std::abs(pt.value - kLn2) < 1e-12);
}

TEST_CASE("entropy rates") {
    CHECK(markov_entropy_rate(MeasureModel::bernoulli({0.5, 0.5})) == doctest::Approx(kLn2));
    CHECK_THROWS_AS(markov_entropy_rate(point_mass()), InvalidModel);
}
