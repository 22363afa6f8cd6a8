#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "combind/errors.hpp"
#include "combind/shattering.hpp"

using namespace combind;

namespace {

std::vector<std::vector<int>> all_rows(int n, int lo, int hi) {
    std::vector<std::vector<int>> out;
    const int base = hi - lo + 1;
    std::uint64_t total = ipow(static_cast<std::uint64_t>(base), n);
    for (std::uint64_t c = 0; c < total; ++c) {
        Word w = word_from_code(c, n, base);
        std::vector<int> r;
        for (Symbol s : w) r.push_back(lo + s);
        out.push_back(r);
    }
    return out;
}

PatternSet subset_of(int n, int k, const std::vector<std::vector<int>>& universe, std::uint64_t mask) {
    std::vector<std::vector<int>> rows;
    for (std::size_t i = 0; i < universe.size(); ++i)
        if (mask >> i & 1) rows.push_back(universe[i]);
    return PatternSet::from_rows(n, k, rows);
}

// Oracle: every candidate I, largest shattered by direct projection.
std::size_t oracle_shatter(const PatternSet& S) {
    std::size_t best = 0;
    const int n = S.n(), k = S.k();
    for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m) {
        std::vector<int> I;
        for (int z = 0; z < n; ++z)
            if (m >> z & 1) I.push_back(z);
        std::set<std::vector<int>> proj;
        for (const auto& r : S.rows()) {
            std::vector<int> p;
            bool ok = true;
            for (int z : I) {
                ok = ok && r[static_cast<std::size_t>(z)] != 0;
                p.push_back(r[static_cast<std::size_t>(z)]);
            }
            if (ok) proj.insert(p);
        }
        if (proj.size() == ipow(static_cast<std::uint64_t>(k), static_cast<int>(I.size()))) best = std::max(best, I.size());
    }
    return best;
}

// Oracle: smallest set of boxes covering S, by trying all box subsets.
int oracle_cover(const PatternSet& S) {
    const int n = S.n(), k = S.k();
    auto boxes = all_rows(n, 1, k);
    int best = 1 << 30;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << boxes.size()); ++m) {
        int cnt = __builtin_popcountll(m);
        if (cnt >= best) continue;
        bool all = true;
        for (const auto& r : S.rows()) {
            bool hit = false;
            for (std::size_t b = 0; b < boxes.size() && !hit; ++b) {
                if (!(m >> b & 1)) continue;
                bool in = true;
                for (int z = 0; z < n; ++z) in = in && r[static_cast<std::size_t>(z)] != boxes[b][static_cast<std::size_t>(z)];
                hit = in;
            }
            if (!hit) {
                all = false;
                break;
            }
        }
        if (all) best = cnt;
    }
    return best;
}

}  // namespace

TEST_CASE("largest shattered subset examples") {
    CHECK(largest_shattered_subset(PatternSet::full(5, 2)).size() == 5);
    CHECK(largest_shattered_subset(PatternSet::from_rows(3, 2, {{1, 2, 1}})).empty());
    std::mt19937_64 rng(1);
    auto universe = all_rows(3, 1, 2);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::vector<int>> rows;
        while (rows.size() < 5) {
            auto r = universe[rng() % universe.size()];
            if (std::find(rows.begin(), rows.end(), r) == rows.end()) rows.push_back(r);
        }
        auto S = PatternSet::from_rows(3, 2, rows);
        auto I = largest_shattered_subset(S);
        CHECK(I.size() == oracle_shatter(S));
        CHECK(shatters(S, I));
    }
}

TEST_CASE("shattering ignores zero entries") {
    auto S = PatternSet::from_rows(2, 2, {{1, 0}, {2, 0}, {0, 1}});
    CHECK(largest_shattered_subset(S) == std::vector<int>{0});
}

TEST_CASE("Karpovsky-Milman thresholds") {
    CHECK(km_threshold(3, 2, 2) == 4);
    CHECK(km_threshold(3, 2, 1) == 1);
    // k = 3: S = {1,2}^4 has 16 patterns and shatters no singleton, so the
    // threshold weights binomials by (k-1)^(n-i).
    CHECK(km_threshold(4, 3, 1) == 16);
    CHECK(km_threshold(4, 3, 2) == 16 + 4 * 8);
    CHECK(km_threshold(60, 5, 30) > BigInt(1) << 64);
    CHECK_THROWS_AS(km_threshold(3, 2, 4), InvalidModel);
}

TEST_CASE("Karpovsky-Milman exhaustive for small cases") {
    struct Case {
        int n, k;
    };
    for (auto [n, k] : {Case{2, 2}, Case{3, 2}, Case{2, 3}}) {
        auto universe = all_rows(n, 1, k);
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << universe.size()); ++m) {
            auto S = subset_of(n, k, universe, m);
            const std::size_t s = largest_shattered_subset(S).size();
            for (int t = 1; t <= n; ++t)
                if (BigInt(S.size()) > km_threshold(n, k, t)) CHECK(s >= static_cast<std::size_t>(t));
        }
        for (int t = 1; t <= n; ++t) {
            auto ext = km_extremal(n, k, t);
            CHECK(BigInt(ext.size()) == km_threshold(n, k, t));
            CHECK(largest_shattered_subset(ext).size() < static_cast<std::size_t>(t));
        }
    }
}

TEST_CASE("cover number examples") {
    for (int n = 1; n <= 3; ++n) CHECK(cover_number(PatternSet::full(n, 2)).value == 1 << n);
    CHECK(cover_number(PatternSet::from_rows(3, 2, {{1, 2, 2}})).value == 1);
    CHECK(cover_number(PatternSet::from_rows(1, 3, {{1}, {2}, {3}})).value == 2);
    CHECK(cover_number(PatternSet::full(12, 2)).value == 4096);
}

TEST_CASE("cover number matches brute force including zero entries") {
    struct Case {
        int n, k, lo;
    };
    for (auto [n, k, lo] : {Case{2, 2, 0}, Case{2, 3, 1}, Case{1, 3, 0}}) {
        auto universe = all_rows(n, lo, k);
        for (std::uint64_t m = 1; m < (std::uint64_t{1} << universe.size()); ++m) {
            auto S = subset_of(n, k, universe, m);
            auto res = cover_number(S);
            CHECK(res.exact);
            CHECK(res.value == oracle_cover(S));
            // the reported boxes really cover S
            for (const auto& r : S.rows()) {
                bool hit = false;
                for (const auto& b : res.boxes) {
                    bool in = true;
                    for (int z = 0; z < n; ++z) in = in && r[static_cast<std::size_t>(z)] != b[static_cast<std::size_t>(z)];
                    hit = hit || in;
                }
                CHECK(hit);
            }
        }
    }
}

TEST_CASE("cover bound against shattered size over all S in {1,2}^3") {
    auto universe = all_rows(3, 1, 2);
    for (std::uint64_t m = 1; m < 256; ++m) {
        auto S = subset_of(3, 2, universe, m);
        const auto s = largest_shattered_subset(S).size();
        CHECK(cover_number(S).value >= std::pow(2.0, static_cast<double>(s)) - 1e-9);
    }
}

TEST_CASE("adding a pattern never shrinks shattering or cover number") {
    std::mt19937_64 rng(4);
    auto universe = all_rows(4, 0, 2);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<int>> rows;
        for (int i = 0; i < 6; ++i) rows.push_back(universe[rng() % universe.size()]);
        auto S = PatternSet::from_rows(4, 2, rows);
        auto s0 = largest_shattered_subset(S).size();
        auto f0 = cover_number(S).value;
        const auto& extra = universe[rng() % universe.size()];
        std::vector<std::uint8_t> e(extra.begin(), extra.end());
        S.insert(e);
        CHECK(largest_shattered_subset(S).size() >= s0);
        CHECK(cover_number(S).value >= f0);
    }
}

TEST_CASE("density lemma search") {
    std::vector<std::vector<int>> rows;
    for (const auto& r : all_rows(3, 0, 2))
        if (std::count(r.begin(), r.end(), 0) <= 1) rows.push_back(r);
    auto S = PatternSet::from_rows(3, 2, rows);
    auto I = density_lemma_search(S, 1.0, 1.0 / 3.0);
    REQUIRE(I);
    CHECK(*I == std::vector<int>{0, 1, 2});

    auto zeros = PatternSet::from_rows(3, 2, {{0, 0, 0}});
    CHECK_FALSE(density_lemma_search(zeros, 0.1, 1.0));
    CHECK_THROWS_AS(density_lemma_search(zeros, 0.1, 0.5), InvalidModel);
}

TEST_CASE("split selection") {
    auto spec = SubshiftSpec::full_shift(2);
    IndependenceSolver solver(spec);
    BorelLikeSet A1 = BorelLikeSet::single({0, {0}});
    BorelLikeSet A2 = BorelLikeSet::single({0, {1}});
    SetTuple U{{A1, A2}};
    auto cert = *solver.check(U, Window::interval(0, 5), ConstraintModel::everything()).certificate;

    // A1 split into itself twice
    auto same = split_selection(solver, A1, A1, {A2}, cert);
    CHECK(same.J_prime == cert.J);
    CHECK(same.ratio == 1.0);

    auto empty = split_selection(solver, A1, BorelLikeSet{}, {A2}, cert);
    CHECK(empty.branch == 1);
    CHECK(empty.J_prime == cert.J);

    // split by the second coordinate: [00] and [01]; the oracle is the exact solver
    BorelLikeSet s1 = BorelLikeSet::single({0, {0, 0}});
    BorelLikeSet s2 = BorelLikeSet::single({0, {0, 1}});
    BorelLikeSet s12{{Cylinder{0, {0, 0}}, Cylinder{0, {0, 1}}}};
    auto cert12 = *solver.check(SetTuple{{s12, A2}}, Window::interval(0, 5), ConstraintModel::everything()).certificate;
    auto r = split_selection(solver, s1, s2, {A2}, cert12);
    auto b1 = solver.max_subset(SetTuple{{s1, A2}}, Window(cert.J), ConstraintModel::everything());
    auto b2 = solver.max_subset(SetTuple{{s2, A2}}, Window(cert.J), ConstraintModel::everything());
    CHECK(r.J_prime.size() == std::max(b1.J.size(), b2.J.size()));
    CHECK(r.ratio > 0.0);

    auto bad = cert;
    bad.J.push_back(9);
    CHECK_THROWS_AS(split_selection(solver, A1, A1, {A2}, bad), CertificateInvalid);
}

TEST_CASE("separated vectors to shattered coordinates") {
    std::vector<std::vector<double>> cube;
    for (const auto& r : all_rows(4, 0, 1)) cube.emplace_back(r.begin(), r.end());
    auto res = separated_to_shattered(cube, 1.0);
    REQUIRE(res.found);
    CHECK(res.J == std::vector<int>{0, 1, 2, 3});
    CHECK(res.t == 0.5);
    CHECK(res.epsilon == 0.5);
    CHECK(separated_result_valid(cube, res));

    CHECK_FALSE(separated_to_shattered(std::vector<std::vector<double>>{{0.3, 0.2}}, 0.5).found);
    CHECK_THROWS_AS(separated_to_shattered(std::vector<std::vector<double>>{{0.0, 0.0}, {0.1, 0.0}}, 0.5), InvalidModel);

    // rows of an independence certificate as indicator vectors
    IndependenceSolver solver(SubshiftSpec::sft(2, {{1, 1}}));
    SetTuple A{{BorelLikeSet::single({0, {0}}), BorelLikeSet::single({0, {1}})}};
    auto cert = *solver.check(A, Window({0, 2, 4}), ConstraintModel::everything()).certificate;
    std::vector<std::vector<double>> E;
    for (const auto& [sigma, w] : cert.witnesses) {
        std::vector<double> v;
        for (int i = 0; i < 5; ++i) v.push_back(w.segment.covers(i, i + 1) ? w.segment.at(i) : 0.0);
        E.push_back(v);
    }
    auto got = separated_to_shattered(E, 1.0);
    CHECK(got.J == std::vector<int>{0, 2, 4});
    CHECK(separated_result_valid(E, got));

    std::vector<std::vector<std::complex<double>>> Ec;
    for (const auto& v : cube) {
        std::vector<std::complex<double>> z;
        for (double x : v) z.emplace_back(0.0, x);
        Ec.push_back(z);
    }
    auto c = separated_to_shattered(Ec, 1.0);
    CHECK(c.side == "imaginary");
    CHECK(c.J.size() == 4);
}
