#include <doctest.h>

#include <cmath>

#include "combind/examples.hpp"

using namespace combind;

TEST_CASE("tame example starts with p(0)=1, q(0)=0 and is deterministic") {
    auto a = build_tame_example(2000);
    auto b = build_tame_example(2000);
    CHECK(a.p[0] == 1);
    CHECK(a.q[0] == 0);
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
    CHECK(a.schedule.size() == b.schedule.size());
}

TEST_CASE("tame schedule inequalities and block layout") {
    auto ex = build_tame_example(100000);
    REQUIRE(ex.schedule.size() >= 2);
    CHECK(ex.schedule[0].a == 0);
    CHECK(ex.schedule[0].a_prime == 0);
    for (std::size_t i = 1; i < ex.schedule.size(); ++i) {
        const auto& prev = ex.schedule[i - 1];
        const auto& cur = ex.schedule[i];
        CHECK(cur.m == prev.m + 1);
        CHECK(cur.a > std::max<long long>(prev.m, prev.a_prime));
        CHECK(cur.h > prev.h + prev.a_prime - ex.schedule[0].a);
        CHECK(cur.a > prev.a_prime + cur.h - ex.schedule[0].h);
        CHECK(cur.a <= cur.a_prime);
    }
    // p and q vanish off the blocks
    std::vector<char> in_block(ex.p.size(), 0);
    for (const auto& st : ex.schedule)
        for (long long i = st.a; i <= st.a_prime && i < static_cast<long long>(ex.p.size()); ++i) in_block[static_cast<std::size_t>(i)] = 1;
    for (std::size_t i = 0; i < ex.p.size(); ++i)
        if (!in_block[i]) {
            CHECK(ex.p[i] == 0);
            CHECK(ex.q[i] == 0);
        }
}

TEST_CASE("ones are sparse in the tame prefix") {
    auto ex = build_tame_example(10000);
    int ones = 0;
    for (Symbol s : ex.p) ones += s;
    CHECK(static_cast<double>(ones) / 10000.0 < 0.01);
}

TEST_CASE("pair coverage statistic grows with the prefix") {
    auto small = tame_pair_coverage(build_tame_example(200), 3);
    auto large = tame_pair_coverage(build_tame_example(20000), 3);
    REQUIRE(small.size() == 3);
    for (std::size_t d = 0; d < 3; ++d) {
        CHECK(large[d] >= small[d]);
        CHECK(large[d] <= 1.0);
    }
    CHECK(large[0] == 1.0);
}

TEST_CASE("golden mean system has Parry entropy rate") {
    auto [spec, m] = golden_mean_system();
    const auto& mk = std::get<Markov>(m.kind());
    double h = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
            row += mk.transition[i][j];
            if (mk.transition[i][j] > 0.0) h -= mk.stationary[i] * mk.transition[i][j] * std::log(mk.transition[i][j]);
        }
        CHECK(std::abs(row - 1.0) < 1e-12);
    }
    CHECK(std::abs(h - std::log((1.0 + std::sqrt(5.0)) / 2.0)) < 1e-9);
    CHECK(cylinder_measure(m, {0, {1, 1}}) == 0.0);
}
