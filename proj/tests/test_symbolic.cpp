#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "combind/errors.hpp"
#include "combind/symbolic.hpp"

using namespace combind;

namespace {

bool avoids(const Word& u, const std::vector<Word>& forbidden) {
    for (const auto& f : forbidden)
        if (std::search(u.begin(), u.end(), f.begin(), f.end()) != u.end()) return false;
    return true;
}

// Words of length len that sit in the middle of some forbidden-free word with
// pad symbols on each side. With pad at least the number of (order)-blocks, a
// path that long revisits a block, so it closes into a bi-infinite point.
std::set<Word> oracle_language(int k, const std::vector<Word>& forbidden, int len, int pad) {
    std::set<Word> out;
    const int total = len + 2 * pad;
    std::uint64_t n = 1;
    for (int i = 0; i < total; ++i) n *= static_cast<std::uint64_t>(k);
    for (std::uint64_t c = 0; c < n; ++c) {
        Word u = word_from_code(c, total, k);
        if (!avoids(u, forbidden)) continue;
        out.insert(Word(u.begin() + pad, u.begin() + pad + len));
    }
    return out;
}

}  // namespace

TEST_CASE("feasible_word on the full shift realizes any letter constraints") {
    auto spec = SubshiftSpec::full_shift(2);
    auto w = feasible_word(spec, {Requirement::symbol_at(0, 1), Requirement::symbol_at(3, 0)});
    REQUIRE(w);
    CHECK(w->start == 0);
    CHECK(w->symbols.size() == 4);
    CHECK(w->at(0) == 1);
    CHECK(w->at(3) == 0);
}

TEST_CASE("golden mean feasibility examples") {
    auto spec = SubshiftSpec::sft(2, {{1, 1}});
    CHECK_FALSE(feasible_word(spec, {Requirement::symbol_at(0, 1), Requirement::symbol_at(1, 1)}));
    auto w = feasible_word(spec, {Requirement::symbol_at(0, 1), Requirement::symbol_at(2, 1)});
    REQUIRE(w);
    CHECK(word_to_string(w->symbols) == "101");
}

TEST_CASE("generator specs are rejected by feasible_word") {
    auto spec = SubshiftSpec::generator(2, Generator{"tame", {}, {}});
    CHECK_THROWS_AS(feasible_word(spec, {}), UnsupportedSpec);
}

TEST_CASE("feasibility is sound and complete against exhaustive enumeration") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 2);
        std::vector<Word> forbidden;
        const int nf = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < nf; ++i) {
            Word f(1 + rng() % static_cast<std::uint64_t>(k == 2 ? 3 : 2));
            for (auto& s : f) s = static_cast<Symbol>(rng() % static_cast<std::uint64_t>(k));
            forbidden.push_back(f);
        }
        auto spec = SubshiftSpec::sft(k, forbidden);
        Language lang(spec);
        const int len = 6;
        std::size_t maxlen = 1;
        for (const auto& f : forbidden) maxlen = std::max(maxlen, f.size());
        int pad = 1;
        for (std::size_t i = 1; i < std::max<std::size_t>(2, maxlen); ++i) pad *= k;
        auto oracle = oracle_language(k, forbidden, len, pad);

        // language words agree with the oracle
        auto words = lang.words(len);
        CHECK(std::set<Word>(words.begin(), words.end()) == oracle);

        for (int q = 0; q < 20; ++q) {
            std::vector<Requirement> reqs;
            reqs.push_back(Requirement::symbol_at(0, static_cast<Symbol>(rng() % static_cast<std::uint64_t>(k))));
            reqs.push_back(Requirement::symbol_at(len - 1, static_cast<Symbol>(rng() % static_cast<std::uint64_t>(k))));
            BorelLikeSet avoid{{Cylinder{static_cast<int>(rng() % 4), {static_cast<Symbol>(rng() % 2), static_cast<Symbol>(rng() % 2)}}}};
            reqs.push_back(Requirement::avoid(avoid));
            BorelLikeSet any{{Cylinder{2, {static_cast<Symbol>(rng() % static_cast<std::uint64_t>(k))}},
                              Cylinder{3, {static_cast<Symbol>(rng() % static_cast<std::uint64_t>(k))}}}};
            reqs.push_back(Requirement::in(any));

            std::optional<Word> expected;
            for (const auto& w : oracle) {
                Segment seg{0, w};
                if (std::all_of(reqs.begin(), reqs.end(), [&](const Requirement& r) { return satisfies(r, seg); })) {
                    expected = w;
                    break;
                }
            }
            auto got = FeasibilityEngine(spec).solve(reqs);
            REQUIRE(got.has_value() == expected.has_value());
            if (got) {
                CHECK(got->start == 0);
                CHECK(got->symbols == *expected);
            }
        }
    }
}

TEST_CASE("generate_segment is deterministic and stays in the language") {
    auto full = SubshiftSpec::full_shift(2);
    CHECK(generate_segment(full, 0, 4, 7).symbols == generate_segment(full, 0, 4, 7).symbols);

    auto golden = SubshiftSpec::sft(2, {{1, 1}});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto seg = generate_segment(golden, 0, 10, seed);
        CHECK(seg.symbols.size() == 10);
        CHECK(avoids(seg.symbols, {{1, 1}}));
    }
    CHECK_THROWS_AS(generate_segment(SubshiftSpec::sft(2, {{0}, {1}}), 0, 4, 1), EmptyLanguage);
}

TEST_CASE("essential trimming drops blocks without bi-infinite extensions") {
    // "01" forbidden: points are ...1110000... style; every word still extends.
    Language a(SubshiftSpec::sft(2, {{0, 1}}));
    CHECK(a.contains(Word{1, 1, 0, 0}));
    CHECK_FALSE(a.contains(Word{0, 1}));
    // forbidding 00, 01 leaves only 1^Z
    Language b(SubshiftSpec::sft(2, {{0, 0}, {0, 1}}));
    CHECK_FALSE(b.contains(Word{0}));
    CHECK(b.contains(Word{1, 1, 1}));
}

TEST_CASE("word string round trip") {
    Word w{0, 1, 2, 9};
    CHECK(word_from_string(word_to_string(w)) == w);
    CHECK(word_from_code(word_code(w, 10), 4, 10) == w);
}

TEST_CASE("partitions label every admissible word") {
    auto golden = SubshiftSpec::sft(2, {{1, 1}});
    auto p = Partition::from_labels(golden, 2, {0, 1, 2});
    CHECK(p.num_labels == 3);
    CHECK(p.label_of(Word{1, 1}) == -1);
    CHECK(p.label_of(Word{1, 0}) == 2);
    CHECK_THROWS_AS(Partition::from_labels(golden, 2, {0, 1}), InvalidModel);
}
