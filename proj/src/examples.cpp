#include "combind/examples.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "combind/errors.hpp"

namespace combind {

namespace {

// p and q on [0, size) with zeros to the left of the origin.
struct Tape {
    Word p, q;

    Symbol p_at(long long i) const { return i < 0 || i >= static_cast<long long>(p.size()) ? 0 : p[static_cast<std::size_t>(i)]; }
    Symbol q_at(long long i) const { return i < 0 || i >= static_cast<long long>(q.size()) ? 0 : q[static_cast<std::size_t>(i)]; }
    void grow(long long last) {
        if (last + 1 > static_cast<long long>(p.size())) {
            p.resize(static_cast<std::size_t>(last + 1), 0);
            q.resize(static_cast<std::size_t>(last + 1), 0);
        }
    }
};

void require(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("tame example invariant violated: ") + what);
}

std::uint64_t pack_pair(std::uint64_t f, std::uint64_t g) { return (f << 32) | g; }

// Smallest-length pair (f, g) of p-words on subintervals of (-inf, last] that
// does not occur jointly in (p, q) there; lexicographic within a length.
std::pair<Word, Word> missing_pair(const Tape& t, long long last) {
    for (int d = 1; d <= 32; ++d) {
        std::unordered_set<std::uint64_t> pwords;
        std::unordered_set<std::uint64_t> joint;
        // Windows starting at -d are all zero; farther left adds nothing new.
        for (long long i = -d; i + d - 1 <= last; ++i) {
            std::uint64_t f = 0, g = 0;
            for (int j = 0; j < d; ++j) {
                f = (f << 1) | t.p_at(i + j);
                g = (g << 1) | t.q_at(i + j);
            }
            pwords.insert(f);
            joint.insert(pack_pair(f, g));
        }
        std::vector<std::uint64_t> sorted(pwords.begin(), pwords.end());
        std::sort(sorted.begin(), sorted.end());
        for (std::uint64_t f : sorted)
            for (std::uint64_t g : sorted)
                if (!joint.count(pack_pair(f, g))) return {word_from_code(f, d, 2), word_from_code(g, d, 2)};
    }
    throw std::logic_error("no missing pair of length <= 32");
}

}  // namespace

TameExample build_tame_example(int length) {
    if (length < 1) throw InvalidModel("tame example length must be >= 1");
    Tape t;
    t.grow(0);
    t.p[0] = 1;
    t.q[0] = 0;

    TameExample ex;
    const long long a1 = 0, h1 = 0;
    TameStep cur{1, 0, 0, 0, 1, 0, {}, {}};
    ex.schedule.push_back(cur);

    while (cur.a_prime < length - 1) {
        const int m = cur.m;
        TameStep next;
        next.m = m + 1;
        next.h = cur.h + (cur.a_prime - a1) + 1;
        next.a = std::max({static_cast<long long>(m), cur.a_prime, cur.a_prime + next.h - h1}) + 1;
        next.branch = (m + 1) % 3;

        require(next.a > std::max(static_cast<long long>(m), cur.a_prime), "a_{m+1} > max(m, a'_m)");
        require(next.h > cur.h + cur.a_prime - a1, "h_{m+1} > h_m + a'_m - a_1");
        require(next.a > cur.a_prime + next.h - h1, "a_{m+1} > a'_m + h_{m+1} - h_1");

        if (next.branch == 1) {
            next.a_prime = next.a + 2 * m;
            t.grow(next.a_prime);
            for (int j = 0; j <= 2 * m; ++j) {
                t.q[static_cast<std::size_t>(next.a + j)] = 0;
                t.p[static_cast<std::size_t>(next.a + j)] = t.q_at(-m + j);
            }
        } else if (next.branch == 2) {
            next.a_prime = next.a + 2 * m;
            t.grow(next.a_prime);
            for (int j = 0; j <= 2 * m; ++j) {
                t.p[static_cast<std::size_t>(next.a + j)] = 0;
                t.q[static_cast<std::size_t>(next.a + j)] = t.p_at(-m + j);
            }
        } else {
            auto [f, g] = missing_pair(t, cur.a_prime);
            const int d = static_cast<int>(f.size());
            next.pair_length = d;
            next.a_prime = next.a + d - 1;
            t.grow(next.a_prime);
            for (int j = 0; j < d; ++j) {
                t.p[static_cast<std::size_t>(next.a + j)] = f[static_cast<std::size_t>(j)];
                t.q[static_cast<std::size_t>(next.a + j)] = g[static_cast<std::size_t>(j)];
            }
            bool placed = true;
            for (int j = 0; j < d; ++j)
                placed = placed && t.p_at(next.a + j) == f[static_cast<std::size_t>(j)] && t.q_at(next.a + j) == g[static_cast<std::size_t>(j)];
            require(placed, "chosen pair realized after placement");
            next.f = std::move(f);
            next.g = std::move(g);
        }
        require(next.a <= next.a_prime && cur.a_prime < next.a, "a_m <= a'_m < a_{m+1}");
        ex.schedule.push_back(next);
        cur = ex.schedule.back();
    }

    t.grow(length - 1);
    ex.p.assign(t.p.begin(), t.p.begin() + length);
    ex.q.assign(t.q.begin(), t.q.begin() + length);
    require(ex.p[0] == 1 && ex.q[0] == 0, "p(0) = 1, q(0) = 0");

    std::vector<int> ones;
    for (int i = 0; i < length; ++i)
        if (ex.p[static_cast<std::size_t>(i)]) ones.push_back(i);
    std::unordered_set<long long> gaps;
    for (std::size_t i = 0; i < ex.schedule.size(); ++i)
        for (std::size_t j = i + 1; j < ex.schedule.size(); ++j) gaps.insert(ex.schedule[j].h - ex.schedule[i].h);
    for (std::size_t i = 0; i < ones.size(); ++i)
        for (std::size_t j = i + 1; j < ones.size(); ++j)
            if (gaps.count(ones[j] - ones[i])) ++ex.v_disjointness_violations;
    return ex;
}

std::vector<double> tame_pair_coverage(const TameExample& ex, int max_d) {
    std::vector<double> out;
    const long long n = static_cast<long long>(ex.p.size());
    for (int d = 1; d <= std::min(max_d, 32); ++d) {
        std::unordered_set<std::uint64_t> pwords, joint;
        for (long long i = 0; i + d <= n; ++i) {
            std::uint64_t f = 0, g = 0;
            for (int j = 0; j < d; ++j) {
                f = (f << 1) | ex.p[static_cast<std::size_t>(i + j)];
                g = (g << 1) | ex.q[static_cast<std::size_t>(i + j)];
            }
            pwords.insert(f);
            joint.insert(pack_pair(f, g));
        }
        std::size_t hit = 0;
        for (std::uint64_t f : pwords)
            for (std::uint64_t g : pwords) hit += joint.count(pack_pair(f, g));
        out.push_back(pwords.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(pwords.size() * pwords.size()));
    }
    return out;
}

std::pair<SubshiftSpec, MeasureModel> golden_mean_system() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const double stay = 1.0 / phi;
    const double leave = 1.0 - stay;
    std::vector<std::vector<double>> P{{stay, leave}, {1.0, 0.0}};
    const double pi1 = 1.0 / (phi * phi + 1.0);
    std::vector<double> pi{1.0 - pi1, pi1};
    return {SubshiftSpec::sft(2, {{1, 1}}), MeasureModel::markov(std::move(P), std::move(pi))};
}

MeasureModel parry_measure(const SubshiftSpec& spec) {
    Language lang(spec);
    if (lang.order() != 1) throw UnsupportedSpec("Parry measure needs a one-step SFT");
    if (lang.empty()) throw EmptyLanguage("the SFT has no points");
    const int k = lang.alphabet_size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (lang.vertex_ok(static_cast<std::uint64_t>(i)) && lang.vertex_ok(static_cast<std::uint64_t>(j)) &&
                lang.edge_ok(static_cast<std::uint64_t>(i * k + j)))
                A(i, j) = 1.0;
    // Power iteration on A + I converges for irreducible A regardless of period.
    Eigen::MatrixXd B = A + Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(k), u = Eigen::VectorXd::Ones(k);
    for (int it = 0; it < 20000; ++it) {
        v = B * v;
        v /= v.sum();
        u = B.transpose() * u;
        u /= u.sum();
    }
    const double lambda = (A * v).sum() / v.sum();
    std::vector<std::vector<double>> P(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
    std::vector<double> pi(static_cast<std::size_t>(k), 0.0);
    double z = 0.0;
    for (int i = 0; i < k; ++i) z += u(i) * v(i);
    for (int i = 0; i < k; ++i) {
        pi[static_cast<std::size_t>(i)] = u(i) * v(i) / z;
        if (v(i) <= 0.0) continue;
        double row = 0.0;
        for (int j = 0; j < k; ++j) {
            P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = A(i, j) * v(j) / (lambda * v(i));
            row += P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        for (int j = 0; j < k; ++j) P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /= row;
    }
    for (int i = 0; i < k; ++i)
        if (v(i) <= 0.0) P[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    return MeasureModel::markov(std::move(P), std::move(pi));
}

}  // namespace combind
