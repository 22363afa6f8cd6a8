#include "combind/shattering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "combind/errors.hpp"

namespace combind {

PatternSet::PatternSet(int n, int k) : n_(n), k_(k) {
    if (n < 1 || n > 64) throw InvalidModel("pattern sets need 1 <= n <= 64");
    if (k < 1 || k > 254) throw InvalidModel("pattern alphabet bound must lie in 1..254");
}

PatternSet PatternSet::from_rows(int n, int k, const std::vector<std::vector<int>>& rows) {
    PatternSet S(n, k);
    std::vector<std::vector<std::uint8_t>> packed;
    packed.reserve(rows.size());
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != n) throw InvalidModel("pattern length differs from |Z|");
        std::vector<std::uint8_t> p(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r[i] < 0 || r[i] > k) throw InvalidModel("pattern value outside 0..k");
            p[i] = static_cast<std::uint8_t>(r[i]);
        }
        packed.push_back(std::move(p));
    }
    std::sort(packed.begin(), packed.end());
    packed.erase(std::unique(packed.begin(), packed.end()), packed.end());
    for (const auto& p : packed) S.rows_.insert(S.rows_.end(), p.begin(), p.end());
    return S;
}

PatternSet PatternSet::full(int n, int k) {
    PatternSet S(n, k);
    const std::uint64_t total = ipow(static_cast<std::uint64_t>(k), n);
    if (total > (std::uint64_t{1} << 24)) throw DepthCapExceeded("full pattern set too large");
    for (std::uint64_t c = 0; c < total; ++c) {
        Word w = word_from_code(c, n, k);
        for (Symbol s : w) S.rows_.push_back(static_cast<std::uint8_t>(s + 1));
    }
    return S;
}

bool PatternSet::insert(std::span<const std::uint8_t> pattern) {
    if (static_cast<int>(pattern.size()) != n_) throw InvalidModel("pattern length differs from |Z|");
    for (auto v : pattern)
        if (v > k_) throw InvalidModel("pattern value outside 0..k");
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        auto r = row(mid);
        if (std::lexicographical_compare(r.begin(), r.end(), pattern.begin(), pattern.end())) lo = mid + 1;
        else hi = mid;
    }
    if (lo < size()) {
        auto r = row(lo);
        if (std::equal(r.begin(), r.end(), pattern.begin())) return false;
    }
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(lo * static_cast<std::size_t>(n_)), pattern.begin(),
                 pattern.end());
    return true;
}

std::vector<std::vector<int>> PatternSet::rows() const {
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < size(); ++i) {
        auto r = row(i);
        out.emplace_back(r.begin(), r.end());
    }
    return out;
}

// ---------------------------------------------------------------- shattering

bool shatters(const PatternSet& S, std::span<const int> I) {
    if (I.empty()) return S.size() > 0;
    const std::uint64_t k = static_cast<std::uint64_t>(S.k());
    std::uint64_t need = 1;
    for (std::size_t i = 0; i < I.size(); ++i) {
        need *= k;
        if (need > S.size()) return false;
    }
    std::vector<char> seen(need, 0);
    std::uint64_t hit = 0;
    for (std::size_t r = 0; r < S.size(); ++r) {
        auto row = S.row(r);
        std::uint64_t code = 0;
        bool ok = true;
        for (int z : I) {
            const auto v = row[static_cast<std::size_t>(z)];
            if (v == 0) {
                ok = false;
                break;
            }
            code = code * k + (v - 1u);
        }
        if (ok && !seen[code]) {
            seen[code] = 1;
            if (++hit == need) return true;
        }
    }
    return false;
}

std::vector<int> largest_shattered_subset(const PatternSet& S) {
    if (S.n() > 24) throw InvalidModel("exact shattering search needs n <= 24");
    std::vector<int> best, cur;
    if (S.size() == 0) return best;
    // |I| <= log_k |S|
    int cap = 0;
    if (S.k() == 1) {
        cap = S.n();
    } else {
        std::uint64_t p = 1;
        while (p * static_cast<std::uint64_t>(S.k()) <= S.size() && cap < S.n()) {
            p *= static_cast<std::uint64_t>(S.k());
            ++cap;
        }
    }
    auto dfs = [&](auto&& self, int start) -> void {
        for (int z = start; z < S.n(); ++z) {
            if (static_cast<int>(cur.size()) + (S.n() - z) <= static_cast<int>(best.size())) return;
            if (static_cast<int>(best.size()) == cap) return;
            cur.push_back(z);
            if (static_cast<int>(cur.size()) <= cap && shatters(S, cur)) {
                if (cur.size() > best.size()) best = cur;
                self(self, z + 1);
            }
            cur.pop_back();
        }
    };
    dfs(dfs, 0);
    return best;
}

BigInt km_threshold(int n, int k, int t) {
    if (n < 1 || t < 1 || t > n) throw InvalidModel("km_threshold needs 1 <= t <= n");
    if (k < 1) throw InvalidModel("km_threshold needs k >= 1");
    BigInt total = 0, binom = 1;
    for (int i = 0; i < t; ++i) {
        total += binom * boost::multiprecision::pow(BigInt(k - 1), n - i);
        binom = binom * (n - i) / (i + 1);
    }
    return total;
}

PatternSet km_extremal(int n, int k, int t) {
    PatternSet full = PatternSet::full(n, k);
    std::vector<std::vector<int>> rows;
    for (std::size_t i = 0; i < full.size(); ++i) {
        auto r = full.row(i);
        int top = 0;
        for (auto v : r) top += v == k ? 1 : 0;
        if (top < t) rows.emplace_back(r.begin(), r.end());
    }
    return PatternSet::from_rows(n, k, rows);
}

// ---------------------------------------------------------------- cover number

namespace {

using Bits = std::vector<std::uint64_t>;

bool any_bit(const Bits& b) {
    return std::any_of(b.begin(), b.end(), [](std::uint64_t w) { return w != 0; });
}

std::size_t popcount(const Bits& b) {
    std::size_t c = 0;
    for (auto w : b) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
}

struct BitsHash {
    std::size_t operator()(const Bits& b) const {
        std::size_t h = 1469598103934665603ull;
        for (auto w : b) h = (h ^ w) * 1099511628211ull;
        return h;
    }
};

class CoverSolver {
public:
    CoverSolver(const PatternSet& S, std::uint64_t budget) : S_(S), budget_(budget) {
        words_ = (S.size() + 63) / 64;
    }

    CoverResult run() {
        CoverResult res;
        if (S_.size() == 0) return res;
        Bits all(words_, 0);
        for (std::size_t i = 0; i < S_.size(); ++i) all[i / 64] |= std::uint64_t{1} << (i % 64);
        greedy(all);
        std::vector<std::vector<int>> chosen;
        search(all, chosen);
        res.value = static_cast<int>(best_.size());
        res.boxes = best_;
        res.exact = !exhausted_;
        return res;
    }

private:
    bool covered_by(std::size_t p, const std::vector<int>& box) const {
        auto r = S_.row(p);
        for (std::size_t z = 0; z < r.size(); ++z)
            if (r[z] == box[z]) return false;
        return true;
    }

    Bits coverage(const Bits& uncovered, const std::vector<int>& box) const {
        Bits out(words_, 0);
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bits = uncovered[w];
            while (bits) {
                int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                std::size_t p = w * 64 + static_cast<std::size_t>(b);
                if (covered_by(p, box)) out[w] |= std::uint64_t{1} << b;
            }
        }
        return out;
    }

    // Boxes containing pattern p: coordinate z may take any value in 1..k except p[z].
    std::vector<std::vector<int>> boxes_for(std::size_t p) const {
        auto r = S_.row(p);
        const int n = S_.n(), k = S_.k();
        std::vector<std::vector<int>> out;
        std::vector<int> box(static_cast<std::size_t>(n), 1);
        auto rec = [&](auto&& self, int z) -> void {
            if (out.size() >= kMaxBranch) return;
            if (z == n) {
                out.push_back(box);
                return;
            }
            for (int v = 1; v <= k; ++v) {
                if (v == r[static_cast<std::size_t>(z)]) continue;
                box[static_cast<std::size_t>(z)] = v;
                self(self, z + 1);
            }
        };
        rec(rec, 0);
        return out;
    }

    std::uint64_t choices(std::size_t p) const {
        std::uint64_t c = 1;
        for (auto v : S_.row(p)) {
            c *= static_cast<std::uint64_t>(S_.k() - (v != 0 ? 1 : 0));
            if (c > kMaxBranch) return kMaxBranch;
        }
        return c;
    }

    // Patterns no single box can hold together need separate boxes.
    std::size_t lower_bound(const Bits& uncovered) const {
        std::vector<std::size_t> clique;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bits = uncovered[w];
            while (bits) {
                int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                std::size_t p = w * 64 + static_cast<std::size_t>(b);
                bool clash_all = true;
                for (std::size_t q : clique)
                    if (!clash(p, q)) {
                        clash_all = false;
                        break;
                    }
                if (clash_all) clique.push_back(p);
            }
        }
        return clique.size();
    }

    bool clash(std::size_t p, std::size_t q) const {
        auto a = S_.row(p), b = S_.row(q);
        for (std::size_t z = 0; z < a.size(); ++z) {
            int distinct = (a[z] != 0 ? 1 : 0) + (b[z] != 0 && b[z] != a[z] ? 1 : 0);
            if (distinct >= S_.k()) return true;
        }
        return false;
    }

    std::size_t pick(const Bits& uncovered) const {
        std::size_t best = 0;
        std::uint64_t best_c = ~std::uint64_t{0};
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bits = uncovered[w];
            while (bits) {
                int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                std::size_t p = w * 64 + static_cast<std::size_t>(b);
                std::uint64_t c = choices(p);
                if (c < best_c) {
                    best_c = c;
                    best = p;
                }
            }
        }
        return best;
    }

    void greedy(Bits uncovered) {
        std::vector<std::vector<int>> chosen;
        while (any_bit(uncovered)) {
            std::size_t p = pick(uncovered);
            std::vector<int> best_box;
            Bits best_cov;
            std::size_t best_n = 0;
            for (const auto& box : boxes_for(p)) {
                Bits cov = coverage(uncovered, box);
                std::size_t n = popcount(cov);
                if (n > best_n) {
                    best_n = n;
                    best_box = box;
                    best_cov = std::move(cov);
                }
            }
            chosen.push_back(best_box);
            for (std::size_t w = 0; w < words_; ++w) uncovered[w] &= ~best_cov[w];
        }
        best_ = std::move(chosen);
    }

    void search(const Bits& uncovered, std::vector<std::vector<int>>& chosen) {
        if (!any_bit(uncovered)) {
            if (chosen.size() < best_.size()) best_ = chosen;
            return;
        }
        if (++nodes_ > budget_) {
            exhausted_ = true;
            return;
        }
        if (chosen.size() + lower_bound(uncovered) >= best_.size()) return;
        auto it = seen_.find(uncovered);
        if (it != seen_.end() && it->second <= chosen.size()) return;
        seen_[uncovered] = chosen.size();

        std::size_t p = pick(uncovered);
        std::vector<std::pair<Bits, std::vector<int>>> options;
        for (auto& box : boxes_for(p)) options.emplace_back(coverage(uncovered, box), std::move(box));
        // Drop boxes whose coverage is contained in another's.
        std::vector<char> dominated(options.size(), 0);
        for (std::size_t i = 0; i < options.size(); ++i)
            for (std::size_t j = 0; j < options.size() && !dominated[i]; ++j) {
                if (i == j || dominated[j]) continue;
                bool subset = true;
                for (std::size_t w = 0; w < words_ && subset; ++w)
                    subset = (options[i].first[w] & ~options[j].first[w]) == 0;
                if (subset && (options[i].first != options[j].first || j < i)) dominated[i] = 1;
            }
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < options.size(); ++i)
            if (!dominated[i]) order.push_back(i);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return popcount(options[a].first) > popcount(options[b].first);
        });
        for (std::size_t i : order) {
            Bits next = uncovered;
            for (std::size_t w = 0; w < words_; ++w) next[w] &= ~options[i].first[w];
            chosen.push_back(options[i].second);
            search(next, chosen);
            chosen.pop_back();
            if (exhausted_) return;
        }
    }

    static constexpr std::uint64_t kMaxBranch = 4096;

    const PatternSet& S_;
    std::uint64_t budget_;
    std::size_t words_ = 0;
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
    std::vector<std::vector<int>> best_;
    std::unordered_map<Bits, std::size_t, BitsHash> seen_;
};

}  // namespace

CoverResult cover_number(const PatternSet& S, std::uint64_t node_budget) {
    if (S.n() > 12) throw InvalidModel("cover_number needs |Z| <= 12");
    if (S.size() > 4096) throw InvalidModel("cover_number needs |S| <= 4096");
    if (S.k() < 2) throw InvalidModel("cover_number needs k >= 2");
    return CoverSolver(S, node_budget).run();
}

std::optional<std::vector<int>> density_lemma_search(const PatternSet& S, double a_target, double b) {
    const double limit = b * S.n() + 1e-9;
    for (std::size_t i = 0; i < S.size(); ++i) {
        auto r = S.row(i);
        const auto zeros = std::count(r.begin(), r.end(), std::uint8_t{0});
        if (static_cast<double>(zeros) > limit) throw InvalidModel("a pattern has more than b*n zeros");
    }
    auto I = largest_shattered_subset(S);
    if (static_cast<double>(I.size()) + 1e-9 < a_target * S.n()) return std::nullopt;
    if (I.empty() && a_target > 0.0) return std::nullopt;
    return I;
}

// ---------------------------------------------------------------- split

SplitResult split_selection(IndependenceSolver& solver, const BorelLikeSet& A11, const BorelLikeSet& A12,
                            const std::vector<BorelLikeSet>& rest, const IndependenceCertificate& cert,
                            const ConstraintModel& D) {
    SetTuple unioned, first, second;
    BorelLikeSet u = A11;
    u.cylinders.insert(u.cylinders.end(), A12.cylinders.begin(), A12.cylinders.end());
    unioned.components.push_back(u);
    first.components.push_back(A11);
    second.components.push_back(A12);
    for (const auto& c : rest) {
        unioned.components.push_back(c);
        first.components.push_back(c);
        second.components.push_back(c);
    }
    if (!solver.revalidate(cert, unioned, D)) throw CertificateInvalid("certificate does not hold for the unioned tuple");
    Window J(cert.J);
    auto r1 = solver.max_subset(first, J, D);
    auto r2 = solver.max_subset(second, J, D);
    SplitResult out;
    out.branch1_size = r1.J.size();
    out.branch2_size = r2.J.size();
    out.lower_bound = r1.lower_bound || r2.lower_bound;
    if (r2.J.size() > r1.J.size()) {
        out.branch = 2;
        out.J_prime = r2.J;
    } else {
        out.J_prime = r1.J;
    }
    out.ratio = J.empty() ? 1.0 : static_cast<double>(out.J_prime.size()) / static_cast<double>(J.size());
    return out;
}

// ---------------------------------------------------------------- separated sets

namespace {

constexpr int kGrid = 64;

void check_separated(const std::vector<std::vector<double>>& re, const std::vector<std::vector<double>>* im,
                     double delta) {
    if (re.empty()) return;
    const std::size_t n = re.front().size();
    for (std::size_t a = 0; a < re.size(); ++a) {
        if (re[a].size() != n) throw InvalidModel("vectors must share one dimension");
        for (std::size_t j = 0; j < n; ++j) {
            double mag = im ? std::hypot(re[a][j], (*im)[a][j]) : std::abs(re[a][j]);
            if (!(mag <= 1.0 + 1e-12)) throw InvalidModel("vectors must have sup-norm at most 1");
        }
    }
    for (std::size_t a = 0; a < re.size(); ++a)
        for (std::size_t b = a + 1; b < re.size(); ++b) {
            double d = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double dj = im ? std::hypot(re[a][j] - re[b][j], (*im)[a][j] - (*im)[b][j]) : std::abs(re[a][j] - re[b][j]);
                d = std::max(d, dj);
            }
            if (d < delta - 1e-12) throw InvalidModel("vectors are not delta-separated");
        }
}

// Largest margin eps with every sign pattern on J met at distance >= eps from t.
double margin(const std::vector<std::vector<double>>& E, double t, const std::vector<int>& J) {
    std::map<std::uint64_t, double> best;
    for (const auto& v : E) {
        std::uint64_t code = 0;
        double m = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (int j : J) {
            double x = v[static_cast<std::size_t>(j)];
            if (x == t) {
                ok = false;
                break;
            }
            code = code * 2 + (x > t ? 1 : 0);
            m = std::min(m, std::abs(x - t));
        }
        if (!ok) continue;
        auto [it, inserted] = best.emplace(code, m);
        if (!inserted) it->second = std::max(it->second, m);
    }
    if (best.size() != (std::uint64_t{1} << J.size())) return 0.0;
    double eps = std::numeric_limits<double>::infinity();
    for (const auto& [c, m] : best) eps = std::min(eps, m);
    return eps;
}

SeparatedResult search_real(const std::vector<std::vector<double>>& E) {
    SeparatedResult best;
    if (E.empty()) return best;
    const int n = static_cast<int>(E.front().size());
    if (n < 1) return best;
    if (n > 24) throw InvalidModel("separated_to_shattered needs dimension <= 24");
    for (int g = -kGrid; g <= kGrid; ++g) {
        const double t = static_cast<double>(g) / kGrid;
        std::vector<std::vector<int>> rows;
        rows.reserve(E.size());
        for (const auto& v : E) {
            std::vector<int> r(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) {
                double x = v[static_cast<std::size_t>(j)];
                r[static_cast<std::size_t>(j)] = x < t ? 1 : (x > t ? 2 : 0);
            }
            rows.push_back(std::move(r));
        }
        auto J = largest_shattered_subset(PatternSet::from_rows(n, 2, rows));
        if (J.empty()) continue;
        const double eps = margin(E, t, J);
        const bool better = !best.found || J.size() > best.J.size() || (J.size() == best.J.size() && eps > best.epsilon);
        if (better) {
            best.found = true;
            best.t = t;
            best.epsilon = eps;
            best.J = J;
        }
    }
    return best;
}

}  // namespace

SeparatedResult separated_to_shattered(const std::vector<std::vector<double>>& E, double delta) {
    check_separated(E, nullptr, delta);
    return search_real(E);
}

SeparatedResult separated_to_shattered(const std::vector<std::vector<std::complex<double>>>& E, double delta) {
    std::vector<std::vector<double>> re, im;
    for (const auto& v : E) {
        std::vector<double> r, i;
        for (const auto& z : v) {
            r.push_back(z.real());
            i.push_back(z.imag());
        }
        re.push_back(std::move(r));
        im.push_back(std::move(i));
    }
    check_separated(re, &im, delta);
    auto a = search_real(re);
    auto b = search_real(im);
    b.side = "imaginary";
    if (b.found && (!a.found || b.J.size() > a.J.size() || (b.J.size() == a.J.size() && b.epsilon > a.epsilon))) return b;
    return a;
}

bool separated_result_valid(const std::vector<std::vector<double>>& E, const SeparatedResult& r) {
    if (!r.found) return true;
    if (r.J.empty() || !(r.epsilon > 0.0) || r.t < -1.0 || r.t > 1.0) return false;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << r.J.size()); ++s) {
        bool realized = false;
        for (const auto& v : E) {
            bool ok = true;
            for (std::size_t i = 0; i < r.J.size() && ok; ++i) {
                const double x = v[static_cast<std::size_t>(r.J[i])];
                const bool above = (s >> (r.J.size() - 1 - i)) & 1;
                ok = above ? x >= r.t + r.epsilon - 1e-12 : x <= r.t - r.epsilon + 1e-12;
            }
            if (ok) {
                realized = true;
                break;
            }
        }
        if (!realized) return false;
    }
    return true;
}

}  // namespace combind
