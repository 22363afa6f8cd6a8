#include "combind/entropy.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "combind/errors.hpp"

namespace combind {

namespace {

struct Piece {
    const Partition* P;
    int shift;
};

void check_alphabet(const Partition& P, const MeasureModel& m) {
    if (P.alphabet != m.alphabet_size()) throw InvalidModel("partition and measure alphabets differ");
}

std::vector<int> piece_coords(const std::vector<Piece>& pieces) {
    std::set<int> c;
    for (const auto& p : pieces)
        for (int j = 0; j < p.P->depth; ++j) c.insert(p.P->anchor + p.shift + j);
    return {c.begin(), c.end()};
}

AtomMasses atoms_of(const std::vector<Piece>& pieces, const MeasureModel& m) {
    for (const auto& p : pieces) check_alphabet(*p.P, m);
    const auto coords = piece_coords(pieces);
    std::unordered_map<int, std::size_t> index;
    for (std::size_t i = 0; i < coords.size(); ++i) index[coords[i]] = i;
    std::vector<std::vector<std::size_t>> where(pieces.size());
    for (std::size_t p = 0; p < pieces.size(); ++p)
        for (int j = 0; j < pieces[p].P->depth; ++j)
            where[p].push_back(index.at(pieces[p].P->anchor + pieces[p].shift + j));

    AtomMasses atoms;
    std::vector<int> key(pieces.size());
    Word sub;
    for (const auto& ww : support(m, coords)) {
        for (std::size_t p = 0; p < pieces.size(); ++p) {
            sub.clear();
            for (auto i : where[p]) sub.push_back(ww.symbols[i]);
            key[p] = pieces[p].P->label_of(sub);
            if (key[p] < 0) throw InvalidModel("measure charges a word the partition does not label");
        }
        atoms[key] += ww.mass;
        if (atoms.size() > kAtomCap) throw DepthCapExceeded("joined partition has too many atoms");
    }
    return atoms;
}

std::vector<Piece> shifted_pieces(const Partition& P, std::span<const int> shifts) {
    std::vector<Piece> out;
    for (int s : shifts) out.push_back({&P, s});
    return out;
}

std::vector<int> window_shifts(int n) {
    std::vector<int> s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), 0);
    return s;
}

// Atoms of U^F on the coordinates touched by the shifted members, with, for
// each atom and each f in F, the bitmask of members containing it.
struct CoverAtoms {
    std::vector<double> mass;
    std::vector<std::vector<std::uint64_t>> masks;  // [atom][f]
};

CoverAtoms cover_atoms(const Cover& U, const Window& F, const MeasureModel& m) {
    if (U.members.empty()) throw InvalidModel("cover has no members");
    if (U.members.size() > 64) throw InvalidModel("covers are limited to 64 members");
    if (F.empty()) throw InvalidModel("window must be nonempty");
    std::set<int> cs;
    for (int f : F.elements)
        for (const auto& mem : U.members)
            for (const auto& c : mem.cylinders)
                for (int j = c.anchor; j < c.end(); ++j) cs.insert(j + f);
    std::vector<int> coords(cs.begin(), cs.end());
    std::unordered_map<int, std::size_t> index;
    for (std::size_t i = 0; i < coords.size(); ++i) index[coords[i]] = i;

    CoverAtoms out;
    for (const auto& ww : support(m, coords)) {
        std::vector<std::uint64_t> per_f;
        for (int f : F.elements) {
            std::uint64_t mask = 0;
            for (std::size_t u = 0; u < U.members.size(); ++u) {
                for (const auto& c : U.members[u].cylinders) {
                    bool ok = true;
                    for (std::size_t j = 0; j < c.word.size() && ok; ++j)
                        ok = ww.symbols[index.at(c.anchor + f + static_cast<int>(j))] == c.word[j];
                    if (ok) {
                        mask |= std::uint64_t{1} << u;
                        break;
                    }
                }
            }
            if (mask == 0) throw InvalidModel("cover misses a positive-measure atom");
            per_f.push_back(mask);
        }
        out.mass.push_back(ww.mass);
        out.masks.push_back(std::move(per_f));
    }
    return out;
}

bool tuple_covers(const std::vector<int>& t, const std::vector<std::uint64_t>& masks) {
    for (std::size_t f = 0; f < t.size(); ++f)
        if (!(masks[f] >> t[f] & 1u)) return false;
    return true;
}

using Bits = std::vector<std::uint64_t>;

}  // namespace

void Cover::validate(const SubshiftSpec& spec) const {
    if (members.empty()) throw InvalidModel("cover has no members");
    int lo = 0, hi = 0;
    bool any = false;
    for (const auto& mem : members) {
        auto [a, b] = mem.span();
        if (a == b) continue;
        lo = any ? std::min(lo, a) : a;
        hi = any ? std::max(hi, b) : b;
        any = true;
    }
    if (!any) {
        for (const auto& mem : members)
            if (!mem.is_empty_syntactically()) return;
        throw InvalidModel("cover members are all empty");
    }
    for (const auto& w : Language(spec).words(hi - lo)) {
        Segment seg{lo, w};
        bool hit = false;
        for (const auto& mem : members) {
            for (const auto& c : mem.cylinders)
                if (matches(c, seg)) {
                    hit = true;
                    break;
                }
            if (hit) break;
        }
        if (!hit) throw InvalidModel("cover misses the word " + word_to_string(w));
    }
}

Cover Cover::from_partition(const Partition& P) {
    Cover U;
    U.members.resize(static_cast<std::size_t>(P.num_labels));
    const std::uint64_t n = ipow(static_cast<std::uint64_t>(P.alphabet), P.depth);
    for (std::uint64_t c = 0; c < n; ++c) {
        const int l = P.labels[static_cast<std::size_t>(c)];
        if (l < 0) continue;
        U.members[static_cast<std::size_t>(l)].cylinders.push_back({P.anchor, word_from_code(c, P.depth, P.alphabet)});
    }
    std::erase_if(U.members, [](const BorelLikeSet& b) { return b.cylinders.empty(); });
    return U;
}

AtomMasses joined_atoms(const Partition& P, const MeasureModel& m, std::span<const int> shifts) {
    return atoms_of(shifted_pieces(P, shifts), m);
}

double entropy_of_masses(const AtomMasses& atoms) {
    long double h = 0.0L;
    for (const auto& [key, mu] : atoms)
        if (mu > 0.0) h -= static_cast<long double>(mu) * std::log(static_cast<long double>(mu));
    return std::max(0.0, static_cast<double>(h));
}

double shannon_entropy(const Partition& P, const MeasureModel& m) {
    const int zero = 0;
    return entropy_of_masses(joined_atoms(P, m, std::span<const int>(&zero, 1)));
}

Partition join_over_window(const SubshiftSpec& spec, const Partition& P, const Window& F) {
    if (F.empty()) throw InvalidModel("window must be nonempty");
    const int lo = F.elements.front() + P.anchor;
    const int len = F.elements.back() - F.elements.front() + P.depth;
    if (ipow(static_cast<std::uint64_t>(P.alphabet), len) > (std::uint64_t{1} << 22))
        throw DepthCapExceeded("joined partition depth too large");
    Partition out;
    out.alphabet = P.alphabet;
    out.anchor = lo;
    out.depth = len;
    out.labels.assign(static_cast<std::size_t>(ipow(static_cast<std::uint64_t>(P.alphabet), len)), -1);
    std::map<std::vector<int>, int> ids;
    std::vector<int> key(F.elements.size());
    for (const auto& w : Language(spec).words(len)) {
        bool ok = true;
        for (std::size_t i = 0; i < F.elements.size() && ok; ++i) {
            const auto off = static_cast<std::size_t>(F.elements[i] - F.elements.front());
            key[i] = P.label_of(std::span<const Symbol>(w).subspan(off, static_cast<std::size_t>(P.depth)));
            ok = key[i] >= 0;
        }
        if (!ok) continue;
        auto [it, fresh] = ids.emplace(key, static_cast<int>(ids.size()));
        if (fresh && ids.size() > kAtomCap) throw DepthCapExceeded("joined partition has too many atoms");
        out.labels[static_cast<std::size_t>(word_code(w, P.alphabet))] = it->second;
    }
    out.num_labels = std::max<int>(1, static_cast<int>(ids.size()));
    return out;
}

std::vector<double> dynamical_entropy_curve(const Partition& P, const MeasureModel& m,
                                            const std::vector<Window>& windows) {
    std::vector<double> out;
    for (const auto& F : windows) {
        if (F.empty()) throw InvalidModel("window must be nonempty");
        out.push_back(entropy_of_masses(joined_atoms(P, m, F.elements)) / F.size());
    }
    return out;
}

double conditional_entropy(const Partition& P, const Partition& Q, const MeasureModel& m) {
    const double hpq = entropy_of_masses(atoms_of({{&P, 0}, {&Q, 0}}, m));
    const double hq = entropy_of_masses(atoms_of({{&Q, 0}}, m));
    return std::max(0.0, hpq - hq);
}

std::vector<double> sequence_entropy_curve(const Partition& P, const MeasureModel& m, const std::vector<int>& s,
                                           int n_max) {
    if (n_max < 1 || static_cast<int>(s.size()) < n_max) throw InvalidModel("sequence shorter than n_max");
    std::vector<double> out;
    for (int n = 1; n <= n_max; ++n) {
        std::vector<int> shifts(s.begin(), s.begin() + n);
        out.push_back(entropy_of_masses(joined_atoms(P, m, shifts)) / n);
    }
    return out;
}

CoverNumberResult cover_number_N(const Cover& U, const Window& F, double delta, const MeasureModel& m,
                                 std::uint64_t node_budget) {
    if (!(delta >= 0.0 && delta < 1.0)) throw InvalidModel("delta must lie in [0, 1)");
    const auto A = cover_atoms(U, F, m);
    const std::size_t na = A.mass.size();
    const std::size_t words = (na + 63) / 64;
    const int nf = F.size();
    const int nu = static_cast<int>(U.members.size());

    // candidate members of U^F: every tuple covering at least one atom
    std::map<Bits, std::vector<int>> candidates;
    std::vector<int> t(static_cast<std::size_t>(nf), 0);
    std::uint64_t total = 1;
    for (int f = 0; f < nf; ++f) {
        total *= static_cast<std::uint64_t>(nu);
        if (total > (std::uint64_t{1} << 22)) throw BudgetExceeded("U^F has too many members to enumerate");
    }
    for (std::uint64_t c = 0; c < total; ++c) {
        std::uint64_t r = c;
        for (int f = nf - 1; f >= 0; --f) {
            t[static_cast<std::size_t>(f)] = static_cast<int>(r % static_cast<std::uint64_t>(nu));
            r /= static_cast<std::uint64_t>(nu);
        }
        Bits b(words, 0);
        bool any = false;
        for (std::size_t a = 0; a < na; ++a)
            if (tuple_covers(t, A.masks[a])) {
                b[a / 64] |= std::uint64_t{1} << (a % 64);
                any = true;
            }
        if (any) candidates.emplace(std::move(b), t);
    }
    // drop sets contained in another
    std::vector<std::pair<Bits, std::vector<int>>> sets(candidates.begin(), candidates.end());
    std::vector<char> dominated(sets.size(), 0);
    if (sets.size() <= 4096) {
        for (std::size_t i = 0; i < sets.size(); ++i)
            for (std::size_t j = 0; j < sets.size() && !dominated[i]; ++j) {
                if (i == j || dominated[j]) continue;
                bool sub = true;
                for (std::size_t w = 0; w < words && sub; ++w) sub = (sets[i].first[w] & ~sets[j].first[w]) == 0;
                if (sub) dominated[i] = 1;
            }
    }
    std::vector<std::pair<Bits, std::vector<int>>> kept;
    for (std::size_t i = 0; i < sets.size(); ++i)
        if (!dominated[i]) kept.push_back(std::move(sets[i]));

    const double total_mass = std::accumulate(A.mass.begin(), A.mass.end(), 0.0);
    const double target = total_mass - delta - 1e-12;
    auto gain = [&](const Bits& b, const Bits& covered) {
        double g = 0.0;
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t bits = b[w] & ~covered[w];
            while (bits) {
                g += A.mass[w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits))];
                bits &= bits - 1;
            }
        }
        return g;
    };

    CoverNumberResult res;
    if (target <= 0.0) {
        res.removed_mass = total_mass;
        return res;
    }
    // greedy upper bound
    std::vector<std::size_t> best;
    {
        Bits covered(words, 0);
        double mass = 0.0;
        while (mass < target) {
            std::size_t arg = 0;
            double g = -1.0;
            for (std::size_t i = 0; i < kept.size(); ++i) {
                const double gi = gain(kept[i].first, covered);
                if (gi > g + 1e-15) {
                    g = gi;
                    arg = i;
                }
            }
            best.push_back(arg);
            mass += g;
            for (std::size_t w = 0; w < words; ++w) covered[w] |= kept[arg].first[w];
        }
    }
    // exact: the least q for which q sets reach the target
    std::uint64_t nodes = 0;
    std::vector<std::size_t> chosen;
    for (std::size_t q = 1; q < best.size(); ++q) {
        bool found = false;
        auto dfs = [&](auto&& self, std::size_t start, const Bits& covered, double mass) -> void {
            if (found) return;
            if (mass >= target) {
                found = true;
                best = chosen;
                return;
            }
            if (chosen.size() == q) return;
            if (++nodes > node_budget) throw BudgetExceeded("cover number search exceeded its node budget");
            std::vector<double> gains;
            for (std::size_t i = start; i < kept.size(); ++i) gains.push_back(gain(kept[i].first, covered));
            std::vector<double> sorted = gains;
            std::sort(sorted.rbegin(), sorted.rend());
            double bound = mass;
            for (std::size_t i = 0; i < q - chosen.size() && i < sorted.size(); ++i) bound += sorted[i];
            if (bound < target) return;
            for (std::size_t i = start; i < kept.size() && !found; ++i) {
                if (gains[i - start] <= 0.0) continue;
                Bits next = covered;
                for (std::size_t w = 0; w < words; ++w) next[w] |= kept[i].first[w];
                chosen.push_back(i);
                self(self, i + 1, next, mass + gains[i - start]);
                chosen.pop_back();
            }
        };
        dfs(dfs, 0, Bits(words, 0), 0.0);
        if (found) break;
    }
    res.value = static_cast<int>(best.size());
    Bits covered(words, 0);
    for (auto i : best) {
        res.members.push_back(kept[i].second);
        for (std::size_t w = 0; w < words; ++w) covered[w] |= kept[i].first[w];
    }
    res.removed_mass = std::max(0.0, total_mass - gain(covered, Bits(words, 0)));
    return res;
}

std::vector<HMinusPoint> h_minus_proxy(const Cover& U, const MeasureModel& m, const std::vector<Window>& windows,
                                       std::uint64_t exact_limit) {
    std::vector<HMinusPoint> out;
    for (const auto& F : windows) {
        const auto A = cover_atoms(U, F, m);
        const std::size_t na = A.mass.size();
        const int nf = F.size();
        // choices per atom: the tuples of members containing it
        std::vector<std::vector<std::vector<int>>> choices(na);
        long double count = 1.0L;
        for (std::size_t a = 0; a < na; ++a) {
            long double c = 1.0L;
            for (int f = 0; f < nf; ++f) c *= __builtin_popcountll(A.masks[a][static_cast<std::size_t>(f)]);
            count *= c;
        }
        HMinusPoint pt;
        pt.window_size = nf;
        if (count <= static_cast<long double>(exact_limit)) {
            for (std::size_t a = 0; a < na; ++a) {
                std::vector<std::vector<int>> acc{{}};
                for (int f = 0; f < nf; ++f) {
                    std::vector<std::vector<int>> next;
                    for (const auto& pre : acc)
                        for (int u = 0; u < 64; ++u)
                            if (A.masks[a][static_cast<std::size_t>(f)] >> u & 1u) {
                                next.push_back(pre);
                                next.back().push_back(u);
                            }
                    acc = std::move(next);
                }
                choices[a] = std::move(acc);
            }
            AtomMasses groups;
            double best = std::numeric_limits<double>::infinity();
            auto dfs = [&](auto&& self, std::size_t a) -> void {
                if (a == na) {
                    best = std::min(best, entropy_of_masses(groups));
                    return;
                }
                for (const auto& t : choices[a]) {
                    groups[t] += A.mass[a];
                    self(self, a + 1);
                    auto it = groups.find(t);
                    it->second -= A.mass[a];
                    if (it->second <= 0.0) groups.erase(it);
                }
            };
            dfs(dfs, 0);
            pt.value = best / nf;
        } else {
            // heaviest atoms first; join the heaviest open group containing the
            // atom, else open a group choosing per f the member of largest mass
            std::vector<std::size_t> order(na);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return A.mass[x] > A.mass[y]; });
            std::vector<std::vector<double>> member_mass(static_cast<std::size_t>(nf),
                                                         std::vector<double>(U.members.size(), 0.0));
            for (std::size_t a = 0; a < na; ++a)
                for (int f = 0; f < nf; ++f)
                    for (std::size_t u = 0; u < U.members.size(); ++u)
                        if (A.masks[a][static_cast<std::size_t>(f)] >> u & 1u)
                            member_mass[static_cast<std::size_t>(f)][u] += A.mass[a];
            AtomMasses groups;
            for (auto a : order) {
                const std::vector<int>* pick = nullptr;
                double pick_mass = -1.0;
                for (const auto& [t, mu] : groups)
                    if (mu > pick_mass && tuple_covers(t, A.masks[a])) {
                        pick = &t;
                        pick_mass = mu;
                    }
                if (pick) {
                    groups[*pick] += A.mass[a];
                    continue;
                }
                std::vector<int> t;
                for (int f = 0; f < nf; ++f) {
                    int arg = -1;
                    for (std::size_t u = 0; u < U.members.size(); ++u)
                        if ((A.masks[a][static_cast<std::size_t>(f)] >> u & 1u) &&
                            (arg < 0 || member_mass[static_cast<std::size_t>(f)][u] >
                                            member_mass[static_cast<std::size_t>(f)][static_cast<std::size_t>(arg)]))
                            arg = static_cast<int>(u);
                    t.push_back(arg);
                }
                groups[t] += A.mass[a];
            }
            pt.value = entropy_of_masses(groups) / nf;
            pt.exact = false;
        }
        out.push_back(pt);
    }
    return out;
}

namespace {

CpaReport cpa_from_pieces(const std::vector<Piece>& pieces, const MeasureModel& m, int n, double delta) {
    if (n < 1) throw InvalidModel("window size must be >= 1");
    if (!(delta > 0.0)) throw InvalidModel("delta must be positive");
    const auto atoms = atoms_of(pieces, m);
    CpaReport r;
    r.n = n;
    r.delta = delta;
    r.entropy = entropy_of_masses(atoms);
    if (r.entropy > n * delta * delta + 1e-12)
        throw PremiseFailed("H(P^[0,n)) exceeds n delta^2", r.entropy / n);
    const double cut = std::exp(-n * delta);
    // small-atom remainder and, per (piece, label), the mass it carries there
    std::map<std::pair<std::size_t, int>, double> small_hits;
    for (const auto& [key, mu] : atoms) {
        if (mu >= cut) {
            ++r.large_atoms;
            continue;
        }
        r.remainder_mass += mu;
        for (std::size_t i = 0; i < key.size(); ++i) small_hits[{i, key[i]}] += mu;
    }
    r.rank = r.large_atoms + 1;
    double err2 = 0.0;
    if (r.remainder_mass > 0.0) {
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const int labels = pieces[i].P->num_labels;
            for (int l = 0; l < labels; ++l) {
                auto it = small_hits.find({i, l});
                const double g = it == small_hits.end() ? 0.0 : it->second;
                err2 = std::max(err2, g * (r.remainder_mass - g) / r.remainder_mass);
            }
        }
    }
    r.achieved_error = std::sqrt(std::max(0.0, err2));
    r.bound_ok = r.rank <= std::exp(n * delta) + 1.0 + 1e-9 &&
                 r.achieved_error <= std::sqrt(delta * delta + 4.0 * delta) + 1e-12;
    return r;
}

}  // namespace

CpaReport cpa_from_partition(const Partition& P, const MeasureModel& m, int n, double delta) {
    if (n < 1) throw InvalidModel("window size must be >= 1");
    return cpa_from_pieces(shifted_pieces(P, window_shifts(n)), m, n, delta);
}

std::vector<HcpaPoint> hcpa_upper_estimate(const std::vector<Partition>& family, const MeasureModel& m, double delta,
                                           const std::vector<int>& ns) {
    std::vector<HcpaPoint> out;
    for (int n : ns) {
        if (n < 1) throw InvalidModel("window size must be >= 1");
        std::vector<Piece> pieces;
        for (const auto& P : family)
            for (int s = 0; s < n; ++s) pieces.push_back({&P, s});
        HcpaPoint pt;
        pt.n = n;
        std::size_t atoms = 1;
        if (!pieces.empty()) atoms = atoms_of(pieces, m).size();
        pt.rank = static_cast<int>(atoms);
        if (!pieces.empty()) {
            try {
                auto r = cpa_from_pieces(pieces, m, n, delta);
                if (r.rank < pt.rank) {
                    pt.rank = r.rank;
                    pt.from_cpa = true;
                }
            } catch (const PremiseFailed&) {
            }
        }
        pt.value = std::log(static_cast<double>(pt.rank)) / n;
        out.push_back(pt);
    }
    return out;
}

double markov_entropy_rate(const MeasureModel& m) {
    if (const auto* b = std::get_if<Bernoulli>(&m.kind())) {
        double h = 0.0;
        for (double w : b->weights)
            if (w > 0.0) h -= w * std::log(w);
        return h;
    }
    if (const auto* mk = std::get_if<Markov>(&m.kind())) {
        long double h = 0.0L;
        for (std::size_t i = 0; i < mk->transition.size(); ++i)
            for (double p : mk->transition[i])
                if (p > 0.0) h -= static_cast<long double>(mk->stationary[i]) * p * std::log(static_cast<long double>(p));
        return static_cast<double>(h);
    }
    throw InvalidModel("entropy rate needs a Bernoulli or Markov model");
}

}  // namespace combind
