#include "combind/independence.hpp"

#include <algorithm>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "combind/errors.hpp"

namespace combind {

namespace {

constexpr double kMassTol = 1e-12;

void append_int(std::string& key, int v) {
    char buf[sizeof(int)];
    std::memcpy(buf, &v, sizeof(int));
    key.append(buf, sizeof(int));
}

int min_anchor(const std::vector<Requirement>& reqs) {
    bool any = false;
    int lo = 0;
    for (const auto& r : reqs)
        for (const auto& c : r.any_of) {
            if (c.word.empty()) continue;
            lo = any ? std::min(lo, c.anchor) : c.anchor;
            any = true;
        }
    return lo;
}

std::string requirement_key(const std::vector<Requirement>& reqs, int base) {
    std::string key;
    for (const auto& r : reqs) {
        key.push_back(r.negate ? 'n' : 'p');
        append_int(key, static_cast<int>(r.any_of.size()));
        for (const auto& c : r.any_of) {
            append_int(key, c.word.empty() ? 0 : c.anchor - base);
            append_int(key, static_cast<int>(c.word.size()));
            key.append(reinterpret_cast<const char*>(c.word.data()), c.word.size());
        }
    }
    return key;
}

// Odometer over {1..arity}^n in lexicographic order; false after the last.
bool next_sigma(std::vector<int>& sigma, int arity) {
    for (std::size_t i = sigma.size(); i-- > 0;) {
        if (sigma[i] < arity) {
            ++sigma[i];
            return true;
        }
        sigma[i] = 1;
    }
    return false;
}

std::pair<int, int> tuple_span(const SetTuple& A) {
    bool any = false;
    int lo = 0, hi = 1;
    for (const auto& comp : A.components) {
        for (const auto& c : comp.cylinders) {
            if (c.word.empty()) continue;
            lo = any ? std::min(lo, c.anchor) : c.anchor;
            hi = any ? std::max(hi, c.end()) : c.end();
            any = true;
        }
    }
    return {lo, hi};
}

}  // namespace

ConstraintModel ConstraintModel::fixed(BorelLikeSet removed, std::string description) {
    ConstraintModel d;
    d.kind = Kind::Fixed;
    d.removed = std::move(removed);
    d.description = std::move(description);
    return d;
}

ConstraintModel ConstraintModel::per_element(std::map<int, BorelLikeSet> removed_at, std::string description) {
    ConstraintModel d;
    d.kind = Kind::PerElement;
    d.removed_at = std::move(removed_at);
    d.description = std::move(description);
    return d;
}

std::vector<Requirement> sigma_requirements(const SetTuple& A, const std::vector<int>& J, const std::vector<int>& sigma,
                                            const ConstraintModel& D) {
    std::vector<Requirement> reqs;
    for (std::size_t i = 0; i < J.size(); ++i)
        reqs.push_back(Requirement::in(A.components[static_cast<std::size_t>(sigma[i] - 1)], J[i]));
    if (J.empty()) return reqs;
    if (D.kind == ConstraintModel::Kind::Fixed && !D.removed.cylinders.empty()) {
        reqs.push_back(Requirement::avoid(D.removed));
    } else if (D.kind == ConstraintModel::Kind::PerElement) {
        for (int s : J) {
            auto it = D.removed_at.find(s);
            if (it != D.removed_at.end() && !it->second.cylinders.empty()) reqs.push_back(Requirement::avoid(it->second));
        }
    }
    return reqs;
}

// ---------------------------------------------------------------- solver

IndependenceSolver::IndependenceSolver(const SubshiftSpec& spec, SolverOptions options)
    : spec_(spec), k_(spec.alphabet.size), options_(options) {
    if (spec.is_generator())
        throw UnsupportedSpec("generator specs need orbit-sample mode (supply a reference segment)");
    engine_.emplace(spec);
}

IndependenceSolver::IndependenceSolver(const SubshiftSpec& spec, Segment sample, SolverOptions options)
    : spec_(spec), k_(spec.alphabet.size), sample_(std::move(sample)), options_(options) {
    if (sample_->symbols.empty()) throw InvalidModel("orbit-sample mode needs a nonempty segment");
}

std::optional<Witness> IndependenceSolver::solve_uncached(const std::vector<Requirement>& reqs) const {
    if (engine_) {
        auto seg = engine_->solve(reqs);
        if (!seg) return std::nullopt;
        return Witness{std::move(*seg), std::nullopt};
    }
    // x = shift^t(y): x[i] = y[i + t]
    for (const auto& r : reqs)
        if (!r.negate && r.any_of.empty()) return std::nullopt;
    int lo = 0, hi = 0;
    bool any = false;
    for (const auto& r : reqs)
        for (const auto& c : r.any_of) {
            if (c.word.empty()) continue;
            lo = any ? std::min(lo, c.anchor) : c.anchor;
            hi = any ? std::max(hi, c.end()) : c.end();
            any = true;
        }
    const Segment& y = *sample_;
    for (long long t = static_cast<long long>(y.start) - lo; t + hi <= y.end(); ++t) {
        bool ok = true;
        for (const auto& r : reqs) {
            bool hit = false;
            for (const auto& c : r.any_of)
                if (matches(c.shifted(static_cast<int>(t)), y)) {
                    hit = true;
                    break;
                }
            if (hit == r.negate) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        Segment seg{lo, Word(static_cast<std::size_t>(hi - lo))};
        for (int i = lo; i < hi; ++i) seg.symbols[static_cast<std::size_t>(i - lo)] = y.at(static_cast<int>(i + t));
        return Witness{std::move(seg), t};
    }
    return std::nullopt;
}

std::optional<Witness> IndependenceSolver::find_witness(const std::vector<Requirement>& reqs) {
    // Language mode is translation invariant, so memo keys are taken relative
    // to the leftmost anchor; orbit mode keys are absolute.
    const int base = orbit_mode() ? 0 : min_anchor(reqs);
    std::string key = requirement_key(reqs, base);
    auto it = memo_.find(key);
    if (it == memo_.end()) {
        std::vector<Requirement> local = reqs;
        for (auto& r : local)
            for (auto& c : r.any_of) c.anchor -= base;
        it = memo_.emplace(std::move(key), solve_uncached(local)).first;
    }
    if (!it->second) return std::nullopt;
    Witness w = *it->second;
    w.segment.start += base;
    return w;
}

IndependenceResult IndependenceSolver::check(const SetTuple& A, const Window& J, const ConstraintModel& D) {
    if (A.arity() < 1) throw InvalidModel("a set tuple needs at least one component");
    const auto& elems = J.elements;
    const std::uint64_t arity = static_cast<std::uint64_t>(A.arity());
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < elems.size() && total <= options_.sigma_cap; ++i) total *= arity;
    if (total > options_.sigma_cap)
        throw BudgetExceeded("arity^|J| exceeds the sigma enumeration cap of " + std::to_string(options_.sigma_cap));

    IndependenceResult res;
    IndependenceCertificate cert;
    cert.J = elems;
    std::vector<int> sigma(elems.size(), 1);
    do {
        ++res.checks;
        if (budget_ != nullptr) {
            if (*budget_ == 0) throw BudgetExceeded("search budget exhausted");
            --*budget_;
        }
        auto w = find_witness(sigma_requirements(A, elems, sigma, D));
        if (!w) {
            res.independent = false;
            res.failing_sigma = sigma;
            return res;
        }
        cert.witnesses.emplace_back(sigma, std::move(*w));
    } while (next_sigma(sigma, A.arity()));
    res.independent = true;
    res.certificate = std::move(cert);
    return res;
}

MaxSubsetResult IndependenceSolver::max_subset(const SetTuple& A, const Window& F, const ConstraintModel& D) {
    MaxSubsetResult res;
    std::uint64_t budget = options_.search_budget;
    budget_ = &budget;
    struct Reset {
        std::uint64_t** p;
        ~Reset() { *p = nullptr; }
    } reset{&budget_};

    auto empty = check(A, Window{}, D);
    res.checks += empty.checks;
    res.certificate = *empty.certificate;

    std::vector<int> cand;
    bool stop = false;
    try {
        for (int e : F.elements) {
            auto r = check(A, Window({e}), D);
            res.checks += r.checks;
            if (r.independent) {
                cand.push_back(e);
                if (res.J.empty()) {
                    res.J = {e};
                    res.certificate = std::move(*r.certificate);
                }
            }
        }
    } catch (const BudgetExceeded&) {
        res.lower_bound = true;
        stop = true;
    }

    std::vector<int> cur;
    // Include-first DFS in increasing order visits subsets lexicographically;
    // only strict improvements replace the incumbent.
    auto dfs = [&](auto&& self, std::size_t start) -> void {
        for (std::size_t i = start; i < cand.size() && !stop; ++i) {
            if (cur.size() + (cand.size() - i) <= res.J.size()) return;
            cur.push_back(cand[i]);
            try {
                auto r = check(A, Window(cur), D);
                res.checks += r.checks;
                if (r.independent) {
                    if (cur.size() > res.J.size()) {
                        res.J = cur;
                        res.certificate = std::move(*r.certificate);
                    }
                    self(self, i + 1);
                }
            } catch (const BudgetExceeded&) {
                res.lower_bound = true;
                if (budget == 0) stop = true;
            }
            cur.pop_back();
        }
    };
    if (!stop && cand.size() > 1) dfs(dfs, 0);
    return res;
}

bool IndependenceSolver::revalidate(const IndependenceCertificate& cert, const SetTuple& A,
                                    const ConstraintModel& D) const {
    if (A.arity() < 1) return false;
    std::uint64_t expected = 1;
    for (std::size_t i = 0; i < cert.J.size(); ++i) {
        expected *= static_cast<std::uint64_t>(A.arity());
        if (expected > (std::uint64_t{1} << 40)) return false;
    }
    if (cert.witnesses.size() != expected) return false;
    std::vector<int> sigma(cert.J.size(), 1);
    std::size_t idx = 0;
    do {
        const auto& [s, w] = cert.witnesses[idx++];
        if (s != sigma) return false;
        for (const auto& r : sigma_requirements(A, cert.J, sigma, D)) {
            for (const auto& c : r.any_of)
                if (!c.word.empty() && !w.segment.covers(c.anchor, c.end())) return false;
            if (!satisfies(r, w.segment)) return false;
        }
        if (engine_) {
            if (!w.segment.symbols.empty() && !engine_->language().contains(w.segment.symbols)) return false;
        } else {
            if (!w.shift) return false;
            for (int i = w.segment.start; i < w.segment.end(); ++i) {
                const long long j = i + *w.shift;
                if (j < sample_->start || j >= sample_->end()) return false;
                if (sample_->at(static_cast<int>(j)) != w.segment.at(i)) return false;
            }
        }
    } while (next_sigma(sigma, A.arity()));
    return true;
}

std::vector<Word> IndependenceSolver::atoms(int r) const {
    if (r < 1) throw InvalidModel("atom depth must be >= 1");
    if (engine_) return engine_->language().words(r);
    const std::uint64_t n = ipow(static_cast<std::uint64_t>(k_), r);
    if (n > (std::uint64_t{1} << 22)) throw DepthCapExceeded("too many atoms");
    std::vector<Word> out;
    for (std::uint64_t c = 0; c < n; ++c) out.push_back(word_from_code(c, r, k_));
    return out;
}

IndependenceResult is_independence_set(const SubshiftSpec& spec, const SetTuple& A, const Window& J,
                                       const ConstraintModel& D, SolverOptions options) {
    IndependenceSolver solver(spec, options);
    return solver.check(A, J, D);
}

MaxSubsetResult max_independence_subset(const SubshiftSpec& spec, const SetTuple& A, const Window& F,
                                        const ConstraintModel& D, SolverOptions options) {
    IndependenceSolver solver(spec, options);
    return solver.max_subset(A, F, D);
}

// ---------------------------------------------------------------- families

std::string ConstraintFamily::describe() const {
    std::ostringstream os;
    os << (kind == Kind::ExactAtoms ? "exact-atoms" : "greedy-adversary") << "(r=" << depth;
    if (kind == Kind::GreedyAdversary) os << ", passes=" << passes;
    os << ")" << (per_element ? " per-element" : " fixed");
    return os.str();
}

namespace {

// Everything needed to build and measure removal sets for one window.
struct FamilyContext {
    std::vector<Word> atoms;
    std::vector<double> mass;
    int r = 1;
    int region_lo = 0;  // first coordinate a tuple member can touch
    int region_hi = 0;  // one past the last
    std::vector<int> anchors;
    std::vector<int> offsets;  // per-element anchors relative to s
    // Stationary removal: support of the measure on the widened region and,
    // per support word, the atoms it contains somewhere in the anchor range.
    bool stationary_ok = false;
    std::vector<double> support_mass;
    std::vector<std::vector<int>> support_atoms;
    std::string note;

    double single_mass(const std::vector<int>& R) const {
        double s = 0.0;
        for (int i : R) s += mass[static_cast<std::size_t>(i)];
        return s;
    }

    double stationary_mass(const std::vector<int>& R) const {
        if (std::all_of(R.begin(), R.end(), [&](int i) { return mass[static_cast<std::size_t>(i)] == 0.0; })) return 0.0;
        double s = 0.0;
        for (std::size_t w = 0; w < support_mass.size(); ++w) {
            const auto& present = support_atoms[w];
            bool hit = std::any_of(R.begin(), R.end(),
                                   [&](int i) { return std::binary_search(present.begin(), present.end(), i); });
            if (hit) s += support_mass[w];
        }
        return s;
    }

    BorelLikeSet removal_at(const std::vector<int>& R, int anchor) const {
        BorelLikeSet b;
        for (int i : R) b.cylinders.push_back({anchor, atoms[static_cast<std::size_t>(i)]});
        return b;
    }

    BorelLikeSet removal_everywhere(const std::vector<int>& R) const {
        BorelLikeSet b;
        for (int a : anchors)
            for (int i : R) b.cylinders.push_back({a, atoms[static_cast<std::size_t>(i)]});
        return b;
    }
};

constexpr int kStationaryMaxCoords = 22;

FamilyContext make_context(IndependenceSolver& solver, const SetTuple& A, const Window& F, const MeasureModel& m,
                           int r) {
    if (F.empty()) throw InvalidModel("density windows must be nonempty");
    FamilyContext ctx;
    ctx.r = r;
    ctx.atoms = solver.atoms(r);
    for (const auto& w : ctx.atoms) ctx.mass.push_back(cylinder_measure(m, Cylinder{0, w}));
    auto [lo, hi] = tuple_span(A);
    ctx.region_lo = F.elements.front() + lo;
    ctx.region_hi = F.elements.back() + hi;
    for (int a = ctx.region_lo - r + 1; a <= ctx.region_hi - 1; ++a) ctx.anchors.push_back(a);
    for (int o = lo - r + 1; o <= hi - 1; ++o) ctx.offsets.push_back(o);

    const int clo = ctx.region_lo - r + 1;
    const int chi = ctx.region_hi + r - 1;
    if (chi - clo > kStationaryMaxCoords) {
        ctx.note = "stationary removals skipped (region too wide)";
        return ctx;
    }
    std::vector<int> coords(static_cast<std::size_t>(chi - clo));
    std::iota(coords.begin(), coords.end(), clo);
    try {
        auto sup = support(m, coords);
        std::unordered_map<std::uint64_t, int> atom_index;
        for (std::size_t i = 0; i < ctx.atoms.size(); ++i)
            atom_index.emplace(word_code(ctx.atoms[i], solver.alphabet_size()), static_cast<int>(i));
        for (const auto& ww : sup) {
            std::vector<int> present;
            for (int a : ctx.anchors) {
                auto sub = std::span<const Symbol>(ww.symbols.data() + (a - clo), static_cast<std::size_t>(r));
                auto it = atom_index.find(word_code(sub, solver.alphabet_size()));
                if (it != atom_index.end()) present.push_back(it->second);
            }
            std::sort(present.begin(), present.end());
            present.erase(std::unique(present.begin(), present.end()), present.end());
            ctx.support_mass.push_back(ww.mass);
            ctx.support_atoms.push_back(std::move(present));
        }
        ctx.stationary_ok = true;
    } catch (const WordTooLong&) {
        ctx.note = "stationary removals skipped (empirical measure too shallow)";
    } catch (const DepthCapExceeded&) {
        ctx.note = "stationary removals skipped (support too large)";
    }
    return ctx;
}

// Inclusion-maximal subsets R of atom indices with measure(R) <= delta, for a
// measure that is monotone under inclusion.
template <class Measure>
std::vector<std::vector<int>> maximal_removals(std::size_t n_atoms, double delta, Measure&& measure) {
    std::vector<std::vector<int>> feasible;
    std::vector<int> cur;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == n_atoms) {
            feasible.push_back(cur);
            return;
        }
        cur.push_back(static_cast<int>(i));
        if (measure(cur) <= delta + kMassTol) self(self, i + 1);
        cur.pop_back();
        self(self, i + 1);
    };
    rec(rec, 0);
    std::vector<std::vector<int>> out;
    for (const auto& R : feasible) {
        if (R.empty() && feasible.size() > 1) continue;
        bool maximal = true;
        for (std::size_t i = 0; i < n_atoms && maximal; ++i) {
            if (std::binary_search(R.begin(), R.end(), static_cast<int>(i))) continue;
            auto bigger = R;
            bigger.insert(std::upper_bound(bigger.begin(), bigger.end(), static_cast<int>(i)), static_cast<int>(i));
            if (measure(bigger) <= delta + kMassTol) maximal = false;
        }
        if (maximal) out.push_back(R);
    }
    return out;
}

std::string atoms_label(const FamilyContext& ctx, const std::vector<int>& R) {
    std::string s = "{";
    for (std::size_t i = 0; i < R.size(); ++i) {
        if (i) s += ",";
        const auto& w = ctx.atoms[static_cast<std::size_t>(R[i])];
        bool small = std::all_of(w.begin(), w.end(), [](Symbol x) { return x < 10; });
        if (small) s += word_to_string(w);
        else s += "#" + std::to_string(R[i]);
    }
    return s + "}";
}

bool exact_possible(const FamilyContext& ctx, const ConstraintFamily& family) {
    if (family.kind != ConstraintFamily::Kind::ExactAtoms) return false;
    if (ctx.atoms.size() >= 63) return false;
    return (std::uint64_t{1} << ctx.atoms.size()) <= family.exact_limit;
}

std::vector<ConstraintModel> fixed_members(const FamilyContext& ctx, double delta) {
    std::vector<ConstraintModel> out;
    out.push_back(ConstraintModel::everything());
    auto single = maximal_removals(ctx.atoms.size(), delta, [&](const std::vector<int>& R) { return ctx.single_mass(R); });
    for (const auto& R : single) {
        if (R.empty()) continue;
        for (int a : ctx.anchors)
            out.push_back(ConstraintModel::fixed(ctx.removal_at(R, a),
                                                 "remove " + atoms_label(ctx, R) + " at " + std::to_string(a)));
    }
    if (ctx.stationary_ok) {
        auto stat = maximal_removals(ctx.atoms.size(), delta,
                                     [&](const std::vector<int>& R) { return ctx.stationary_mass(R); });
        for (const auto& R : stat) {
            if (R.empty()) continue;
            out.push_back(ConstraintModel::fixed(ctx.removal_everywhere(R),
                                                 "remove " + atoms_label(ctx, R) + " at every anchor"));
        }
    }
    return out;
}

std::vector<ConstraintModel> per_element_members(const FamilyContext& ctx, const Window& F, double delta) {
    std::vector<ConstraintModel> out;
    auto single = maximal_removals(ctx.atoms.size(), delta, [&](const std::vector<int>& R) { return ctx.single_mass(R); });
    for (const auto& R : single) {
        if (R.empty()) continue;
        for (int o : ctx.offsets) {
            std::map<int, BorelLikeSet> at;
            for (int s : F.elements) at[s] = ctx.removal_at(R, s + o);
            out.push_back(ConstraintModel::per_element(
                std::move(at), "remove " + atoms_label(ctx, R) + " at s" + (o >= 0 ? "+" : "") + std::to_string(o)));
        }
    }
    return out;
}

struct Outcome {
    int phi = std::numeric_limits<int>::max();
    std::string minimizer;
    std::vector<int> J;
    std::size_t members = 0;
    bool lower_bound = false;
};

void consider(IndependenceSolver& solver, const SetTuple& A, const Window& F, const ConstraintModel& D, Outcome& out,
              MaxSubsetResult* keep = nullptr) {
    auto res = solver.max_subset(A, F, D);
    ++out.members;
    out.lower_bound = out.lower_bound || res.lower_bound;
    if (static_cast<int>(res.J.size()) < out.phi) {
        out.phi = static_cast<int>(res.J.size());
        out.minimizer = D.description;
        out.J = res.J;
    }
    if (keep) *keep = std::move(res);
}

// Which witnesses of a certificate meet atom i under a removal mode.
using HitCounter = std::function<int(const MaxSubsetResult&, int)>;

// Greedy adversary for one removal mode: repeatedly add the admissible atom hit
// by the most witnesses of the current optimal certificate.
void greedy_mode(IndependenceSolver& solver, const SetTuple& A, const Window& F, const FamilyContext& ctx,
                 double delta, int passes, const std::function<double(const std::vector<int>&)>& measure,
                 const std::function<ConstraintModel(const std::vector<int>&)>& build, const HitCounter& hits,
                 Outcome& out) {
    std::vector<int> R;
    for (int pass = 0; pass < passes; ++pass) {
        MaxSubsetResult cur;
        consider(solver, A, F, build(R), out, &cur);
        int best = -1, best_score = 0;
        for (int i = 0; i < static_cast<int>(ctx.atoms.size()); ++i) {
            if (std::binary_search(R.begin(), R.end(), i)) continue;
            auto bigger = R;
            bigger.insert(std::upper_bound(bigger.begin(), bigger.end(), i), i);
            if (measure(bigger) > delta + kMassTol) continue;
            int score = hits(cur, i);
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        if (best < 0) return;
        R.insert(std::upper_bound(R.begin(), R.end(), best), best);
    }
    consider(solver, A, F, build(R), out);
}

int count_hits(const MaxSubsetResult& res, const std::vector<Cylinder>& cyls) {
    int n = 0;
    for (const auto& [sigma, w] : res.certificate.witnesses)
        for (const auto& c : cyls)
            if (matches(c, w.segment)) {
                ++n;
                break;
            }
    return n;
}

Outcome greedy_family(IndependenceSolver& solver, const SetTuple& A, const Window& F, const FamilyContext& ctx,
                      double delta, const ConstraintFamily& family, bool per_element) {
    Outcome out;
    consider(solver, A, F, ConstraintModel::everything(), out);
    auto single = [&](const std::vector<int>& R) { return ctx.single_mass(R); };
    for (int a : ctx.anchors) {
        greedy_mode(
            solver, A, F, ctx, delta, family.passes, single,
            [&](const std::vector<int>& R) {
                if (R.empty()) return ConstraintModel::everything();
                return ConstraintModel::fixed(ctx.removal_at(R, a), "remove " + atoms_label(ctx, R) + " at " + std::to_string(a));
            },
            [&](const MaxSubsetResult& res, int i) {
                return count_hits(res, {Cylinder{a, ctx.atoms[static_cast<std::size_t>(i)]}});
            },
            out);
    }
    if (ctx.stationary_ok) {
        greedy_mode(
            solver, A, F, ctx, delta, family.passes, [&](const std::vector<int>& R) { return ctx.stationary_mass(R); },
            [&](const std::vector<int>& R) {
                if (R.empty()) return ConstraintModel::everything();
                return ConstraintModel::fixed(ctx.removal_everywhere(R), "remove " + atoms_label(ctx, R) + " at every anchor");
            },
            [&](const MaxSubsetResult& res, int i) {
                std::vector<Cylinder> cyls;
                for (int a : ctx.anchors) cyls.push_back({a, ctx.atoms[static_cast<std::size_t>(i)]});
                return count_hits(res, cyls);
            },
            out);
    }
    if (per_element) {
        for (int o : ctx.offsets) {
            greedy_mode(
                solver, A, F, ctx, delta, family.passes, single,
                [&](const std::vector<int>& R) {
                    if (R.empty()) return ConstraintModel::everything();
                    std::map<int, BorelLikeSet> at;
                    for (int s : F.elements) at[s] = ctx.removal_at(R, s + o);
                    return ConstraintModel::per_element(std::move(at), "remove " + atoms_label(ctx, R) + " at s" +
                                                                           (o >= 0 ? "+" : "") + std::to_string(o));
                },
                [&](const MaxSubsetResult& res, int i) {
                    std::vector<Cylinder> cyls;
                    for (int s : res.J) cyls.push_back({s + o, ctx.atoms[static_cast<std::size_t>(i)]});
                    return count_hits(res, cyls);
                },
                out);
        }
    }
    return out;
}

}  // namespace

std::vector<ConstraintModel> enumerate_family(IndependenceSolver& solver, const SetTuple& A, const Window& F,
                                              double delta, const MeasureModel& m, const ConstraintFamily& family,
                                              bool per_element) {
    auto ctx = make_context(solver, A, F, m, family.depth);
    if (!exact_possible(ctx, family)) throw BudgetExceeded("family too large for exact enumeration");
    auto out = fixed_members(ctx, delta);
    if (per_element) {
        auto more = per_element_members(ctx, F, delta);
        out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    return out;
}

DensityReport phi_density(IndependenceSolver& solver, const SetTuple& A, const Window& F, double delta,
                          const MeasureModel& m, const ConstraintFamily& family) {
    if (!(delta >= 0.0) || delta >= 1.0) throw InvalidModel("delta must lie in [0, 1)");
    if (m.alphabet_size() != solver.alphabet_size()) throw InvalidModel("measure and spec alphabets differ");
    auto ctx = make_context(solver, A, F, m, family.depth);

    DensityReport rep;
    rep.window = F;
    rep.delta = delta;
    rep.mode = solver.orbit_mode() ? "orbit-sample" : "language";

    Outcome fixed, overall;
    if (exact_possible(ctx, family)) {
        for (const auto& D : fixed_members(ctx, delta)) consider(solver, A, F, D, fixed);
        overall = fixed;
        if (family.per_element)
            for (const auto& D : per_element_members(ctx, F, delta)) consider(solver, A, F, D, overall);
        rep.family = family.describe();
    } else {
        rep.greedy = true;
        ConstraintFamily g = family;
        g.kind = ConstraintFamily::Kind::GreedyAdversary;
        fixed = greedy_family(solver, A, F, ctx, delta, g, false);
        overall = family.per_element ? greedy_family(solver, A, F, ctx, delta, g, true) : fixed;
        if (overall.phi > fixed.phi) overall = fixed;
        rep.family = g.describe();
        if (family.kind == ConstraintFamily::Kind::ExactAtoms) rep.family += " (exact family too large)";
    }
    if (!ctx.note.empty()) rep.family += "; " + ctx.note;

    rep.phi_hat = overall.phi;
    rep.phi_hat_fixed = fixed.phi;
    rep.density = static_cast<double>(rep.phi_hat) / static_cast<double>(F.size());
    rep.minimizer = overall.minimizer;
    rep.minimizer_J = overall.J;
    rep.family_size = overall.members;
    rep.lower_bound = overall.lower_bound || fixed.lower_bound;
    if (rep.phi_hat > rep.phi_hat_fixed) throw std::logic_error("per-element family must not exceed the fixed family");
    return rep;
}

namespace {

DensityCurve curve_over(IndependenceSolver& solver, const SetTuple& A, double delta, const MeasureModel& m,
                        const std::vector<Window>& sets, const ConstraintFamily& family) {
    if (sets.empty()) throw InvalidModel("need at least one window");
    DensityCurve c;
    c.max_density = 0.0;
    c.min_density = 1.0;
    for (const auto& F : sets) {
        c.reports.push_back(phi_density(solver, A, F, delta, m, family));
        c.max_density = std::max(c.max_density, c.reports.back().density);
        c.min_density = std::min(c.min_density, c.reports.back().density);
    }
    return c;
}

}  // namespace

DensityCurve upper_density_estimate(IndependenceSolver& solver, const SetTuple& A, double delta, const MeasureModel& m,
                                    const std::vector<Window>& windows, const ConstraintFamily& family) {
    return curve_over(solver, A, delta, m, windows, family);
}

DensityCurve sequential_density_estimate(IndependenceSolver& solver, const SetTuple& A, double delta,
                                         const MeasureModel& m, const std::vector<Window>& index_sets,
                                         const ConstraintFamily& family) {
    for (std::size_t i = 1; i < index_sets.size(); ++i)
        if (index_sets[i].size() <= index_sets[i - 1].size())
            throw InvalidModel("index sets must have strictly increasing cardinality");
    return curve_over(solver, A, delta, m, index_sets, family);
}

IeVerdict detect_ie_pair(IndependenceSolver& solver, const MeasureModel& m, const Word& germ1, const Word& germ2,
                         int depth, double delta, const std::vector<Window>& windows, double threshold,
                         const ConstraintFamily& family) {
    if (depth < 0) throw InvalidModel("depth must be >= 0");
    const std::size_t len = static_cast<std::size_t>(2 * depth + 1);
    if (germ1.size() != len || germ2.size() != len) throw InvalidModel("germs must be central (2r+1)-words");
    if (germ1 == germ2) throw NonDisjointNeighbourhoods("the germs agree, so no neighbourhoods are disjoint");

    IeVerdict v;
    v.threshold = threshold;
    for (int d = 0; d <= depth; ++d) {
        Word u1(germ1.begin() + (depth - d), germ1.begin() + (depth + d + 1));
        Word u2(germ2.begin() + (depth - d), germ2.begin() + (depth + d + 1));
        if (u1 == u2) continue;
        SetTuple A{{BorelLikeSet::single({-d, u1}), BorelLikeSet::single({-d, u2})}};
        v.evidence.emplace_back(d, upper_density_estimate(solver, A, delta, m, windows, family));
    }
    const auto& last = v.evidence.back().second;
    v.final_density = last.reports.back().density;
    v.positive = v.final_density >= threshold;
    return v;
}

}  // namespace combind
