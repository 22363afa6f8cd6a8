#include "combind/l1.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "combind/errors.hpp"
#include "combind/lp.hpp"

namespace combind {

void FunctionFamily::validate() const {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidModel("sample weights must be finite and nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidModel("sample weights must sum to 1");
    if (keys.size() != values.size()) throw InvalidModel("one key per function");
    for (const auto& v : values) {
        if (v.size() != weights.size()) throw InvalidModel("function length differs from the sample space");
        for (double x : v)
            if (!std::isfinite(x)) throw InvalidModel("function values must be finite");
    }
}

double FunctionFamily::sup_norm(std::size_t i) const {
    double s = 0.0;
    for (std::size_t p = 0; p < weights.size(); ++p)
        if (weights[p] > 0.0) s = std::max(s, std::abs(values[i][p]));
    return s;
}

FunctionFamily FunctionFamily::subfamily(const std::vector<std::size_t>& idx) const {
    FunctionFamily out;
    out.weights = weights;
    for (auto i : idx) {
        out.keys.push_back(keys[i]);
        out.values.push_back(values[i]);
    }
    return out;
}

double l1_evaluate(const FunctionFamily& fam, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t p = 0; p < fam.weights.size(); ++p) {
        if (fam.weights[p] <= 0.0) continue;
        double v = 0.0;
        for (std::size_t i = 0; i < fam.size(); ++i) v += c[i] * fam.values[i][p];
        s = std::max(s, std::abs(v));
    }
    return s;
}

namespace {

// Distinct value vectors over points of positive weight, up to sign.
std::vector<std::vector<double>> point_rows(const FunctionFamily& fam) {
    std::vector<std::vector<double>> rows;
    for (std::size_t p = 0; p < fam.weights.size(); ++p) {
        if (fam.weights[p] <= 0.0) continue;
        std::vector<double> r(fam.size());
        for (std::size_t i = 0; i < fam.size(); ++i) r[i] = fam.values[i][p];
        auto first = std::find_if(r.begin(), r.end(), [](double x) { return x != 0.0; });
        if (first == r.end()) continue;
        if (*first < 0.0)
            for (double& x : r) x = -x;
        rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
}

struct FacetBound {
    double lb = 0.0;  // LP value on the active points
    double ub = 0.0;  // exact max at the returned coefficients
    std::vector<double> c;  // signed, l1-normalized
};

// min t s.t. |sum_s eps_s a_s g_s(p)| <= t, sum a = 1, a >= 0, by constraint
// generation over the points. Stops once lb >= stop_lb or ub < stop_ub.
FacetBound facet_min(const std::vector<std::vector<double>>& rows, const std::vector<int>& eps,
                     std::vector<std::size_t>& active, double stop_lb, double stop_ub, std::uint64_t& lps) {
    const std::size_t m = eps.size();
    FacetBound fb;
    std::vector<double> a(m, 1.0 / static_cast<double>(m));
    std::vector<double> vals(rows.size());
    std::vector<char> in(rows.size(), 0);
    for (auto p : active) in[p] = 1;
    double t = 0.0;
    bool solved = false;
    while (true) {
        if (solved || !active.empty()) {
            LinearProgram lp;
            lp.c.assign(m + 1, 0.0);
            lp.c[m] = 1.0;
            for (auto p : active) {
                std::vector<double> up(m + 1), down(m + 1);
                for (std::size_t s = 0; s < m; ++s) {
                    up[s] = eps[s] * rows[p][s];
                    down[s] = -up[s];
                }
                up[m] = down[m] = -1.0;
                lp.A_ub.push_back(std::move(up));
                lp.A_ub.push_back(std::move(down));
                lp.b_ub.push_back(0.0);
                lp.b_ub.push_back(0.0);
            }
            std::vector<double> ones(m + 1, 1.0);
            ones[m] = 0.0;
            lp.A_eq.push_back(std::move(ones));
            lp.b_eq.push_back(1.0);
            auto sol = solve_lp(lp);
            ++lps;
            if (sol.status != LpSolution::Status::Optimal) throw std::logic_error("facet LP did not solve");
            double sum = 0.0;
            for (std::size_t s = 0; s < m; ++s) sum += (a[s] = std::max(0.0, sol.x[s]));
            for (double& x : a) x /= sum;
            t = sol.x[m];
        }
        solved = true;
        double ub = 0.0;
        for (std::size_t p = 0; p < rows.size(); ++p) {
            double v = 0.0;
            for (std::size_t s = 0; s < m; ++s) v += eps[s] * a[s] * rows[p][s];
            vals[p] = std::abs(v);
            ub = std::max(ub, vals[p]);
        }
        fb.lb = t;
        fb.ub = ub;
        if (ub <= t + 1e-12 || t >= stop_lb || ub < stop_ub) break;
        // add the most violated points
        std::vector<std::size_t> viol;
        for (std::size_t p = 0; p < rows.size(); ++p)
            if (!in[p] && vals[p] > t + 1e-12) viol.push_back(p);
        if (viol.empty()) break;
        const std::size_t take = std::min<std::size_t>(viol.size(), 4);
        std::partial_sort(viol.begin(), viol.begin() + static_cast<std::ptrdiff_t>(take), viol.end(),
                          [&](auto x, auto y) { return vals[x] > vals[y] || (vals[x] == vals[y] && x < y); });
        for (std::size_t i = 0; i < take; ++i) {
            in[viol[i]] = 1;
            active.push_back(viol[i]);
        }
    }
    fb.c.resize(m);
    for (std::size_t s = 0; s < m; ++s) fb.c[s] = eps[s] * a[s];
    return fb;
}

// Exact c_star; with stop_below > 0 only decides c_star >= stop_below, and
// the reported value is then an upper estimate once it is below.
L1Report l1_search(const FunctionFamily& fam, std::uint64_t lp_budget, double stop_below) {
    if (fam.size() == 0) throw Degenerate("empty function family");
    const std::size_t m = fam.size();
    const auto rows = point_rows(fam);
    L1Report rep;

    Eigen::MatrixXd G(static_cast<Eigen::Index>(std::max<std::size_t>(rows.size(), 1)), static_cast<Eigen::Index>(m));
    G.setZero();
    for (std::size_t p = 0; p < rows.size(); ++p)
        for (std::size_t s = 0; s < m; ++s) G(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(s)) = rows[p][s];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    lu.setThreshold(1e-10);
    if (rows.empty() || lu.rank() < static_cast<Eigen::Index>(m)) {
        Eigen::VectorXd v;
        if (rows.empty()) {
            v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
            v(0) = 1.0;
        } else {
            v = lu.kernel().col(0);
        }
        v /= v.lpNorm<1>();
        rep.optimizer.assign(v.data(), v.data() + v.size());
        rep.c_star = l1_evaluate(fam, rep.optimizer);
        rep.rank_deficient = true;
        rep.lambda = rep.c_star > 0.0 ? 1.0 / rep.c_star : std::numeric_limits<double>::infinity();
        return rep;
    }
    if (m > 63 || (std::uint64_t{1} << (m - 1)) > lp_budget)
        throw BudgetExceeded("l1 constant needs more facet LPs than the budget allows");
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> eps(m, 1);
    std::vector<std::size_t> active;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << (m - 1)); ++code) {
        for (std::size_t s = 1; s < m; ++s) eps[s] = (code >> (s - 1) & 1u) ? -1 : 1;
        // no facet can improve on `best`, and in decision mode clearing the
        // threshold is enough
        const double stop_lb = stop_below > 0.0 ? std::min(best, stop_below) : best;
        if (active.size() > 4 * m) active.erase(active.begin(), active.end() - static_cast<std::ptrdiff_t>(2 * m));
        auto fb = facet_min(rows, eps, active, stop_lb, stop_below, rep.lps);
        if (rep.lps > lp_budget) throw BudgetExceeded("l1 constant exceeded its LP budget");
        const double v = l1_evaluate(fam, fb.c);
        if (v < best) {
            best = v;
            rep.optimizer = fb.c;
        }
        if (best < stop_below) break;
    }
    rep.c_star = best;
    rep.lambda = best > 0.0 ? 1.0 / best : std::numeric_limits<double>::infinity();
    return rep;
}

}  // namespace

L1Report l1_constant(const FunctionFamily& fam, std::uint64_t lp_budget) {
    fam.validate();
    return l1_search(fam, lp_budget, -1.0);
}

RosenthalDorBound rosenthal_dor_bound(const IndependenceCertificate& cert, const FunctionFamily& fam, Interval B1,
                                      Interval B2) {
    fam.validate();
    if (B1.lo > B1.hi || B2.lo > B2.hi) throw InvalidModel("intervals need lo <= hi");
    const double d = std::max({0.0, B2.lo - B1.hi, B1.lo - B2.hi});
    if (!(d > B1.diam() + B2.diam())) throw InvalidModel("intervals are too close: need d > diam(B1) + diam(B2)");
    std::vector<std::size_t> idx;
    for (int s : cert.J) {
        auto it = std::find(fam.keys.begin(), fam.keys.end(), s);
        if (it == fam.keys.end()) throw CertificateInvalid("certificate element has no function");
        idx.push_back(static_cast<std::size_t>(it - fam.keys.begin()));
    }
    // every sigma must be realized at some point of positive weight
    const std::size_t n = idx.size();
    if (n > 24) throw BudgetExceeded("too many sign patterns to revalidate");
    std::vector<char> seen(std::size_t{1} << n, 0);
    std::size_t hit = 0;
    for (std::size_t p = 0; p < fam.weights.size(); ++p) {
        if (fam.weights[p] <= 0.0) continue;
        std::size_t code = 0;
        bool ok = true;
        for (std::size_t j = 0; j < n && ok; ++j) {
            const double v = fam.values[idx[j]][p];
            if (v >= B1.lo && v <= B1.hi) continue;
            if (v >= B2.lo && v <= B2.hi) code |= std::size_t{1} << j;
            else ok = false;
        }
        if (ok && !seen[code]) {
            seen[code] = 1;
            ++hit;
        }
    }
    if (hit != seen.size()) throw CertificateInvalid("some sigma is not realized by the family");
    RosenthalDorBound r;
    r.distance = d;
    r.bound = (d - B1.diam() - B2.diam()) / 2.0;
    r.bound_tenth = r.bound / 10.0;
    r.J = cert.J;
    return r;
}

FunctionFamily certificate_family(const IndependenceCertificate& cert, Interval B1, Interval B2, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FunctionFamily fam;
    const std::size_t P = cert.witnesses.size();
    if (P == 0) throw CertificateInvalid("certificate has no witnesses");
    fam.weights.assign(P, 1.0 / static_cast<double>(P));
    double total = std::accumulate(fam.weights.begin(), fam.weights.end(), 0.0);
    fam.weights.back() += 1.0 - total;
    fam.keys = cert.J;
    fam.values.assign(cert.J.size(), std::vector<double>(P, 0.0));
    for (std::size_t p = 0; p < P; ++p) {
        const auto& sigma = cert.witnesses[p].first;
        if (sigma.size() != cert.J.size()) throw CertificateInvalid("sigma length differs from J");
        for (std::size_t j = 0; j < cert.J.size(); ++j) {
            const Interval& B = sigma[j] == 1 ? B1 : B2;
            fam.values[j][p] = B.lo + u(rng) * B.diam();
        }
    }
    return fam;
}

double GermFunction::operator()(std::span<const Symbol> w) const {
    return table[static_cast<std::size_t>(word_code(w.first(static_cast<std::size_t>(depth)), alphabet))];
}

GermFunction GermFunction::symbol_indicator(int alphabet, Symbol s) {
    GermFunction f;
    f.alphabet = alphabet;
    f.depth = 1;
    f.table.assign(static_cast<std::size_t>(alphabet), 0.0);
    f.table[s] = 1.0;
    return f;
}

GermFunction GermFunction::constant(int alphabet, double v) {
    GermFunction f;
    f.alphabet = alphabet;
    f.depth = 1;
    f.table.assign(static_cast<std::size_t>(alphabet), v);
    return f;
}

namespace {

void check_germ(const GermFunction& f, const MeasureModel& m) {
    if (f.depth < 1) throw InvalidModel("germ depth must be >= 1");
    if (f.alphabet != m.alphabet_size()) throw InvalidModel("germ and measure alphabets differ");
    if (f.table.size() != ipow(static_cast<std::uint64_t>(f.alphabet), f.depth))
        throw InvalidModel("germ table needs alphabet^depth entries");
}

std::vector<int> range_coords(int lo, int hi) {
    std::vector<int> c(static_cast<std::size_t>(hi - lo));
    std::iota(c.begin(), c.end(), lo);
    return c;
}

double germ_mean(const GermFunction& f, const MeasureModel& m) {
    double mean = 0.0;
    for (const auto& ww : support(m, range_coords(0, f.depth))) mean += ww.mass * f(ww.symbols);
    return mean;
}

}  // namespace

FunctionFamily shift_family(const GermFunction& f, const MeasureModel& m, const Window& F) {
    check_germ(f, m);
    if (F.empty()) throw InvalidModel("window must be nonempty");
    const int lo = F.elements.front(), hi = F.elements.back() + f.depth;
    const double mean = germ_mean(f, m);
    FunctionFamily fam;
    const auto pts = support(m, range_coords(lo, hi));
    for (const auto& ww : pts) fam.weights.push_back(ww.mass);
    const double total = std::accumulate(fam.weights.begin(), fam.weights.end(), 0.0);
    for (double& w : fam.weights) w /= total;
    for (int s : F.elements) {
        fam.keys.push_back(s);
        std::vector<double> v;
        for (const auto& ww : pts)
            v.push_back(f(std::span<const Symbol>(ww.symbols).subspan(static_cast<std::size_t>(s - lo))) - mean);
        fam.values.push_back(std::move(v));
    }
    return fam;
}

L1IsoResult l1_isomorphism_set(const FunctionFamily& fam_in, double lambda, const std::vector<std::size_t>& removed,
                               std::uint64_t lp_budget) {
    if (!(lambda >= 1.0)) throw InvalidModel("lambda must be >= 1");
    fam_in.validate();
    FunctionFamily fam = fam_in;
    for (auto p : removed) {
        if (p >= fam.weights.size()) throw InvalidModel("removed point out of range");
        for (auto& v : fam.values) v[p] = 0.0;
    }
    const double need = 1.0 / lambda - 1e-9;
    const std::size_t n = fam.size();
    L1IsoResult res;
    res.c_star = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> cur, best;
    double best_c = res.c_star;
    auto passes = [&](const std::vector<std::size_t>& idx, double& c) {
        const auto sub = fam.subfamily(idx);
        if (res.lps >= lp_budget) throw BudgetExceeded("l1 isomorphism search exceeded its LP budget");
        auto rep = l1_search(sub, lp_budget - res.lps, need);
        res.lps += rep.lps + 1;
        c = rep.c_star;
        return rep.c_star >= need;
    };
    try {
        auto dfs = [&](auto&& self, std::size_t start) -> void {
            for (std::size_t i = start; i < n; ++i) {
                if (cur.size() + (n - i) <= best.size()) return;
                cur.push_back(i);
                double c = 0.0;
                if (passes(cur, c)) {
                    if (cur.size() > best.size()) {
                        best = cur;
                        best_c = c;
                    }
                    self(self, i + 1);
                }
                cur.pop_back();
            }
        };
        dfs(dfs, 0);
    } catch (const BudgetExceeded&) {
        res.lower_bound = true;
    }
    for (auto i : best) res.I.push_back(fam.keys[i]);
    res.c_star = best_c;
    if (!best.empty()) {
        auto rep = l1_search(fam.subfamily(best), std::numeric_limits<std::uint64_t>::max(), -1.0);
        res.lps += rep.lps;
        res.c_star = rep.c_star;
    }
    return res;
}

L1IsoResult l1_isomorphism_set(const GermFunction& f, const MeasureModel& m, const Window& F, double lambda,
                               std::uint64_t lp_budget) {
    return l1_isomorphism_set(shift_family(f, m, F), lambda, {}, lp_budget);
}

double PerturbStats::fraction_at_least(double d) const {
    if (densities.empty()) return 0.0;
    const auto c = std::count_if(densities.begin(), densities.end(), [&](double x) { return x >= d - 1e-12; });
    return static_cast<double>(c) / static_cast<double>(densities.size());
}

PerturbStats perturb_and_test(const GermFunction& f, const MeasureModel& m, const Window& F, double delta,
                              double lambda, int trials, std::uint64_t seed) {
    check_germ(f, m);
    if (!(delta >= 0.0)) throw InvalidModel("delta must be >= 0");
    if (trials < 1) throw InvalidModel("need at least one trial");
    if (F.empty()) throw InvalidModel("window must be nonempty");
    const int r = f.depth + 1;
    const int lo = F.elements.front(), hi = F.elements.back() + r;
    const int k = f.alphabet;
    const double mean = germ_mean(f, m);
    const auto pts = support(m, range_coords(lo, hi));
    FunctionFamily base;
    for (const auto& ww : pts) base.weights.push_back(ww.mass);
    const double total = std::accumulate(base.weights.begin(), base.weights.end(), 0.0);
    for (double& w : base.weights) w /= total;
    for (int s : F.elements) {
        base.keys.push_back(s);
        std::vector<double> v;
        for (const auto& ww : pts)
            v.push_back(f(std::span<const Symbol>(ww.symbols).subspan(static_cast<std::size_t>(s - lo))) - mean);
        base.values.push_back(std::move(v));
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t table_size = ipow(static_cast<std::uint64_t>(k), r);
    PerturbStats st;
    for (int t = 0; t < trials; ++t) {
        FunctionFamily fam = base;
        if (delta > 0.0) {
            for (std::size_t i = 0; i < F.elements.size(); ++i) {
                std::vector<double> table(table_size);
                for (double& x : table) x = u(rng);
                const auto off = static_cast<std::size_t>(F.elements[i] - lo);
                std::vector<double> eta(pts.size());
                double norm2 = 0.0;
                for (std::size_t p = 0; p < pts.size(); ++p) {
                    auto w = std::span<const Symbol>(pts[p].symbols).subspan(off, static_cast<std::size_t>(r));
                    eta[p] = table[static_cast<std::size_t>(word_code(w, k))];
                    norm2 += fam.weights[p] * eta[p] * eta[p];
                }
                const double scale = norm2 > 0.0 ? 0.999 * delta / std::sqrt(norm2) : 0.0;
                for (std::size_t p = 0; p < pts.size(); ++p) fam.values[i][p] += scale * eta[p];
            }
        }
        auto res = l1_isomorphism_set(fam, lambda);
        if (res.lower_bound) ++st.budget_flags;
        st.densities.push_back(static_cast<double>(res.I.size()) / static_cast<double>(F.size()));
    }
    st.mean = std::accumulate(st.densities.begin(), st.densities.end(), 0.0) / trials;
    st.min = *std::min_element(st.densities.begin(), st.densities.end());
    st.max = *std::max_element(st.densities.begin(), st.densities.end());
    return st;
}

}  // namespace combind
