#include "combind/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "combind/errors.hpp"
#include "combind/examples.hpp"

namespace combind {

using io::Json;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_params() {
    static const std::map<std::string, std::set<std::string>> table{
        {"entropy",
         {"spec", "measure", "quantity", "partition", "partition2", "windows", "sequence", "n_max", "cover", "delta", "ns",
          "family", "exact_limit"}},
        {"independence",
         {"spec", "tuple", "mode", "window", "windows", "constraint", "measure", "delta", "family", "sample", "germ1",
          "germ2", "depth", "threshold"}},
        {"shatter", {"mode", "patterns", "random", "cover", "density", "vectors", "delta"}},
        {"l1",
         {"mode", "family", "germ", "measure", "window", "lambda", "removed", "delta", "trials", "spec", "tuple",
          "constraint", "B1", "B2"}},
        {"example", {"name", "length", "show", "coverage_d", "alphabet"}},
        {"verify", {"n", "k", "trials", "b", "lambda", "a_target", "size", "delta"}},
    };
    return table;
}

const std::set<std::string> kSuites{"sauer", "cover-bound", "density-lemma", "separated"};

// Reads parameters with defaults and records the resolved value of every key.
class Params {
public:
    explicit Params(const Json& in) : in_(in), resolved_(in) {}

    const Json& node(const std::string& key, Json fallback) {
        if (!in_.contains(key)) resolved_[key] = std::move(fallback);
        return resolved_[key];
    }

    template <class T>
    T value(const std::string& key, T fallback) {
        const Json& j = node(key, Json(fallback));
        try {
            return j.get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("bad value for \"" + key + "\": " + e.what());
        }
    }

    bool has(const std::string& key) const { return in_.contains(key); }
    const Json& resolved() const { return resolved_; }

private:
    const Json& in_;
    Json resolved_;
};

struct Context {
    const RunConfig& config;
    Params params;
    Json result = Json::object();
    std::ostringstream csv;
    int exit_code = kExitOk;

    void budget_hit() { exit_code = std::max(exit_code, static_cast<int>(kExitBudget)); }
    void failed() {
        if (exit_code == kExitOk) exit_code = kExitVerificationFailed;
    }
    SolverOptions solver_options() const {
        SolverOptions o;
        if (config.budget) o.sigma_cap = o.search_budget = *config.budget;
        return o;
    }
    std::uint64_t budget_or(std::uint64_t fallback) const { return config.budget.value_or(fallback); }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json default_measure(const SubshiftSpec& spec) {
    const int k = spec.alphabet.size;
    if (std::holds_alternative<FullShift>(spec.kind))
        return Json{{"kind", "bernoulli"}, {"weights", std::vector<double>(k, 1.0 / k)}};
    if (spec.is_generator()) return Json{{"kind", "empirical"}, {"length", 4096}, {"max_length", 8}};
    return Json{{"kind", "parry"}};
}

const Json kDefaultSpec{{"kind", "full"}, {"alphabet", 2}};

Json default_tuple(int k) {
    Json t = Json::array();
    for (int s = 0; s < std::min(k, 2); ++s) t.push_back(Json::array({Json{{"anchor", 0}, {"word", Json::array({s})}}}));
    return t;
}

SubshiftSpec read_spec(Context& c) { return io::parse_spec(c.params.node("spec", kDefaultSpec)); }

MeasureModel read_measure(Context& c, const SubshiftSpec& spec) {
    return io::parse_measure(c.params.node("measure", default_measure(spec)), spec);
}

// ---------------------------------------------------------------- entropy

void cmd_entropy(Context& c) {
    auto& p = c.params;
    const auto spec = read_spec(c);
    const auto m = read_measure(c, spec);
    const auto quantity = p.value<std::string>("quantity", "dynamical");
    auto& r = c.result;
    r["quantity"] = quantity;
    if (m.is_exact()) r["entropy_rate"] = markov_entropy_rate(m);

    auto partition = [&] { return io::parse_partition(p.node("partition", Json{{"kind", "symbol"}}), spec); };
    auto windows = [&] { return io::parse_windows(p.node("windows", Json{{"sizes", {1, 2, 4, 8}}})); };
    auto cover = [&] { return io::parse_cover(p.node("cover", Json{{"from_partition", {{"kind", "symbol"}}}}), spec); };

    if (quantity == "dynamical") {
        const auto P = partition();
        const auto ws = windows();
        const auto curve = dynamical_entropy_curve(P, m, ws);
        r["values"] = Json::array();
        c.csv << "window_size,value\n";
        for (std::size_t i = 0; i < ws.size(); ++i) {
            r["values"].push_back(Json{{"window", ws[i].elements}, {"value", curve[i]}});
            c.csv << ws[i].size() << ',' << fmt(curve[i]) << '\n';
        }
    } else if (quantity == "conditional") {
        const auto P = partition();
        const auto Q = io::parse_partition(p.node("partition2", Json{{"kind", "trivial"}}), spec);
        r["value"] = conditional_entropy(P, Q, m);
    } else if (quantity == "sequence") {
        const auto P = partition();
        const auto s = p.value<std::vector<int>>("sequence", {0, 1, 2, 3, 4, 5, 6, 7});
        const int n_max = p.value<int>("n_max", static_cast<int>(s.size()));
        const auto curve = sequence_entropy_curve(P, m, s, n_max);
        r["values"] = Json::array();
        c.csv << "n,value\n";
        for (std::size_t i = 0; i < curve.size(); ++i) {
            r["values"].push_back(Json{{"n", i + 1}, {"value", curve[i]}});
            c.csv << i + 1 << ',' << fmt(curve[i]) << '\n';
        }
    } else if (quantity == "cover_number") {
        const auto U = cover();
        const auto ws = windows();
        const double delta = p.value<double>("delta", 0.1);
        r["values"] = Json::array();
        c.csv << "window_size,value,removed_mass\n";
        for (const auto& F : ws) {
            const auto res = cover_number_N(U, F, delta, m, c.budget_or(std::uint64_t{1} << 24));
            r["values"].push_back(Json{{"window", F.elements},
                                       {"value", res.value},
                                       {"members", res.members},
                                       {"removed_mass", res.removed_mass}});
            c.csv << F.size() << ',' << res.value << ',' << fmt(res.removed_mass) << '\n';
        }
    } else if (quantity == "h_minus") {
        const auto U = cover();
        const auto ws = windows();
        const auto limit = p.value<std::uint64_t>("exact_limit", 1000000);
        const auto pts = h_minus_proxy(U, m, ws, limit);
        r["values"] = Json::array();
        c.csv << "window_size,value,exact\n";
        for (const auto& pt : pts) {
            r["values"].push_back(Json{{"window_size", pt.window_size}, {"value", pt.value}, {"exact", pt.exact}});
            c.csv << pt.window_size << ',' << fmt(pt.value) << ',' << (pt.exact ? 1 : 0) << '\n';
        }
    } else if (quantity == "cpa") {
        const auto P = partition();
        const double delta = p.value<double>("delta", 0.5);
        const auto ns = p.value<std::vector<int>>("ns", {2, 4});
        r["values"] = Json::array();
        c.csv << "n,premise,rank,achieved_error,bound_ok\n";
        for (int n : ns) {
            try {
                const auto rep = cpa_from_partition(P, m, n, delta);
                r["values"].push_back(Json{{"n", n},
                                           {"premise", "holds"},
                                           {"rank", rep.rank},
                                           {"rank_bound", std::exp(n * delta) + 1.0},
                                           {"achieved_error", rep.achieved_error},
                                           {"error_bound", std::sqrt(delta * delta + 4.0 * delta)},
                                           {"bound_ok", rep.bound_ok},
                                           {"entropy", rep.entropy},
                                           {"large_atoms", rep.large_atoms},
                                           {"remainder_mass", rep.remainder_mass}});
                c.csv << n << ",holds," << rep.rank << ',' << fmt(rep.achieved_error) << ',' << (rep.bound_ok ? 1 : 0)
                      << '\n';
                if (!rep.bound_ok) c.failed();
            } catch (const PremiseFailed& e) {
                r["values"].push_back(Json{{"n", n}, {"premise", "failed"}, {"actual_rate", e.actual_rate()}});
                c.csv << n << ",failed,,,\n";
            }
        }
    } else if (quantity == "hcpa") {
        std::vector<Partition> family;
        if (p.has("family")) {
            for (const auto& j : p.node("family", Json::array())) family.push_back(io::parse_partition(j, spec));
        } else {
            family.push_back(partition());
        }
        const double delta = p.value<double>("delta", 0.5);
        const auto ns = p.value<std::vector<int>>("ns", {1, 2, 4});
        const auto pts = hcpa_upper_estimate(family, m, delta, ns);
        r["values"] = Json::array();
        c.csv << "n,value,rank,from_cpa\n";
        for (const auto& pt : pts) {
            r["values"].push_back(Json{{"n", pt.n}, {"value", pt.value}, {"rank", pt.rank}, {"from_cpa", pt.from_cpa}});
            c.csv << pt.n << ',' << fmt(pt.value) << ',' << pt.rank << ',' << (pt.from_cpa ? 1 : 0) << '\n';
        }
        r["note"] = "upper estimate";
    } else {
        throw ConfigError("unknown entropy quantity \"" + quantity + "\"");
    }
}

// ---------------------------------------------------------------- independence

IndependenceSolver make_solver(Context& c, const SubshiftSpec& spec) {
    if (!spec.is_generator()) return IndependenceSolver(spec, c.solver_options());
    const auto w = io::parse_window(c.params.node("sample", Json{{"interval", {0, 512}}}));
    if (w.empty()) throw ConfigError("sample window is empty");
    const int a = w.elements.front(), b = w.elements.back() + 1;
    return IndependenceSolver(spec, generate_segment(spec, a, b, c.config.seed), c.solver_options());
}

void cmd_independence(Context& c) {
    auto& p = c.params;
    const auto spec = read_spec(c);
    const int k = spec.alphabet.size;
    const auto A = io::parse_tuple(p.node("tuple", default_tuple(k)), k);
    const auto mode = p.value<std::string>("mode", "max_subset");
    auto solver = make_solver(c, spec);
    auto& r = c.result;
    r["mode"] = mode;
    r["witness_mode"] = solver.orbit_mode() ? "orbit-sample" : "language";
    auto window = [&] { return io::parse_window(p.node("window", Json{{"interval", {0, 4}}})); };
    auto constraint = [&] { return io::parse_constraint(p.node("constraint", Json{{"kind", "everything"}}), k); };
    auto family = [&] { return io::parse_family(p.node("family", Json::object())); };

    if (mode == "check") {
        const auto J = window();
        const auto D = constraint();
        r["partial"] = true;  // replaced below unless the sigma budget runs out
        const auto res = solver.check(A, J, D);
        r["partial"] = false;
        r["independent"] = res.independent;
        r["checks"] = res.checks;
        if (res.certificate) r["certificate"] = io::certificate_json(*res.certificate);
        if (!res.independent) r["failing_sigma"] = res.failing_sigma;
    } else if (mode == "max_subset") {
        const auto F = window();
        const auto D = constraint();
        const auto res = solver.max_subset(A, F, D);
        r["J"] = res.J;
        r["size"] = res.J.size();
        r["lower_bound"] = res.lower_bound;
        r["partial"] = res.lower_bound;
        r["checks"] = res.checks;
        r["certificate"] = io::certificate_json(res.certificate);
        if (res.lower_bound) c.budget_hit();
    } else if (mode == "density" || mode == "upper_density") {
        const auto m = read_measure(c, spec);
        const double delta = p.value<double>("delta", 0.1);
        const auto fam = family();
        std::vector<DensityReport> reports;
        if (mode == "density") {
            reports.push_back(phi_density(solver, A, window(), delta, m, fam));
        } else {
            const auto ws = io::parse_windows(p.node("windows", Json{{"sizes", {1, 2, 3, 4}}}));
            auto curve = upper_density_estimate(solver, A, delta, m, ws, fam);
            r["max_density"] = curve.max_density;
            r["min_density"] = curve.min_density;
            reports = std::move(curve.reports);
        }
        r["reports"] = Json::array();
        c.csv << "window_size,phi_hat,density,lower_bound\n";
        bool partial = false;
        for (const auto& d : reports) {
            r["reports"].push_back(io::density_json(d));
            c.csv << d.window.size() << ',' << d.phi_hat << ',' << fmt(d.density) << ',' << (d.lower_bound ? 1 : 0) << '\n';
            partial = partial || d.lower_bound;
        }
        r["partial"] = partial;
        r["note"] = "upper bound over an explicit constraint family";
        if (partial) c.budget_hit();
    } else if (mode == "ie_pair") {
        const auto m = read_measure(c, spec);
        const auto g1 = io::parse_word(p.node("germ1", Json("0")), k);
        const auto g2 = io::parse_word(p.node("germ2", Json("1")), k);
        const int depth = p.value<int>("depth", 0);
        const double delta = p.value<double>("delta", 0.1);
        const double threshold = p.value<double>("threshold", 0.01);
        const auto ws = io::parse_windows(p.node("windows", Json{{"sizes", {1, 2, 3, 4}}}));
        const auto v = detect_ie_pair(solver, m, g1, g2, depth, delta, ws, threshold, family());
        r["positive"] = v.positive;
        r["final_density"] = v.final_density;
        r["threshold"] = v.threshold;
        r["note"] = v.note;
        r["evidence"] = Json::array();
        for (const auto& [d, curve] : v.evidence) {
            Json e{{"depth", d}, {"max_density", curve.max_density}, {"reports", Json::array()}};
            for (const auto& rep : curve.reports) e["reports"].push_back(io::density_json(rep));
            r["evidence"].push_back(std::move(e));
        }
    } else {
        throw ConfigError("unknown independence mode \"" + mode + "\"");
    }
}

// ---------------------------------------------------------------- shatter

PatternSet random_patterns(int n, int k, std::size_t size, std::uint64_t seed) {
    PatternSet S(n, k);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> sym(1, k);
    const double total = std::pow(static_cast<double>(k), n);
    size = std::min<std::size_t>(size, static_cast<std::size_t>(std::min(total, 1e9)));
    std::vector<std::uint8_t> row(static_cast<std::size_t>(n));
    while (S.size() < size) {
        for (auto& v : row) v = static_cast<std::uint8_t>(sym(rng));
        S.insert(row);
    }
    return S;
}

double cover_lower_bound(int k, std::size_t s) {
    return k < 2 ? 1.0 : std::pow(static_cast<double>(k) / (k - 1), static_cast<double>(s));
}

void cmd_shatter(Context& c) {
    auto& p = c.params;
    const auto mode = p.value<std::string>("mode", "patterns");
    auto& r = c.result;
    r["mode"] = mode;
    if (mode == "separated") {
        const auto E = p.value<std::vector<std::vector<double>>>("vectors", {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
        const double delta = p.value<double>("delta", 1.0);
        const auto res = separated_to_shattered(E, delta);
        r["found"] = res.found;
        r["t"] = res.t;
        r["epsilon"] = res.epsilon;
        r["J"] = res.J;
        r["side"] = res.side;
        r["valid"] = separated_result_valid(E, res);
        if (!r["valid"].get<bool>()) c.failed();
        return;
    }
    if (mode != "patterns") throw ConfigError("unknown shatter mode \"" + mode + "\"");
    const PatternSet S = p.has("patterns") ? io::parse_patterns(p.node("patterns", Json::object())) : [&] {
        const auto& j = p.node("random", Json{{"n", 4}, {"k", 2}, {"size", 8}});
        const int n = j.value("n", 4), k = j.value("k", 2);
        if (n < 1 || n > 24 || k < 1 || k > 254) throw ConfigError("random patterns need 1 <= n <= 24, 1 <= k <= 254");
        return random_patterns(n, k, j.value("size", std::size_t{8}), c.config.seed);
    }();
    const int n = S.n(), k = S.k();
    if (n > 24) throw ConfigError("shatter works on n <= 24 coordinates");
    const auto I = largest_shattered_subset(S);
    r["n"] = n;
    r["k"] = k;
    r["size"] = S.size();
    r["largest_shattered"] = I;
    r["shatter_dimension"] = I.size();
    r["km"] = Json::array();
    c.csv << "t,threshold,above,shattered_t\n";
    for (int t = 1; t <= n; ++t) {
        const auto km = km_threshold(n, k, t);
        const bool above = BigInt(S.size()) > km;
        const bool has = static_cast<int>(I.size()) >= t;
        r["km"].push_back(Json{{"t", t}, {"threshold", km.str()}, {"above", above}, {"shattered_t", has}});
        c.csv << t << ',' << km.str() << ',' << (above ? 1 : 0) << ',' << (has ? 1 : 0) << '\n';
        if (above && !has) c.failed();
    }
    if (p.value<bool>("cover", n <= 12)) {
        const auto cov = cover_number(S, c.budget_or(std::uint64_t{1} << 24));
        const double bound = cover_lower_bound(k, I.size());
        r["cover"] = Json{{"value", cov.value},
                          {"exact", cov.exact},
                          {"boxes", cov.boxes},
                          {"lower_bound", bound},
                          {"bound_ok", S.size() == 0 || cov.value + 1e-9 >= bound}};
        if (!cov.exact) {
            r["partial"] = true;
            c.budget_hit();
        } else if (S.size() > 0 && cov.value + 1e-9 < bound) {
            c.failed();
        }
    }
    if (p.has("density")) {
        const auto& d = p.node("density", Json::object());
        const double a = d.value("a_target", 0.0), b = d.value("b", 1.0);
        const auto found = density_lemma_search(S, a, b);
        r["density"] = Json{{"a_target", a}, {"b", b}, {"found", found.has_value()}};
        if (found) r["density"]["I"] = *found;
    }
}

// ---------------------------------------------------------------- l1

Json l1_report_json(const L1Report& rep) {
    return Json{{"c_star", rep.c_star},
                {"lambda", io::number(rep.lambda)},
                {"optimizer", rep.optimizer},
                {"rank_deficient", rep.rank_deficient},
                {"lps", rep.lps}};
}

GermFunction read_germ(Context& c) {
    return io::parse_germ(c.params.node("germ", Json{{"alphabet", 2}, {"depth", 1}, {"table", {0.0, 1.0}}}));
}

MeasureModel read_germ_measure(Context& c, const GermFunction& g) {
    const auto spec = SubshiftSpec::full_shift(g.alphabet);
    return io::parse_measure(c.params.node("measure", default_measure(spec)), spec);
}

void cmd_l1(Context& c) {
    auto& p = c.params;
    const auto mode = p.value<std::string>("mode", "constant");
    auto& r = c.result;
    r["mode"] = mode;
    const auto lp_budget = c.budget_or(std::uint64_t{1} << 16);
    const Json rademacher{{"values", {{1, 1, -1, -1}, {1, -1, 1, -1}}}};
    if (mode == "constant") {
        const auto fam = io::parse_function_family(p.node("family", rademacher));
        r.update(l1_report_json(l1_constant(fam, lp_budget)));
    } else if (mode == "iso_set") {
        const double lambda = p.value<double>("lambda", 2.0);
        const auto budget = c.budget_or(std::uint64_t{1} << 22);
        L1IsoResult res;
        if (p.has("family")) {
            const auto fam = io::parse_function_family(p.node("family", Json::object()));
            res = l1_isomorphism_set(fam, lambda, p.value<std::vector<std::size_t>>("removed", {}), budget);
        } else {
            const auto g = read_germ(c);
            const auto m = read_germ_measure(c, g);
            const auto F = io::parse_window(p.node("window", Json{{"interval", {0, 6}}}));
            res = l1_isomorphism_set(g, m, F, lambda, budget);
        }
        r["I"] = res.I;
        r["size"] = res.I.size();
        r["c_star"] = io::number(res.c_star);
        r["lower_bound"] = res.lower_bound;
        r["partial"] = res.lower_bound;
        r["lps"] = res.lps;
        if (res.lower_bound) c.budget_hit();
    } else if (mode == "rosenthal_dor") {
        const auto spec = read_spec(c);
        const int k = spec.alphabet.size;
        const auto A = io::parse_tuple(p.node("tuple", default_tuple(k)), k);
        const auto J = io::parse_window(p.node("window", Json{{"interval", {0, 4}}}));
        const auto D = io::parse_constraint(p.node("constraint", Json{{"kind", "everything"}}), k);
        auto solver = make_solver(c, spec);
        const auto chk = solver.check(A, J, D);
        if (!chk.independent) throw CertificateInvalid("the window is not an independence set for the tuple");
        const auto B1 = io::parse_interval(p.node("B1", Json::array({0.0, 0.25})));
        const auto B2 = io::parse_interval(p.node("B2", Json::array({0.75, 1.0})));
        const auto fam = certificate_family(*chk.certificate, B1, B2, c.config.seed);
        const auto bound = rosenthal_dor_bound(*chk.certificate, fam, B1, B2);
        const auto exact = l1_constant(fam, lp_budget);
        r["certificate"] = io::certificate_json(*chk.certificate);
        r["bound"] = bound.bound;
        r["bound_tenth"] = bound.bound_tenth;
        r["distance"] = bound.distance;
        r["c_star"] = exact.c_star;
        r["bound_ok"] = bound.bound <= exact.c_star + 1e-9;
        if (!r["bound_ok"].get<bool>()) c.failed();
    } else if (mode == "perturb") {
        const auto g = read_germ(c);
        const auto m = read_germ_measure(c, g);
        const auto F = io::parse_window(p.node("window", Json{{"interval", {0, 6}}}));
        const double delta = p.value<double>("delta", 0.05);
        const double lambda = p.value<double>("lambda", 4.0);
        const int trials = p.value<int>("trials", 20);
        if (trials < 1) throw ConfigError("trials must be positive");
        const auto st = perturb_and_test(g, m, F, delta, lambda, trials, c.config.seed);
        r["densities"] = st.densities;
        r["mean"] = st.mean;
        r["min"] = st.min;
        r["max"] = st.max;
        r["fraction_at_least_half"] = st.fraction_at_least(0.5);
        r["budget_flags"] = st.budget_flags;
        c.csv << "trial,density\n";
        for (std::size_t i = 0; i < st.densities.size(); ++i) c.csv << i << ',' << fmt(st.densities[i]) << '\n';
        if (st.budget_flags > 0) {
            r["partial"] = true;
            c.budget_hit();
        }
    } else {
        throw ConfigError("unknown l1 mode \"" + mode + "\"");
    }
}

// ---------------------------------------------------------------- example

std::string symbols(const Word& w, std::size_t limit) {
    std::string s;
    for (std::size_t i = 0; i < std::min(limit, w.size()); ++i) s.push_back(static_cast<char>('0' + w[i]));
    return s;
}

void cmd_example(Context& c) {
    auto& p = c.params;
    const auto name = p.value<std::string>("name", "tame");
    auto& r = c.result;
    r["name"] = name;
    if (name == "tame") {
        const int L = p.value<int>("length", 1000);
        const auto show = p.value<std::size_t>("show", 256);
        const int d = p.value<int>("coverage_d", 3);
        const auto ex = build_tame_example(L);
        const auto ones = std::count(ex.p.begin(), ex.p.end(), Symbol{1});
        r["length"] = L;
        r["p_prefix"] = symbols(ex.p, show);
        r["q_prefix"] = symbols(ex.q, show);
        r["p0"] = ex.p[0];
        r["q0"] = ex.q[0];
        r["ones_density"] = static_cast<double>(ones) / static_cast<double>(ex.p.size());
        r["v_disjointness_violations"] = ex.v_disjointness_violations;
        r["pair_coverage"] = tame_pair_coverage(ex, d);
        r["schedule"] = Json::array();
        c.csv << "m,a,a_prime,h,branch,pair_length\n";
        for (const auto& s : ex.schedule) {
            Json e{{"m", s.m}, {"a", s.a}, {"a_prime", s.a_prime}, {"h", s.h}, {"branch", s.branch}};
            if (s.branch == 0) {
                e["pair_length"] = s.pair_length;
                e["f"] = symbols(s.f, s.f.size());
                e["g"] = symbols(s.g, s.g.size());
            }
            r["schedule"].push_back(std::move(e));
            c.csv << s.m << ',' << s.a << ',' << s.a_prime << ',' << s.h << ',' << s.branch << ',' << s.pair_length << '\n';
        }
    } else if (name == "golden") {
        const auto [spec, m] = golden_mean_system();
        const auto& mk = std::get<Markov>(m.kind());
        r["spec"] = io::spec_json(spec);
        r["transition"] = mk.transition;
        r["stationary"] = mk.stationary;
        r["entropy_rate"] = markov_entropy_rate(m);
        r["log_golden_ratio"] = std::log(std::numbers::phi);
    } else if (name == "full") {
        const int k = p.value<int>("alphabet", 2);
        if (k < 1 || k > 256) throw ConfigError("alphabet size must be in 1..256");
        const auto m = MeasureModel::bernoulli(std::vector<double>(k, 1.0 / k));
        r["spec"] = io::spec_json(SubshiftSpec::full_shift(k));
        r["weights"] = std::get<Bernoulli>(m.kind()).weights;
        r["entropy_rate"] = markov_entropy_rate(m);
    } else {
        throw ConfigError("unknown example \"" + name + "\"");
    }
}

// ---------------------------------------------------------------- verify

// Calls f on every subset of {1..k}^n, given as a PatternSet.
void for_each_subset(int n, int k, const std::function<void(const PatternSet&)>& f) {
    const auto all = PatternSet::full(n, k).rows();
    if (all.size() > 20) throw ConfigError("exhaustive suites need k^n <= 20");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << all.size()); ++mask) {
        PatternSet S(n, k);
        std::vector<std::uint8_t> row(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (!((mask >> i) & 1)) continue;
            for (int z = 0; z < n; ++z) row[z] = static_cast<std::uint8_t>(all[i][z]);
            S.insert(row);
        }
        f(S);
    }
}

struct Tally {
    std::uint64_t instances = 0, failures = 0;
    Json counterexamples = Json::array();

    void fail(Json detail) {
        ++failures;
        if (counterexamples.size() < 16) counterexamples.push_back(std::move(detail));
    }
};

void finish(Context& c, const Tally& t) {
    c.result["instances"] = t.instances;
    c.result["failures"] = t.failures;
    c.result["counterexamples"] = t.counterexamples;
    if (t.failures > 0) c.failed();
}

void verify_sauer(Context& c) {
    const int n = c.params.value<int>("n", 3), k = c.params.value<int>("k", 2);
    if (n < 1 || k < 1) throw ConfigError("n and k must be positive");
    Tally t;
    std::vector<std::size_t> largest_without(static_cast<std::size_t>(n) + 1, 0);
    std::vector<BigInt> km(static_cast<std::size_t>(n) + 1);
    for (int tt = 1; tt <= n; ++tt) km[tt] = km_threshold(n, k, tt);
    for_each_subset(n, k, [&](const PatternSet& S) {
        ++t.instances;
        const auto s = largest_shattered_subset(S).size();
        for (int tt = 1; tt <= n; ++tt) {
            if (s < static_cast<std::size_t>(tt)) largest_without[tt] = std::max(largest_without[tt], S.size());
            if (BigInt(S.size()) > km[tt] && s < static_cast<std::size_t>(tt))
                t.fail(Json{{"t", tt}, {"rows", S.rows()}});
        }
    });
    Json extremal = Json::array();
    c.csv << "t,threshold,largest_without_shattered_t,extremal_size\n";
    for (int tt = 1; tt <= n; ++tt) {
        const auto ext = km_extremal(n, k, tt);
        const bool ext_ok = BigInt(ext.size()) == km[tt] && largest_shattered_subset(ext).size() < static_cast<std::size_t>(tt);
        const bool tight = BigInt(largest_without[tt]) == km[tt];
        if (!ext_ok) t.fail(Json{{"t", tt}, {"extremal_family", "wrong size or shatters a t-set"}});
        if (!tight) t.fail(Json{{"t", tt}, {"largest_without_shattered_t", largest_without[tt]}});
        Json e{{"t", tt}, {"threshold", km[tt].str()}, {"largest_without_shattered_t", largest_without[tt]}};
        if (ext.size() <= 64) e["extremal_rows"] = ext.rows();
        extremal.push_back(std::move(e));
        c.csv << tt << ',' << km[tt].str() << ',' << largest_without[tt] << ',' << ext.size() << '\n';
    }
    c.result["n"] = n;
    c.result["k"] = k;
    c.result["extremal_examples"] = std::move(extremal);
    finish(c, t);
}

void verify_cover_bound(Context& c) {
    const int n = c.params.value<int>("n", 2), k = c.params.value<int>("k", 2);
    if (n < 1 || k < 2) throw ConfigError("cover-bound needs n >= 1 and k >= 2");
    Tally t;
    double worst_ratio = std::numeric_limits<double>::infinity();
    Json worst;
    std::uint64_t vacuous = 0;
    for_each_subset(n, k, [&](const PatternSet& S) {
        ++t.instances;
        if (S.size() == 0) {
            ++vacuous;
            return;
        }
        const auto s = largest_shattered_subset(S).size();
        const auto cov = cover_number(S, c.budget_or(std::uint64_t{1} << 24));
        if (!cov.exact) throw BudgetExceeded("cover number search ran out of budget");
        const double bound = cover_lower_bound(k, s);
        if (cov.value + 1e-9 < bound) t.fail(Json{{"rows", S.rows()}, {"cover", cov.value}, {"bound", bound}});
        const double ratio = cov.value / bound;
        if (ratio < worst_ratio) {
            worst_ratio = ratio;
            worst = Json{{"rows", S.rows()}, {"cover", cov.value}, {"shattered", s}, {"bound", bound}};
        }
    });
    const auto full = PatternSet::full(n, k);
    const auto full_cover = cover_number(full).value;
    const double full_bound = cover_lower_bound(k, static_cast<std::size_t>(n));
    const bool equality = std::abs(full_cover - full_bound) < 1e-9;
    if (k == 2 && !equality) t.fail(Json{{"full_set_cover", full_cover}, {"bound", full_bound}});
    c.result["n"] = n;
    c.result["k"] = k;
    c.result["vacuous"] = vacuous;
    c.result["full_set"] = Json{{"cover", full_cover}, {"bound", full_bound}, {"equality", equality}};
    c.result["extremal_examples"] = Json::array({Json{{"min_ratio", worst_ratio}, {"example", worst}}});
    finish(c, t);
}

void verify_density_lemma(Context& c) {
    auto& p = c.params;
    const int n = p.value<int>("n", 8), k = p.value<int>("k", 2);
    const int trials = p.value<int>("trials", 100);
    const double b = p.value<double>("b", 0.25), lambda = p.value<double>("lambda", 0.5);
    const double a = p.value<double>("a_target", 0.1);
    if (n < 1 || n > 24 || k < 1 || trials < 0) throw ConfigError("density-lemma needs 1 <= n <= 24, k >= 1");
    Tally t;
    std::uint64_t found = 0, not_found = 0;
    double min_fraction = 1.0;
    auto check = [&](const PatternSet& S, double at, double bb, std::optional<bool> expect_found) {
        ++t.instances;
        const auto I = density_lemma_search(S, at, bb);
        if (I) {
            ++found;
            min_fraction = std::min(min_fraction, static_cast<double>(I->size()) / S.n());
            if (!shatters(S, *I) || static_cast<double>(I->size()) + 1e-9 < at * S.n())
                t.fail(Json{{"rows", S.rows()}, {"I", *I}});
        } else {
            ++not_found;
        }
        if (expect_found && *expect_found != I.has_value()) t.fail(Json{{"rows", S.rows()}, {"expected", *expect_found}});
    };
    {
        // {0,1,2}^3 with at most one zero, k = 2: shatters every coordinate
        PatternSet S(3, 2);
        std::vector<std::uint8_t> row(3);
        for (int code = 0; code < 27; ++code) {
            int zeros = 0;
            for (int z = 0, v = code; z < 3; ++z, v /= 3) zeros += (row[z] = static_cast<std::uint8_t>(v % 3)) == 0;
            if (zeros <= 1) S.insert(row);
        }
        check(S, 1.0, 1.0 / 3.0, true);
        check(PatternSet::from_rows(3, 2, {{0, 0, 0}}), 0.5, 1.0, false);
    }
    std::mt19937_64 rng(c.config.seed);
    const auto max_zeros = static_cast<int>(std::floor(b * n + 1e-9));
    const auto target = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(k), lambda * n) - 1e-9));
    std::uniform_int_distribution<int> sym(1, k);
    std::uniform_int_distribution<int> zero_count(0, max_zeros);
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int trial = 0; trial < trials; ++trial) {
        PatternSet S(n, k);
        std::vector<std::uint8_t> row(static_cast<std::size_t>(n));
        for (std::size_t attempt = 0; S.size() < target && attempt < 64 * target + 64; ++attempt) {
            for (auto& v : row) v = static_cast<std::uint8_t>(sym(rng));
            for (int z = 0; z < n; ++z) idx[z] = z;
            std::shuffle(idx.begin(), idx.end(), rng);
            const int zc = zero_count(rng);
            for (int z = 0; z < zc; ++z) row[idx[z]] = 0;
            S.insert(row);
        }
        check(S, a, b, std::nullopt);
    }
    c.result["n"] = n;
    c.result["k"] = k;
    c.result["found"] = found;
    c.result["not_found"] = not_found;
    c.result["min_found_fraction"] = min_fraction;
    c.result["extremal_examples"] = Json::array({Json{{"description", "all-zero pattern"}, {"found", false}}});
    finish(c, t);
}

void verify_separated(Context& c) {
    auto& p = c.params;
    const int n = p.value<int>("n", 6);
    const int trials = p.value<int>("trials", 50);
    const int size = p.value<int>("size", 16);
    const double delta = p.value<double>("delta", 0.5);
    if (n < 1 || n > 20 || size < 1 || trials < 0 || delta > 1.5) throw ConfigError("separated needs 1 <= n <= 20, delta <= 1.5");
    Tally t;
    double best_eps = 0.0;
    Json extremal = Json::array();
    {
        std::vector<std::vector<double>> cube;
        for (int code = 0; code < 8; ++code) cube.push_back({double(code >> 2 & 1), double(code >> 1 & 1), double(code & 1)});
        ++t.instances;
        const auto res = separated_to_shattered(cube, 1.0);
        if (!res.found || res.J.size() != 3 || !separated_result_valid(cube, res)) t.fail(Json{{"example", "unit cube"}});
        extremal.push_back(Json{{"example", "unit cube corners"}, {"J", res.J}, {"t", res.t}, {"epsilon", res.epsilon}});
    }
    std::mt19937_64 rng(c.config.seed);
    std::uniform_real_distribution<double> shrink(0.0, 0.25);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < trials; ++trial) {
        std::set<std::vector<int>> corners;
        for (int attempt = 0; static_cast<int>(corners.size()) < size && attempt < 64 * size; ++attempt) {
            std::vector<int> s(static_cast<std::size_t>(n));
            for (auto& v : s) v = coin(rng) ? 1 : -1;
            corners.insert(s);
        }
        std::vector<std::vector<double>> E;
        for (const auto& s : corners) {
            std::vector<double> v;
            for (int x : s) v.push_back(x * (1.0 - shrink(rng)));
            E.push_back(std::move(v));
        }
        ++t.instances;
        const auto res = separated_to_shattered(E, delta);
        const bool valid = separated_result_valid(E, res);
        if (!valid || (E.size() >= 2 && !res.found)) t.fail(Json{{"trial", trial}, {"found", res.found}, {"valid", valid}});
        best_eps = std::max(best_eps, res.epsilon);
    }
    c.result["n"] = n;
    c.result["max_epsilon"] = best_eps;
    c.result["extremal_examples"] = std::move(extremal);
    finish(c, t);
}

void cmd_verify(Context& c) {
    c.result["suite"] = c.config.suite;
    if (c.config.suite == "sauer") return verify_sauer(c);
    if (c.config.suite == "cover-bound") return verify_cover_bound(c);
    if (c.config.suite == "density-lemma") return verify_density_lemma(c);
    if (c.config.suite == "separated") return verify_separated(c);
    throw ConfigError("unknown verify suite \"" + c.config.suite + "\"");
}

const char* status_name(int code) {
    switch (code) {
        case kExitOk: return "ok";
        case kExitVerificationFailed: return "verification_failed";
        case kExitConfigError: return "config_error";
        default: return "budget_exhausted";
    }
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> top{"schema_version", "command", "suite", "seed", "budget", "params"};
    for (const auto& [key, v] : j.items())
        if (!top.count(key)) throw ConfigError("unknown config key \"" + key + "\"");
    RunConfig c;
    try {
        if (j.contains("schema_version") && j.at("schema_version").get<int>() != kConfigSchemaVersion)
            throw ConfigError("unsupported schema_version");
        if (j.contains("command")) c.command = j.at("command").get<std::string>();
        if (j.contains("suite")) c.suite = j.at("suite").get<std::string>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("budget") && !j.at("budget").is_null()) c.budget = j.at("budget").get<std::uint64_t>();
        if (j.contains("params")) c.params = j.at("params");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    if (!c.params.is_object()) throw ConfigError("params must be an object");
    return c;
}

RunResult run(const RunConfig& config) {
    Context c{config, Params(config.params), {}, {}, kExitOk};
    std::string error;
    int code = kExitOk;
    try {
        const auto& table = allowed_params();
        const auto it = table.find(config.command);
        if (it == table.end()) throw ConfigError("unknown command \"" + config.command + "\"");
        if (!config.params.is_object()) throw ConfigError("params must be an object");
        for (const auto& [key, v] : config.params.items())
            if (!it->second.count(key)) throw ConfigError("unknown parameter \"" + key + "\" for " + config.command);
        if (config.command == "verify" && !kSuites.count(config.suite))
            throw ConfigError("verify needs a suite: sauer, cover-bound, density-lemma or separated");
        if (config.budget && *config.budget == 0) throw ConfigError("budget must be positive");
        if (config.command == "entropy") cmd_entropy(c);
        if (config.command == "independence") cmd_independence(c);
        if (config.command == "shatter") cmd_shatter(c);
        if (config.command == "l1") cmd_l1(c);
        if (config.command == "example") cmd_example(c);
        if (config.command == "verify") cmd_verify(c);
        code = c.exit_code;
    } catch (const ConfigError& e) {
        code = kExitConfigError, error = e.what();
    } catch (const nlohmann::json::exception& e) {
        code = kExitConfigError, error = e.what();
    } catch (const BudgetExceeded& e) {
        code = kExitBudget, error = e.what();
        c.result["partial"] = true;
    } catch (const DepthCapExceeded& e) {
        code = kExitBudget, error = e.what();
        c.result["partial"] = true;
    } catch (const CertificateInvalid& e) {
        code = kExitVerificationFailed, error = e.what();
    } catch (const Error& e) {
        code = kExitConfigError, error = e.what();
    } catch (const std::logic_error& e) {
        code = kExitVerificationFailed, error = e.what();
    } catch (const std::exception& e) {
        code = kExitConfigError, error = e.what();
    }
    RunResult out;
    out.exit_code = code;
    Json resolved{{"schema_version", kConfigSchemaVersion}, {"command", config.command}};
    if (!config.suite.empty()) resolved["suite"] = config.suite;
    resolved["seed"] = config.seed;
    resolved["budget"] = config.budget ? Json(*config.budget) : Json(nullptr);
    resolved["params"] = c.params.resolved();
    out.report = Json{{"schema", "combind-report"},
                      {"schema_version", kConfigSchemaVersion},
                      {"command", config.command},
                      {"status", status_name(code)},
                      {"exit_code", code},
                      {"config", std::move(resolved)},
                      {"result", std::move(c.result)}};
    if (!error.empty()) out.report["error"] = error;
    out.csv = c.csv.str();
    return out;
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace combind
