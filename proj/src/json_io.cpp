#include "combind/json_io.hpp"

#include <cmath>
#include <limits>

#include "combind/errors.hpp"
#include "combind/examples.hpp"

namespace combind::io {

namespace {

const Json& need(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing key \"") + key + "\"");
    return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
    try {
        return need(j, key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
    }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return get<T>(j, key);
}

std::string kind_of(const Json& j) { return get<std::string>(j, "kind"); }

}  // namespace

Word parse_word(const Json& j, int k) {
    Word w;
    if (j.is_string()) {
        for (char c : j.get<std::string>()) {
            if (c < '0' || c > '9') throw ConfigError("word strings use the digits 0-9");
            w.push_back(static_cast<Symbol>(c - '0'));
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number_integer()) throw ConfigError("word arrays hold integers");
            const auto s = v.get<long long>();
            if (s < 0 || s > 255) throw ConfigError("symbol out of range");
            w.push_back(static_cast<Symbol>(s));
        }
    } else {
        throw ConfigError("a word is a digit string or an integer array");
    }
    for (auto s : w)
        if (s >= k) throw ConfigError("symbol " + std::to_string(s) + " outside alphabet of size " + std::to_string(k));
    return w;
}

Json word_json(const Word& w) {
    Json a = Json::array();
    for (auto s : w) a.push_back(static_cast<int>(s));
    return a;
}

SubshiftSpec parse_spec(const Json& j) {
    const auto kind = kind_of(j);
    if (kind == "golden") return golden_mean_system().first;
    const int k = get<int>(j, "alphabet");
    if (k < 1 || k > 256) throw ConfigError("alphabet size must be in 1..256");
    if (kind == "full") return SubshiftSpec::full_shift(k);
    if (kind == "sft") {
        std::vector<Word> forbidden;
        for (const auto& w : need(j, "forbidden")) forbidden.push_back(parse_word(w, k));
        return SubshiftSpec::sft(k, std::move(forbidden));
    }
    if (kind == "generator") {
        Generator g;
        g.name = get<std::string>(j, "name");
        g.params = get_or<std::vector<long long>>(j, "params", {});
        if (j.contains("word")) g.word = parse_word(j.at("word"), k);
        return SubshiftSpec::generator(k, std::move(g));
    }
    throw ConfigError("unknown spec kind \"" + kind + "\"");
}

Json spec_json(const SubshiftSpec& spec) {
    Json j;
    j["alphabet"] = spec.alphabet.size;
    if (std::holds_alternative<FullShift>(spec.kind)) {
        j["kind"] = "full";
    } else if (const auto* s = std::get_if<Sft>(&spec.kind)) {
        j["kind"] = "sft";
        j["forbidden"] = Json::array();
        for (const auto& w : s->forbidden) j["forbidden"].push_back(word_json(w));
    } else {
        const auto& g = std::get<Generator>(spec.kind);
        j["kind"] = "generator";
        j["name"] = g.name;
        j["params"] = g.params;
        j["word"] = word_json(g.word);
    }
    return j;
}

MeasureModel parse_measure(const Json& j, const SubshiftSpec& spec) {
    const auto kind = kind_of(j);
    if (kind == "bernoulli") return MeasureModel::bernoulli(get<std::vector<double>>(j, "weights"));
    if (kind == "markov")
        return MeasureModel::markov(get<std::vector<std::vector<double>>>(j, "transition"),
                                    get<std::vector<double>>(j, "stationary"));
    if (kind == "parry") return parry_measure(spec);
    if (kind == "empirical") {
        const int k = spec.alphabet.size;
        const int max_length = get_or<int>(j, "max_length", 1);
        if (j.contains("segment")) return MeasureModel::empirical(k, parse_word(j.at("segment"), k), max_length);
        const int length = get<int>(j, "length");
        if (length < 1) throw ConfigError("empirical length must be positive");
        const auto seg = generate_segment(spec, 0, length, get_or<std::uint64_t>(j, "seed", 0));
        return MeasureModel::empirical(k, seg.symbols, max_length);
    }
    throw ConfigError("unknown measure kind \"" + kind + "\"");
}

Partition parse_partition(const Json& j, const SubshiftSpec& spec) {
    const auto kind = kind_of(j);
    Partition P;
    if (kind == "symbol") {
        P = Partition::symbol_partition(spec);
    } else if (kind == "trivial") {
        P = Partition::trivial(spec);
    } else if (kind == "labels") {
        P = Partition::from_labels(spec, get<int>(j, "depth"), get<std::vector<int>>(j, "labels"));
    } else {
        throw ConfigError("unknown partition kind \"" + kind + "\"");
    }
    P.anchor = get_or<int>(j, "anchor", P.anchor);
    return P;
}

Cover parse_cover(const Json& j, const SubshiftSpec& spec) {
    Cover U;
    if (j.contains("from_partition")) {
        U = Cover::from_partition(parse_partition(j.at("from_partition"), spec));
    } else {
        for (const auto& m : need(j, "members")) U.members.push_back(parse_set(m, spec.alphabet.size));
    }
    U.validate(spec);
    return U;
}

Cylinder parse_cylinder(const Json& j, int k) { return {get_or<int>(j, "anchor", 0), parse_word(need(j, "word"), k)}; }

BorelLikeSet parse_set(const Json& j, int k) {
    if (j.is_string() && j.get<std::string>() == "everything") return BorelLikeSet::everything();
    if (!j.is_array()) throw ConfigError("a set is an array of cylinders or \"everything\"");
    BorelLikeSet s;
    for (const auto& c : j) s.cylinders.push_back(parse_cylinder(c, k));
    return s;
}

Json set_json(const BorelLikeSet& s) {
    Json a = Json::array();
    for (const auto& c : s.cylinders) a.push_back(Json{{"anchor", c.anchor}, {"word", word_json(c.word)}});
    return a;
}

SetTuple parse_tuple(const Json& j, int k) {
    if (!j.is_array() || j.empty()) throw ConfigError("a tuple is a nonempty array of sets");
    SetTuple t;
    for (const auto& s : j) t.components.push_back(parse_set(s, k));
    return t;
}

Window parse_window(const Json& j) {
    if (j.contains("interval")) {
        const auto ab = get<std::vector<int>>(j, "interval");
        if (ab.size() != 2 || ab[0] > ab[1]) throw ConfigError("interval is [a, b] with a <= b");
        return Window::interval(ab[0], ab[1]);
    }
    return Window(get<std::vector<int>>(j, "elements"));
}

std::vector<Window> parse_windows(const Json& j) {
    std::vector<Window> out;
    if (j.is_object() && j.contains("sizes")) {
        for (int n : get<std::vector<int>>(j, "sizes")) {
            if (n < 1) throw ConfigError("window sizes must be positive");
            out.push_back(Window::interval(0, n));
        }
        return out;
    }
    if (!j.is_array()) throw ConfigError("windows are an array or {\"sizes\": [...]}");
    for (const auto& w : j) out.push_back(parse_window(w));
    return out;
}

ConstraintModel parse_constraint(const Json& j, int k) {
    const auto kind = kind_of(j);
    if (kind == "everything") return ConstraintModel::everything();
    if (kind == "fixed") return ConstraintModel::fixed(parse_set(need(j, "removed"), k));
    if (kind == "per_element") {
        std::map<int, BorelLikeSet> at;
        for (const auto& [key, v] : need(j, "removed_at").items()) {
            try {
                at[std::stoi(key)] = parse_set(v, k);
            } catch (const std::logic_error&) {
                throw ConfigError("removed_at keys are integers");
            }
        }
        return ConstraintModel::per_element(std::move(at));
    }
    throw ConfigError("unknown constraint kind \"" + kind + "\"");
}

ConstraintFamily parse_family(const Json& j) {
    ConstraintFamily f;
    const auto kind = get_or<std::string>(j, "kind", "exact");
    if (kind == "exact") {
        f.kind = ConstraintFamily::Kind::ExactAtoms;
    } else if (kind == "greedy") {
        f.kind = ConstraintFamily::Kind::GreedyAdversary;
    } else {
        throw ConfigError("unknown family kind \"" + kind + "\"");
    }
    f.depth = get_or<int>(j, "depth", f.depth);
    f.passes = get_or<int>(j, "passes", f.passes);
    f.per_element = get_or<bool>(j, "per_element", f.per_element);
    f.exact_limit = get_or<std::size_t>(j, "exact_limit", f.exact_limit);
    if (f.depth < 1) throw ConfigError("family depth must be positive");
    return f;
}

PatternSet parse_patterns(const Json& j) {
    const int n = get<int>(j, "n"), k = get<int>(j, "k");
    if (n < 1 || n > 64 || k < 1 || k > 254) throw ConfigError("patterns need 1 <= n <= 64 and 1 <= k <= 254");
    auto rows = get<std::vector<std::vector<int>>>(j, "rows");
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != n) throw ConfigError("pattern rows must have length n");
        for (int v : r)
            if (v < 0 || v > k) throw ConfigError("pattern values lie in 0..k");
    }
    return PatternSet::from_rows(n, k, rows);
}

FunctionFamily parse_function_family(const Json& j) {
    FunctionFamily f;
    f.values = get<std::vector<std::vector<double>>>(j, "values");
    if (f.values.empty()) throw ConfigError("function family is empty");
    const auto points = f.values.front().size();
    for (const auto& row : f.values)
        if (row.size() != points) throw ConfigError("function value rows must have equal length");
    f.weights = get_or<std::vector<double>>(j, "weights", std::vector<double>(points, 1.0 / static_cast<double>(points)));
    std::vector<int> keys(f.values.size());
    for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = static_cast<int>(i);
    f.keys = get_or<std::vector<int>>(j, "keys", keys);
    if (f.weights.size() != points || f.keys.size() != f.values.size())
        throw ConfigError("weights must match points and keys must match functions");
    f.validate();
    return f;
}

GermFunction parse_germ(const Json& j) {
    GermFunction g;
    g.alphabet = get<int>(j, "alphabet");
    g.depth = get<int>(j, "depth");
    g.table = get<std::vector<double>>(j, "table");
    if (g.alphabet < 1 || g.depth < 1 || g.depth > 20) throw ConfigError("germ needs alphabet >= 1 and 1 <= depth <= 20");
    if (g.table.size() != ipow(static_cast<std::uint64_t>(g.alphabet), g.depth))
        throw ConfigError("germ table must have alphabet^depth entries");
    return g;
}

Interval parse_interval(const Json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 2 || !(v[0] <= v[1])) throw ConfigError("interval is [lo, hi] with lo <= hi");
    return {v[0], v[1]};
}

Json certificate_json(const IndependenceCertificate& cert) {
    Json w = Json::array();
    for (const auto& [sigma, wit] : cert.witnesses) {
        Json e{{"sigma", sigma}, {"start", wit.segment.start}, {"symbols", word_json(wit.segment.symbols)}};
        if (wit.shift) e["shift"] = *wit.shift;
        w.push_back(std::move(e));
    }
    return Json{{"J", cert.J}, {"witnesses", std::move(w)}};
}

Json density_json(const DensityReport& r) {
    return Json{{"window", r.window.elements},
                {"delta", r.delta},
                {"phi_hat", r.phi_hat},
                {"density", r.density},
                {"phi_hat_fixed", r.phi_hat_fixed},
                {"mode", r.mode},
                {"family", r.family},
                {"family_size", r.family_size},
                {"minimizer", r.minimizer},
                {"minimizer_J", r.minimizer_J},
                {"greedy", r.greedy},
                {"lower_bound", r.lower_bound}};
}

Json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace combind::io
