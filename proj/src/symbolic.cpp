#include "combind/symbolic.hpp"

#include <algorithm>
#include <deque>
#include <random>

#include "combind/errors.hpp"
#include "combind/examples.hpp"

namespace combind {

Alphabet::Alphabet(int k) : size(k) {
    if (k < 1 || k > 256) throw InvalidModel("alphabet size must be in [1, 256]");
}

SubshiftSpec SubshiftSpec::full_shift(int k) { return {Alphabet(k), FullShift{}}; }

SubshiftSpec SubshiftSpec::sft(int k, std::vector<Word> forbidden) {
    Alphabet a(k);
    for (const auto& w : forbidden) {
        if (w.empty()) throw InvalidModel("forbidden words must be nonempty");
        for (Symbol s : w)
            if (s >= k) throw InvalidModel("forbidden word uses a symbol outside the alphabet");
    }
    return {a, Sft{std::move(forbidden)}};
}

SubshiftSpec SubshiftSpec::generator(int k, Generator g) {
    static const std::vector<std::string> known{"tame", "constant", "periodic"};
    if (std::find(known.begin(), known.end(), g.name) == known.end())
        throw InvalidModel("unknown generator '" + g.name + "'");
    if (g.name == "constant" && (g.params.empty() || g.params[0] < 0 || g.params[0] >= k))
        throw InvalidModel("constant generator needs a symbol parameter");
    if (g.name == "periodic" && g.word.empty()) throw InvalidModel("periodic generator needs a word");
    if (g.name == "tame" && k < 2) throw InvalidModel("tame generator is binary");
    return {Alphabet(k), std::move(g)};
}

BorelLikeSet BorelLikeSet::shifted(int t) const {
    BorelLikeSet out;
    out.cylinders.reserve(cylinders.size());
    for (const auto& c : cylinders) out.cylinders.push_back(c.shifted(t));
    return out;
}

std::pair<int, int> BorelLikeSet::span() const {
    bool any = false;
    int lo = 0, hi = 0;
    for (const auto& c : cylinders) {
        if (c.word.empty()) continue;
        if (!any) {
            lo = c.anchor;
            hi = c.end();
            any = true;
        } else {
            lo = std::min(lo, c.anchor);
            hi = std::max(hi, c.end());
        }
    }
    return {lo, hi};
}

Window::Window(std::vector<int> elems) : elements(std::move(elems)) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
}

Window Window::interval(int a, int b) {
    Window w;
    for (int i = a; i < b; ++i) w.elements.push_back(i);
    return w;
}

Window Window::shifted(int t) const {
    Window w;
    w.elements.reserve(elements.size());
    for (int e : elements) w.elements.push_back(e + t);
    return w;
}

Requirement Requirement::in(const BorelLikeSet& set, int shift) {
    return {set.shifted(shift).cylinders, false};
}

Requirement Requirement::avoid(const BorelLikeSet& set, int shift) {
    return {set.shifted(shift).cylinders, true};
}

bool matches(const Cylinder& c, const Segment& seg) {
    if (c.word.empty()) return true;
    if (!seg.covers(c.anchor, c.end())) return false;
    for (std::size_t i = 0; i < c.word.size(); ++i)
        if (seg.at(c.anchor + static_cast<int>(i)) != c.word[i]) return false;
    return true;
}

bool satisfies(const Requirement& r, const Segment& seg) {
    bool hit = std::any_of(r.any_of.begin(), r.any_of.end(), [&](const Cylinder& c) { return matches(c, seg); });
    return r.negate ? !hit : hit;
}

std::uint64_t ipow(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

std::uint64_t word_code(std::span<const Symbol> w, int k) {
    std::uint64_t c = 0;
    for (Symbol s : w) c = c * static_cast<std::uint64_t>(k) + s;
    return c;
}

Word word_from_code(std::uint64_t code, int length, int k) {
    Word w(static_cast<std::size_t>(length));
    for (int i = length - 1; i >= 0; --i) {
        w[static_cast<std::size_t>(i)] = static_cast<Symbol>(code % static_cast<std::uint64_t>(k));
        code /= static_cast<std::uint64_t>(k);
    }
    return w;
}

std::string word_to_string(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (Symbol c : w) {
        if (c > 9) throw InvalidModel("digit strings only encode symbols 0..9");
        s.push_back(static_cast<char>('0' + c));
    }
    return s;
}

Word word_from_string(const std::string& s) {
    Word w;
    w.reserve(s.size());
    for (char c : s) {
        if (c < '0' || c > '9') throw InvalidModel("word strings must be decimal digits");
        w.push_back(static_cast<Symbol>(c - '0'));
    }
    return w;
}

// ---------------------------------------------------------------- Language

namespace {

bool admissible(std::span<const Symbol> w, const std::vector<Word>& forbidden) {
    for (const auto& f : forbidden) {
        if (f.size() > w.size()) continue;
        for (std::size_t i = 0; i + f.size() <= w.size(); ++i)
            if (std::equal(f.begin(), f.end(), w.begin() + static_cast<std::ptrdiff_t>(i))) return false;
    }
    return true;
}

constexpr std::uint64_t kGraphCap = std::uint64_t{1} << 22;

}  // namespace

Language::Language(const SubshiftSpec& spec) : k_(spec.alphabet.size) {
    if (spec.is_generator()) throw UnsupportedSpec("generator specs have no decidable language; use orbit-sample mode");
    if (std::holds_alternative<FullShift>(spec.kind)) {
        full_ = true;
        order_ = 1;
        for (int s = 0; s < k_; ++s) vertices_sorted_.push_back(static_cast<std::uint64_t>(s));
        vertices_.insert(vertices_sorted_.begin(), vertices_sorted_.end());
        return;
    }
    const auto& forbidden = std::get<Sft>(spec.kind).forbidden;
    std::size_t m = 1;
    for (const auto& f : forbidden) m = std::max(m, f.size());
    order_ = std::max<int>(1, static_cast<int>(m) - 1);
    const std::uint64_t nv = ipow(static_cast<std::uint64_t>(k_), order_);
    const std::uint64_t ne = nv * static_cast<std::uint64_t>(k_);
    if (ne > kGraphCap) throw UnsupportedSpec("transfer graph too large for this SFT");

    std::vector<char> alive(nv, 0);
    for (std::uint64_t v = 0; v < nv; ++v) alive[v] = admissible(word_from_code(v, order_, k_), forbidden) ? 1 : 0;
    std::vector<char> edge(ne, 0);
    for (std::uint64_t e = 0; e < ne; ++e) edge[e] = admissible(word_from_code(e, order_ + 1, k_), forbidden) ? 1 : 0;

    // Trim vertices that have no predecessor or no successor until stable.
    auto src = [&](std::uint64_t e) { return e / static_cast<std::uint64_t>(k_); };
    auto dst = [&](std::uint64_t e) { return e % nv; };
    std::vector<int> indeg(nv, 0), outdeg(nv, 0);
    for (std::uint64_t e = 0; e < ne; ++e) {
        if (!edge[e] || !alive[src(e)] || !alive[dst(e)]) continue;
        ++outdeg[src(e)];
        ++indeg[dst(e)];
    }
    std::deque<std::uint64_t> queue;
    for (std::uint64_t v = 0; v < nv; ++v)
        if (alive[v] && (indeg[v] == 0 || outdeg[v] == 0)) queue.push_back(v);
    const std::uint64_t kk = static_cast<std::uint64_t>(k_);
    const std::uint64_t high = nv / kk;  // k^(order-1)
    while (!queue.empty()) {
        std::uint64_t v = queue.front();
        queue.pop_front();
        if (!alive[v]) continue;
        alive[v] = 0;
        // successors: v*k + s truncated; predecessors: s*k^(order-1) + v/k
        for (std::uint64_t s = 0; s < kk; ++s) {
            std::uint64_t out_e = v * kk + s;
            std::uint64_t w = dst(out_e);
            if (edge[out_e] && alive[w] && w != v) {
                if (--indeg[w] == 0) queue.push_back(w);
            }
            std::uint64_t u = s * high + v / kk;
            std::uint64_t in_e = u * kk + v % kk;
            if (edge[in_e] && alive[u] && u != v) {
                if (--outdeg[u] == 0) queue.push_back(u);
            }
        }
    }
    for (std::uint64_t v = 0; v < nv; ++v)
        if (alive[v]) vertices_sorted_.push_back(v);
    vertices_.insert(vertices_sorted_.begin(), vertices_sorted_.end());
    for (std::uint64_t e = 0; e < ne; ++e)
        if (edge[e] && alive[src(e)] && alive[dst(e)]) edges_.insert(e);
    empty_ = vertices_sorted_.empty();
}

bool Language::vertex_ok(std::uint64_t code) const { return full_ || vertices_.count(code) > 0; }

bool Language::edge_ok(std::uint64_t code) const { return full_ || edges_.count(code) > 0; }

bool Language::contains(std::span<const Symbol> w) const {
    if (empty_) return false;
    for (Symbol s : w)
        if (s >= k_) return false;
    if (full_) return true;
    const auto n = static_cast<int>(w.size());
    if (n < order_) {
        for (std::uint64_t v : vertices_sorted_) {
            Word vw = word_from_code(v, order_, k_);
            if (std::equal(w.begin(), w.end(), vw.begin())) return true;
        }
        return false;
    }
    for (int i = 0; i + order_ <= n; ++i)
        if (!vertex_ok(word_code(w.subspan(static_cast<std::size_t>(i), static_cast<std::size_t>(order_)), k_)))
            return false;
    for (int i = 0; i + order_ + 1 <= n; ++i)
        if (!edge_ok(word_code(w.subspan(static_cast<std::size_t>(i), static_cast<std::size_t>(order_ + 1)), k_)))
            return false;
    return true;
}

std::vector<Word> Language::words(int length, std::size_t cap) const {
    std::vector<Word> out;
    if (empty_ || length < 0) return out;
    if (length == 0) {
        out.emplace_back();
        return out;
    }
    if (length <= order_) {
        std::vector<Word> prefixes;
        for (std::uint64_t v : vertices_sorted_) {
            Word vw = word_from_code(v, order_, k_);
            vw.resize(static_cast<std::size_t>(length));
            prefixes.push_back(std::move(vw));
        }
        std::sort(prefixes.begin(), prefixes.end());
        prefixes.erase(std::unique(prefixes.begin(), prefixes.end()), prefixes.end());
        return prefixes;
    }
    Word cur;
    const std::uint64_t kk = static_cast<std::uint64_t>(k_);
    const std::uint64_t nv = ipow(kk, order_);
    auto rec = [&](auto&& self, std::uint64_t state) -> void {
        if (static_cast<int>(cur.size()) == length) {
            if (out.size() >= cap) throw DepthCapExceeded("too many admissible words");
            out.push_back(cur);
            return;
        }
        for (int s = 0; s < k_; ++s) {
            std::uint64_t e = state * kk + static_cast<std::uint64_t>(s);
            if (!edge_ok(e)) continue;
            cur.push_back(static_cast<Symbol>(s));
            self(self, e % nv);
            cur.pop_back();
        }
    };
    for (std::uint64_t v : vertices_sorted_) {
        cur = word_from_code(v, order_, k_);
        rec(rec, v);
    }
    return out;
}

// ---------------------------------------------------------------- feasibility

FeasibilityEngine::FeasibilityEngine(const SubshiftSpec& spec) : lang_(spec) {}
FeasibilityEngine::FeasibilityEngine(Language language) : lang_(std::move(language)) {}

std::optional<Segment> FeasibilityEngine::solve(const std::vector<Requirement>& reqs) const {
    if (lang_.empty()) return std::nullopt;
    const int k = lang_.alphabet_size();
    const int order = lang_.order();

    // Normalize: positive unions keep their cylinders, negations split per cylinder.
    std::vector<Requirement> norm;
    for (const auto& r : reqs) {
        if (!r.negate) {
            if (r.any_of.empty()) return std::nullopt;
            bool trivially_true = false;
            for (const auto& c : r.any_of) {
                if (c.word.empty()) trivially_true = true;
                for (Symbol s : c.word)
                    if (s >= k) throw InvalidModel("requirement uses a symbol outside the alphabet");
            }
            if (!trivially_true) norm.push_back(r);
        } else {
            for (const auto& c : r.any_of) {
                if (c.word.empty()) return std::nullopt;
                norm.push_back({{c}, true});
            }
        }
    }

    int lo = 0, hi = 0;
    bool any = false;
    int window = order + 1;
    for (const auto& r : norm) {
        int rlo = r.any_of.front().anchor, rhi = r.any_of.front().end();
        for (const auto& c : r.any_of) {
            rlo = std::min(rlo, c.anchor);
            rhi = std::max(rhi, c.end());
        }
        window = std::max(window, rhi - rlo);
        if (!any) {
            lo = rlo;
            hi = rhi;
            any = true;
        } else {
            lo = std::min(lo, rlo);
            hi = std::max(hi, rhi);
        }
    }
    if (hi - lo < order) hi = lo + order;
    const int len = hi - lo;

    // Requirements become checkable once their last coordinate is placed.
    std::vector<std::vector<const Requirement*>> due(static_cast<std::size_t>(len));
    for (const auto& r : norm) {
        int rhi = r.any_of.front().end();
        for (const auto& c : r.any_of) rhi = std::max(rhi, c.end());
        due[static_cast<std::size_t>(rhi - lo - 1)].push_back(&r);
    }

    Segment seg{lo, Word(static_cast<std::size_t>(len), 0)};
    std::unordered_set<std::string> dead;
    const std::size_t memo_width = static_cast<std::size_t>(window - 1);

    auto check_at = [&](int i) -> bool {
        const Word& w = seg.symbols;
        if (!lang_.is_full_shift()) {
            if (i + 1 == order) {
                if (!lang_.vertex_ok(word_code(std::span<const Symbol>(w.data(), static_cast<std::size_t>(order)), k)))
                    return false;
            } else if (i >= order) {
                auto blk = std::span<const Symbol>(w.data() + (i - order), static_cast<std::size_t>(order + 1));
                if (!lang_.edge_ok(word_code(blk, k))) return false;
            }
        }
        for (const Requirement* r : due[static_cast<std::size_t>(i)]) {
            bool hit = false;
            for (const auto& c : r->any_of) {
                bool ok = true;
                for (std::size_t j = 0; j < c.word.size() && ok; ++j)
                    ok = w[static_cast<std::size_t>(c.anchor - lo) + j] == c.word[j];
                if (ok) {
                    hit = true;
                    break;
                }
            }
            if (hit == r->negate) return false;
        }
        return true;
    };

    auto key_of = [&](int i) {
        std::size_t from = static_cast<std::size_t>(i) > memo_width ? static_cast<std::size_t>(i) - memo_width : 0;
        std::string key(reinterpret_cast<const char*>(seg.symbols.data() + from), static_cast<std::size_t>(i) - from);
        key.push_back(static_cast<char>(i & 0xff));
        key.push_back(static_cast<char>((i >> 8) & 0xff));
        key.push_back(static_cast<char>((i >> 16) & 0xff));
        return key;
    };

    auto dfs = [&](auto&& self, int i) -> bool {
        if (i == len) return true;
        std::string key = key_of(i);
        if (dead.count(key)) return false;
        for (int s = 0; s < k; ++s) {
            seg.symbols[static_cast<std::size_t>(i)] = static_cast<Symbol>(s);
            if (check_at(i) && self(self, i + 1)) return true;
        }
        dead.insert(std::move(key));
        return false;
    };
    if (!dfs(dfs, 0)) return std::nullopt;
    return seg;
}

std::optional<Segment> feasible_word(const SubshiftSpec& spec, const std::vector<Requirement>& reqs) {
    if (spec.is_generator()) throw UnsupportedSpec("feasible_word needs a full shift or SFT; use orbit-sample mode");
    return FeasibilityEngine(spec).solve(reqs);
}

// ---------------------------------------------------------------- generation

namespace {

Segment generate_from_generator(const SubshiftSpec& spec, int a, int b) {
    const auto& g = std::get<Generator>(spec.kind);
    Segment seg{a, Word(static_cast<std::size_t>(b - a), 0)};
    if (g.name == "constant") {
        std::fill(seg.symbols.begin(), seg.symbols.end(), static_cast<Symbol>(g.params[0]));
    } else if (g.name == "periodic") {
        const int p = static_cast<int>(g.word.size());
        for (int i = a; i < b; ++i) seg.symbols[static_cast<std::size_t>(i - a)] = g.word[static_cast<std::size_t>(((i % p) + p) % p)];
    } else {
        // tame: p vanishes on negative coordinates
        if (b > 0) {
            TameExample ex = build_tame_example(b);
            for (int i = std::max(a, 0); i < b; ++i) seg.symbols[static_cast<std::size_t>(i - a)] = ex.p[static_cast<std::size_t>(i)];
        }
    }
    return seg;
}

}  // namespace

Segment generate_segment(const SubshiftSpec& spec, int a, int b, std::uint64_t seed) {
    if (b <= a) throw InvalidModel("generate_segment needs b > a");
    if (spec.is_generator()) return generate_from_generator(spec, a, b);
    Language lang(spec);
    if (lang.empty()) throw EmptyLanguage("the SFT has no bi-infinite points");
    const int k = lang.alphabet_size();
    const int order = lang.order();
    const int len = b - a;
    std::mt19937_64 rng(seed);
    const auto& verts = lang.essential_vertices();
    std::uniform_int_distribution<std::size_t> pick(0, verts.size() - 1);
    Word w = word_from_code(verts[pick(rng)], order, k);
    const std::uint64_t kk = static_cast<std::uint64_t>(k);
    const std::uint64_t nv = ipow(kk, order);
    std::uint64_t state = word_code(w, k);
    while (static_cast<int>(w.size()) < len) {
        std::vector<Symbol> next;
        for (int s = 0; s < k; ++s)
            if (lang.edge_ok(state * kk + static_cast<std::uint64_t>(s))) next.push_back(static_cast<Symbol>(s));
        std::uniform_int_distribution<std::size_t> choose(0, next.size() - 1);
        Symbol s = next[choose(rng)];
        w.push_back(s);
        state = (state * kk + s) % nv;
    }
    w.resize(static_cast<std::size_t>(len));
    return {a, std::move(w)};
}

// ---------------------------------------------------------------- partitions

int Partition::label_of(std::span<const Symbol> w) const {
    return labels[static_cast<std::size_t>(word_code(w, alphabet))];
}

namespace {

std::vector<Word> admissible_words(const SubshiftSpec& spec, int depth) {
    if (spec.is_generator()) {
        std::vector<Word> all;
        const std::uint64_t n = ipow(static_cast<std::uint64_t>(spec.alphabet.size), depth);
        for (std::uint64_t c = 0; c < n; ++c) all.push_back(word_from_code(c, depth, spec.alphabet.size));
        return all;
    }
    return Language(spec).words(depth);
}

}  // namespace

Partition Partition::symbol_partition(const SubshiftSpec& spec) {
    Partition p;
    p.alphabet = spec.alphabet.size;
    p.depth = 1;
    p.num_labels = spec.alphabet.size;
    p.labels.assign(static_cast<std::size_t>(p.alphabet), -1);
    for (const auto& w : admissible_words(spec, 1)) p.labels[w[0]] = w[0];
    return p;
}

Partition Partition::trivial(const SubshiftSpec& spec) {
    Partition p;
    p.alphabet = spec.alphabet.size;
    p.depth = 1;
    p.num_labels = 1;
    p.labels.assign(static_cast<std::size_t>(p.alphabet), -1);
    for (const auto& w : admissible_words(spec, 1)) p.labels[w[0]] = 0;
    return p;
}

Partition Partition::from_labels(const SubshiftSpec& spec, int depth, const std::vector<int>& labels_of_admissible) {
    if (depth < 1) throw InvalidModel("partition depth must be >= 1");
    const std::uint64_t n = ipow(static_cast<std::uint64_t>(spec.alphabet.size), depth);
    if (n > (std::uint64_t{1} << 22)) throw DepthCapExceeded("partition depth too large");
    auto words = admissible_words(spec, depth);
    if (words.size() != labels_of_admissible.size())
        throw InvalidModel("partition needs one label per admissible word (" + std::to_string(words.size()) + ")");
    Partition p;
    p.alphabet = spec.alphabet.size;
    p.depth = depth;
    p.labels.assign(static_cast<std::size_t>(n), -1);
    int max_label = -1;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (labels_of_admissible[i] < 0) throw InvalidModel("partition labels must be nonnegative");
        p.labels[static_cast<std::size_t>(word_code(words[i], p.alphabet))] = labels_of_admissible[i];
        max_label = std::max(max_label, labels_of_admissible[i]);
    }
    p.num_labels = max_label + 1;
    return p;
}

}  // namespace combind
