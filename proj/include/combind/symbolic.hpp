#pragma once

// Two-sided subshifts over a finite alphabet, cylinder sets and the exact
// feasibility kernel used by every other module.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace combind {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

/// Symbols are 0..size-1; at most 256 symbols.
struct Alphabet {
    int size = 2;

    explicit Alphabet(int k = 2);
};

struct FullShift {};

/// Shift of finite type given by a list of forbidden words.
struct Sft {
    std::vector<Word> forbidden;
};

/// A deterministic point generator. Known names: "tame" (the p-sequence of the
/// tame example), "constant" (params[0] = symbol), "periodic" (word repeated).
struct Generator {
    std::string name;
    std::vector<long long> params;
    Word word;
};

struct SubshiftSpec {
    Alphabet alphabet;
    std::variant<FullShift, Sft, Generator> kind;

    static SubshiftSpec full_shift(int k);
    static SubshiftSpec sft(int k, std::vector<Word> forbidden);
    static SubshiftSpec generator(int k, Generator g);

    bool is_generator() const { return std::holds_alternative<Generator>(kind); }
};

/// {x : x[anchor .. anchor+|word|) = word}. The empty word is the whole space.
struct Cylinder {
    int anchor = 0;
    Word word;

    int end() const { return anchor + static_cast<int>(word.size()); }
    Cylinder shifted(int t) const { return {anchor + t, word}; }
};

/// Finite union of cylinders. No cylinders means the empty set.
struct BorelLikeSet {
    std::vector<Cylinder> cylinders;

    static BorelLikeSet single(Cylinder c) { return {{std::move(c)}}; }
    static BorelLikeSet everything() { return {{Cylinder{0, {}}}}; }
    bool is_empty_syntactically() const { return cylinders.empty(); }
    BorelLikeSet shifted(int t) const;
    /// Smallest [lo, hi) containing every cylinder; {0,0} when all words are empty.
    std::pair<int, int> span() const;
};

struct SetTuple {
    std::vector<BorelLikeSet> components;

    int arity() const { return static_cast<int>(components.size()); }
};

/// Finite set of group elements, kept sorted and unique.
struct Window {
    std::vector<int> elements;

    Window() = default;
    explicit Window(std::vector<int> elems);
    static Window interval(int a, int b);

    int size() const { return static_cast<int>(elements.size()); }
    bool empty() const { return elements.empty(); }
    Window shifted(int t) const;
};

/// A finite segment x[start .. start+|symbols|).
struct Segment {
    int start = 0;
    Word symbols;

    int end() const { return start + static_cast<int>(symbols.size()); }
    Symbol at(int pos) const { return symbols[static_cast<std::size_t>(pos - start)]; }
    bool covers(int lo, int hi) const { return lo >= start && hi <= end(); }
};

/// Membership requirement on a point: x lies in the union of `any_of`, or, when
/// `negate` is set, avoids all of them. Cylinders are in absolute coordinates.
struct Requirement {
    std::vector<Cylinder> any_of;
    bool negate = false;

    static Requirement symbol_at(int pos, Symbol s) { return {{Cylinder{pos, {s}}}, false}; }
    static Requirement in(const BorelLikeSet& set, int shift = 0);
    static Requirement avoid(const BorelLikeSet& set, int shift = 0);
};

bool matches(const Cylinder& c, const Segment& seg);
bool satisfies(const Requirement& r, const Segment& seg);

/// Base-k code of a word; preserves lexicographic order among equal lengths.
std::uint64_t word_code(std::span<const Symbol> w, int k);
Word word_from_code(std::uint64_t code, int length, int k);
std::uint64_t ipow(std::uint64_t base, int exp);

/// Digit string for k <= 10 ("0101"); throws for larger alphabets.
std::string word_to_string(const Word& w);
Word word_from_string(const std::string& s);

/// Essential transfer graph of a full shift or SFT. Vertices are admissible
/// blocks of length `order()`; only vertices lying on bi-infinite paths are
/// kept, so any path through the graph extends to a point of X.
class Language {
public:
    explicit Language(const SubshiftSpec& spec);

    int alphabet_size() const { return k_; }
    int order() const { return order_; }
    bool empty() const { return empty_; }
    bool is_full_shift() const { return full_; }
    bool vertex_ok(std::uint64_t code) const;
    /// Code of an (order+1)-block.
    bool edge_ok(std::uint64_t code) const;
    /// Whether the word occurs in some point of X.
    bool contains(std::span<const Symbol> w) const;
    /// All words of the given length occurring in X, in lexicographic order.
    std::vector<Word> words(int length, std::size_t cap = std::size_t{1} << 22) const;
    const std::vector<std::uint64_t>& essential_vertices() const { return vertices_sorted_; }

private:
    int k_;
    int order_ = 1;
    bool full_ = false;
    bool empty_ = false;
    std::unordered_set<std::uint64_t> vertices_;
    std::unordered_set<std::uint64_t> edges_;
    std::vector<std::uint64_t> vertices_sorted_;
};

/// Exact decision kernel: does some point of X satisfy all requirements? The
/// witness returned is the lexicographically least segment over the
/// constrained range.
class FeasibilityEngine {
public:
    explicit FeasibilityEngine(const SubshiftSpec& spec);
    explicit FeasibilityEngine(Language language);

    std::optional<Segment> solve(const std::vector<Requirement>& reqs) const;
    const Language& language() const { return lang_; }

private:
    Language lang_;
};

/// Throws UnsupportedSpec for generator specs.
std::optional<Segment> feasible_word(const SubshiftSpec& spec, const std::vector<Requirement>& reqs);

/// Deterministic in (spec, range, seed). Throws EmptyLanguage when the SFT has
/// no bi-infinite points.
Segment generate_segment(const SubshiftSpec& spec, int a, int b, std::uint64_t seed);

/// Depth-r partition anchored at `anchor`: every admissible r-word carries a
/// label in [0, num_labels); inadmissible words carry -1.
struct Partition {
    int alphabet = 2;
    int anchor = 0;
    int depth = 1;
    int num_labels = 1;
    std::vector<int> labels;  // indexed by word_code, size k^depth

    int label_of(std::span<const Symbol> w) const;
    /// Symbol at position 0.
    static Partition symbol_partition(const SubshiftSpec& spec);
    static Partition trivial(const SubshiftSpec& spec);
    /// labels[i] applies to the i-th admissible word of length depth in lexicographic order.
    static Partition from_labels(const SubshiftSpec& spec, int depth, const std::vector<int>& labels_of_admissible);
};

}  // namespace combind
