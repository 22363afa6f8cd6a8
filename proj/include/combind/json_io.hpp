#pragma once

// JSON conversion of the model types used by run configurations and reports.
// Parse errors raise ConfigError with the offending key in the message.

#include <json.hpp>
#include <string>
#include <vector>

#include "combind/entropy.hpp"
#include "combind/independence.hpp"
#include "combind/l1.hpp"
#include "combind/measure.hpp"
#include "combind/shattering.hpp"
#include "combind/symbolic.hpp"

namespace combind::io {

using Json = nlohmann::ordered_json;

/// "0110" for k <= 10, or an array of ints.
Word parse_word(const Json& j, int k);
Json word_json(const Word& w);

/// {"alphabet": k, "kind": "full" | "sft" | "golden" | "generator", ...}
SubshiftSpec parse_spec(const Json& j);
Json spec_json(const SubshiftSpec& spec);

/// {"kind": "bernoulli" | "markov" | "parry" | "empirical", ...}
MeasureModel parse_measure(const Json& j, const SubshiftSpec& spec);

/// {"kind": "symbol" | "trivial" | "labels", ...}
Partition parse_partition(const Json& j, const SubshiftSpec& spec);

/// {"members": [set, ...]} or {"from_partition": partition}
Cover parse_cover(const Json& j, const SubshiftSpec& spec);

/// {"anchor": a, "word": w}
Cylinder parse_cylinder(const Json& j, int k);
/// An array of cylinders, or the string "everything".
BorelLikeSet parse_set(const Json& j, int k);
Json set_json(const BorelLikeSet& s);
SetTuple parse_tuple(const Json& j, int k);

/// {"interval": [a, b]} or {"elements": [...]}
Window parse_window(const Json& j);
/// An array of windows, or {"sizes": [n, ...]} meaning [0, n) for each n.
std::vector<Window> parse_windows(const Json& j);

/// {"kind": "everything" | "fixed" | "per_element", ...}
ConstraintModel parse_constraint(const Json& j, int k);
ConstraintFamily parse_family(const Json& j);

/// {"n": n, "k": k, "rows": [[...], ...]}
PatternSet parse_patterns(const Json& j);

/// {"weights": [...], "keys": [...], "values": [[...], ...]}
FunctionFamily parse_function_family(const Json& j);
/// {"alphabet": k, "depth": r, "table": [...]}
GermFunction parse_germ(const Json& j);
Interval parse_interval(const Json& j);

Json certificate_json(const IndependenceCertificate& cert);
Json density_json(const DensityReport& r);

/// Finite doubles as numbers; infinities as the strings "inf" / "-inf".
Json number(double v);

}  // namespace combind::io
