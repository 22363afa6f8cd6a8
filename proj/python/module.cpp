#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "combind/cli.hpp"
#include "combind/entropy.hpp"
#include "combind/errors.hpp"
#include "combind/examples.hpp"
#include "combind/l1.hpp"
#include "combind/shattering.hpp"

namespace py = pybind11;
using namespace combind;

PYBIND11_MODULE(_combind, m) {
    m.doc() = "combind core bindings";

    py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError");

    m.def(
        "run_json",
        [](const std::string& config_text) {
            const auto cfg = parse_run_config(config_text);
            RunResult res;
            {
                py::gil_scoped_release release;
                res = run(cfg);
            }
            return py::make_tuple(res.exit_code, dump_report(res.report), res.csv);
        },
        py::arg("config_text"), "Runs one command; returns (exit_code, report_json, csv).");

    m.def(
        "km_threshold", [](int n, int k, int t) { return km_threshold(n, k, t).str(); }, py::arg("n"), py::arg("k"),
        py::arg("t"), "Karpovsky-Milman threshold as a decimal string.");

    m.def(
        "largest_shattered_subset",
        [](int n, int k, const std::vector<std::vector<int>>& rows) {
            return largest_shattered_subset(PatternSet::from_rows(n, k, rows));
        },
        py::arg("n"), py::arg("k"), py::arg("rows"));

    m.def(
        "cover_number",
        [](int n, int k, const std::vector<std::vector<int>>& rows) {
            return cover_number(PatternSet::from_rows(n, k, rows)).value;
        },
        py::arg("n"), py::arg("k"), py::arg("rows"));

    m.def(
        "l1_constant",
        [](const std::vector<std::vector<double>>& values, std::vector<double> weights) {
            FunctionFamily fam;
            fam.values = values;
            const auto points = values.empty() ? 0 : values.front().size();
            if (weights.empty() && points > 0) weights.assign(points, 1.0 / static_cast<double>(points));
            fam.weights = std::move(weights);
            for (std::size_t i = 0; i < values.size(); ++i) fam.keys.push_back(static_cast<int>(i));
            fam.validate();
            return l1_constant(fam).c_star;
        },
        py::arg("values"), py::arg("weights") = std::vector<double>{});

    m.def("golden_entropy_rate", [] { return markov_entropy_rate(golden_mean_system().second); });
}
