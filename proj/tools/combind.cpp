// combind command line: one command per invocation, JSON report out.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "combind/cli.hpp"
#include "combind/errors.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    return static_cast<bool>(f);
}

int emit(const combind::RunResult& res, const std::string& out, const std::string& csv) {
    const auto text = combind::dump_report(res.report);
    if (out.empty()) {
        std::cout << text;
    } else if (!write_file(out, text)) {
        std::cerr << "cannot write " << out << "\n";
        return combind::kExitConfigError;
    }
    if (!csv.empty() && !write_file(csv, res.csv)) {
        std::cerr << "cannot write " << csv << "\n";
        return combind::kExitConfigError;
    }
    if (res.report.contains("error")) std::cerr << "combind: " << res.report["error"].get<std::string>() << "\n";
    return res.exit_code;
}

combind::RunResult config_error(const std::string& command, const std::string& message) {
    combind::RunConfig bad;
    bad.command = command;
    auto res = combind::run(bad);
    res.exit_code = combind::kExitConfigError;
    res.report["status"] = "config_error";
    res.report["exit_code"] = combind::kExitConfigError;
    res.report["result"] = combind::io::Json::object();
    res.report["error"] = message;
    res.csv.clear();
    return res;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"combind: combinatorial independence, entropy and l1 tools"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string config_path, out_path, csv_path;
    std::optional<std::uint64_t> seed, budget;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "report path (default stdout)");
    app.add_option("--csv", csv_path, "CSV path for tabular output");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--budget", budget, "search budget cap");

    const char* names[] = {"entropy", "independence", "shatter", "l1", "example"};
    for (const char* n : names) app.add_subcommand(n, std::string("run the ") + n + " command");
    auto* verify = app.add_subcommand("verify", "run a checker suite");
    std::string suite;
    std::optional<int> vn, vk;
    verify->add_option("suite", suite, "sauer | cover-bound | density-lemma | separated");
    verify->add_option("--n", vn, "number of coordinates");
    verify->add_option("--k", vk, "alphabet size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : combind::kExitConfigError;
    }

    std::string command;
    if (!app.get_subcommands().empty()) command = app.get_subcommands().front()->get_name();

    combind::RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream f(config_path, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        try {
            cfg = combind::parse_run_config(ss.str());
        } catch (const combind::ConfigError& e) {
            return emit(config_error(command, e.what()), out_path, csv_path);
        }
    }
    if (!command.empty()) {
        if (!cfg.command.empty() && cfg.command != command)
            return emit(config_error(command, "config is for command \"" + cfg.command + "\""), out_path, csv_path);
        cfg.command = command;
    }
    if (cfg.command.empty()) return emit(config_error("", "no command given"), out_path, csv_path);
    if (cfg.command == "verify" && !suite.empty()) {
        if (!cfg.suite.empty() && cfg.suite != suite)
            return emit(config_error(command, "config is for suite \"" + cfg.suite + "\""), out_path, csv_path);
        cfg.suite = suite;
    }
    if (vn) cfg.params["n"] = *vn;
    if (vk) cfg.params["k"] = *vk;
    if (seed) cfg.seed = *seed;
    if (budget) cfg.budget = *budget;
    return emit(combind::run(cfg), out_path, csv_path);
}
