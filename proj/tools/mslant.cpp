#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mslant/errors.hpp"
#include "mslant/scenario.hpp"
#include "mslant/suite.hpp"

namespace {

using mslant::ConfigError;

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::string out;
    bool json = false;
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("MSLANT_SEED");
    if (!v || !*v) return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long seed = std::stoull(v, &used, 0);
        if (used != std::string_view(v).size()) throw std::invalid_argument(v);
        return seed;
    } catch (const std::exception&) {
        throw ConfigError(std::string("MSLANT_SEED is not an unsigned integer: ") + v);
    }
}

// Flag beats environment beats scenario file.
void apply_overrides(mslant::Scenario& s, const RunOptions& opt) {
    if (opt.seed)
        s.sampling.seed = *opt.seed;
    else if (const auto seed = env_seed())
        s.sampling.seed = *seed;
    if (opt.tol) s.sampling.tol.algebraic = *opt.tol;
}

void print_summary(const mslant::VerificationReport& r) {
    std::printf("scenario %s (seed %llu)\n", r.scenario().c_str(), static_cast<unsigned long long>(r.seed()));
    for (const auto& c : r.checks())
        std::printf("  %s  %-48s max %.3e  tol %.1e  n=%zu\n", c.passed ? "pass" : "FAIL", c.name.c_str(),
                    c.max_residual, c.tolerance, c.samples);
    for (const auto& o : r.observations()) {
        std::printf("  obs   %s:", o.name.c_str());
        for (const auto& [k, v] : o.values) std::printf(" %s=%.12g", k.c_str(), v);
        if (!o.note.empty()) std::printf("  [%s]", o.note.c_str());
        std::printf("\n");
    }
    std::printf("overall: %s\n", r.passed() ? "PASS" : "FAIL");
}

int run(mslant::Scenario s, const RunOptions& opt) {
    apply_overrides(s, opt);
    const mslant::ResolvedScenario resolved = mslant::resolve(s);
    const mslant::VerificationReport report = mslant::run_suite(resolved);
    const std::string stamp = utc_timestamp();
    if (!opt.out.empty()) {
        std::ofstream out(opt.out, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + opt.out + "'");
        out << report.to_json(stamp) << '\n';
    }
    if (opt.json)
        std::cout << report.to_json(stamp) << '\n';
    else
        print_summary(report);
    return mslant::exit_code(report);
}

int run_angle(mslant::Scenario s, const std::string& name, const RunOptions& opt) {
    apply_overrides(s, opt);
    const mslant::ResolvedScenario r = mslant::resolve(s);
    const auto& D = r.distribution(name);
    const mslant::AngleReport a = mslant::slant_test(r.J.base, r.immersion, D, r.source.sampling);
    const auto rs = [](double v) { return mslant::round_significant(v); };
    if (opt.json) {
        nlohmann::ordered_json j = {{"distribution", name},
                                    {"classification", std::string(mslant::to_string(a.classification))},
                                    {"theta", rs(a.mean)},
                                    {"theta_min", rs(a.min)},
                                    {"theta_max", rs(a.max)},
                                    {"cos_theta", rs(std::cos(a.mean))},
                                    {"lambda", rs(a.lambda)},
                                    {"samples", a.angles.size()}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::printf("%s: %s theta=%.12g rad cos=%.12g spread=%.3e (n=%zu)\n", name.c_str(),
                    std::string(mslant::to_string(a.classification)).c_str(), rs(a.mean), rs(std::cos(a.mean)),
                    a.max_deviation, a.angles.size());
    }
    return 0;
}

void add_run_options(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("--seed", opt.seed, "Sampling seed (overrides MSLANT_SEED and the scenario)");
    cmd->add_option("--tol", opt.tol, "Algebraic tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--out", opt.out, "Write the JSON report to this file");
    cmd->add_flag("--json", opt.json, "Print the JSON report on stdout");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Checks metallic structures and slant geometry on parametric submanifolds"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mslant::kVersion));

    RunOptions opt;
    std::string scenario_path;

    auto* verify = app.add_subcommand("verify", "Run the suite on a scenario file");
    verify->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    add_run_options(verify, opt);

    int which = 1, p = 1, q = 1, n = 1;
    bool print_scenario = false;
    auto* example = app.add_subcommand("example", "Run a built-in scenario");
    example->add_option("--which", which, "Built-in example")->required()->check(CLI::IsMember({1, 2}));
    example->add_option("--p", p, "Metallic parameter p")->required();
    example->add_option("--q", q, "Metallic parameter q")->required();
    example->add_option("--n", n, "Block count for example 2");
    example->add_flag("--print-scenario", print_scenario, "Print the scenario JSON instead of running it");
    add_run_options(example, opt);

    std::string distribution;
    auto* angle = app.add_subcommand("angle", "Slant angle of one distribution");
    angle->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    angle->add_option("--distribution", distribution, "Distribution name")->required();
    angle->add_option("--seed", opt.seed, "Sampling seed");
    angle->add_flag("--json", opt.json, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : mslant::kExitConfigError;
    }

    try {
        if (*verify) return run(mslant::scenario_from_json(read_file(scenario_path)), opt);
        if (*angle) return run_angle(mslant::scenario_from_json(read_file(scenario_path)), distribution, opt);
        mslant::Scenario s = which == 1 ? mslant::builtin_example1(p, q) : mslant::builtin_example2(n, p, q);
        if (print_scenario) {
            std::cout << mslant::scenario_to_json(s) << '\n';
            return 0;
        }
        return run(std::move(s), opt);
    } catch (const mslant::StructureError& e) {
        std::cerr << "structure: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return mslant::kExitConfigError;
    }
}
