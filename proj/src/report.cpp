#include "mslant/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "mslant/errors.hpp"

namespace mslant {

using nlohmann::ordered_json;

void VerificationReport::record(std::string_view name, std::string_view tag, double residual,
                                double tolerance) {
    auto it = std::find_if(checks_.begin(), checks_.end(),
                           [&](const CheckResult& c) { return c.name == name; });
    if (it == checks_.end()) {
        checks_.push_back(CheckResult{std::string(name), std::string(tag), 0.0, tolerance, true, 0});
        it = std::prev(checks_.end());
    }
    it->tolerance = tolerance;
    ++it->samples;
    if (!std::isfinite(residual)) {
        it->max_residual = residual;
        it->passed = false;
        return;
    }
    if (std::isfinite(it->max_residual)) it->max_residual = std::max(it->max_residual, residual);
    it->passed = it->passed && it->max_residual <= tolerance;
}

void VerificationReport::record_flag(std::string_view name, std::string_view tag, bool holds) {
    record(name, tag, holds ? 0.0 : 1.0, 0.5);
}

void VerificationReport::observe(Observation observation) {
    observations_.push_back(std::move(observation));
}

void VerificationReport::merge(const VerificationReport& other) {
    for (const auto& c : other.checks_) {
        auto it = std::find_if(checks_.begin(), checks_.end(),
                               [&](const CheckResult& mine) { return mine.name == c.name; });
        if (it == checks_.end()) {
            checks_.push_back(c);
            continue;
        }
        it->samples += c.samples;
        it->tolerance = c.tolerance;
        if (!std::isfinite(c.max_residual) || !std::isfinite(it->max_residual)) {
            it->max_residual = std::isfinite(c.max_residual) ? it->max_residual : c.max_residual;
            it->passed = false;
        } else {
            it->max_residual = std::max(it->max_residual, c.max_residual);
            it->passed = it->passed && c.passed && it->max_residual <= it->tolerance;
        }
    }
    for (const auto& o : other.observations_) observations_.push_back(o);
}

bool VerificationReport::passed() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* VerificationReport::find(std::string_view name) const {
    auto it = std::find_if(checks_.begin(), checks_.end(),
                           [&](const CheckResult& c) { return c.name == name; });
    return it == checks_.end() ? nullptr : &*it;
}

const Observation* VerificationReport::find_observation(std::string_view name) const {
    auto it = std::find_if(observations_.begin(), observations_.end(),
                           [&](const Observation& o) { return o.name == name; });
    return it == observations_.end() ? nullptr : &*it;
}

namespace {

ordered_json number_or_string(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double parse_number(const ordered_json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw InputError("report: expected number, got '" + s + "'");
}

}  // namespace

std::string VerificationReport::to_json(std::optional<std::string> timestamp, int indent) const {
    ordered_json doc;
    doc["schema"] = "mslant.report/1";
    doc["scenario"] = scenario_;
    doc["environment"] = {{"seed", seed_}, {"version", std::string(kVersion)}};
    if (timestamp) doc["environment"]["timestamp"] = *timestamp;
    doc["overall_pass"] = passed();
    auto checks = ordered_json::array();
    for (const auto& c : checks_) {
        checks.push_back({{"name", c.name},
                          {"tag", c.tag},
                          {"max_residual", number_or_string(c.max_residual)},
                          {"tolerance", c.tolerance},
                          {"passed", c.passed},
                          {"samples", c.samples}});
    }
    doc["checks"] = std::move(checks);
    auto observations = ordered_json::array();
    for (const auto& o : observations_) {
        ordered_json values = ordered_json::object();
        for (const auto& [k, v] : o.values) values[k] = number_or_string(v);
        ordered_json entry = {{"name", o.name}, {"tag", o.tag}, {"values", std::move(values)}};
        if (!o.note.empty()) entry["note"] = o.note;
        observations.push_back(std::move(entry));
    }
    doc["observations"] = std::move(observations);
    return doc.dump(indent);
}

VerificationReport VerificationReport::from_json(std::string_view text) {
    const auto doc = ordered_json::parse(text.begin(), text.end());
    VerificationReport report(doc.at("scenario").get<std::string>());
    report.seed_ = doc.at("environment").at("seed").get<std::uint64_t>();
    for (const auto& c : doc.at("checks")) {
        report.checks_.push_back(CheckResult{c.at("name").get<std::string>(),
                                             c.at("tag").get<std::string>(),
                                             parse_number(c.at("max_residual")),
                                             c.at("tolerance").get<double>(),
                                             c.at("passed").get<bool>(),
                                             c.at("samples").get<std::size_t>()});
    }
    for (const auto& o : doc.at("observations")) {
        Observation obs{o.at("name").get<std::string>(), o.at("tag").get<std::string>(), {}, {}};
        for (const auto& [k, v] : o.at("values").items()) obs.values.emplace_back(k, parse_number(v));
        if (o.contains("note")) obs.note = o.at("note").get<std::string>();
        report.observations_.push_back(std::move(obs));
    }
    return report;
}

double round_significant(double value, int digits) {
    if (value == 0.0 || !std::isfinite(value)) return value;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    double out = 0.0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), out);
    return out;
}

}  // namespace mslant
