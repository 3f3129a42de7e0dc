#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mslant {

inline constexpr std::string_view kVersion = "1.0.0";

// One asserted identity: the maximum residual seen over all samples.
struct CheckResult {
    std::string name;
    std::string tag;  // which identity / equation family the residual belongs to
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    std::size_t samples = 0;
};

// A reported (never asserted) quantity, e.g. a predicted-versus-observed pair.
struct Observation {
    std::string name;
    std::string tag;
    std::vector<std::pair<std::string, double>> values;
    std::string note;
};

class VerificationReport {
public:
    VerificationReport() = default;
    explicit VerificationReport(std::string scenario) : scenario_(std::move(scenario)) {}

    // Folds one residual sample into the named check, creating it on first use.
    // Non-finite residuals always fail.
    void record(std::string_view name, std::string_view tag, double residual, double tolerance);

    // Records a boolean criterion as residual 0 (holds) or 1 (violated) with tolerance 0.5.
    void record_flag(std::string_view name, std::string_view tag, bool holds);

    void observe(Observation observation);

    // Appends every check of `other`, folding checks that share a name.
    void merge(const VerificationReport& other);

    bool passed() const;
    const std::vector<CheckResult>& checks() const noexcept { return checks_; }
    const std::vector<Observation>& observations() const noexcept { return observations_; }
    const CheckResult* find(std::string_view name) const;
    const Observation* find_observation(std::string_view name) const;

    const std::string& scenario() const noexcept { return scenario_; }
    void set_scenario(std::string name) { scenario_ = std::move(name); }
    std::uint64_t seed() const noexcept { return seed_; }
    void set_seed(std::uint64_t seed) noexcept { seed_ = seed; }

    // JSON document; the timestamp field is present only when `timestamp` is set.
    std::string to_json(std::optional<std::string> timestamp = std::nullopt, int indent = 2) const;
    static VerificationReport from_json(std::string_view text);

private:
    std::string scenario_;
    std::uint64_t seed_ = 0;
    std::vector<CheckResult> checks_;
    std::vector<Observation> observations_;
};

// Rounds to a fixed number of significant digits so reported angles are
// stable across platforms.
double round_significant(double value, int digits = 12);

}  // namespace mslant
