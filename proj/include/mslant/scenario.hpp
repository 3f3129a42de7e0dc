#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mslant/extrinsic.hpp"
#include "mslant/immersion.hpp"
#include "mslant/metallic.hpp"
#include "mslant/sampling.hpp"
#include "mslant/slant.hpp"

namespace mslant {

// How the ambient structure is given in a scenario file. Entries are
// constant expressions (so "sigma", "sigma_bar", "2", "phi" all work).
struct StructureSpec {
    enum class Kind { Diagonal, Matrix, Product };
    Kind kind = Kind::Diagonal;
    std::vector<std::string> diagonal;
    std::vector<std::vector<std::string>> matrix;  // rows; Matrix holds J, Product holds F
    Branch branch = Branch::Plus;
    std::optional<std::string> scale;  // point-dependent factor over the chart variables
};

struct DistributionDef {
    std::string name;
    DistributionSpec::Kind kind = DistributionSpec::Kind::Coordinates;
    std::vector<int> coordinates;
    std::vector<std::vector<std::string>> fields;
};

struct ExpectedValues {
    // Distribution name -> closed-form cos(theta) over the metallic constants.
    std::vector<std::pair<std::string, std::string>> slant_cos;
    // Diagonal of the induced metric over the chart variables.
    std::vector<std::string> induced_metric_diag;
};

inline constexpr std::string_view kCheckOrder[] = {
    "structure", "frames",     "theorem1",    "slant",    "semi_slant",   "angle_relation",
    "extrinsic", "derivatives", "brackets", "integrability", "mixed_geodesic"};

struct Scenario {
    std::string name;
    int p = 1;
    int q = 1;
    int ambient_dim = 0;
    StructureSpec structure;
    std::vector<std::string> vars;
    std::vector<std::string> components;
    ChartBox box;
    std::vector<DistributionDef> distributions;
    std::optional<std::pair<std::string, std::string>> semi_slant;  // invariant, slant
    std::vector<std::string> checks;                                  // empty = all, in kCheckOrder
    SamplingPlan sampling;
    // Extrinsic checks difference fields around every sample; they use at
    // most this many points and field pairs per point.
    int extrinsic_points = 100;
    int extrinsic_pairs = 20;
    ExpectedValues expected;
};

// Parsed and validated form of a scenario.
struct ResolvedScenario {
    Scenario source;
    MetallicParams params;
    StructureField J;
    Immersion immersion;
    std::vector<DistributionSpec> distributions;

    const DistributionSpec& distribution(std::string_view name) const;  // ConfigError if unknown
};

// Throws ConfigError (or ParseError / InputError from the layers below) on
// any inconsistency. Structure identities are not checked here.
ResolvedScenario resolve(const Scenario& s);

Scenario scenario_from_json(std::string_view text);
std::string scenario_to_json(const Scenario& s, int indent = 2);

// Semi-slant submanifold of R^7: f(u,t1,t2) = (u cos t1, u sin t1, u cos t2,
// u sin t2, u, t1, t2) with J = diag(s, s, sb, sb, sb, s, sb).
Scenario builtin_example1(int p, int q);

// Semi-slant submanifold of R^{3n+1}: f(u,a_1..a_n) = (u cos a_j, u sin a_j,
// a_j, u) with J = diag(s x 3n, sb).
Scenario builtin_example2(int n, int p, int q);

}  // namespace mslant
