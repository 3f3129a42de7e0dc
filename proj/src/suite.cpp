#include "mslant/suite.hpp"

#include <algorithm>
#include <cmath>

#include "mslant/errors.hpp"
#include "mslant/induced.hpp"

namespace mslant {

namespace {

constexpr double kFrameTol = 1e-10;
constexpr double kExpectedCosTol = 1e-8;
constexpr std::uint64_t kFrameStream = 0x6672616d6573ULL;
constexpr std::uint64_t kAngleRelationStream = 0x72656c6174696f6eULL;

bool requested(const Scenario& s, std::string_view check) {
    return s.checks.empty() || std::find(s.checks.begin(), s.checks.end(), check) != s.checks.end();
}

void check_structure(const ResolvedScenario& s, VerificationReport& report) {
    const double tol = kDefaultStructureTol;
    report.merge(validate_structure(s.J.base, tol, 100, s.source.sampling.seed));
    if (s.J.parallel()) return;
    // A point-dependent operator must satisfy the polynomial at every point.
    for (const auto& x : sample_points(s.immersion, s.source.sampling)) {
        const auto Jx = StructureOperator::metallic(s.J.at(x), s.params);
        report.record("structure.field_identity", "J(x)^2 = pJ(x) + qI", polynomial_residual(Jx), tol);
    }
}

void check_frames(const ResolvedScenario& s, VerificationReport& report) {
    const Immersion& f = s.immersion;
    const SamplingPlan& plan = s.source.sampling;
    SplitMix64 rng = SplitMix64::stream(plan.seed, kFrameStream);
    std::vector<Expr> metric_diag;
    for (const auto& e : s.source.expected.induced_metric_diag) metric_diag.push_back(parse(e, f.vars(), s.params));

    for (const auto& x : sample_points(f, plan)) {
        const FrameData fr = frame_at(f, x);
        const Eigen::Index n = fr.chart_dim();
        const Eigen::Index r = fr.codim();
        report.record("frames.tangent_orthonormal", "E^T E = I",
                      (fr.tangent_onb.transpose() * fr.tangent_onb - Eigen::MatrixXd::Identity(n, n)).norm(),
                      kFrameTol);
        report.record("frames.normal_orthonormal", "F^T F = I",
                      (fr.normal_onb.transpose() * fr.normal_onb - Eigen::MatrixXd::Identity(r, r)).norm(), kFrameTol);
        report.record("frames.complementary", "E^T F = 0", (fr.tangent_onb.transpose() * fr.normal_onb).norm(),
                      kFrameTol);
        const double scale = std::max(1.0, fr.induced_metric.norm());
        report.record("frames.gram", "R^T R = g (relative)",
                      (fr.frame_from_coords.transpose() * fr.frame_from_coords - fr.induced_metric).norm() / scale,
                      kFrameTol);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fr.induced_metric, Eigen::EigenvaluesOnly);
        report.record_flag("frames.metric_spd", "g positive definite", eig.eigenvalues().minCoeff() > 0.0);
        for (int k = 0; k < plan.dirs_per_point; ++k) {
            const Eigen::VectorXd v = random_unit_vector(rng, fr.ambient_dim());
            const Eigen::VectorXd t = fr.tangential(v);
            const Eigen::VectorXd nv = fr.normal(v);
            report.record("frames.split", "v = tan(v) + nor(v), g(tan v, nor v) = 0",
                          std::max((t + nv - v).norm(), std::abs(t.dot(nv))), kFrameTol);
        }
        if (!metric_diag.empty()) {
            Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(n, n);
            for (Eigen::Index i = 0; i < n; ++i) expected(i, i) = metric_diag[static_cast<std::size_t>(i)].evaluate(x);
            report.record("frames.expected_metric", "g = expected diagonal",
                          (fr.induced_metric - expected).cwiseAbs().maxCoeff(), kFrameTol);
        }
    }
}

const std::string* expected_cos(const Scenario& s, const std::string& name) {
    for (const auto& [d, e] : s.expected.slant_cos)
        if (d == name) return &e;
    return nullptr;
}

void check_slant(const ResolvedScenario& s, VerificationReport& report) {
    const Scenario& src = s.source;
    const StructureOperator& J = s.J.base;
    for (const auto& D : s.distributions) {
        const std::string prefix = "slant." + D.name() + ".";
        const AngleReport angles = slant_test(J, s.immersion, D, src.sampling);
        report.observe(Observation{prefix + "angle",
                                   "theta(X) = arccos(||P_D JX|| / ||JX||)",
                                   {{"theta", round_significant(angles.mean)},
                                    {"theta_min", round_significant(angles.min)},
                                    {"theta_max", round_significant(angles.max)},
                                    {"cos_theta", round_significant(std::cos(angles.mean))},
                                    {"lambda", round_significant(angles.lambda)}},
                                   std::string(to_string(angles.classification))});
        if (const std::string* e = expected_cos(src, D.name())) {
            // theta lies in [0, pi/2], so the closed form is compared up to sign.
            const double want = std::abs(parse(*e, {}, s.params).evaluate(Eigen::VectorXd(0)));
            for (double a : angles.angles)
                report.record(prefix + "expected_cos", "cos theta = closed form", std::abs(std::cos(a) - want),
                              kExpectedCosTol);
        }
        if (angles.classification != SlantClass::ProperSlant) continue;
        report.merge(slant_identities(J, s.immersion, D, angles.lambda, src.sampling));
        for (const auto& x : sample_points(s.immersion, src.sampling)) {
            const LambdaFit fit = slant_distribution_lambda(J, frame_at(s.immersion, x), D);
            report.record(prefix + "lambda_fit", "(P_D T)^2 = lambda (p P_D T + qI), lambda = cos^2",
                          std::max(fit.residual, std::abs(fit.lambda - angles.lambda)), src.sampling.tol.algebraic);
        }
    }
}

void check_angle_relation(const ResolvedScenario& s, VerificationReport& report) {
    const StructureOperator& J = s.J.base;
    const StructureOperator F = products_from_metallic(J).first;
    const SamplingPlan& plan = s.source.sampling;
    const auto points = sample_points(s.immersion, plan);
    SplitMix64 rng = SplitMix64::stream(plan.seed, kAngleRelationStream);
    for (int k = 0; k < kAngleRelationVectors; ++k) {
        const FrameData fr = frame_at(s.immersion, points[static_cast<std::size_t>(k) % points.size()]);
        const Eigen::VectorXd X = fr.tangent_onb * random_unit_vector(rng, fr.chart_dim());
        const AngleRelation rel = pointwise_angle_relation(J, F, fr, X);
        report.record("angle_relation.pointwise",
                      "(gap^2/4) |X|^2 sin^2 theta_F = (p g(JX,X) + q |X|^2) sin^2 theta_J", rel.residual,
                      plan.tol.algebraic);
    }
    if (!s.source.semi_slant) return;
    const DistributionSpec& D2 = s.distribution(s.source.semi_slant->second);
    const AngleReport theta = slant_test(J, s.immersion, D2, plan);
    const AngleReport vartheta = slant_test(F, s.immersion, D2, plan);
    const AnglePrediction pred = theorem_angle_relation(theta.mean, vartheta.mean, s.params);
    report.observe(Observation{"angle_relation.theorem",
                               "sin theta = (gap / (2 sigma)) sin vartheta",
                               {{"theta", round_significant(theta.mean)},
                                {"vartheta", round_significant(vartheta.mean)},
                                {"observed_sin", round_significant(pred.observed_sin)},
                                {"predicted_sin", round_significant(pred.predicted_sin)},
                                {"discrepancy", round_significant(pred.discrepancy)}},
                               "reported only; the stated relation does not follow from the pointwise identity"});
}

SamplingPlan extrinsic_plan(const Scenario& s) {
    SamplingPlan plan = s.sampling;
    plan.point_count = std::min(plan.point_count, s.extrinsic_points);
    plan.dirs_per_point = std::min(plan.dirs_per_point, s.extrinsic_pairs);
    return plan;
}

}  // namespace

VerificationReport run_suite(const ResolvedScenario& s) {
    const Scenario& src = s.source;
    VerificationReport report(src.name);
    report.set_seed(src.sampling.seed);

    check_structure(s, report);
    if (!report.passed()) return report;

    const SamplingPlan& plan = src.sampling;
    const SamplingPlan xplan = extrinsic_plan(src);
    const DistributionSpec* D1 = src.semi_slant ? &s.distribution(src.semi_slant->first) : nullptr;
    const DistributionSpec* D2 = src.semi_slant ? &s.distribution(src.semi_slant->second) : nullptr;

    if (requested(src, "frames")) check_frames(s, report);
    if (requested(src, "theorem1")) report.merge(verify_theorem1(s.J.base, s.immersion, plan));
    if (requested(src, "slant")) check_slant(s, report);
    if (requested(src, "semi_slant") && D1) report.merge(semi_slant_check(s.J.base, s.immersion, *D1, *D2, plan));
    if (requested(src, "angle_relation")) check_angle_relation(s, report);
    if (requested(src, "extrinsic")) report.merge(verify_extrinsic(s.immersion, s.J, xplan));
    if (requested(src, "derivatives")) report.merge(verify_derivative_props(s.immersion, s.J, xplan));
    if (requested(src, "brackets")) report.merge(verify_bracket_props(s.immersion, s.J, xplan));
    if (requested(src, "integrability")) {
        if (D1) report.merge(integrability_checks(s.immersion, s.J, *D1, *D2, xplan));
        for (const auto& D : s.distributions)
            if (&D != D1 && &D != D2) report.merge(bracket_test(s.immersion, D, xplan));
    }
    if (requested(src, "mixed_geodesic") && D1) report.merge(mixed_geodesic_check(s.immersion, s.J, *D1, *D2, xplan));
    return report;
}

int exit_code(const VerificationReport& report) { return report.passed() ? 0 : 1; }

}  // namespace mslant
