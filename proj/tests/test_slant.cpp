#include <gtest/gtest.h>

#include <cmath>

#include "mslant/errors.hpp"
#include "mslant/scenario.hpp"
#include "mslant/slant.hpp"
#include "support.hpp"

using namespace mslant;
using testing_support::Gen;

namespace {

const MetallicParams golden = metallic_number(1, 1);
const double kHalfPi = std::acos(-1.0) / 2;

double closed_form_cos1(const MetallicParams& m) {
    const double s = m.sigma, b = m.sigma_bar;
    return (s + 2 * b) / std::sqrt(3 * (s * s + 2 * b * b));
}

double closed_form_cos2(int n, const MetallicParams& m) {
    const double s = m.sigma, b = m.sigma_bar;
    return (n * s + b) / std::sqrt((n + 1) * (n * s * s + b * b));
}

// cos of the angle between JX and the column span of Z, by direct projection.
double projection_cos(const Eigen::MatrixXd& J, const Eigen::MatrixXd& Z, const Eigen::VectorXd& X) {
    const Eigen::VectorXd JX = J * X;
    return (testing_support::span_projector(Z) * JX).norm() / JX.norm();
}

}  // namespace

TEST(Angle, ExampleOneCoordinateDirections) {
    for (auto [p, q] : {std::pair{1, 1}, {2, 1}, {1, 2}}) {
        const auto prm = metallic_number(p, q);
        const Eigen::MatrixXd J = testing_support::example1_structure(prm);
        const Immersion f = testing_support::example1_immersion(prm);
        const Eigen::Vector3d x(2.2, 0.5, 1.3);
        const FrameData fr = frame_at(f, x);
        const Eigen::MatrixXd Z = testing_support::example1_jacobian(x[0], x[1], x[2]);
        const double theta1 = wirtinger_angle(J, fr, Z.col(0));
        EXPECT_NEAR(std::cos(theta1), projection_cos(J, Z, Z.col(0)), 1e-12);
        EXPECT_NEAR(std::cos(theta1), std::abs(closed_form_cos1(prm)), 1e-12);
        EXPECT_NEAR(wirtinger_angle(J, fr, Z.col(1)), 0.0, 1e-7);
        const auto op = StructureOperator::metallic(J, prm);
        EXPECT_NEAR(wirtinger_angle_J(op, fr, TangentVector{Z.col(0), x}), theta1, 1e-15);
    }
}

TEST(Angle, GoldenExampleOneNumericValue) {
    const Eigen::Vector3d x(1.0, 0.2, 0.9);
    const Eigen::MatrixXd Z = testing_support::example1_jacobian(x[0], x[1], x[2]);
    const Eigen::MatrixXd J = testing_support::example1_structure(golden);
    const double c = std::cos(wirtinger_angle(J, frame_at(testing_support::example1_immersion(golden), x), Z.col(0)));
    EXPECT_NEAR(c, projection_cos(J, Z, Z.col(0)), 1e-12);
    EXPECT_NEAR(c, 0.1199174, 1e-6);
}

TEST(Angle, ZeroVectorRejected) {
    const FrameData fr = frame_at(testing_support::example1_immersion(golden), Eigen::Vector3d(1, 0.5, 0.5));
    EXPECT_THROW(wirtinger_angle(testing_support::example1_structure(golden), fr, Eigen::VectorXd::Zero(7)),
                 InputError);
}

TEST(Angle, ProductStructureExampleOne) {
    const auto J = StructureOperator::metallic(testing_support::example1_structure(golden), golden);
    const auto F = products_from_metallic(J).first;
    Eigen::VectorXd d(7);
    d << 1, 1, -1, -1, -1, 1, -1;
    EXPECT_LT((F.matrix - Eigen::MatrixXd(d.asDiagonal())).norm(), 1e-14);
    const Eigen::Vector3d x(0.8, 1.0, 0.3);
    const FrameData fr = frame_at(testing_support::example1_immersion(golden), x);
    const Eigen::MatrixXd Z = testing_support::example1_jacobian(x[0], x[1], x[2]);
    const double vartheta = wirtinger_angle_F(F, fr, TangentVector{Z.col(0), x});
    EXPECT_NEAR(std::cos(vartheta), 1.0 / 3.0, 1e-12);
    // Z2 is an F eigenvector inside the tangent space.
    EXPECT_NEAR(wirtinger_angle_F(F, fr, TangentVector{Z.col(1), x}), 0.0, 1e-7);
}

TEST(Angle, PythagorasForJAndF) {
    Gen gen(51);
    for (auto [p, q] : {std::pair{1, 1}, {2, 1}, {1, 2}, {3, 5}}) {
        const auto prm = metallic_number(p, q);
        const Eigen::MatrixXd J = testing_support::example1_structure(prm);
        const Eigen::MatrixXd F = (2 * J - p * Eigen::MatrixXd::Identity(7, 7)) / prm.root_gap();
        const Immersion f = testing_support::example1_immersion(prm);
        for (int k = 0; k < 50; ++k) {
            const Eigen::Vector3d x(gen.uniform(0.6, 2.9), gen.uniform(0.1, 1.5), gen.uniform(0.1, 1.5));
            const FrameData fr = frame_at(f, x);
            const Eigen::VectorXd X = fr.jacobian * gen.vector(3);
            const Eigen::VectorXd JX = J * X, FX = F * X;
            const Eigen::VectorXd TX = fr.tangential(JX), NX = fr.normal(JX);
            EXPECT_NEAR(TX.squaredNorm() + NX.squaredNorm(), p * JX.dot(X) + q * X.squaredNorm(), 1e-9);
            EXPECT_NEAR(fr.tangential(FX).squaredNorm() + fr.normal(FX).squaredNorm(), X.squaredNorm(), 1e-10);
        }
    }
}

TEST(SlantTest, ExampleOneDistributions) {
    for (auto [p, q] : {std::pair{1, 1}, {2, 1}}) {
        const ResolvedScenario r = resolve(builtin_example1(p, q));
        const AngleReport d2 = slant_test(r.J.base, r.immersion, r.distribution("D2"), SamplingPlan{});
        EXPECT_EQ(d2.classification, SlantClass::ProperSlant);
        EXPECT_LT(d2.max_deviation, 1e-8);
        EXPECT_NEAR(std::cos(d2.mean), std::abs(closed_form_cos1(r.params)), 1e-8);
        EXPECT_EQ(d2.angles.size(), 2000u);
        const AngleReport d1 = slant_test(r.J.base, r.immersion, r.distribution("D1"), SamplingPlan{});
        EXPECT_EQ(d1.classification, SlantClass::Invariant);
        EXPECT_NEAR(d1.lambda, 1.0, 1e-12);
    }
    // sigma + 2 sigma_bar = 0 when (p, q) = (1, 2).
    const ResolvedScenario r = resolve(builtin_example1(1, 2));
    const AngleReport d2 = slant_test(r.J.base, r.immersion, r.distribution("D2"), SamplingPlan{});
    EXPECT_EQ(d2.classification, SlantClass::AntiInvariant);
    EXPECT_NEAR(d2.mean, kHalfPi, 1e-9);
}

TEST(SlantTest, ExampleTwoGrid) {
    SamplingPlan plan;
    plan.point_count = 30;
    for (int n : {1, 2, 3, 5}) {
        for (auto [p, q] : {std::pair{1, 1}, {2, 1}, {1, 2}}) {
            const ResolvedScenario r = resolve(builtin_example2(n, p, q));
            const AngleReport a = slant_test(r.J.base, r.immersion, r.distribution("D2"), plan);
            EXPECT_EQ(a.classification, SlantClass::ProperSlant);
            for (double t : a.angles) EXPECT_NEAR(std::cos(t), closed_form_cos2(n, r.params), 1e-8);
        }
    }
    EXPECT_NEAR(closed_form_cos2(1, golden), 1 / std::sqrt(6.0), 1e-15);
}

TEST(SlantTest, AntiInvariantLine) {
    const double phi = testing_support::golden();
    const Immersion line = Immersion::parse({"u"}, {"u", "phi*u"}, {{-1, 1}}, golden);
    const Eigen::MatrixXd J = Eigen::Vector2d(phi, 1 - phi).asDiagonal();
    const auto op = StructureOperator::metallic(J, golden);
    const auto D = DistributionSpec::coordinates("L", {0});
    const AngleReport a = slant_test(op, line, D, SamplingPlan{});
    EXPECT_EQ(a.classification, SlantClass::AntiInvariant);
    for (double t : a.angles) EXPECT_EQ(t, kHalfPi);
    const LambdaFit fit = slant_distribution_lambda(op, frame_at(line, Eigen::VectorXd::Constant(1, 0.3)), D);
    EXPECT_NEAR(fit.lambda, 0.0, 1e-12);
}

TEST(SlantTest, ClassificationThresholds) {
    const double tol = 1e-6;
    EXPECT_EQ(summarize_angles({0.0, 5e-7}, tol).classification, SlantClass::Invariant);
    EXPECT_EQ(summarize_angles({kHalfPi, kHalfPi - 5e-7}, tol).classification, SlantClass::AntiInvariant);
    EXPECT_EQ(summarize_angles({0.7, 0.7 + 5e-7}, tol).classification, SlantClass::ProperSlant);
    EXPECT_EQ(summarize_angles({0.7, 0.7 + 5e-6}, tol).classification, SlantClass::NotSlant);
    const AngleReport r = summarize_angles({0.5, 0.7}, tol);
    EXPECT_NEAR(r.mean, 0.6, 1e-15);
    EXPECT_NEAR(r.max_deviation, 0.1, 1e-15);
    EXPECT_NEAR(r.lambda, (std::pow(std::cos(0.5), 2) + std::pow(std::cos(0.7), 2)) / 2, 1e-15);
    EXPECT_EQ(to_string(SlantClass::ProperSlant), "proper-slant");
}

TEST(SlantTest, FrameCoefficientAndChartFieldSelectorsAgree) {
    const ResolvedScenario r = resolve(builtin_example1(1, 1));
    const std::vector<std::string>& vars = r.immersion.vars();
    auto expr = [&](const char* s) { return parse(s, vars, r.params); };
    const auto byfield = DistributionSpec::chart_fields("F", {{expr("1"), expr("0"), expr("0")}});
    SamplingPlan plan;
    plan.point_count = 20;
    const AngleReport a = slant_test(r.J.base, r.immersion, byfield, plan);
    const AngleReport b = slant_test(r.J.base, r.immersion, r.distribution("D2"), plan);
    EXPECT_NEAR(a.mean, b.mean, 1e-12);
    // First orthonormal frame vector is Z1 / |Z1| because Gram-Schmidt starts with d_u.
    const auto bycoef = DistributionSpec::frame_coefficients("C", {{expr("1"), expr("0"), expr("0")}});
    EXPECT_NEAR(slant_test(r.J.base, r.immersion, bycoef, plan).mean, b.mean, 1e-12);
    const auto dependent = DistributionSpec::chart_fields("X", {{expr("1"), expr("0"), expr("0")},
                                                               {expr("2"), expr("0"), expr("0")}});
    EXPECT_THROW(slant_test(r.J.base, r.immersion, dependent, plan), DegeneratePointError);
}

TEST(Lambda, InvariantAndSlant) {
    const ResolvedScenario r = resolve(builtin_example1(1, 1));
    const FrameData fr = frame_at(r.immersion, Eigen::Vector3d(1.3, 0.4, 0.4));
    const LambdaFit inv = slant_distribution_lambda(r.J.base, fr, r.distribution("D1"));
    EXPECT_NEAR(inv.lambda, 1.0, 1e-12);
    EXPECT_LT(inv.residual, 1e-9);
    const LambdaFit sl = slant_distribution_lambda(r.J.base, fr, r.distribution("D2"));
    const double c = closed_form_cos1(r.params);
    EXPECT_NEAR(sl.lambda, c * c, 1e-8);
    EXPECT_LT(sl.residual, 1e-9);
}

TEST(SlantIdentities, HoldOnProperSlantDistributions) {
    for (const Scenario& sc : {builtin_example1(1, 1), builtin_example1(2, 1), builtin_example2(3, 1, 2)}) {
        const ResolvedScenario r = resolve(sc);
        const auto& D = r.distribution("D2");
        const AngleReport a = slant_test(r.J.base, r.immersion, D, SamplingPlan{});
        const VerificationReport rep = slant_identities(r.J.base, r.immersion, D, a.lambda, SamplingPlan{});
        ASSERT_EQ(rep.checks().size(), 4u);
        for (const auto& c : rep.checks()) EXPECT_LT(c.max_residual, 1e-8) << sc.name << " " << c.name;
        // A wrong angle breaks them.
        const VerificationReport off = slant_identities(r.J.base, r.immersion, D, a.lambda + 0.05, SamplingPlan{});
        EXPECT_FALSE(off.passed());
    }
}

TEST(SemiSlant, BuiltInExamplesPass) {
    for (const Scenario& sc : {builtin_example1(1, 1), builtin_example1(1, 2), builtin_example2(2, 2, 1)}) {
        const ResolvedScenario r = resolve(sc);
        const VerificationReport rep =
            semi_slant_check(r.J.base, r.immersion, r.distribution("D1"), r.distribution("D2"), SamplingPlan{});
        EXPECT_TRUE(rep.passed()) << sc.name;
        EXPECT_NE(rep.find_observation("semi_slant.D2_angle"), nullptr);
    }
}

TEST(SemiSlant, SwappedRolesFailInvariance) {
    const ResolvedScenario r = resolve(builtin_example1(1, 1));
    const VerificationReport rep =
        semi_slant_check(r.J.base, r.immersion, r.distribution("D2"), r.distribution("D1"), SamplingPlan{});
    EXPECT_FALSE(rep.passed());
    const CheckResult* inv = rep.find("semi_slant.D1_invariant");
    ASSERT_NE(inv, nullptr);
    EXPECT_GT(inv->max_residual, 0.9);
    // |N Z1| / |Z1| = sin(theta) |JZ1| / |Z1|, all closed form.
    const double c = closed_form_cos1(r.params);
    const double s = r.params.sigma, b = r.params.sigma_bar;
    const double expected = std::sqrt(1 - c * c) * std::sqrt((s * s + 2 * b * b) / 3);
    EXPECT_NEAR(inv->max_residual, expected, 1e-9);
}

TEST(SemiSlant, RejectsBadSplits) {
    const ResolvedScenario r = resolve(builtin_example1(1, 1));
    auto expr = [&](const char* s) { return parse(s, r.immersion.vars(), r.params); };
    const auto skew = DistributionSpec::chart_fields("S", {{expr("1"), expr("1"), expr("0")}});
    EXPECT_THROW(semi_slant_check(r.J.base, r.immersion, r.distribution("D1"), skew, SamplingPlan{}), ConfigError);
    const auto partial = DistributionSpec::coordinates("P", {1});
    EXPECT_THROW(semi_slant_check(r.J.base, r.immersion, partial, r.distribution("D2"), SamplingPlan{}), ConfigError);
}

TEST(AngleRelation, GoldenExampleOneHandValue) {
    const auto J = StructureOperator::metallic(testing_support::example1_structure(golden), golden);
    const auto F = products_from_metallic(J).first;
    const Eigen::Vector3d x(1.9, 0.7, 0.2);
    const FrameData fr = frame_at(testing_support::example1_immersion(golden), x);
    const Eigen::VectorXd Z1 = testing_support::example1_jacobian(x[0], x[1], x[2]).col(0);
    const AngleRelation rel = pointwise_angle_relation(J, F, fr, Z1);
    EXPECT_NEAR(rel.lhs, 10.0 / 3.0, 1e-12);
    EXPECT_NEAR(rel.rhs, 10.0 / 3.0, 1e-12);
    EXPECT_LT(rel.residual, 1e-12);
}

TEST(AngleRelation, FInvariantDirectionGivesZero) {
    const auto J = StructureOperator::metallic(testing_support::example1_structure(golden), golden);
    const auto F = products_from_metallic(J).first;
    const Eigen::Vector3d x(1.1, 0.3, 0.6);
    const FrameData fr = frame_at(testing_support::example1_immersion(golden), x);
    const Eigen::VectorXd Z2 = testing_support::example1_jacobian(x[0], x[1], x[2]).col(1);
    const AngleRelation rel = pointwise_angle_relation(J, F, fr, Z2);
    EXPECT_NEAR(rel.lhs, 0.0, 1e-12);
    EXPECT_NEAR(rel.rhs, 0.0, 1e-12);
}

TEST(AngleRelation, RandomVectorsAndBranchMismatch) {
    Gen gen(52);
    for (const Scenario& sc : {builtin_example1(1, 1), builtin_example1(3, 2), builtin_example2(2, 2, 1)}) {
        const ResolvedScenario r = resolve(sc);
        const auto [F1, F2] = products_from_metallic(r.J.base);
        SamplingPlan plan;
        const auto pts = sample_points(r.immersion, plan);
        for (int k = 0; k < 200; ++k) {
            const FrameData fr = frame_at(r.immersion, pts[static_cast<std::size_t>(k) % pts.size()]);
            const Eigen::VectorXd X = fr.jacobian * gen.vector(fr.chart_dim());
            EXPECT_LT(pointwise_angle_relation(r.J.base, F1, fr, X).residual, 1e-8);
        }
        const FrameData fr = frame_at(r.immersion, pts[0]);
        EXPECT_THROW(pointwise_angle_relation(r.J.base, F2, fr, fr.jacobian.col(0)), ConfigError);
    }
}

TEST(TheoremRelation, ReportedValues) {
    const AnglePrediction zero = theorem_angle_relation(0.3, 0.0, golden);
    EXPECT_NEAR(zero.predicted_sin, 0.0, 1e-15);
    const AnglePrediction right = theorem_angle_relation(0.3, kHalfPi, golden);
    const double phi = testing_support::golden();
    EXPECT_NEAR(right.predicted_sin, (2 * phi - 1) / (2 * phi), 1e-15);
    EXPECT_NEAR(right.predicted_sin, 0.6909830, 1e-7);

    const double c = closed_form_cos1(golden);
    const AnglePrediction ex = theorem_angle_relation(std::acos(c), std::acos(1.0 / 3.0), golden);
    EXPECT_NEAR(ex.observed_sin, 0.99279, 1e-5);
    // sin(vartheta) = sqrt(8/9) when cos(vartheta) = 1/3.
    EXPECT_NEAR(ex.predicted_sin, std::sqrt(5.0) / (2 * phi) * std::sqrt(8.0 / 9.0), 1e-14);
    EXPECT_NEAR(ex.predicted_sin, 0.6514, 1e-3);
    EXPECT_NEAR(ex.discrepancy, ex.observed_sin - ex.predicted_sin, 1e-15);
}

TEST(MergedAngle, EqualAnglesWithOrthogonalImagesGiveSlantSubmanifold) {
    const auto prm = metallic_number(2, 1);
    Eigen::MatrixXd J = Eigen::Vector4d(prm.sigma, prm.sigma_bar, prm.sigma, prm.sigma_bar).asDiagonal();
    const auto op = StructureOperator::metallic(J, prm);
    auto build = [&](double c1, double c2) {
        const std::string a = std::to_string(c1), b = std::to_string(c2);
        return Immersion::parse({"x", "y"}, {"x", a + "*x", "y", b + "*y"}, {{-1, 1}, {-1, 1}}, prm);
    };
    const auto D1 = DistributionSpec::coordinates("D1", {0});
    const auto D2 = DistributionSpec::coordinates("D2", {1});
    const auto all = DistributionSpec::coordinates("TM", {0, 1});
    SamplingPlan plan;
    plan.point_count = 10;

    const Immersion same = build(0.3, 0.3);
    const AngleReport a1 = slant_test(op, same, D1, plan), a2 = slant_test(op, same, D2, plan);
    ASSERT_EQ(a1.classification, SlantClass::ProperSlant);
    EXPECT_NEAR(a1.mean, a2.mean, 1e-12);
    const AngleReport merged = slant_test(op, same, all, plan);
    EXPECT_EQ(merged.classification, SlantClass::ProperSlant);
    EXPECT_NEAR(merged.mean, a1.mean, 1e-9);

    const AngleReport mixed = slant_test(op, build(0.3, 0.8), all, plan);
    EXPECT_EQ(mixed.classification, SlantClass::NotSlant);
}
