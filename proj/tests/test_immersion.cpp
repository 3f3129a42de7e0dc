#include <gtest/gtest.h>

#include <cmath>

#include "mslant/errors.hpp"
#include "mslant/immersion.hpp"
#include "mslant/sampling.hpp"
#include "support.hpp"

using namespace mslant;
using testing_support::Gen;

namespace {

const MetallicParams golden = metallic_number(1, 1);

Immersion plane() { return Immersion::parse({"u", "v"}, {"u", "v", "0", "0"}, {{-1, 1}, {-1, 1}}, golden); }

Immersion example2(int n) {
    std::vector<std::string> vars = {"u"}, comps;
    ChartBox box = {{0.5, 3.0}};
    for (int j = 1; j <= n; ++j) {
        vars.push_back("a" + std::to_string(j));
        box.emplace_back(0.0, 1.5);
    }
    for (const char* fn : {"cos", "sin"})
        for (int j = 1; j <= n; ++j) comps.push_back("u*" + std::string(fn) + "(a" + std::to_string(j) + ")");
    for (int j = 1; j <= n; ++j) comps.push_back("a" + std::to_string(j));
    comps.push_back("u");
    return Immersion::parse(vars, comps, box, golden);
}

void expect_frame_invariants(const FrameData& fr) {
    const Eigen::Index n = fr.chart_dim(), r = fr.codim();
    EXPECT_LT((fr.tangent_onb.transpose() * fr.tangent_onb - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-10);
    EXPECT_LT((fr.normal_onb.transpose() * fr.normal_onb - Eigen::MatrixXd::Identity(r, r)).norm(), 1e-10);
    EXPECT_LT((fr.tangent_onb.transpose() * fr.normal_onb).norm(), 1e-10);
    EXPECT_EQ(fr.induced_metric, fr.jacobian.transpose() * fr.jacobian);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(fr.induced_metric).eigenvalues().minCoeff(), 0.0);
    EXPECT_LT((fr.tangent_onb * fr.frame_from_coords - fr.jacobian).norm(), 1e-12 * (1 + fr.jacobian.norm()));
}

}  // namespace

TEST(Immersion, ConstructionChecks) {
    EXPECT_THROW(Immersion::parse({"u", "v"}, {"u", "v"}, {{0, 1}, {0, 1}}, golden), InputError);
    EXPECT_THROW(Immersion::parse({"u"}, {"u", "u"}, {{1, 0}}, golden), InputError);
    EXPECT_THROW(Immersion::parse({"u"}, {"u", "u"}, {{0, 1}, {0, 1}}, golden), InputError);
    EXPECT_THROW(Immersion::parse({"u"}, {"u", "w"}, {{0, 1}}, golden), ParseError);
    std::vector<std::string> many(1025, "u");
    EXPECT_THROW(Immersion::parse({"u"}, many, {{0, 1}}, golden), InputError);
    const Immersion f = plane();
    EXPECT_EQ(f.chart_dim(), 2);
    EXPECT_EQ(f.ambient_dim(), 4);
    EXPECT_EQ(f.codim(), 2);
}

TEST(Frame, Plane) {
    const FrameData fr = frame_at(plane(), Eigen::Vector2d(0.3, -0.2));
    Eigen::MatrixXd I4 = Eigen::MatrixXd::Identity(4, 4);
    EXPECT_LT((fr.tangent_onb - I4.leftCols(2)).norm(), 1e-15);
    EXPECT_LT((fr.normal_onb - I4.rightCols(2)).norm(), 1e-15);
    expect_frame_invariants(fr);
}

TEST(Frame, ExampleOneCoordinateFields) {
    const Immersion f = testing_support::example1_immersion(golden);
    SamplingPlan plan;
    for (const auto& x : sample_points(f, plan)) {
        const FrameData fr = frame_at(f, x);
        const double u = x[0];
        const Eigen::MatrixXd Z = testing_support::example1_jacobian(u, x[1], x[2]);
        EXPECT_LT((fr.jacobian - Z).norm(), 1e-14);
        EXPECT_NEAR(fr.induced_metric(0, 0), 3.0, 1e-12);
        EXPECT_NEAR(fr.induced_metric(1, 1), u * u + 1, 1e-12);
        EXPECT_NEAR(fr.induced_metric(2, 2), u * u + 1, 1e-12);
        EXPECT_NEAR(fr.induced_metric(0, 1), 0.0, 1e-12);
        EXPECT_NEAR(fr.induced_metric(0, 2), 0.0, 1e-12);
        EXPECT_NEAR(fr.induced_metric(1, 2), 0.0, 1e-12);
        // Tangent frame spans the coordinate fields.
        EXPECT_LT((testing_support::span_projector(Z) - fr.tangent_onb * fr.tangent_onb.transpose()).norm(), 1e-12);
        expect_frame_invariants(fr);
    }
}

TEST(Frame, ExampleTwoMetric) {
    for (int n : {1, 2, 3, 5}) {
        const Immersion f = example2(n);
        SamplingPlan plan;
        plan.point_count = 30;
        for (const auto& x : sample_points(f, plan)) {
            const FrameData fr = frame_at(f, x);
            Eigen::VectorXd d = Eigen::VectorXd::Constant(n + 1, x[0] * x[0] + 1);
            d[0] = n + 1;
            EXPECT_LT((fr.induced_metric - Eigen::MatrixXd(d.asDiagonal())).cwiseAbs().maxCoeff(), 1e-10);
            expect_frame_invariants(fr);
        }
    }
}

TEST(Frame, DegenerateAndOutsidePoints) {
    const Immersion f = Immersion::parse({"u", "v"}, {"u^2", "v", "0"}, {{-1, 1}, {-1, 1}}, golden);
    EXPECT_THROW(frame_at(f, Eigen::Vector2d(0.0, 0.0)), DegeneratePointError);
    EXPECT_NO_THROW(frame_at(f, Eigen::Vector2d(0.5, 0.0)));
    EXPECT_THROW(frame_at(f, Eigen::Vector2d(2.0, 0.0)), InputError);
    // Same direction twice: rank one.
    const Immersion g = Immersion::parse({"u", "v"}, {"u + v", "u + v", "1"}, {{-1, 1}, {-1, 1}}, golden);
    EXPECT_THROW(frame_at(g, Eigen::Vector2d(0.1, 0.2)), DegeneratePointError);
}

TEST(Frame, FixedAxesReproduceNormalFrame) {
    const Immersion f = testing_support::example1_immersion(golden);
    const Eigen::Vector3d x(1.2, 0.4, 0.9);
    const FrameData fr = frame_at(f, x);
    const FrameData again = frame_at(f, x, fr.normal_axes);
    EXPECT_LT((again.normal_onb - fr.normal_onb).norm(), 1e-15);
    const FrameData near = frame_at(f, x + Eigen::Vector3d(1e-4, -1e-4, 1e-4), fr.normal_axes);
    EXPECT_LT((near.normal_onb - fr.normal_onb).norm(), 1e-2);
}

TEST(Frame, CoordinateConversions) {
    const Immersion f = testing_support::example1_immersion(golden);
    const FrameData fr = frame_at(f, Eigen::Vector3d(2.0, 0.3, 1.1));
    Gen gen(31);
    for (int k = 0; k < 20; ++k) {
        const Eigen::VectorXd c = gen.vector(3);
        const Eigen::VectorXd v = fr.push_forward(c);
        EXPECT_LT((v - fr.jacobian * c).norm(), 1e-14);
        EXPECT_LT((fr.coords_of(v) - c).norm(), 1e-12);
        EXPECT_LT((fr.coords_of_frame(fr.frame_of_coords(c)) - c).norm(), 1e-12);
        EXPECT_LT((fr.tangent_onb * fr.frame_of_coords(c) - v).norm(), 1e-12);
    }
}

TEST(Split, FrameVectorsAndPythagoras) {
    const Immersion f = testing_support::example1_immersion(golden);
    const FrameData fr = frame_at(f, Eigen::Vector3d(1.7, 0.2, 0.6));
    for (Eigen::Index i = 0; i < 3; ++i) {
        const auto [t, n] = split(fr.tangent_onb.col(i), fr);
        EXPECT_LT((t.ambient - fr.tangent_onb.col(i)).norm(), 1e-15);
        EXPECT_LT(n.ambient.norm(), 1e-15);
    }
    for (Eigen::Index a = 0; a < 4; ++a) {
        const auto [t, n] = split(fr.normal_onb.col(a), fr);
        EXPECT_LT(t.ambient.norm(), 1e-15);
        EXPECT_LT((n.ambient - fr.normal_onb.col(a)).norm(), 1e-15);
    }
    Gen gen(32);
    for (int k = 0; k < 100; ++k) {
        const Eigen::VectorXd v = gen.vector(7, -3, 3);
        const auto [t, n] = split(v, fr);
        EXPECT_LT((t.ambient + n.ambient - v).norm(), 1e-12);
        EXPECT_NEAR(v.squaredNorm(), t.ambient.squaredNorm() + n.ambient.squaredNorm(), 1e-10);
        EXPECT_LT(std::abs(t.ambient.dot(n.ambient)), 1e-12);
        EXPECT_EQ(t.point, fr.point);
        const auto [tt, tn] = split(t.ambient, fr);
        EXPECT_LT((tt.ambient - t.ambient).norm(), 1e-12);
        EXPECT_LT(tn.ambient.norm(), 1e-12);
    }
    EXPECT_THROW(split(Eigen::VectorXd::Zero(6), fr), InputError);
}

TEST(Hessian, PlaneAndPolar) {
    const CoordinateHessian hp = coordinate_hessian(plane(), Eigen::Vector2d(0.1, 0.2));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_EQ(hp(i, j).norm(), 0.0);
    const Immersion polar = Immersion::parse({"u", "t"}, {"u*cos(t)", "u*sin(t)", "t"}, {{0.5, 2}, {0, 3}}, golden);
    const double t = 0.7;
    const CoordinateHessian h = coordinate_hessian(polar, Eigen::Vector2d(1.3, t));
    EXPECT_LT((h(0, 1) - Eigen::Vector3d(-std::sin(t), std::cos(t), 0)).norm(), 1e-15);
    EXPECT_LT((h(1, 0) - h(0, 1)).norm(), 0.0 + 1e-300);
    EXPECT_LT(h(0, 0).norm(), 1e-15);
}

TEST(Hessian, ExampleOneAgainstDifferencedJacobian) {
    const Immersion f = testing_support::example1_immersion(golden);
    SamplingPlan plan;
    plan.point_count = 25;
    const double step = 1e-5;
    for (const auto& x : sample_points(f, plan)) {
        const CoordinateHessian H = coordinate_hessian(f, x);
        for (int j = 0; j < 3; ++j) {
            Eigen::Vector3d a = x, b = x;
            a[j] += step;
            b[j] -= step;
            const Eigen::MatrixXd dZ = (testing_support::example1_jacobian(a[0], a[1], a[2]) -
                                        testing_support::example1_jacobian(b[0], b[1], b[2])) /
                                       (2 * step);
            for (int i = 0; i < 3; ++i) {
                EXPECT_LT((H(i, j) - dZ.col(i)).norm(), 1e-6);
                EXPECT_EQ(H(i, j), H(j, i));
            }
        }
    }
}

TEST(Sampling, PointsStayInsideMarginAndAreReproducible) {
    const Immersion f = testing_support::example1_immersion(golden);
    SamplingPlan plan;
    plan.point_count = 500;
    const auto pts = sample_points(f, plan);
    ASSERT_EQ(pts.size(), 500u);
    for (const auto& x : pts) {
        for (int i = 0; i < 3; ++i) {
            const auto [lo, hi] = f.chart_box()[static_cast<std::size_t>(i)];
            const double margin = 1e-3 * (hi - lo);
            EXPECT_GE(x[i], lo + margin * (1 - 1e-12));
            EXPECT_LE(x[i], hi - margin * (1 - 1e-12));
        }
    }
    EXPECT_EQ(sample_points(f, plan), pts);
    plan.seed = 43;
    EXPECT_NE(sample_points(f, plan)[0], pts[0]);
}

TEST(Sampling, PlanValidation) {
    SamplingPlan plan;
    plan.point_count = 0;
    EXPECT_THROW(validate(plan), InputError);
    plan = SamplingPlan{};
    plan.tol.fd = -1;
    EXPECT_THROW(validate(plan), InputError);
    EXPECT_NO_THROW(validate(SamplingPlan{}));
}

TEST(Sampling, SplitMixKnownSequence) {
    // Reference outputs of SplitMix64 seeded with 1234567.
    SplitMix64 g(1234567);
    EXPECT_EQ(g(), 6457827717110365317ULL);
    EXPECT_EQ(g(), 3203168211198807973ULL);
    EXPECT_EQ(g(), 9817491932198370423ULL);
}
