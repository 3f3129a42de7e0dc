#include <gtest/gtest.h>

#include <cmath>

#include "mslant/errors.hpp"
#include "mslant/metallic.hpp"
#include "support.hpp"

using namespace mslant;
using testing_support::Gen;

TEST(MetallicNumber, GoldenSilverAndTwo) {
    EXPECT_NEAR(metallic_number(1, 1).sigma, 1.6180339887498949, 1e-12);
    EXPECT_NEAR(metallic_number(1, 2).sigma, 2.0, 1e-14);
    EXPECT_NEAR(metallic_number(2, 1).sigma, 1.0 + std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(metallic_number(1, 2).sigma_bar, -1.0, 1e-14);
}

TEST(MetallicNumber, RejectsNonPositive) {
    EXPECT_THROW(metallic_number(0, 1), DomainError);
    EXPECT_THROW(metallic_number(1, 0), DomainError);
    EXPECT_THROW(metallic_number(-3, 2), DomainError);
}

TEST(MetallicNumber, RootIdentitiesOverGrid) {
    for (int p = 1; p <= 40; ++p) {
        for (int q = 1; q <= 40; ++q) {
            const auto m = metallic_number(p, q);
            const double scale = m.sigma * m.sigma;
            EXPECT_NEAR(m.sigma * m.sigma, p * m.sigma + q, 1e-14 * scale);
            EXPECT_NEAR(m.sigma + m.sigma_bar, p, 1e-13 * p);
            EXPECT_NEAR(m.sigma * m.sigma_bar, -q, 1e-13 * q);
            EXPECT_GT(m.sigma, 0.0);
            EXPECT_LT(m.sigma_bar, 0.0);
            EXPECT_NEAR(m.root_gap(), std::sqrt(p * p + 4.0 * q), 1e-12 * m.sigma);
        }
    }
}

TEST(Structure, FromProductExamples) {
    const auto g = metallic_number(1, 1);
    const auto I = Eigen::MatrixXd::Identity(3, 3);
    auto J = metallic_from_product(StructureOperator::almost_product(I), g, Branch::Plus);
    EXPECT_LT((J.matrix - g.sigma * I).norm(), 1e-14);
    J = metallic_from_product(StructureOperator::almost_product(-I), g, Branch::Plus);
    EXPECT_LT((J.matrix - g.sigma_bar * I).norm(), 1e-14);
    Eigen::MatrixXd F = Eigen::Vector3d(1, 1, -1).asDiagonal();
    J = metallic_from_product(StructureOperator::almost_product(F), g, Branch::Plus);
    EXPECT_LT((J.matrix - Eigen::Vector3d(g.sigma, g.sigma, g.sigma_bar).asDiagonal().toDenseMatrix()).norm(), 1e-14);
    J = metallic_from_product(StructureOperator::almost_product(F), g, Branch::Minus);
    EXPECT_LT((J.matrix - Eigen::Vector3d(g.sigma_bar, g.sigma_bar, g.sigma).asDiagonal().toDenseMatrix()).norm(),
              1e-14);
}

TEST(Structure, FromProductRejectsNonInvolution) {
    const auto g = metallic_number(1, 1);
    Eigen::MatrixXd F = Eigen::Vector3d(1, 2, -1).asDiagonal();
    EXPECT_THROW(metallic_from_product(StructureOperator::almost_product(F), g, Branch::Plus), StructureError);
}

TEST(Structure, ProductsFromMetallicExamples) {
    const auto g = metallic_number(1, 1);
    const auto I = Eigen::MatrixXd::Identity(2, 2);
    auto [F1, F2] = products_from_metallic(StructureOperator::metallic(g.sigma * I, g));
    EXPECT_LT((F1.matrix - I).norm(), 1e-14);
    EXPECT_LT((F2.matrix + I).norm(), 1e-14);
    Eigen::MatrixXd J = Eigen::Vector2d(g.sigma, g.sigma_bar).asDiagonal();
    auto [G1, G2] = products_from_metallic(StructureOperator::metallic(J, g));
    EXPECT_LT((G1.matrix - Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix()).norm(), 1e-14);
    EXPECT_THROW(products_from_metallic(StructureOperator::metallic(I, g)), StructureError);
}

TEST(Structure, RandomEigenbasisRoundTrip) {
    Gen gen(11);
    for (int trial = 0; trial < 60; ++trial) {
        const auto prm = metallic_number(gen.integer(1, 6), gen.integer(1, 6));
        const Eigen::Index n = gen.integer(2, 12);
        const Eigen::MatrixXd J = testing_support::random_metallic(gen, n, gen.integer(0, static_cast<int>(n)), prm);
        const auto op = StructureOperator::metallic(J, prm);
        const auto I = Eigen::MatrixXd::Identity(n, n);
        EXPECT_LT(inf_norm(J * J - prm.p * J - prm.q * I), 1e-10);
        // independent formula for F1 straight from the eigen map
        const Eigen::MatrixXd F1 = (2 * J - prm.p * I) / std::sqrt(prm.p * prm.p + 4.0 * prm.q);
        const auto [P1, P2] = products_from_metallic(op);
        EXPECT_LT((P1.matrix - F1).norm(), 1e-12);
        EXPECT_LT((P1.matrix * P1.matrix - I).norm(), 1e-12);
        EXPECT_LT((P2.matrix + P1.matrix).norm(), 1e-15);
        const auto back = metallic_from_product(P1, prm, Branch::Plus);
        EXPECT_LT(inf_norm(back.matrix - J), 1e-10);
        const auto again = products_from_metallic(back).first;
        EXPECT_LT(inf_norm(again.matrix - P1.matrix), 1e-10);
    }
}

TEST(Structure, ProjectorExamples) {
    const auto g = metallic_number(1, 1);
    const auto I = Eigen::MatrixXd::Identity(2, 2);
    auto pq = projectors(StructureOperator::metallic(g.sigma * I, g));
    EXPECT_LT(pq.P.norm(), 1e-15);
    EXPECT_LT((pq.Q - I).norm(), 1e-15);
    Eigen::MatrixXd J = Eigen::Vector2d(g.sigma, g.sigma_bar).asDiagonal();
    pq = projectors(StructureOperator::metallic(J, g));
    EXPECT_LT((pq.P - Eigen::Vector2d(0, 1).asDiagonal().toDenseMatrix()).norm(), 1e-15);
    EXPECT_LT((pq.Q - Eigen::Vector2d(1, 0).asDiagonal().toDenseMatrix()).norm(), 1e-15);
}

TEST(Structure, ExampleOneProjectorRanks) {
    const auto g = metallic_number(1, 1);
    const auto pq = projectors(StructureOperator::metallic(testing_support::example1_structure(g), g));
    const Eigen::JacobiSVD<Eigen::MatrixXd> sp(pq.P), sq(pq.Q);
    int rp = 0, rq = 0;
    for (double s : sp.singularValues()) rp += s > 1e-9;
    for (double s : sq.singularValues()) rq += s > 1e-9;
    EXPECT_EQ(rp, 4);
    EXPECT_EQ(rq, 3);
}

TEST(Structure, ProjectorPropertiesOnRandomOperators) {
    Gen gen(12);
    for (int trial = 0; trial < 40; ++trial) {
        const auto prm = metallic_number(gen.integer(1, 5), gen.integer(1, 5));
        const Eigen::Index n = gen.integer(2, 10);
        const Eigen::MatrixXd J = testing_support::random_metallic(gen, n, gen.integer(0, static_cast<int>(n)), prm);
        const auto pq = projectors(StructureOperator::metallic(J, prm));
        const auto I = Eigen::MatrixXd::Identity(n, n);
        EXPECT_LT((pq.P + pq.Q - I).norm(), 1e-12);
        EXPECT_LT((pq.P * pq.P - pq.P).norm(), 1e-10);
        EXPECT_LT((pq.Q * pq.Q - pq.Q).norm(), 1e-10);
        EXPECT_LT((pq.P * pq.Q).norm(), 1e-10);
        EXPECT_LT((pq.Q * pq.P).norm(), 1e-10);
        for (int k = 0; k < 100; ++k) {
            const Eigen::VectorXd v = gen.vector(n);
            EXPECT_LT((J * (pq.P * v) - (prm.p - prm.sigma) * (pq.P * v)).norm(), 1e-9);
            EXPECT_LT((J * (pq.Q * v) - prm.sigma * (pq.Q * v)).norm(), 1e-9);
        }
    }
}

TEST(Structure, CompatibilityIdentityOnRandomPairs) {
    Gen gen(13);
    const auto prm = metallic_number(3, 2);
    const Eigen::MatrixXd J = testing_support::random_metallic(gen, 8, 3, prm);
    for (int k = 0; k < 100; ++k) {
        const Eigen::VectorXd x = gen.vector(8), y = gen.vector(8);
        const double lhs = (J * x).dot(J * y);
        EXPECT_NEAR(lhs, (J * J * x).dot(y), 1e-9);
        EXPECT_NEAR(lhs, prm.p * (J * x).dot(y) + prm.q * x.dot(y), 1e-9);
    }
}

TEST(Validate, Examples) {
    const auto g = metallic_number(1, 1);
    Eigen::MatrixXd J = Eigen::Vector2d(g.sigma, g.sigma_bar).asDiagonal();
    EXPECT_TRUE(validate_structure(StructureOperator::metallic(J, g)).passed());

    const auto bad = validate_structure(StructureOperator::metallic(Eigen::MatrixXd::Identity(2, 2), g));
    EXPECT_FALSE(bad.passed());
    const auto* poly = bad.find("structure.metallic_identity");
    ASSERT_NE(poly, nullptr);
    EXPECT_NEAR(poly->max_residual, 1.0, 1e-15);

    EXPECT_TRUE(validate_structure(StructureOperator::metallic(testing_support::example1_structure(g), g)).passed());
}

TEST(Validate, NonSymmetricFailsCompatibility) {
    const auto g = metallic_number(1, 1);
    Eigen::MatrixXd J(2, 2);
    J << g.sigma, 1.0, 0.0, g.sigma_bar;  // J^2 = J + I holds, but J is not self-adjoint
    const auto r = validate_structure(StructureOperator::metallic(J, g));
    EXPECT_LT(r.find("structure.metallic_identity")->max_residual, 1e-12);
    EXPECT_FALSE(r.find("structure.metric_compatibility")->passed);
}

TEST(Validate, NonEuclideanMetric) {
    const auto g = metallic_number(2, 3);
    Gen gen(14);
    const Eigen::MatrixXd A = gen.matrix(4, 4) + 4 * Eigen::MatrixXd::Identity(4, 4);
    const Eigen::MatrixXd G = A.transpose() * A;
    // J self-adjoint for G: J = G^{-1/2} S G^{1/2} with S symmetric metallic.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::MatrixXd root = es.operatorSqrt(), inv_root = es.operatorInverseSqrt();
    const Eigen::MatrixXd J = inv_root * testing_support::random_metallic(gen, 4, 2, g) * root;
    EXPECT_TRUE(validate_structure(StructureOperator::metallic(J, G, g)).passed());
}

TEST(Validate, MalformedInput) {
    const auto g = metallic_number(1, 1);
    EXPECT_THROW(StructureOperator::metallic(Eigen::MatrixXd::Zero(2, 3), g), InputError);
    Eigen::MatrixXd G = Eigen::Vector2d(1, -1).asDiagonal();
    EXPECT_THROW(StructureOperator::metallic(Eigen::MatrixXd::Identity(2, 2), G, g), InputError);
    Eigen::MatrixXd ns(2, 2);
    ns << 1, 0.5, 0, 1;
    EXPECT_THROW(StructureOperator::metallic(Eigen::MatrixXd::Identity(2, 2), ns, g), InputError);
    EXPECT_THROW(StructureOperator::metallic(Eigen::MatrixXd::Identity(1025, 1025), g), InputError);
}
