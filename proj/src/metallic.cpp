#include "mslant/metallic.hpp"

#include <cmath>
#include <string>

#include "mslant/errors.hpp"
#include "mslant/sampling.hpp"

namespace mslant {

MetallicParams metallic_number(int p, int q) {
    if (p < 1 || q < 1)
        throw DomainError("metallic_number: p and q must be positive integers (got p=" +
                          std::to_string(p) + ", q=" + std::to_string(q) + ")");
    const double pd = p;
    const double qd = q;
    const double sigma = (pd + std::sqrt(pd * pd + 4.0 * qd)) / 2.0;
    // sigma * sigma_bar = -q avoids the cancellation in p - sigma.
    return MetallicParams{p, q, sigma, -qd / sigma};
}

namespace {

void check_shape(const Eigen::MatrixXd& matrix, const Eigen::MatrixXd& metric) {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
        throw InputError("structure operator must be a non-empty square matrix");
    if (matrix.rows() > kMaxAmbientDim)
        throw InputError("structure operator dimension exceeds " + std::to_string(kMaxAmbientDim));
    if (metric.rows() != matrix.rows() || metric.cols() != matrix.cols())
        throw InputError("metric dimension does not match the structure operator");
    if (!matrix.allFinite() || !metric.allFinite())
        throw InputError("structure operator and metric must be finite");
    if ((metric - metric.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + metric.cwiseAbs().maxCoeff()))
        throw InputError("metric is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(metric);
    if (llt.info() != Eigen::Success) throw InputError("metric is not positive definite");
}

}  // namespace

StructureOperator StructureOperator::metallic(Eigen::MatrixXd matrix, const MetallicParams& params) {
    const auto m = matrix.rows();
    return metallic(std::move(matrix), Eigen::MatrixXd::Identity(m, m), params);
}

StructureOperator StructureOperator::metallic(Eigen::MatrixXd matrix, Eigen::MatrixXd metric,
                                              const MetallicParams& params) {
    check_shape(matrix, metric);
    return StructureOperator{std::move(matrix), std::move(metric), StructureKind::Metallic, params};
}

StructureOperator StructureOperator::almost_product(Eigen::MatrixXd matrix) {
    const auto m = matrix.rows();
    return almost_product(std::move(matrix), Eigen::MatrixXd::Identity(m, m));
}

StructureOperator StructureOperator::almost_product(Eigen::MatrixXd matrix, Eigen::MatrixXd metric) {
    check_shape(matrix, metric);
    return StructureOperator{std::move(matrix), std::move(metric), StructureKind::AlmostProduct,
                             std::nullopt};
}

double inf_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double polynomial_residual(const StructureOperator& s) {
    const auto I = Eigen::MatrixXd::Identity(s.dim(), s.dim());
    const auto& J = s.matrix;
    if (s.kind == StructureKind::AlmostProduct) return inf_norm(J * J - I);
    if (!s.params) throw InputError("metallic structure operator without (p, q)");
    return inf_norm(J * J - s.params->p * J - s.params->q * I);
}

double compatibility_residual(const StructureOperator& s) {
    return inf_norm(s.metric * s.matrix - s.matrix.transpose() * s.metric);
}

VerificationReport validate_structure(const StructureOperator& s, double tol, int vector_samples,
                                      std::uint64_t seed) {
    check_shape(s.matrix, s.metric);
    if (!(tol > 0.0)) throw InputError("validate_structure: tolerance must be positive");
    VerificationReport report("structure");
    report.set_seed(seed);
    const bool metallic = s.kind == StructureKind::Metallic;
    if (metallic && !s.params) throw InputError("metallic structure operator without (p, q)");

    report.record(metallic ? "structure.metallic_identity" : "structure.involution",
                  metallic ? "J^2 = pJ + qI" : "F^2 = I", polynomial_residual(s), tol);
    report.record("structure.metric_compatibility", "g(JX,Y) = g(X,JY)", compatibility_residual(s), tol);

    if (metallic) {
        const auto& J = s.matrix;
        const auto& G = s.metric;
        const double p = s.params->p;
        const double q = s.params->q;
        SplitMix64 rng(seed);
        for (int k = 0; k < vector_samples; ++k) {
            const Eigen::VectorXd x = random_unit_vector(rng, s.dim());
            const Eigen::VectorXd y = random_unit_vector(rng, s.dim());
            const double gjj = (J * x).dot(G * (J * y));
            const double gj2 = (J * (J * x)).dot(G * y);
            const double poly = p * (J * x).dot(G * y) + q * x.dot(G * y);
            report.record("structure.gJJ", "g(JX,JY) = g(J^2X,Y) = p g(JX,Y) + q g(X,Y)",
                          std::max(std::abs(gjj - gj2), std::abs(gjj - poly)), tol);
        }
    }
    return report;
}

void require_valid(const StructureOperator& s, double tol) {
    const auto report = validate_structure(s, tol, 16);
    if (report.passed()) return;
    std::string what = "structure validation failed:";
    for (const auto& c : report.checks())
        if (!c.passed) what += " " + c.name + " residual " + std::to_string(c.max_residual);
    throw StructureError(what);
}

StructureOperator metallic_from_product(const StructureOperator& F, const MetallicParams& params,
                                        Branch branch, double tol) {
    if (F.kind != StructureKind::AlmostProduct)
        throw StructureError("metallic_from_product: input is not an almost product structure");
    require_valid(F, tol);
    const double half_gap = params.root_gap() / 2.0;
    const double sign = branch == Branch::Plus ? 1.0 : -1.0;
    const auto I = Eigen::MatrixXd::Identity(F.dim(), F.dim());
    Eigen::MatrixXd J = sign * half_gap * F.matrix + (params.p / 2.0) * I;
    auto out = StructureOperator::metallic(std::move(J), F.metric, params);
    require_valid(out, tol);
    return out;
}

std::pair<StructureOperator, StructureOperator> products_from_metallic(const StructureOperator& J,
                                                                       double tol) {
    if (J.kind != StructureKind::Metallic)
        throw StructureError("products_from_metallic: input is not a metallic structure");
    require_valid(J, tol);
    const auto& params = *J.params;
    const auto I = Eigen::MatrixXd::Identity(J.dim(), J.dim());
    Eigen::MatrixXd F1 = (2.0 * J.matrix - params.p * I) / params.root_gap();
    Eigen::MatrixXd F2 = -F1;
    auto first = StructureOperator::almost_product(std::move(F1), J.metric);
    auto second = StructureOperator::almost_product(std::move(F2), J.metric);
    require_valid(first, tol);
    require_valid(second, tol);
    return {std::move(first), std::move(second)};
}

ProjectorPair projectors(const StructureOperator& J, double tol) {
    if (J.kind != StructureKind::Metallic)
        throw StructureError("projectors: input is not a metallic structure");
    require_valid(J, tol);
    const auto& params = *J.params;
    const auto I = Eigen::MatrixXd::Identity(J.dim(), J.dim());
    const double gap = params.root_gap();
    return ProjectorPair{(params.sigma * I - J.matrix) / gap, (J.matrix - params.sigma_bar * I) / gap};
}

}  // namespace mslant
