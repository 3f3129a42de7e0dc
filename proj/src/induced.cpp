#include "mslant/induced.hpp"

#include <algorithm>

#include "mslant/errors.hpp"

namespace mslant {

InducedMaps induced_maps(const Eigen::MatrixXd& J, const FrameData& frame) {
    if (J.rows() != J.cols() || J.rows() != frame.ambient_dim())
        throw InputError("induced_maps: operator dimension does not match the frame");
    const Eigen::MatrixXd& E = frame.tangent_onb;
    const Eigen::MatrixXd& F = frame.normal_onb;
    const Eigen::MatrixXd JE = J * E;
    const Eigen::MatrixXd JF = J * F;
    return InducedMaps{E.transpose() * JE, F.transpose() * JE, E.transpose() * JF, F.transpose() * JF};
}

InducedMaps induced_maps(const StructureOperator& J, const FrameData& frame) {
    return induced_maps(J.matrix, frame);
}

SigmaStructure sigma_structure(const InducedMaps& maps) {
    // NX = sum u_a(X) N_a, t N_a = xi_a, n N_a = sum_b a_ab N_b.
    return SigmaStructure{maps.T, maps.N, maps.t, maps.n.transpose()};
}

SigmaStructure sigma_structure(const StructureOperator& J, const FrameData& frame) {
    return sigma_structure(induced_maps(J, frame));
}

namespace {

constexpr std::uint64_t kTheoremStream = 0x7468656f72656d31ULL;

void check_structure(const SigmaStructure& s, const MetallicParams& prm, SplitMix64& rng, int dirs,
                     double tol, VerificationReport& report) {
    const double p = prm.p;
    const double q = prm.q;
    const Eigen::Index dim = s.T.rows();
    const Eigen::Index r = s.a.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
    const Eigen::MatrixXd Ir = Eigen::MatrixXd::Identity(r, r);

    const Eigen::MatrixXd tangent_poly = s.T * s.T - p * s.T - q * I + s.xi * s.u;
    const Eigen::MatrixXd u_of_T = s.u * s.T - p * s.u + s.a.transpose() * s.u;
    for (int k = 0; k < dirs; ++k) {
        const Eigen::VectorXd X = random_unit_vector(rng, dim);
        report.record("sigma.tangent_polynomial", "T^2 X = pTX + qX - sum u_a(X) xi_a",
                      (tangent_poly * X).norm(), tol);
        report.record("sigma.u_of_T", "u_a(TX) = p u_a(X) - sum a_ab u_b(X)", (u_of_T * X).norm(), tol);
    }
    report.record("sigma.a_symmetric", "a_ab = a_ba", (s.a - s.a.transpose()).norm(), tol);
    report.record("sigma.u_of_xi", "u_a(xi_b) = q delta_ab + p a_ab - sum a_ag a_gb",
                  ((s.u * s.xi).transpose() - (q * Ir + p * s.a - s.a * s.a)).norm(), tol);
    report.record("sigma.T_of_xi", "T xi_a = p xi_a - sum a_ab xi_b",
                  (s.T * s.xi - (p * s.xi - s.xi * s.a.transpose())).norm(), tol);
    report.record("sigma.u_dual_xi", "u_a(X) = g(X, xi_a)", (s.u - s.xi.transpose()).norm(), tol);
    report.record("sigma.T_symmetric", "g(TX,Y) = g(X,TY)", (s.T - s.T.transpose()).norm(), tol);
}

}  // namespace

VerificationReport verify_theorem1(const std::vector<SigmaStructure>& structures,
                                   const MetallicParams& params, const SamplingPlan& plan) {
    validate(plan);
    VerificationReport report;
    report.set_seed(plan.seed);
    SplitMix64 rng = SplitMix64::stream(plan.seed, kTheoremStream);
    for (const auto& s : structures) check_structure(s, params, rng, plan.dirs_per_point, plan.tol.algebraic, report);
    return report;
}

VerificationReport verify_theorem1(const StructureOperator& J, const Immersion& f, const SamplingPlan& plan) {
    if (!J.params) throw InputError("verify_theorem1: operator has no metallic parameters");
    const auto points = sample_points(f, plan);
    std::vector<SigmaStructure> structures;
    structures.reserve(points.size());
    double max_normal = 0.0;
    for (const auto& x : points) {
        structures.push_back(sigma_structure(J, frame_at(f, x)));
        max_normal = std::max(max_normal, structures.back().u.norm());
    }
    VerificationReport report = verify_theorem1(structures, *J.params, plan);
    if (max_normal < plan.tol.algebraic) {
        const double p = J.params->p;
        const double q = J.params->q;
        for (const auto& s : structures) {
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(s.T.rows(), s.T.rows());
            report.record("sigma.invariant_polynomial", "N = 0 implies T^2 = pT + qI",
                          (s.T * s.T - p * s.T - q * I).norm(), plan.tol.algebraic);
        }
    }
    return report;
}

}  // namespace mslant
