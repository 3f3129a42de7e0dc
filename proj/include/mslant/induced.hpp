#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mslant/immersion.hpp"
#include "mslant/metallic.hpp"
#include "mslant/report.hpp"
#include "mslant/sampling.hpp"

namespace mslant {

// Tangential and normal parts of a structure operator restricted to a
// submanifold, as matrices in the orthonormal tangent (E) and normal (F)
// frames: T = E^T J E, N = F^T J E, t = E^T J F, n = F^T J F. Applied to an
// almost product structure the same four blocks are f, omega, B, C.
struct InducedMaps {
    Eigen::MatrixXd T;  // m' x m'
    Eigen::MatrixXd N;  // r x m'
    Eigen::MatrixXd t;  // m' x r
    Eigen::MatrixXd n;  // r x r
};

InducedMaps induced_maps(const StructureOperator& J, const FrameData& frame);
InducedMaps induced_maps(const Eigen::MatrixXd& J, const FrameData& frame);

// Row alpha of u is the 1-form u_alpha, column alpha of xi is the vector
// xi_alpha, and a holds the coefficients a_{alpha beta}; all in orthonormal
// frame coordinates.
struct SigmaStructure {
    Eigen::MatrixXd T;
    Eigen::MatrixXd u;
    Eigen::MatrixXd xi;
    Eigen::MatrixXd a;
};

SigmaStructure sigma_structure(const InducedMaps& maps);
SigmaStructure sigma_structure(const StructureOperator& J, const FrameData& frame);

// Residuals of the structure equations of an induced Sigma-structure, folded
// over `dirs_per_point` random unit tangent vectors per structure:
//   T^2 X - pTX - qX + sum u_a(X) xi_a = 0
//   u_a(TX) - p u_a(X) + sum a_ab u_b(X) = 0
//   a symmetric
//   u_a(xi_b) = q delta_ab + p a_ab - sum a_ag a_gb
//   T xi_a = p xi_a - sum a_ab xi_b
//   u_a(X) = g(X, xi_a)
// plus the symmetry of T.
VerificationReport verify_theorem1(const std::vector<SigmaStructure>& structures,
                                   const MetallicParams& params, const SamplingPlan& plan);

// Builds the Sigma-structure at every sample point and verifies it. When N
// vanishes at every sample (invariant submanifold) T itself must satisfy
// T^2 = pT + qI, which is recorded as an extra check.
VerificationReport verify_theorem1(const StructureOperator& J, const Immersion& f,
                                   const SamplingPlan& plan);

}  // namespace mslant
