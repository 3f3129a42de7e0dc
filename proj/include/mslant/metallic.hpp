#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "mslant/report.hpp"

namespace mslant {

inline constexpr Eigen::Index kMaxAmbientDim = 1024;
inline constexpr double kDefaultStructureTol = 1e-9;

// The metallic mean sigma_{p,q}: the positive root of x^2 - p x - q, together
// with its conjugate root sigma_bar = p - sigma.
struct MetallicParams {
    int p = 1;
    int q = 1;
    double sigma = 0.0;
    double sigma_bar = 0.0;

    // 2 sigma - p = sqrt(p^2 + 4q), the gap between the two roots.
    double root_gap() const noexcept { return sigma - sigma_bar; }
};

// Throws DomainError unless p >= 1 and q >= 1.
MetallicParams metallic_number(int p, int q);

enum class StructureKind { Metallic, AlmostProduct };
enum class Branch { Plus, Minus };

// A constant (1,1)-tensor on R^m with a constant SPD metric. For the Metallic
// kind `params` is set; for AlmostProduct it is empty.
struct StructureOperator {
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd metric;
    StructureKind kind = StructureKind::Metallic;
    std::optional<MetallicParams> params;

    Eigen::Index dim() const noexcept { return matrix.rows(); }

    static StructureOperator metallic(Eigen::MatrixXd matrix, const MetallicParams& params);
    static StructureOperator metallic(Eigen::MatrixXd matrix, Eigen::MatrixXd metric,
                                      const MetallicParams& params);
    static StructureOperator almost_product(Eigen::MatrixXd matrix);
    static StructureOperator almost_product(Eigen::MatrixXd matrix, Eigen::MatrixXd metric);
};

struct ProjectorPair {
    Eigen::MatrixXd P;  // onto the sigma_bar eigenspace
    Eigen::MatrixXd Q;  // onto the sigma eigenspace
};

// Induced infinity norm (maximum absolute row sum).
double inf_norm(const Eigen::MatrixXd& m);

// Residual of the defining polynomial: J^2 - pJ - qI or F^2 - I.
double polynomial_residual(const StructureOperator& s);

// || G J - J^T G ||, zero exactly when the metric makes J self-adjoint.
double compatibility_residual(const StructureOperator& s);

// Checks the polynomial identity, metric compatibility and, for metallic
// operators, g(JX,JY) = g(J^2 X,Y) = p g(JX,Y) + q g(X,Y) over `vector_samples`
// random pairs. Throws InputError on malformed input.
VerificationReport validate_structure(const StructureOperator& s, double tol = kDefaultStructureTol,
                                      int vector_samples = 100, std::uint64_t seed = 0x5eed);

// Throws StructureError unless validate_structure passes.
void require_valid(const StructureOperator& s, double tol = kDefaultStructureTol);

// J = +-((2 sigma - p)/2) F + (p/2) I.
StructureOperator metallic_from_product(const StructureOperator& F, const MetallicParams& params,
                                        Branch branch, double tol = kDefaultStructureTol);

// F1 = (2J - pI)/(2 sigma - p) and F2 = -F1.
std::pair<StructureOperator, StructureOperator> products_from_metallic(
    const StructureOperator& J, double tol = kDefaultStructureTol);

// P = (sigma I - J)/(2 sigma - p), Q = (J - sigma_bar I)/(2 sigma - p).
ProjectorPair projectors(const StructureOperator& J, double tol = kDefaultStructureTol);

}  // namespace mslant
