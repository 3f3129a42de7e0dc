#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mslant/expression.hpp"
#include "mslant/immersion.hpp"
#include "mslant/metallic.hpp"
#include "mslant/report.hpp"
#include "mslant/sampling.hpp"

namespace mslant {

// A distribution on the submanifold, selected by one of:
//  - chart coordinate indices (span of the pushed-forward coordinate fields),
//  - chart vector fields (k fields, each m' expressions in chart components),
//  - tangent-frame coefficient fields (k fields, each m' expressions giving
//    coordinates in the orthonormal tangent frame).
class DistributionSpec {
public:
    enum class Kind { Coordinates, ChartFields, FrameCoefficients };

    static DistributionSpec coordinates(std::string name, std::vector<int> indices);
    static DistributionSpec chart_fields(std::string name, std::vector<std::vector<Expr>> fields);
    static DistributionSpec frame_coefficients(std::string name, std::vector<std::vector<Expr>> fields);

    const std::string& name() const noexcept { return name_; }
    Kind kind() const noexcept { return kind_; }
    std::size_t rank() const noexcept;
    const std::vector<int>& indices() const noexcept { return indices_; }
    const std::vector<std::vector<Expr>>& fields() const noexcept { return fields_; }

    // Spanning vectors as columns in orthonormal tangent-frame coordinates (m' x k).
    Eigen::MatrixXd frame_vectors(const FrameData& frame) const;

    // Orthonormal basis of the distribution in tangent-frame coordinates.
    // Throws DegeneratePointError when the spanning vectors are dependent.
    Eigen::MatrixXd frame_basis(const FrameData& frame) const;

    // Spanning vectors as chart vector fields evaluated at the frame point (m' x k).
    Eigen::MatrixXd chart_vectors(const FrameData& frame) const;

private:
    DistributionSpec(std::string name, Kind kind) : name_(std::move(name)), kind_(kind) {}

    std::string name_;
    Kind kind_;
    std::vector<int> indices_;
    std::vector<std::vector<Expr>> fields_;
};

enum class SlantClass { Invariant, AntiInvariant, ProperSlant, NotSlant };

std::string_view to_string(SlantClass c);

struct AngleReport {
    std::vector<double> angles;  // radians in [0, pi/2]
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double max_deviation = 0.0;  // max |angle - mean|
    SlantClass classification = SlantClass::NotSlant;
    double lambda = 0.0;         // mean cos^2
};

// theta(X) = arccos(||P TX|| / ||JX||) where P projects onto the tangent
// space; pi/2 exactly when ||P TX|| < 1e-12 ||JX||. X is an ambient vector.
// Throws InputError for a zero vector.
double wirtinger_angle(const Eigen::MatrixXd& J, const FrameData& frame, const Eigen::VectorXd& X);
double wirtinger_angle_J(const StructureOperator& J, const FrameData& frame, const TangentVector& X);
double wirtinger_angle_F(const StructureOperator& F, const FrameData& frame, const TangentVector& X);

// Same ratio with the projection onto a distribution (basis in tangent-frame
// coordinates) instead of the whole tangent space.
double distribution_angle(const Eigen::MatrixXd& J, const FrameData& frame, const Eigen::MatrixXd& basis,
                          const Eigen::VectorXd& X);

// Classifies a set of angles with the given tolerance.
AngleReport summarize_angles(std::vector<double> angles, double angle_tol);

AngleReport slant_test(const StructureOperator& J, const Immersion& f, const DistributionSpec& D,
                       const SamplingPlan& plan);

struct LambdaFit {
    double lambda = 0.0;
    double residual = 0.0;  // || A^2 - lambda (pA + qI) ||_2 with A = P_D T on D
};

// Least-squares lambda for (P_D T)^2 = lambda (p P_D T + qI) on D at one point.
LambdaFit slant_distribution_lambda(const StructureOperator& J, const FrameData& frame,
                                    const DistributionSpec& D);

// Identities that hold on a slant distribution with cos^2 theta = `cos2`:
// inner products of P_D T and of the remainder JX - P_D TX, the quadratic
// relation for P_D T, and sum u_a(X) xi_a = sin^2 theta (pTX + qX).
VerificationReport slant_identities(const StructureOperator& J, const Immersion& f,
                                    const DistributionSpec& D, double cos2, const SamplingPlan& plan);

// Checks that D1 and D2 are orthogonal and span the tangent space (ConfigError
// otherwise), that D1 is invariant, that D2 is slant (anti-invariant allowed), and the inner
// product and quadratic identities for T P2.
VerificationReport semi_slant_check(const StructureOperator& J, const Immersion& f,
                                    const DistributionSpec& D1, const DistributionSpec& D2,
                                    const SamplingPlan& plan);

struct AngleRelation {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

// lhs = ((2 sigma - p)^2 / 4) ||X||^2 sin^2(theta_F(X)),
// rhs = (p <JX,X> + q ||X||^2) sin^2(theta_J(X)).
// Throws ConfigError unless J = ((2 sigma - p)/2) F + (p/2) I.
AngleRelation pointwise_angle_relation(const StructureOperator& J, const StructureOperator& F,
                                       const FrameData& frame, const Eigen::VectorXd& X,
                                       double tol = kDefaultStructureTol);

struct AnglePrediction {
    double predicted_sin = 0.0;  // (2 sigma - p)/(2 sigma) sin(vartheta)
    double observed_sin = 0.0;   // sin(theta)
    double discrepancy = 0.0;
};

AnglePrediction theorem_angle_relation(double theta, double vartheta, const MetallicParams& params);

}  // namespace mslant
