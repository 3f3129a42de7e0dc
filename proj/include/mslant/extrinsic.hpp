#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mslant/expression.hpp"
#include "mslant/immersion.hpp"
#include "mslant/metallic.hpp"
#include "mslant/report.hpp"
#include "mslant/sampling.hpp"
#include "mslant/slant.hpp"

namespace mslant {

inline constexpr double kDefaultFdRelativeStep = 1e-5;

// Ambient structure operator as a field over the chart. A constant operator
// is parallel in flat space; the optional scale makes it point dependent,
// which breaks parallelism on purpose.
struct StructureField {
    StructureOperator base;
    std::optional<Expr> scale;

    Eigen::MatrixXd at(const Eigen::VectorXd& x) const;
    bool parallel() const noexcept { return !scale.has_value(); }
};

// Vector field on the chart, returning chart components at a chart point.
class ChartVectorField {
public:
    using Fn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

    explicit ChartVectorField(Fn fn) : fn_(std::move(fn)) {}

    static ChartVectorField coordinate(Eigen::Index index, Eigen::Index chart_dim);
    static ChartVectorField expressions(std::vector<Expr> components);
    // value + slope (x - origin)
    static ChartVectorField affine(Eigen::VectorXd value, Eigen::MatrixXd slope, Eigen::VectorXd origin);

    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return fn_(x); }

private:
    Fn fn_;
};

// Ambient-valued and scalar fields over the chart.
using AmbientField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ScalarField = std::function<double(const Eigen::VectorXd&)>;

// Second fundamental form, shape operators and normal connection at one
// chart point. The normal frame is the deterministic completion of `frame`;
// neighbouring frames reuse its axes so the frame varies smoothly.
struct ExtrinsicData {
    FrameData frame;
    CoordinateHessian hessian;
    std::vector<Eigen::MatrixXd> h;      // per normal index a: h_a(d_i, d_j), m' x m'
    std::vector<Eigen::MatrixXd> A;      // per normal index a: A_a in the tangent frame
    std::vector<Eigen::MatrixXd> l;      // per coordinate i: l(d_i)(a, b) = <d_i N_a, N_b>
    std::vector<Eigen::MatrixXd> dN;     // per coordinate i: d_i of the normal frame, m x r

    Eigen::Index codim() const noexcept { return frame.codim(); }

    // Ambient tangent vectors in, ambient normal vector out.
    Eigen::VectorXd h_of(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const;
    // A_V X for ambient normal V and tangent X.
    Eigen::VectorXd shape(const Eigen::VectorXd& V, const Eigen::VectorXd& X) const;
    // r x r matrix l_ab(X).
    Eigen::MatrixXd l_of(const Eigen::VectorXd& X) const;
    // -tangential(d_X N_a) in the tangent frame, per a; equals A_a X when the
    // Weingarten formula closes.
    Eigen::VectorXd weingarten(Eigen::Index a, const Eigen::VectorXd& X) const;
};

// Central differences in chart coordinates with per-coordinate step
// relative_step * (box width), plus the field constructions used by the
// covariant derivatives.
class SubmanifoldCalculus {
public:
    SubmanifoldCalculus(const Immersion& f, StructureField J, double relative_step = kDefaultFdRelativeStep);

    const Immersion& immersion() const noexcept { return *f_; }
    const StructureField& structure() const noexcept { return J_; }
    const Eigen::VectorXd& steps() const noexcept { return steps_; }

    ExtrinsicData extrinsic_at(const Eigen::VectorXd& x) const;

    // Derivative of a field along the chart direction cX at x.
    Eigen::VectorXd derivative(const Eigen::VectorXd& x, const Eigen::VectorXd& cX, const AmbientField& W) const;
    double derivative(const Eigen::VectorXd& x, const Eigen::VectorXd& cX, const ScalarField& s) const;

    // Chart bracket [X, Y] at x, in chart components.
    Eigen::VectorXd bracket(const Eigen::VectorXd& x, const ChartVectorField& X, const ChartVectorField& Y) const;

    // Field constructions (ambient vectors at f(x')).
    AmbientField pushed(const ChartVectorField& Y) const;
    AmbientField tangential_image(const ChartVectorField& Y) const;   // TY
    AmbientField normal_image(const ChartVectorField& Y) const;       // NY
    AmbientField tangential_image(const AmbientField& V) const;       // tV
    AmbientField normal_image(const AmbientField& V) const;           // nV
    // sum_a v_a(x') N_a(x') with the normal axes of `base`.
    AmbientField normal_field(const FrameData& base, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> coeffs) const;
    // x' -> (u_a(Y))_a = (<JY, N_a>)_a with the normal axes of `base`.
    AmbientField u_of(const FrameData& base, const ChartVectorField& Y) const;

    // Levi-Civita connection of the induced metric: tangential part of the
    // ambient derivative, Hessian term exact, field term by differences.
    Eigen::VectorXd induced_connection(const ExtrinsicData& at, const ChartVectorField& X,
                                       const ChartVectorField& Y) const;
    Eigen::VectorXd ambient_connection(const ExtrinsicData& at, const ChartVectorField& X,
                                       const ChartVectorField& Y) const;
    Eigen::VectorXd normal_connection(const ExtrinsicData& at, const ChartVectorField& X, const AmbientField& V) const;

    Eigen::VectorXd covariant_T(const ExtrinsicData& at, const ChartVectorField& X, const ChartVectorField& Y) const;
    Eigen::VectorXd covariant_N(const ExtrinsicData& at, const ChartVectorField& X, const ChartVectorField& Y) const;
    Eigen::VectorXd covariant_t(const ExtrinsicData& at, const ChartVectorField& X, const AmbientField& V) const;
    Eigen::VectorXd covariant_n(const ExtrinsicData& at, const ChartVectorField& X, const AmbientField& V) const;

    // (nabla_X u_a)(Y) = X(u_a(Y)) - u_a(nabla_X Y), for every a.
    Eigen::VectorXd covariant_u(const ExtrinsicData& at, const ChartVectorField& X, const ChartVectorField& Y) const;

private:
    const Immersion* f_;
    StructureField J_;
    Eigen::VectorXd steps_;
};

// Convenience forms evaluating at one chart point.
ExtrinsicData extrinsic_at(const Immersion& f, const Eigen::VectorXd& x,
                           double relative_step = kDefaultFdRelativeStep);
TangentVector induced_connection(const Immersion& f, const Eigen::VectorXd& x, const ChartVectorField& X,
                                 const ChartVectorField& Y);
TangentVector covariant_T(const Immersion& f, const StructureField& J, const Eigen::VectorXd& x,
                          const ChartVectorField& X, const ChartVectorField& Y);
NormalVector covariant_N(const Immersion& f, const StructureField& J, const Eigen::VectorXd& x,
                         const ChartVectorField& X, const ChartVectorField& Y);
TangentVector covariant_t(const Immersion& f, const StructureField& J, const Eigen::VectorXd& x,
                          const ChartVectorField& X, const AmbientField& V);
NormalVector covariant_n(const Immersion& f, const StructureField& J, const Eigen::VectorXd& x,
                         const ChartVectorField& X, const AmbientField& V);

// Pointwise invariants of the extrinsic data and the induced connection:
// h symmetry, the h / A duality checked against the Weingarten formula,
// antisymmetry of l, metric compatibility, torsion-freeness and the
// symmetry of the derivatives of J and T.
VerificationReport verify_extrinsic(const Immersion& f, const StructureField& J, const SamplingPlan& plan);

// Covariant derivatives of T, N, t, n and u_a against their expressions in
// h, A, l and the Sigma-structure.
VerificationReport verify_derivative_props(const Immersion& f, const StructureField& J, const SamplingPlan& plan);

// Tangential and normal parts of J[X, Y] against connection terms. The
// normal-part criterion stated with X(u_a(Y)) - Y(u_a(X)) is asserted; the
// variant stated with normal-connection terms in their place is reported.
VerificationReport verify_bracket_props(const Immersion& f, const StructureField& J, const SamplingPlan& plan);

// ||(I - P_D)[X, Y]|| over random sections X, Y of D.
VerificationReport bracket_test(const Immersion& f, const DistributionSpec& D, const SamplingPlan& plan);

// Integrability criteria for the invariant D1 and the slant D2, each
// cross-validated against the direct bracket test.
VerificationReport integrability_checks(const Immersion& f, const StructureField& J, const DistributionSpec& D1,
                                        const DistributionSpec& D2, const SamplingPlan& plan);

// Mixed D1 x D2 values of h and of the derivative of N, the shape-operator
// conditions for parallel N, and the implication from vanishing mixed h to
// vanishing mixed derivative of N.
VerificationReport mixed_geodesic_check(const Immersion& f, const StructureField& J, const DistributionSpec& D1,
                                        const DistributionSpec& D2, const SamplingPlan& plan);

}  // namespace mslant
