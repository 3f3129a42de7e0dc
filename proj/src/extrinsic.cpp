#include "mslant/extrinsic.hpp"

#include <algorithm>
#include <cmath>

#include "mslant/errors.hpp"
#include "mslant/induced.hpp"

namespace mslant {

Eigen::MatrixXd StructureField::at(const Eigen::VectorXd& x) const {
    if (!scale) return base.matrix;
    return scale->evaluate(x) * base.matrix;
}

ChartVectorField ChartVectorField::coordinate(Eigen::Index index, Eigen::Index chart_dim) {
    if (index < 0 || index >= chart_dim) throw InputError("coordinate field index out of range");
    return ChartVectorField([index, chart_dim](const Eigen::VectorXd&) {
        return Eigen::VectorXd::Unit(chart_dim, index).eval();
    });
}

ChartVectorField ChartVectorField::expressions(std::vector<Expr> components) {
    if (components.empty()) throw InputError("chart vector field needs components");
    return ChartVectorField([components = std::move(components)](const Eigen::VectorXd& x) {
        Eigen::VectorXd out(static_cast<Eigen::Index>(components.size()));
        for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = components[static_cast<std::size_t>(i)].evaluate(x);
        return out;
    });
}

ChartVectorField ChartVectorField::affine(Eigen::VectorXd value, Eigen::MatrixXd slope, Eigen::VectorXd origin) {
    if (slope.rows() != value.size() || slope.cols() != origin.size())
        throw InputError("affine chart field: inconsistent dimensions");
    return ChartVectorField([value = std::move(value), slope = std::move(slope),
                             origin = std::move(origin)](const Eigen::VectorXd& x) {
        return (value + slope * (x - origin)).eval();
    });
}

Eigen::VectorXd ExtrinsicData::h_of(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const {
    return frame.normal(hessian.contract(frame.coords_of(X), frame.coords_of(Y)));
}

Eigen::VectorXd ExtrinsicData::shape(const Eigen::VectorXd& V, const Eigen::VectorXd& X) const {
    const Eigen::VectorXd v = frame.normal_onb.transpose() * V;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(frame.chart_dim(), frame.chart_dim());
    for (Eigen::Index a = 0; a < v.size(); ++a) M += v[a] * A[static_cast<std::size_t>(a)];
    return frame.tangent_onb * (M * (frame.tangent_onb.transpose() * X));
}

Eigen::MatrixXd ExtrinsicData::l_of(const Eigen::VectorXd& X) const {
    const Eigen::VectorXd c = frame.coords_of(X);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(codim(), codim());
    for (Eigen::Index i = 0; i < c.size(); ++i) out += c[i] * l[static_cast<std::size_t>(i)];
    return out;
}

Eigen::VectorXd ExtrinsicData::weingarten(Eigen::Index a, const Eigen::VectorXd& X) const {
    const Eigen::VectorXd c = frame.coords_of(X);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(frame.ambient_dim());
    for (Eigen::Index i = 0; i < c.size(); ++i) d += c[i] * dN[static_cast<std::size_t>(i)].col(a);
    return -(frame.tangent_onb.transpose() * d);
}

SubmanifoldCalculus::SubmanifoldCalculus(const Immersion& f, StructureField J, double relative_step)
    : f_(&f), J_(std::move(J)), steps_(f.chart_dim()) {
    if (J_.base.dim() != f.ambient_dim()) throw InputError("structure and immersion dimensions differ");
    if (!(relative_step > 0.0 && relative_step < 0.1)) throw InputError("finite-difference step out of range");
    for (Eigen::Index i = 0; i < steps_.size(); ++i) {
        const auto [lo, hi] = f.chart_box()[static_cast<std::size_t>(i)];
        steps_[i] = relative_step * (hi - lo);
    }
}

ExtrinsicData SubmanifoldCalculus::extrinsic_at(const Eigen::VectorXd& x) const {
    ExtrinsicData ed;
    ed.frame = frame_at(*f_, x);
    ed.hessian = coordinate_hessian(*f_, x);
    const Eigen::Index n = ed.frame.chart_dim();
    const Eigen::Index r = ed.frame.codim();
    const Eigen::MatrixXd& Fn = ed.frame.normal_onb;
    const Eigen::MatrixXd Rinv =
        ed.frame.frame_from_coords.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));

    for (Eigen::Index a = 0; a < r; ++a) {
        Eigen::MatrixXd ha(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) ha(i, j) = Fn.col(a).dot(ed.hessian(i, j));
        ed.A.push_back(Rinv.transpose() * ha * Rinv);
        ed.h.push_back(std::move(ha));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp[i] += steps_[i];
        xm[i] -= steps_[i];
        const Eigen::MatrixXd plus = frame_at(*f_, xp, ed.frame.normal_axes).normal_onb;
        const Eigen::MatrixXd minus = frame_at(*f_, xm, ed.frame.normal_axes).normal_onb;
        ed.dN.push_back((plus - minus) / (2 * steps_[i]));
        ed.l.push_back(ed.dN.back().transpose() * Fn);
    }
    return ed;
}

Eigen::VectorXd SubmanifoldCalculus::derivative(const Eigen::VectorXd& x, const Eigen::VectorXd& cX,
                                                const AmbientField& W) const {
    Eigen::VectorXd out;
    for (Eigen::Index i = 0; i < cX.size(); ++i) {
        if (cX[i] == 0.0) continue;
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp[i] += steps_[i];
        xm[i] -= steps_[i];
        Eigen::VectorXd term = (cX[i] / (2 * steps_[i])) * (W(xp) - W(xm));
        if (out.size() == 0)
            out = std::move(term);
        else
            out += term;
    }
    if (out.size() == 0) out = Eigen::VectorXd::Zero(W(x).size());
    return out;
}

double SubmanifoldCalculus::derivative(const Eigen::VectorXd& x, const Eigen::VectorXd& cX,
                                       const ScalarField& s) const {
    double out = 0.0;
    for (Eigen::Index i = 0; i < cX.size(); ++i) {
        if (cX[i] == 0.0) continue;
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp[i] += steps_[i];
        xm[i] -= steps_[i];
        out += cX[i] * (s(xp) - s(xm)) / (2 * steps_[i]);
    }
    return out;
}

Eigen::VectorXd SubmanifoldCalculus::bracket(const Eigen::VectorXd& x, const ChartVectorField& X,
                                             const ChartVectorField& Y) const {
    const AmbientField fx = [&X](const Eigen::VectorXd& p) { return X(p); };
    const AmbientField fy = [&Y](const Eigen::VectorXd& p) { return Y(p); };
    return derivative(x, X(x), fy) - derivative(x, Y(x), fx);
}

AmbientField SubmanifoldCalculus::pushed(const ChartVectorField& Y) const {
    return [this, Y](const Eigen::VectorXd& p) { return (f_->jacobian(p) * Y(p)).eval(); };
}

AmbientField SubmanifoldCalculus::tangential_image(const ChartVectorField& Y) const {
    return [this, Y](const Eigen::VectorXd& p) {
        const FrameData fr = frame_at(*f_, p);
        return fr.tangential(J_.at(p) * (fr.jacobian * Y(p)));
    };
}

AmbientField SubmanifoldCalculus::normal_image(const ChartVectorField& Y) const {
    return [this, Y](const Eigen::VectorXd& p) {
        const FrameData fr = frame_at(*f_, p);
        return fr.normal(J_.at(p) * (fr.jacobian * Y(p)));
    };
}

AmbientField SubmanifoldCalculus::tangential_image(const AmbientField& V) const {
    return [this, V](const Eigen::VectorXd& p) { return frame_at(*f_, p).tangential(J_.at(p) * V(p)); };
}

AmbientField SubmanifoldCalculus::normal_image(const AmbientField& V) const {
    return [this, V](const Eigen::VectorXd& p) { return frame_at(*f_, p).normal(J_.at(p) * V(p)); };
}

AmbientField SubmanifoldCalculus::normal_field(const FrameData& base,
                                               std::function<Eigen::VectorXd(const Eigen::VectorXd&)> coeffs) const {
    return [this, axes = base.normal_axes, coeffs = std::move(coeffs)](const Eigen::VectorXd& p) {
        return (frame_at(*f_, p, axes).normal_onb * coeffs(p)).eval();
    };
}

AmbientField SubmanifoldCalculus::u_of(const FrameData& base, const ChartVectorField& Y) const {
    return [this, axes = base.normal_axes, Y](const Eigen::VectorXd& p) {
        const FrameData fr = frame_at(*f_, p, axes);
        return (fr.normal_onb.transpose() * (J_.at(p) * (fr.jacobian * Y(p)))).eval();
    };
}

Eigen::VectorXd SubmanifoldCalculus::ambient_connection(const ExtrinsicData& at, const ChartVectorField& X,
                                                        const ChartVectorField& Y) const {
    const Eigen::VectorXd& x = at.frame.point;
    const Eigen::VectorXd cX = X(x);
    const AmbientField comps = [&Y](const Eigen::VectorXd& p) { return Y(p); };
    return at.hessian.contract(cX, Y(x)) + at.frame.jacobian * derivative(x, cX, comps);
}

Eigen::VectorXd SubmanifoldCalculus::induced_connection(const ExtrinsicData& at, const ChartVectorField& X,
                                                        const ChartVectorField& Y) const {
    return at.frame.tangential(ambient_connection(at, X, Y));
}

Eigen::VectorXd SubmanifoldCalculus::normal_connection(const ExtrinsicData& at, const ChartVectorField& X,
                                                       const AmbientField& V) const {
    return at.frame.normal(derivative(at.frame.point, X(at.frame.point), V));
}

Eigen::VectorXd SubmanifoldCalculus::covariant_T(const ExtrinsicData& at, const ChartVectorField& X,
                                                 const ChartVectorField& Y) const {
    const Eigen::VectorXd& x = at.frame.point;
    const Eigen::VectorXd lhs = at.frame.tangential(derivative(x, X(x), tangential_image(Y)));
    return lhs - at.frame.tangential(J_.at(x) * induced_connection(at, X, Y));
}

Eigen::VectorXd SubmanifoldCalculus::covariant_N(const ExtrinsicData& at, const ChartVectorField& X,
                                                 const ChartVectorField& Y) const {
    const Eigen::VectorXd& x = at.frame.point;
    const Eigen::VectorXd lhs = at.frame.normal(derivative(x, X(x), normal_image(Y)));
    return lhs - at.frame.normal(J_.at(x) * induced_connection(at, X, Y));
}

Eigen::VectorXd SubmanifoldCalculus::covariant_t(const ExtrinsicData& at, const ChartVectorField& X,
                                                 const AmbientField& V) const {
    const Eigen::VectorXd& x = at.frame.point;
    const Eigen::VectorXd lhs = at.frame.tangential(derivative(x, X(x), tangential_image(V)));
    return lhs - at.frame.tangential(J_.at(x) * normal_connection(at, X, V));
}

Eigen::VectorXd SubmanifoldCalculus::covariant_n(const ExtrinsicData& at, const ChartVectorField& X,
                                                 const AmbientField& V) const {
    const Eigen::VectorXd& x = at.frame.point;
    const Eigen::VectorXd lhs = at.frame.normal(derivative(x, X(x), normal_image(V)));
    return lhs - at.frame.normal(J_.at(x) * normal_connection(at, X, V));
}

Eigen::VectorXd SubmanifoldCalculus::covariant_u(const ExtrinsicData& at, const ChartVectorField& X,
                                                 const ChartVectorField& Y) const {
    const Eigen::VectorXd& x = at.frame.point;
    const Eigen::VectorXd lhs = derivative(x, X(x), u_of(at.frame, Y));
    return lhs - at.frame.normal_onb.transpose() * (J_.at(x) * induced_connection(at, X, Y));
}

ExtrinsicData extrinsic_at(const Immersion& f, const Eigen::VectorXd& x, double relative_step) {
    // The structure plays no part in h, A or l; any operator of the right size will do.
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(f.ambient_dim(), f.ambient_dim());
    StructureField J{StructureOperator::metallic(I * metallic_number(1, 1).sigma, metallic_number(1, 1)), {}};
    return SubmanifoldCalculus(f, std::move(J), relative_step).extrinsic_at(x);
}

namespace {

const StructureField& require_dim(const Immersion& f, const StructureField& J) {
    if (J.base.dim() != f.ambient_dim()) throw InputError("structure and immersion dimensions differ");
    return J;
}

}  // namespace

TangentVector induced_connection(const Immersion& f, const Eigen::VectorXd& x, const ChartVectorField& X,
                                 const ChartVectorField& Y) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(f.ambient_dim(), f.ambient_dim());
    const SubmanifoldCalculus calc(
        f, StructureField{StructureOperator::metallic(I * metallic_number(1, 1).sigma, metallic_number(1, 1)), {}});
    const ExtrinsicData at = calc.extrinsic_at(x);
    return {calc.induced_connection(at, X, Y), f.evaluate(x)};
}

TangentVector covariant_T(const Immersion& f, const StructureField& J, const Eigen::VectorXd& x,
                          const ChartVectorField& X, const ChartVectorField& Y) {
    const SubmanifoldCalculus calc(f, require_dim(f, J));
    return {calc.covariant_T(calc.extrinsic_at(x), X, Y), f.evaluate(x)};
}

NormalVector covariant_N(const Immersion& f, const StructureField& J, const Eigen::VectorXd& x,
                         const ChartVectorField& X, const ChartVectorField& Y) {
    const SubmanifoldCalculus calc(f, require_dim(f, J));
    return {calc.covariant_N(calc.extrinsic_at(x), X, Y), f.evaluate(x)};
}

TangentVector covariant_t(const Immersion& f, const StructureField& J, const Eigen::VectorXd& x,
                          const ChartVectorField& X, const AmbientField& V) {
    const SubmanifoldCalculus calc(f, require_dim(f, J));
    return {calc.covariant_t(calc.extrinsic_at(x), X, V), f.evaluate(x)};
}

NormalVector covariant_n(const Immersion& f, const StructureField& J, const Eigen::VectorXd& x,
                         const ChartVectorField& X, const AmbientField& V) {
    const SubmanifoldCalculus calc(f, require_dim(f, J));
    return {calc.covariant_n(calc.extrinsic_at(x), X, V), f.evaluate(x)};
}

namespace {

constexpr std::uint64_t kExtrinsicStream = 0x65787472ULL;
constexpr std::uint64_t kDerivativeStream = 0x64657276ULL;
constexpr std::uint64_t kBracketStream = 0x62726b74ULL;
constexpr std::uint64_t kIntegrabilityStream = 0x696e7467ULL;
constexpr std::uint64_t kMixedStream = 0x6d697864ULL;

Eigen::MatrixXd random_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

ChartVectorField random_field(SplitMix64& rng, const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd value = random_unit_vector(rng, n);
    Eigen::MatrixXd slope = random_matrix(rng, n, n);
    return ChartVectorField::affine(std::move(value), std::move(slope), x);
}

// Random section a(x) of D with affine coefficients around x.
ChartVectorField random_section(SplitMix64& rng, const Immersion& f, const DistributionSpec& D,
                                const Eigen::VectorXd& x) {
    const auto k = static_cast<Eigen::Index>(D.rank());
    Eigen::VectorXd value = random_unit_vector(rng, k);
    Eigen::MatrixXd slope = random_matrix(rng, k, x.size());
    return ChartVectorField([&f, &D, value = std::move(value), slope = std::move(slope), x](const Eigen::VectorXd& p) {
        return (D.chart_vectors(frame_at(f, p)) * (value + slope * (p - x))).eval();
    });
}

AmbientField random_normal_field(SplitMix64& rng, const SubmanifoldCalculus& calc, const ExtrinsicData& at) {
    const Eigen::Index r = at.codim();
    Eigen::VectorXd value = random_unit_vector(rng, r);
    Eigen::MatrixXd slope = random_matrix(rng, r, at.frame.chart_dim());
    return calc.normal_field(at.frame, [value = std::move(value), slope = std::move(slope),
                                        x = at.frame.point](const Eigen::VectorXd& p) {
        return (value + slope * (p - x)).eval();
    });
}

struct SigmaAt {
    Eigen::MatrixXd J;
    Eigen::MatrixXd a;   // a(b, c) = a_bc
    Eigen::MatrixXd xi;  // ambient xi_a as columns
};

SigmaAt sigma_at(const SubmanifoldCalculus& calc, const ExtrinsicData& at) {
    SigmaAt s;
    s.J = calc.structure().at(at.frame.point);
    const Eigen::MatrixXd& Fn = at.frame.normal_onb;
    s.a = (Fn.transpose() * s.J * Fn).transpose();
    s.xi = at.frame.tangent_onb * (at.frame.tangent_onb.transpose() * (s.J * Fn));
    return s;
}

// Right-hand side of the u-derivative identity:
// -h_a(X, TY) + sum_b [u_b(Y) l_ab(X) + h_b(X, Y) a_ba], for every a.
Eigen::VectorXd covariant_u_formula(const ExtrinsicData& at, const SigmaAt& s, const Eigen::VectorXd& X,
                                    const Eigen::VectorXd& Y) {
    const Eigen::MatrixXd& Fn = at.frame.normal_onb;
    const Eigen::VectorXd TY = at.frame.tangential(s.J * Y);
    const Eigen::VectorXd hXTY = Fn.transpose() * at.h_of(X, TY);
    const Eigen::VectorXd hXY = Fn.transpose() * at.h_of(X, Y);
    const Eigen::VectorXd uY = Fn.transpose() * (s.J * Y);
    const Eigen::MatrixXd l = at.l_of(X);
    return -hXTY + l * uY + s.a.transpose() * hXY;
}

}  // namespace

VerificationReport verify_extrinsic(const Immersion& f, const StructureField& J, const SamplingPlan& plan) {
    const SubmanifoldCalculus calc(f, J);
    const double fd_tol = plan.tol.fd;
    VerificationReport report;
    report.set_seed(plan.seed);
    SplitMix64 rng = SplitMix64::stream(plan.seed, kExtrinsicStream);
    for (const auto& x : sample_points(f, plan)) {
        const ExtrinsicData at = calc.extrinsic_at(x);
        const Eigen::Index n = at.frame.chart_dim();
        const Eigen::Index r = at.codim();

        double asym = 0.0;
        double duality = 0.0;
        for (Eigen::Index a = 0; a < r; ++a) {
            const auto& ha = at.h[static_cast<std::size_t>(a)];
            asym = std::max(asym, (ha - ha.transpose()).cwiseAbs().maxCoeff());
            for (Eigen::Index i = 0; i < n; ++i) {
                const Eigen::VectorXd Xi = at.frame.jacobian.col(i);
                const Eigen::VectorXd ad = at.A[static_cast<std::size_t>(a)] * (at.frame.tangent_onb.transpose() * Xi);
                duality = std::max(duality, (ad - at.weingarten(a, Xi)).norm());
            }
        }
        report.record("extrinsic.h_symmetric", "h(X,Y) = h(Y,X)", asym, plan.tol.algebraic);
        report.record("extrinsic.shape_duality", "g(h(X,Y),V) = g(A_V X, Y), A_V from the Weingarten formula",
                      duality, fd_tol);
        double lsym = 0.0;
        for (const auto& li : at.l) lsym = std::max(lsym, (li + li.transpose()).norm());
        report.record("extrinsic.l_antisymmetric", "l_ab = -l_ba", lsym, fd_tol);

        const Eigen::MatrixXd J0 = J.at(x);
        for (int k = 0; k < plan.dirs_per_point; ++k) {
            const ChartVectorField X = random_field(rng, x);
            const ChartVectorField Y = random_field(rng, x);
            const ChartVectorField Z = random_field(rng, x);
            const Eigen::VectorXd Ya = at.frame.jacobian * Y(x);
            const Eigen::VectorXd Za = at.frame.jacobian * Z(x);
            const Eigen::VectorXd dXY = calc.induced_connection(at, X, Y);
            const Eigen::VectorXd dXZ = calc.induced_connection(at, X, Z);
            const Eigen::VectorXd dYX = calc.induced_connection(at, Y, X);
            const AmbientField pY = calc.pushed(Y);
            const AmbientField pZ = calc.pushed(Z);
            const double dG = calc.derivative(x, X(x), ScalarField([&](const Eigen::VectorXd& p) {
                return pY(p).dot(pZ(p));
            }));
            report.record("connection.metric_compatible", "X g(Y,Z) = g(nabla_X Y, Z) + g(Y, nabla_X Z)",
                          std::abs(dG - dXY.dot(Za) - Ya.dot(dXZ)), fd_tol);
            const Eigen::VectorXd br = at.frame.jacobian * calc.bracket(x, X, Y);
            report.record("connection.torsion_free", "nabla_X Y - nabla_Y X = [X,Y]", (dXY - dYX - br).norm(),
                          fd_tol);

            Eigen::MatrixXd dJ = Eigen::MatrixXd::Zero(J0.rows(), J0.cols());
            if (!J.parallel()) {
                const Eigen::VectorXd cX = X(x);
                for (Eigen::Index i = 0; i < n; ++i) {
                    Eigen::VectorXd xp = x;
                    Eigen::VectorXd xm = x;
                    xp[i] += calc.steps()[i];
                    xm[i] -= calc.steps()[i];
                    dJ += cX[i] * (J.at(xp) - J.at(xm)) / (2 * calc.steps()[i]);
                }
            }
            const Eigen::VectorXd U = random_unit_vector(rng, J0.rows());
            const Eigen::VectorXd W = random_unit_vector(rng, J0.rows());
            report.record("structure.derivative_symmetric", "g((D_X J)U, W) = g(U, (D_X J)W)",
                          std::abs((dJ * U).dot(W) - U.dot(dJ * W)), fd_tol);
            const Eigen::VectorXd dTY = calc.covariant_T(at, X, Y);
            const Eigen::VectorXd dTZ = calc.covariant_T(at, X, Z);
            report.record("T.derivative_symmetric", "g((nabla_X T)Y, Z) = g(Y, (nabla_X T)Z)",
                          std::abs(dTY.dot(Za) - Ya.dot(dTZ)), fd_tol);
        }
    }
    return report;
}

VerificationReport verify_derivative_props(const Immersion& f, const StructureField& J, const SamplingPlan& plan) {
    const SubmanifoldCalculus calc(f, J);
    const double tol = plan.tol.fd;
    VerificationReport report;
    report.set_seed(plan.seed);
    SplitMix64 rng = SplitMix64::stream(plan.seed, kDerivativeStream);
    for (const auto& x : sample_points(f, plan)) {
        const ExtrinsicData at = calc.extrinsic_at(x);
        const SigmaAt s = sigma_at(calc, at);
        const FrameData& fr = at.frame;
        const Eigen::MatrixXd& Fn = fr.normal_onb;
        for (int k = 0; k < plan.dirs_per_point; ++k) {
            const ChartVectorField X = random_field(rng, x);
            const ChartVectorField Y = random_field(rng, x);
            const AmbientField V = random_normal_field(rng, calc, at);
            const Eigen::VectorXd Xa = fr.jacobian * X(x);
            const Eigen::VectorXd Ya = fr.jacobian * Y(x);
            const Eigen::VectorXd Va = V(x);
            const Eigen::VectorXd hXY = at.h_of(Xa, Ya);
            const Eigen::VectorXd TY = fr.tangential(s.J * Ya);
            const Eigen::VectorXd NY = fr.normal(s.J * Ya);

            const Eigen::VectorXd dT = calc.covariant_T(at, X, Y);
            report.record("derivative.T", "(nabla_X T)Y = A_{NY} X + t h(X,Y)",
                          (dT - (at.shape(NY, Xa) + fr.tangential(s.J * hXY))).norm(), tol);
            report.record("derivative.N", "(nabla_X N)Y = n h(X,Y) - h(X,TY)",
                          (calc.covariant_N(at, X, Y) - (fr.normal(s.J * hXY) - at.h_of(Xa, TY))).norm(), tol);
            const Eigen::VectorXd AVX = at.shape(Va, Xa);
            report.record("derivative.t", "(nabla_X t)V = A_{nV} X - T A_V X",
                          (calc.covariant_t(at, X, V) - (at.shape(fr.normal(s.J * Va), Xa) - fr.tangential(s.J * AVX)))
                              .norm(),
                          tol);
            report.record("derivative.n", "(nabla_X n)V = -h(X, tV) - N A_V X",
                          (calc.covariant_n(at, X, V) - (-at.h_of(Xa, fr.tangential(s.J * Va)) - fr.normal(s.J * AVX)))
                              .norm(),
                          tol);

            Eigen::VectorXd sigma_form = Eigen::VectorXd::Zero(fr.ambient_dim());
            const Eigen::VectorXd h_coords = Fn.transpose() * hXY;
            const Eigen::VectorXd uY = Fn.transpose() * (s.J * Ya);
            for (Eigen::Index a = 0; a < at.codim(); ++a)
                sigma_form += h_coords[a] * s.xi.col(a) + uY[a] * at.shape(Fn.col(a), Xa);
            report.record("derivative.T_sigma", "(nabla_X T)Y = sum h_a(X,Y) xi_a + sum u_a(Y) A_a X",
                          (dT - sigma_form).norm(), tol);
            report.record("derivative.u",
                          "(nabla_X u_a)Y = -h_a(X,TY) + sum_b [u_b(Y) l_ab(X) + h_b(X,Y) a_ba]",
                          (calc.covariant_u(at, X, Y) - covariant_u_formula(at, s, Xa, Ya)).norm(), tol);
        }
    }
    return report;
}

VerificationReport verify_bracket_props(const Immersion& f, const StructureField& J, const SamplingPlan& plan) {
    const SubmanifoldCalculus calc(f, J);
    const double tol = plan.tol.fd;
    VerificationReport report;
    report.set_seed(plan.seed);
    SplitMix64 rng = SplitMix64::stream(plan.seed, kBracketStream);
    double literal_max = 0.0;
    std::size_t literal_samples = 0;
    for (const auto& x : sample_points(f, plan)) {
        const ExtrinsicData at = calc.extrinsic_at(x);
        const SigmaAt s = sigma_at(calc, at);
        const FrameData& fr = at.frame;
        const Eigen::MatrixXd& Fn = fr.normal_onb;
        for (int k = 0; k < plan.dirs_per_point; ++k) {
            const ChartVectorField X = random_field(rng, x);
            const ChartVectorField Y = random_field(rng, x);
            const Eigen::VectorXd cX = X(x);
            const Eigen::VectorXd cY = Y(x);
            const Eigen::VectorXd Xa = fr.jacobian * cX;
            const Eigen::VectorXd Ya = fr.jacobian * cY;
            const Eigen::VectorXd JB = s.J * (fr.jacobian * calc.bracket(x, X, Y));
            const Eigen::VectorXd TX = fr.tangential(s.J * Xa);
            const Eigen::VectorXd TY = fr.tangential(s.J * Ya);
            const Eigen::VectorXd NX = fr.normal(s.J * Xa);
            const Eigen::VectorXd NY = fr.normal(s.J * Ya);
            const Eigen::VectorXd dX_TY = fr.tangential(calc.derivative(x, cX, calc.tangential_image(Y)));
            const Eigen::VectorXd dY_TX = fr.tangential(calc.derivative(x, cY, calc.tangential_image(X)));
            const Eigen::VectorXd dX_NY = fr.normal(calc.derivative(x, cX, calc.normal_image(Y)));
            const Eigen::VectorXd dY_NX = fr.normal(calc.derivative(x, cY, calc.normal_image(X)));

            report.record("bracket.tangential", "T[X,Y] = nabla_X TY - nabla_Y TX - A_{NY} X + A_{NX} Y",
                          (fr.tangential(JB) - (dX_TY - dY_TX - at.shape(NY, Xa) + at.shape(NX, Ya))).norm(), tol);
            report.record("bracket.normal", "N[X,Y] = h(X,TY) - h(TX,Y) + nabla^perp_X NY - nabla^perp_Y NX",
                          (fr.normal(JB) - (at.h_of(Xa, TY) - at.h_of(TX, Ya) + dX_NY - dY_NX)).norm(), tol);

            const Eigen::VectorXd uX = Fn.transpose() * (s.J * Xa);
            const Eigen::VectorXd uY = Fn.transpose() * (s.J * Ya);
            Eigen::VectorXd shape_terms = Eigen::VectorXd::Zero(fr.ambient_dim());
            for (Eigen::Index a = 0; a < at.codim(); ++a)
                shape_terms += uY[a] * at.shape(Fn.col(a), Xa) - uX[a] * at.shape(Fn.col(a), Ya);
            report.record("bracket.tangential_sigma",
                          "T[X,Y] = nabla_X TY - nabla_Y TX - sum [u_a(Y) A_a X - u_a(X) A_a Y]",
                          (fr.tangential(JB) - (dX_TY - dY_TX - shape_terms)).norm(), tol);

            // u_a([X,Y]) = (nabla_Y u_a)X - (nabla_X u_a)Y + X(u_a(Y)) - Y(u_a(X)),
            // with both covariant derivatives taken from their h, l, a expression.
            const Eigen::VectorXd lhs = Fn.transpose() * JB;
            const Eigen::VectorXd du = covariant_u_formula(at, s, Ya, Xa) - covariant_u_formula(at, s, Xa, Ya);
            const Eigen::VectorXd XuY = calc.derivative(x, cX, calc.u_of(fr, Y));
            const Eigen::VectorXd YuX = calc.derivative(x, cY, calc.u_of(fr, X));
            report.record("bracket.normal_sigma",
                          "u_a([X,Y]) = (nabla_Y u_a)X - (nabla_X u_a)Y + X(u_a(Y)) - Y(u_a(X))",
                          (lhs - (du + XuY - YuX)).norm(), tol);
            // Variant with sum_b [u_b(X) l_ba(Y) - u_b(Y) l_ba(X)] in place of the derivative terms.
            const Eigen::VectorXd l_terms = at.l_of(Ya).transpose() * uX - at.l_of(Xa).transpose() * uY;
            literal_max = std::max(literal_max, (lhs - (du + l_terms)).norm());
            ++literal_samples;
        }
    }
    report.observe(Observation{"bracket.normal_sigma_l_variant",
                               "u_a([X,Y]) = (nabla_Y u_a)X - (nabla_X u_a)Y + sum_b [u_b(X) l_ba(Y) - u_b(Y) l_ba(X)]",
                               {{"max_residual", literal_max}, {"samples", static_cast<double>(literal_samples)}},
                               "reported only; the derivative terms X(u_a(Y)) - Y(u_a(X)) are not l-terms in general"});
    return report;
}

namespace {

// ||(P_TM - P_D)[X,Y]||, the component of the bracket leaving D.
double bracket_escape(const SubmanifoldCalculus& calc, const FrameData& fr, const Eigen::MatrixXd& B,
                      const ChartVectorField& X, const ChartVectorField& Y) {
    const Eigen::VectorXd br = fr.tangent_onb.transpose() * (fr.jacobian * calc.bracket(fr.point, X, Y));
    return (br - B * (B.transpose() * br)).norm();
}

}  // namespace

VerificationReport bracket_test(const Immersion& f, const DistributionSpec& D, const SamplingPlan& plan) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(f.ambient_dim(), f.ambient_dim());
    const SubmanifoldCalculus calc(
        f, StructureField{StructureOperator::metallic(I * metallic_number(1, 1).sigma, metallic_number(1, 1)), {}});
    VerificationReport report;
    report.set_seed(plan.seed);
    SplitMix64 rng = SplitMix64::stream(plan.seed, kIntegrabilityStream ^ 0x1);
    const std::string name = "integrability." + D.name() + ".bracket";
    for (const auto& x : sample_points(f, plan)) {
        const FrameData fr = frame_at(f, x);
        const Eigen::MatrixXd B = D.frame_basis(fr);
        for (int k = 0; k < plan.dirs_per_point; ++k) {
            const ChartVectorField X = random_section(rng, f, D, x);
            const ChartVectorField Y = random_section(rng, f, D, x);
            report.record(name, "[X,Y] in D", bracket_escape(calc, fr, B, X, Y), plan.tol.fd);
        }
    }
    return report;
}

VerificationReport integrability_checks(const Immersion& f, const StructureField& J, const DistributionSpec& D1,
                                        const DistributionSpec& D2, const SamplingPlan& plan) {
    const SubmanifoldCalculus calc(f, J);
    const double tol = plan.tol.fd;
    const double alg = plan.tol.algebraic;
    VerificationReport report;
    report.set_seed(plan.seed);
    SplitMix64 rng = SplitMix64::stream(plan.seed, kIntegrabilityStream);
    const std::string p1 = "integrability." + D1.name() + ".";
    const std::string p2 = "integrability." + D2.name() + ".";
    double crit1 = 0.0, crit2 = 0.0, br1 = 0.0, br2 = 0.0, grad_T = 0.0, literal_shape = 0.0;
    for (const auto& x : sample_points(f, plan)) {
        const ExtrinsicData at = calc.extrinsic_at(x);
        const SigmaAt s = sigma_at(calc, at);
        const FrameData& fr = at.frame;
        const Eigen::MatrixXd& Fn = fr.normal_onb;
        const Eigen::MatrixXd B1 = D1.frame_basis(fr);
        const Eigen::MatrixXd B2 = D2.frame_basis(fr);
        const Eigen::MatrixXd P1 = fr.tangent_onb * B1 * B1.transpose() * fr.tangent_onb.transpose();
        for (int k = 0; k < plan.dirs_per_point; ++k) {
            {
                const ChartVectorField X = random_section(rng, f, D1, x);
                const ChartVectorField Y = random_section(rng, f, D1, x);
                const Eigen::VectorXd Xa = fr.jacobian * X(x);
                const Eigen::VectorXd Ya = fr.jacobian * Y(x);
                const double u_sym = (calc.covariant_u(at, Y, X) - calc.covariant_u(at, X, Y)).norm();
                report.record(p1 + "u_symmetric", "(nabla_Y u_a)X = (nabla_X u_a)Y", u_sym, tol);
                const Eigen::VectorXd TX = fr.tangential(s.J * Xa);
                const Eigen::VectorXd TY = fr.tangential(s.J * Ya);
                const double hT = (at.h_of(Xa, TY) - at.h_of(TX, Ya)).norm();
                report.record(p1 + "h_T_symmetric", "h(X,TY) = h(TX,Y)", hT, alg);
                const Eigen::VectorXd V = Fn * random_unit_vector(rng, at.codim());
                const Eigen::VectorXd AVX = at.shape(V, Xa);
                const double shape_comm = (P1 * (fr.tangential(s.J * AVX) - at.shape(V, TX))).norm();
                report.record(p1 + "shape_commutes", "P1 (J A_V X - A_V JX) = 0", shape_comm, alg);
                literal_shape = std::max(literal_shape, (s.J * AVX - at.shape(V, s.J * Xa)).norm());
                const double b = bracket_escape(calc, fr, B1, X, Y);
                report.record(p1 + "bracket", "[X,Y] in D1", b, tol);
                crit1 = std::max({crit1, u_sym, hT});
                br1 = std::max(br1, b);
            }
            {
                const ChartVectorField X = random_section(rng, f, D2, x);
                const ChartVectorField Y = random_section(rng, f, D2, x);
                const Eigen::VectorXd cX = X(x);
                const Eigen::VectorXd cY = Y(x);
                const Eigen::VectorXd Xa = fr.jacobian * cX;
                const Eigen::VectorXd Ya = fr.jacobian * cY;
                const Eigen::VectorXd dX_TY = fr.tangential(calc.derivative(x, cX, calc.tangential_image(Y)));
                const Eigen::VectorXd dY_TX = fr.tangential(calc.derivative(x, cY, calc.tangential_image(X)));
                const Eigen::VectorXd uX = Fn.transpose() * (s.J * Xa);
                const Eigen::VectorXd uY = Fn.transpose() * (s.J * Ya);
                Eigen::VectorXd shape_terms = Eigen::VectorXd::Zero(fr.ambient_dim());
                for (Eigen::Index a = 0; a < at.codim(); ++a)
                    shape_terms += uY[a] * at.shape(Fn.col(a), Xa) - uX[a] * at.shape(Fn.col(a), Ya);
                const double sigma_form = (P1 * (dX_TY - dY_TX - shape_terms)).norm();
                report.record(p2 + "T_bracket_sigma",
                              "P1(nabla_X TY - nabla_Y TX) = sum [u_a(Y) P1 A_a X - u_a(X) P1 A_a Y]", sigma_form,
                              tol);
                const Eigen::VectorXd NX = fr.normal(s.J * Xa);
                const Eigen::VectorXd NY = fr.normal(s.J * Ya);
                const double shape_form = (P1 * (dX_TY - dY_TX - at.shape(NY, Xa) + at.shape(NX, Ya))).norm();
                report.record(p2 + "T_bracket", "P1(nabla_X TY - nabla_Y TX) = P1(A_{NY} X - A_{NX} Y)", shape_form,
                              tol);
                const double b = bracket_escape(calc, fr, B2, X, Y);
                report.record(p2 + "bracket", "[X,Y] in D2", b, tol);
                crit2 = std::max({crit2, sigma_form, shape_form});
                br2 = std::max(br2, b);
            }
            {
                const ChartVectorField X = random_field(rng, x);
                const ChartVectorField Y = random_field(rng, x);
                grad_T = std::max(grad_T, calc.covariant_T(at, X, Y).norm());
            }
        }
    }
    report.record_flag(p1 + "cross_validation", "criteria hold iff brackets stay in D1", (crit1 < tol) == (br1 < tol));
    report.record_flag(p2 + "cross_validation", "criteria hold iff brackets stay in D2", (crit2 < tol) == (br2 < tol));
    report.record_flag("integrability.parallel_T", "nabla T = 0 implies D1 and D2 integrable",
                       !(grad_T < tol) || (br1 < tol && br2 < tol));
    report.observe(Observation{"integrability.summary",
                               "criteria and bracket maxima",
                               {{p1 + "criteria_max", crit1},
                                {p1 + "bracket_max", br1},
                                {p2 + "criteria_max", crit2},
                                {p2 + "bracket_max", br2},
                                {"grad_T_max", grad_T},
                                {p1 + "shape_commutes_unprojected_max", literal_shape}},
                               "the unprojected J A_V X - A_V JX keeps a normal part N A_V X"});
    return report;
}

VerificationReport mixed_geodesic_check(const Immersion& f, const StructureField& J, const DistributionSpec& D1,
                                        const DistributionSpec& D2, const SamplingPlan& plan) {
    const SubmanifoldCalculus calc(f, J);
    const double tol = plan.tol.fd;
    VerificationReport report;
    report.set_seed(plan.seed);
    SplitMix64 rng = SplitMix64::stream(plan.seed, kMixedStream);
    double mixed_h = 0.0, mixed_dN = 0.0, shape_n = 0.0, shape_T = 0.0;
    for (const auto& x : sample_points(f, plan)) {
        const ExtrinsicData at = calc.extrinsic_at(x);
        const SigmaAt s = sigma_at(calc, at);
        const FrameData& fr = at.frame;
        for (int k = 0; k < plan.dirs_per_point; ++k) {
            const ChartVectorField X1 = random_section(rng, f, D1, x);
            const ChartVectorField Y2 = random_section(rng, f, D2, x);
            mixed_h = std::max(mixed_h, at.h_of(fr.jacobian * X1(x), fr.jacobian * Y2(x)).norm());
            mixed_dN = std::max(mixed_dN, calc.covariant_N(at, X1, Y2).norm());

            const ChartVectorField X = random_field(rng, x);
            const ChartVectorField Y = random_field(rng, x);
            const Eigen::VectorXd Xa = fr.jacobian * X(x);
            const Eigen::VectorXd Ya = fr.jacobian * Y(x);
            const Eigen::VectorXd V = fr.normal_onb * random_unit_vector(rng, at.codim());
            const Eigen::VectorXd nV = fr.normal(s.J * V);
            const Eigen::VectorXd dN = calc.covariant_N(at, X, Y);
            const Eigen::VectorXd AnVX = at.shape(nV, Xa);
            const Eigen::VectorXd TAVX = fr.tangential(s.J * at.shape(V, Xa));
            const double lhs = dN.dot(V);
            report.record("mixed.normal_derivative_duality", "g((nabla_X N)Y, V) = g(A_{nV} X - T A_V X, Y)",
                          std::abs(lhs - (AnVX - TAVX).dot(Ya)), tol);
            report.record("mixed.normal_derivative_duality_swapped", "g((nabla_X N)Y, V) = g(A_{nV} Y - A_V TY, X)",
                          std::abs(lhs - (at.shape(nV, Ya) - at.shape(V, fr.tangential(s.J * Ya))).dot(Xa)), tol);
            shape_n = std::max(shape_n, (AnVX - TAVX).norm());
            shape_T = std::max(shape_T, (TAVX - at.shape(V, fr.tangential(s.J * Xa))).norm());
        }
    }
    report.record_flag("mixed.geodesic_implies_parallel_N", "mixed h = 0 implies (nabla N) = 0 on mixed pairs",
                       !(mixed_h < plan.tol.algebraic) || mixed_dN < tol);
    report.observe(Observation{"mixed.summary",
                               "mixed values and parallel-N shape conditions",
                               {{"mixed_h_max", mixed_h},
                                {"mixed_grad_N_max", mixed_dN},
                                {"A_nV_minus_T_A_V_max", shape_n},
                                {"T_A_V_minus_A_V_T_max", shape_T}},
                               "N is parallel iff both shape conditions vanish"});
    return report;
}

}  // namespace mslant
