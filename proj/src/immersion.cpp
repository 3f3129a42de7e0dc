#include "mslant/immersion.hpp"

#include <cmath>

#include "mslant/errors.hpp"

namespace mslant {

namespace {

// A residual must keep at least this much length to become a normal vector.
// For m <= 1024 some axis always clears it, so completion cannot stall.
constexpr double kNormalAcceptThreshold = 1e-2;

void project_out(Eigen::VectorXd& v, const Eigen::MatrixXd& basis, Eigen::Index cols) {
    for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index k = 0; k < cols; ++k) v -= basis.col(k).dot(v) * basis.col(k);
}

}  // namespace

Immersion::Immersion(std::vector<std::string> vars, std::vector<Expr> components, ChartBox box)
    : vars_(std::move(vars)), components_(std::move(components)), box_(std::move(box)) {
    if (vars_.empty()) throw InputError("immersion needs at least one chart variable");
    if (components_.size() <= vars_.size())
        throw InputError("immersion: ambient dimension must exceed chart dimension");
    if (static_cast<Eigen::Index>(components_.size()) > kMaxAmbientDim)
        throw InputError("immersion: ambient dimension exceeds limit");
    if (box_.size() != vars_.size()) throw InputError("immersion: chart box must give one interval per variable");
    for (const auto& [lo, hi] : box_)
        if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
            throw InputError("immersion: chart box intervals must be finite with lo < hi");
    for (const auto& c : components_)
        if (c.vars() != vars_) throw InputError("immersion: component declared over different chart variables");
}

Immersion Immersion::parse(const std::vector<std::string>& vars, const std::vector<std::string>& components,
                           ChartBox box, const MetallicParams& params) {
    std::vector<Expr> exprs;
    exprs.reserve(components.size());
    for (const auto& src : components) exprs.push_back(mslant::parse(src, vars, params));
    return Immersion(vars, std::move(exprs), std::move(box));
}

bool Immersion::contains(const Eigen::VectorXd& x) const {
    if (x.size() != chart_dim()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const auto [lo, hi] = box_[static_cast<std::size_t>(i)];
        if (!(x[i] >= lo && x[i] <= hi)) return false;
    }
    return true;
}

Eigen::VectorXd Immersion::evaluate(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(ambient_dim());
    for (Eigen::Index c = 0; c < ambient_dim(); ++c) out[c] = components_[static_cast<std::size_t>(c)].evaluate(x);
    return out;
}

Eigen::MatrixXd Immersion::jacobian(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd jac(ambient_dim(), chart_dim());
    for (Eigen::Index c = 0; c < ambient_dim(); ++c)
        jac.row(c) = eval_gradient(components_[static_cast<std::size_t>(c)], x).second.transpose();
    return jac;
}

Eigen::VectorXd FrameData::tangential(const Eigen::VectorXd& v) const {
    return tangent_onb * (tangent_onb.transpose() * v);
}

Eigen::VectorXd FrameData::normal(const Eigen::VectorXd& v) const {
    return normal_onb * (normal_onb.transpose() * v);
}

Eigen::VectorXd FrameData::push_forward(const Eigen::VectorXd& coords) const { return jacobian * coords; }

Eigen::VectorXd FrameData::coords_of(const Eigen::VectorXd& tangent) const {
    return coords_of_frame(tangent_onb.transpose() * tangent);
}

Eigen::VectorXd FrameData::frame_of_coords(const Eigen::VectorXd& coords) const {
    return frame_from_coords * coords;
}

Eigen::VectorXd FrameData::coords_of_frame(const Eigen::VectorXd& frame) const {
    return frame_from_coords.triangularView<Eigen::Upper>().solve(frame);
}

namespace {

FrameData build_frame(const Eigen::VectorXd& x, const Eigen::MatrixXd& jacobian,
                      std::span<const int> fixed_axes, bool use_fixed) {
    const Eigen::Index m = jacobian.rows();
    const Eigen::Index n = jacobian.cols();
    if (m <= n) throw InputError("frame: ambient dimension must exceed chart dimension");
    if (!jacobian.allFinite()) throw DegeneratePointError("frame: non-finite Jacobian");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian);
    const auto& sv = svd.singularValues();
    if (!(sv[n - 1] >= kRankThreshold * sv[0]) || sv[0] == 0.0)
        throw DegeneratePointError("frame: Jacobian rank deficient (singular value ratio " +
                                   std::to_string(sv[n - 1] / sv[0]) + ")");

    FrameData frame;
    frame.point = x;
    frame.jacobian = jacobian;
    frame.induced_metric = jacobian.transpose() * jacobian;

    // Modified Gram-Schmidt with one reorthogonalization pass.
    frame.tangent_onb = Eigen::MatrixXd::Zero(m, n);
    frame.frame_from_coords = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd v = jacobian.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index k = 0; k < j; ++k) {
                const double r = frame.tangent_onb.col(k).dot(v);
                v -= r * frame.tangent_onb.col(k);
                frame.frame_from_coords(k, j) += r;
            }
        }
        const double norm = v.norm();
        frame.frame_from_coords(j, j) = norm;
        frame.tangent_onb.col(j) = v / norm;
    }

    // Orthonormal completion from ambient axes in a fixed order.
    const Eigen::Index r = m - n;
    Eigen::MatrixXd basis(m, m);
    basis.leftCols(n) = frame.tangent_onb;
    Eigen::Index count = n;
    auto try_axis = [&](int axis, double threshold) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(m, axis);
        project_out(v, basis, count);
        const double norm = v.norm();
        if (!(norm > threshold)) return false;
        basis.col(count++) = v / norm;
        frame.normal_axes.push_back(axis);
        return true;
    };
    if (use_fixed) {
        if (static_cast<Eigen::Index>(fixed_axes.size()) != r)
            throw InputError("frame: wrong number of normal axes");
        for (int axis : fixed_axes) {
            if (axis < 0 || axis >= m) throw InputError("frame: normal axis out of range");
            if (!try_axis(axis, kRankThreshold))
                throw DegeneratePointError("frame: fixed normal axis became dependent");
        }
    } else {
        for (int axis = 0; axis < m && count < m; ++axis) try_axis(axis, kNormalAcceptThreshold);
        if (count < m) throw DegeneratePointError("frame: normal completion failed");
    }
    frame.normal_onb = basis.rightCols(r);
    return frame;
}

}  // namespace

FrameData frame_from_jacobian(const Eigen::VectorXd& x, const Eigen::MatrixXd& jacobian) {
    return build_frame(x, jacobian, {}, false);
}

FrameData frame_from_jacobian(const Eigen::VectorXd& x, const Eigen::MatrixXd& jacobian,
                              std::span<const int> normal_axes) {
    return build_frame(x, jacobian, normal_axes, true);
}

FrameData frame_at(const Immersion& f, const Eigen::VectorXd& x) {
    if (!f.contains(x)) throw InputError("frame_at: point outside the chart box");
    return frame_from_jacobian(x, f.jacobian(x));
}

FrameData frame_at(const Immersion& f, const Eigen::VectorXd& x, std::span<const int> normal_axes) {
    if (!f.contains(x)) throw InputError("frame_at: point outside the chart box");
    return frame_from_jacobian(x, f.jacobian(x), normal_axes);
}

std::pair<TangentVector, NormalVector> split(const Eigen::VectorXd& v, const FrameData& frame) {
    if (v.size() != frame.ambient_dim()) throw InputError("split: vector has wrong dimension");
    return {TangentVector{frame.tangential(v), frame.point}, NormalVector{frame.normal(v), frame.point}};
}

CoordinateHessian::CoordinateHessian(Eigen::Index chart_dim, Eigen::Index ambient_dim)
    : n_(chart_dim),
      entries_(static_cast<std::size_t>(chart_dim * chart_dim), Eigen::VectorXd::Zero(ambient_dim)) {}

Eigen::VectorXd CoordinateHessian::contract(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(entries_.front().size());
    for (Eigen::Index i = 0; i < n_; ++i)
        for (Eigen::Index j = 0; j < n_; ++j) out += (a[i] * b[j]) * (*this)(i, j);
    return out;
}

CoordinateHessian coordinate_hessian(const Immersion& f, const Eigen::VectorXd& x) {
    if (!f.contains(x)) throw InputError("coordinate_hessian: point outside the chart box");
    CoordinateHessian h(f.chart_dim(), f.ambient_dim());
    for (Eigen::Index c = 0; c < f.ambient_dim(); ++c) {
        const Jet2 jet = eval_jet(f.components()[static_cast<std::size_t>(c)], x);
        for (Eigen::Index i = 0; i < f.chart_dim(); ++i)
            for (Eigen::Index j = 0; j < f.chart_dim(); ++j) h.at(i, j)[c] = jet.hessian(i, j);
    }
    return h;
}

std::vector<Eigen::VectorXd> sample_points(const Immersion& f, const SamplingPlan& plan) {
    validate(plan);
    SplitMix64 rng = SplitMix64::stream(plan.seed, 0x706f696e7473ULL);
    std::vector<Eigen::VectorXd> points;
    points.reserve(static_cast<std::size_t>(plan.point_count));
    for (int i = 0; i < plan.point_count; ++i) points.push_back(sample_box(rng, f.chart_box()));
    return points;
}

}  // namespace mslant
