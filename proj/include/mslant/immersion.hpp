#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mslant/expression.hpp"
#include "mslant/sampling.hpp"

namespace mslant {

using ChartBox = std::vector<std::pair<double, double>>;

// A parametric immersion f : U subset R^{m'} -> R^m given by m component
// expressions over m' chart variables.
class Immersion {
public:
    Immersion(std::vector<std::string> vars, std::vector<Expr> components, ChartBox box);

    // Parses every component with the given chart variables and constants.
    static Immersion parse(const std::vector<std::string>& vars,
                           const std::vector<std::string>& components, ChartBox box,
                           const MetallicParams& params);

    Eigen::Index chart_dim() const noexcept { return static_cast<Eigen::Index>(vars_.size()); }
    Eigen::Index ambient_dim() const noexcept { return static_cast<Eigen::Index>(components_.size()); }
    Eigen::Index codim() const noexcept { return ambient_dim() - chart_dim(); }

    const std::vector<std::string>& vars() const noexcept { return vars_; }
    const std::vector<Expr>& components() const noexcept { return components_; }
    const ChartBox& chart_box() const noexcept { return box_; }

    bool contains(const Eigen::VectorXd& x) const;

    Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

private:
    std::vector<std::string> vars_;
    std::vector<Expr> components_;
    ChartBox box_;
};

// Per-point frame data. Tangent vectors and normal vectors are handled as
// ambient m-vectors throughout; the frames give their coordinates.
struct FrameData {
    Eigen::VectorXd point;
    Eigen::MatrixXd jacobian;        // m x m', columns are the coordinate fields
    Eigen::MatrixXd tangent_onb;     // m x m'
    Eigen::MatrixXd normal_onb;      // m x r
    Eigen::MatrixXd induced_metric;  // m' x m', jacobian^T jacobian
    // Upper-triangular change of basis with jacobian = tangent_onb * frame_from_coords.
    Eigen::MatrixXd frame_from_coords;
    // Ambient axes whose Gram-Schmidt residuals became the normal frame.
    std::vector<int> normal_axes;

    Eigen::Index chart_dim() const noexcept { return jacobian.cols(); }
    Eigen::Index ambient_dim() const noexcept { return jacobian.rows(); }
    Eigen::Index codim() const noexcept { return normal_onb.cols(); }

    Eigen::VectorXd tangential(const Eigen::VectorXd& v) const;
    Eigen::VectorXd normal(const Eigen::VectorXd& v) const;

    // Coordinate components c -> ambient vector sum_i c_i d_i f.
    Eigen::VectorXd push_forward(const Eigen::VectorXd& coords) const;
    // Tangent ambient vector -> coordinate components (inverse of push_forward).
    Eigen::VectorXd coords_of(const Eigen::VectorXd& tangent) const;
    // Coordinate components <-> orthonormal tangent-frame components.
    Eigen::VectorXd frame_of_coords(const Eigen::VectorXd& coords) const;
    Eigen::VectorXd coords_of_frame(const Eigen::VectorXd& frame) const;
};

inline constexpr double kRankThreshold = 1e-8;

// Throws DegeneratePointError when the Jacobian is numerically rank deficient
// and InputError when x lies outside the chart box.
FrameData frame_at(const Immersion& f, const Eigen::VectorXd& x);

// Same construction, but the normal frame is completed from the given axes
// instead of choosing them. Used to extend a normal frame to nearby points.
FrameData frame_at(const Immersion& f, const Eigen::VectorXd& x, std::span<const int> normal_axes);

// Frames built from an explicit Jacobian (no immersion needed).
FrameData frame_from_jacobian(const Eigen::VectorXd& x, const Eigen::MatrixXd& jacobian);
FrameData frame_from_jacobian(const Eigen::VectorXd& x, const Eigen::MatrixXd& jacobian,
                              std::span<const int> normal_axes);

struct TangentVector {
    Eigen::VectorXd ambient;
    Eigen::VectorXd point;
};

struct NormalVector {
    Eigen::VectorXd ambient;
    Eigen::VectorXd point;
};

std::pair<TangentVector, NormalVector> split(const Eigen::VectorXd& v, const FrameData& frame);

// Second coordinate derivatives d^2 f / du_i du_j as ambient vectors.
class CoordinateHessian {
public:
    CoordinateHessian() = default;
    CoordinateHessian(Eigen::Index chart_dim, Eigen::Index ambient_dim);

    Eigen::Index chart_dim() const noexcept { return n_; }
    const Eigen::VectorXd& operator()(Eigen::Index i, Eigen::Index j) const {
        return entries_[static_cast<std::size_t>(i * n_ + j)];
    }
    Eigen::VectorXd& at(Eigen::Index i, Eigen::Index j) { return entries_[static_cast<std::size_t>(i * n_ + j)]; }

    // sum_ij a_i b_j d^2 f / du_i du_j
    Eigen::VectorXd contract(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

private:
    Eigen::Index n_ = 0;
    std::vector<Eigen::VectorXd> entries_;
};

CoordinateHessian coordinate_hessian(const Immersion& f, const Eigen::VectorXd& x);

// The plan's sample points in the chart box. Every check draws the same
// points for a given seed; only the direction streams differ.
std::vector<Eigen::VectorXd> sample_points(const Immersion& f, const SamplingPlan& plan);

}  // namespace mslant
