#include "mslant/sampling.hpp"

#include <cmath>

#include "mslant/errors.hpp"

namespace mslant {

void validate(const SamplingPlan& plan) {
    if (plan.point_count < 1 || plan.dirs_per_point < 1)
        throw InputError("sampling plan: point and direction counts must be at least 1");
    const auto positive = [](double t) { return std::isfinite(t) && t > 0.0; };
    if (!positive(plan.tol.algebraic) || !positive(plan.tol.fd) || !positive(plan.tol.angle))
        throw InputError("sampling plan: tolerances must be positive and finite");
}

Eigen::VectorXd random_unit_vector(SplitMix64& rng, Eigen::Index dim) {
    Eigen::VectorXd v(dim);
    for (;;) {
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.uniform(-1.0, 1.0);
        const double n = v.norm();
        if (n > 1e-3) return v / n;
    }
}

Eigen::VectorXd sample_box(SplitMix64& rng, const std::vector<std::pair<double, double>>& box,
                           double margin) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(box.size()));
    for (std::size_t i = 0; i < box.size(); ++i) {
        const auto [lo, hi] = box[i];
        const double pad = margin * (hi - lo);
        x[static_cast<Eigen::Index>(i)] = rng.uniform(lo + pad, hi - pad);
    }
    return x;
}

}  // namespace mslant
