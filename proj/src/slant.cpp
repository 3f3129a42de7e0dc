#include "mslant/slant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mslant/errors.hpp"
#include "mslant/induced.hpp"

namespace mslant {

namespace {

// FNV-1a; gives each named distribution its own direction stream.
std::uint64_t label_of(std::string_view text, std::uint64_t salt) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ salt;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Eigen::VectorXd eval_field(const std::vector<Expr>& field, const FrameData& frame) {
    if (static_cast<Eigen::Index>(field.size()) != frame.chart_dim())
        throw InputError("distribution field has wrong number of components");
    Eigen::VectorXd out(frame.chart_dim());
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = field[static_cast<std::size_t>(i)].evaluate(frame.point);
    return out;
}

void require_tangent(const FrameData& frame, const Eigen::VectorXd& X) {
    if (X.size() != frame.ambient_dim()) throw InputError("vector has wrong dimension");
    const double norm = X.norm();
    if (norm == 0.0) throw InputError("angle of the zero vector");
    if (frame.normal(X).norm() > 1e-9 * norm) throw InputError("vector is not tangent to the submanifold");
}

// ||P v|| / ||v|| style ratio turned into an angle in [0, pi/2].
double angle_from_ratio(double projected, double full) {
    if (projected < 1e-12 * full) return std::numbers::pi / 2;
    return std::acos(std::clamp(projected / full, 0.0, 1.0));
}

}  // namespace

DistributionSpec DistributionSpec::coordinates(std::string name, std::vector<int> indices) {
    if (indices.empty()) throw InputError("distribution '" + name + "' selects no coordinates");
    auto sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 0)
        throw InputError("distribution '" + name + "' has invalid coordinate indices");
    DistributionSpec d(std::move(name), Kind::Coordinates);
    d.indices_ = std::move(indices);
    return d;
}

DistributionSpec DistributionSpec::chart_fields(std::string name, std::vector<std::vector<Expr>> fields) {
    if (fields.empty()) throw InputError("distribution '" + name + "' has no fields");
    DistributionSpec d(std::move(name), Kind::ChartFields);
    d.fields_ = std::move(fields);
    return d;
}

DistributionSpec DistributionSpec::frame_coefficients(std::string name, std::vector<std::vector<Expr>> fields) {
    if (fields.empty()) throw InputError("distribution '" + name + "' has no fields");
    DistributionSpec d(std::move(name), Kind::FrameCoefficients);
    d.fields_ = std::move(fields);
    return d;
}

std::size_t DistributionSpec::rank() const noexcept {
    return kind_ == Kind::Coordinates ? indices_.size() : fields_.size();
}

Eigen::MatrixXd DistributionSpec::chart_vectors(const FrameData& frame) const {
    const Eigen::Index n = frame.chart_dim();
    Eigen::MatrixXd out(n, static_cast<Eigen::Index>(rank()));
    for (Eigen::Index k = 0; k < out.cols(); ++k) {
        switch (kind_) {
            case Kind::Coordinates: {
                const int i = indices_[static_cast<std::size_t>(k)];
                if (i >= n) throw InputError("distribution '" + name_ + "': coordinate index out of range");
                out.col(k) = Eigen::VectorXd::Unit(n, i);
                break;
            }
            case Kind::ChartFields:
                out.col(k) = eval_field(fields_[static_cast<std::size_t>(k)], frame);
                break;
            case Kind::FrameCoefficients:
                out.col(k) = frame.coords_of_frame(eval_field(fields_[static_cast<std::size_t>(k)], frame));
                break;
        }
    }
    return out;
}

Eigen::MatrixXd DistributionSpec::frame_vectors(const FrameData& frame) const {
    if (kind_ == Kind::FrameCoefficients) {
        Eigen::MatrixXd out(frame.chart_dim(), static_cast<Eigen::Index>(rank()));
        for (Eigen::Index k = 0; k < out.cols(); ++k) out.col(k) = eval_field(fields_[static_cast<std::size_t>(k)], frame);
        return out;
    }
    return frame.frame_from_coords * chart_vectors(frame);
}

Eigen::MatrixXd DistributionSpec::frame_basis(const FrameData& frame) const {
    const Eigen::MatrixXd V = frame_vectors(frame);
    if (V.cols() > V.rows()) throw InputError("distribution '" + name_ + "' has more fields than dimensions");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
    const auto& sv = svd.singularValues();
    if (!(sv[sv.size() - 1] >= kRankThreshold * sv[0]) || sv[0] == 0.0)
        throw DegeneratePointError("distribution '" + name_ + "' is degenerate at a sample point");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    return qr.householderQ() * Eigen::MatrixXd::Identity(V.rows(), V.cols());
}

std::string_view to_string(SlantClass c) {
    switch (c) {
        case SlantClass::Invariant: return "invariant";
        case SlantClass::AntiInvariant: return "anti-invariant";
        case SlantClass::ProperSlant: return "proper-slant";
        case SlantClass::NotSlant: return "not-slant";
    }
    return "not-slant";
}

double wirtinger_angle(const Eigen::MatrixXd& J, const FrameData& frame, const Eigen::VectorXd& X) {
    require_tangent(frame, X);
    const Eigen::VectorXd JX = J * X;
    return angle_from_ratio(frame.tangential(JX).norm(), JX.norm());
}

double wirtinger_angle_J(const StructureOperator& J, const FrameData& frame, const TangentVector& X) {
    return wirtinger_angle(J.matrix, frame, X.ambient);
}

double wirtinger_angle_F(const StructureOperator& F, const FrameData& frame, const TangentVector& X) {
    return wirtinger_angle(F.matrix, frame, X.ambient);
}

double distribution_angle(const Eigen::MatrixXd& J, const FrameData& frame, const Eigen::MatrixXd& basis,
                          const Eigen::VectorXd& X) {
    require_tangent(frame, X);
    const Eigen::VectorXd JX = J * X;
    const Eigen::VectorXd coords = basis.transpose() * (frame.tangent_onb.transpose() * JX);
    return angle_from_ratio(coords.norm(), JX.norm());
}

AngleReport summarize_angles(std::vector<double> angles, double angle_tol) {
    if (angles.empty()) throw InputError("summarize_angles: no samples");
    AngleReport r;
    r.angles = std::move(angles);
    double sum = 0.0;
    double cos2 = 0.0;
    r.min = r.angles.front();
    r.max = r.angles.front();
    for (double a : r.angles) {
        sum += a;
        const double c = std::cos(a);
        cos2 += c * c;
        r.min = std::min(r.min, a);
        r.max = std::max(r.max, a);
    }
    const double count = static_cast<double>(r.angles.size());
    r.mean = sum / count;
    r.lambda = cos2 / count;
    for (double a : r.angles) r.max_deviation = std::max(r.max_deviation, std::abs(a - r.mean));
    if (r.max < angle_tol)
        r.classification = SlantClass::Invariant;
    else if (r.min > std::numbers::pi / 2 - angle_tol)
        r.classification = SlantClass::AntiInvariant;
    else if (r.max_deviation < angle_tol)
        r.classification = SlantClass::ProperSlant;
    else
        r.classification = SlantClass::NotSlant;
    return r;
}

AngleReport slant_test(const StructureOperator& J, const Immersion& f, const DistributionSpec& D,
                       const SamplingPlan& plan) {
    if (J.dim() != f.ambient_dim()) throw InputError("slant_test: structure and immersion dimensions differ");
    const auto points = sample_points(f, plan);
    SplitMix64 rng = SplitMix64::stream(plan.seed, label_of(D.name(), 0x736c616e74ULL));
    std::vector<double> angles;
    angles.reserve(points.size() * static_cast<std::size_t>(plan.dirs_per_point));
    for (const auto& x : points) {
        const FrameData frame = frame_at(f, x);
        const Eigen::MatrixXd B = D.frame_basis(frame);
        for (int k = 0; k < plan.dirs_per_point; ++k) {
            const Eigen::VectorXd X = frame.tangent_onb * (B * random_unit_vector(rng, B.cols()));
            angles.push_back(distribution_angle(J.matrix, frame, B, X));
        }
    }
    return summarize_angles(std::move(angles), plan.tol.angle);
}

LambdaFit slant_distribution_lambda(const StructureOperator& J, const FrameData& frame, const DistributionSpec& D) {
    if (!J.params) throw InputError("slant_distribution_lambda: operator has no metallic parameters");
    const Eigen::MatrixXd B = D.frame_basis(frame);
    const Eigen::MatrixXd T = frame.tangent_onb.transpose() * J.matrix * frame.tangent_onb;
    const Eigen::MatrixXd A = B.transpose() * T * B;
    const Eigen::MatrixXd rhs = J.params->p * A + J.params->q * Eigen::MatrixXd::Identity(A.rows(), A.cols());
    const Eigen::MatrixXd A2 = A * A;
    LambdaFit fit;
    fit.lambda = (A2.array() * rhs.array()).sum() / rhs.squaredNorm();
    const Eigen::MatrixXd res = A2 - fit.lambda * rhs;
    fit.residual = Eigen::JacobiSVD<Eigen::MatrixXd>(res).singularValues()[0];
    return fit;
}

VerificationReport slant_identities(const StructureOperator& J, const Immersion& f, const DistributionSpec& D,
                                    double cos2, const SamplingPlan& plan) {
    if (!J.params) throw InputError("slant_identities: operator has no metallic parameters");
    const double p = J.params->p;
    const double q = J.params->q;
    const double sin2 = 1.0 - cos2;
    const double tol = plan.tol.algebraic;
    VerificationReport report;
    report.set_seed(plan.seed);
    const auto points = sample_points(f, plan);
    SplitMix64 rng = SplitMix64::stream(plan.seed, label_of(D.name(), 0x6964656e74ULL));
    const std::string prefix = "slant." + D.name() + ".";
    for (const auto& x : points) {
        const FrameData frame = frame_at(f, x);
        const InducedMaps maps = induced_maps(J, frame);
        const Eigen::MatrixXd B = D.frame_basis(frame);
        const Eigen::MatrixXd PD = B * B.transpose();
        const Eigen::MatrixXd TD = PD * maps.T;
        const Eigen::MatrixXd A = B.transpose() * maps.T * B;
        const Eigen::MatrixXd Ik = Eigen::MatrixXd::Identity(A.rows(), A.cols());
        const Eigen::MatrixXd square = A * A - cos2 * (p * A + q * Ik);
        const Eigen::MatrixXd split = maps.t * maps.N - sin2 * (p * maps.T + q * Eigen::MatrixXd::Identity(maps.T.rows(), maps.T.cols()));
        for (int k = 0; k < plan.dirs_per_point; ++k) {
            const Eigen::VectorXd cx = random_unit_vector(rng, B.cols());
            const Eigen::VectorXd cy = random_unit_vector(rng, B.cols());
            const Eigen::VectorXd X = B * cx;
            const Eigen::VectorXd Y = B * cy;
            const Eigen::VectorXd TX = TD * X;
            const Eigen::VectorXd TY = TD * Y;
            const Eigen::VectorXd JXa = J.matrix * (frame.tangent_onb * X);
            const Eigen::VectorXd JYa = J.matrix * (frame.tangent_onb * Y);
            const Eigen::VectorXd NX = JXa - frame.tangent_onb * TX;
            const Eigen::VectorXd NY = JYa - frame.tangent_onb * TY;
            const double base = p * X.dot(TY) + q * X.dot(Y);
            report.record(prefix + "tangential_inner", "g(T_D X, T_D Y) = cos^2 [p g(X, T_D Y) + q g(X,Y)]",
                          std::abs(TX.dot(TY) - cos2 * base), tol);
            report.record(prefix + "normal_inner", "g(N_D X, N_D Y) = sin^2 [p g(X, T_D Y) + q g(X,Y)]",
                          std::abs(NX.dot(NY) - sin2 * base), tol);
            report.record(prefix + "tangential_square", "(T_D)^2 = cos^2 (p T_D + qI) on D",
                          (square * cx).norm(), tol);
            report.record(prefix + "normal_split", "sum u_a(X) xi_a = sin^2 (pTX + qX)", (split * X).norm(), tol);
        }
    }
    return report;
}

VerificationReport semi_slant_check(const StructureOperator& J, const Immersion& f, const DistributionSpec& D1,
                                    const DistributionSpec& D2, const SamplingPlan& plan) {
    if (!J.params) throw InputError("semi_slant_check: operator has no metallic parameters");
    const double p = J.params->p;
    const double q = J.params->q;
    const double tol = plan.tol.algebraic;
    VerificationReport report;
    report.set_seed(plan.seed);

    const AngleReport angles = slant_test(J, f, D2, plan);
    report.record_flag("semi_slant.D2_slant", "D2 has constant angle in (0, pi/2]",
                       angles.classification == SlantClass::ProperSlant ||
                           angles.classification == SlantClass::AntiInvariant);
    report.record("semi_slant.D2_angle_spread", "max |theta(X) - theta|", angles.max_deviation, plan.tol.angle);
    report.observe(Observation{"semi_slant.D2_angle",
                               "theta of D2",
                               {{"theta", round_significant(angles.mean)},
                                {"cos_theta", round_significant(std::cos(angles.mean))},
                                {"lambda", round_significant(angles.lambda)}},
                               std::string(to_string(angles.classification))});
    const double cos2 = angles.lambda;
    const double sin2 = 1.0 - cos2;

    const auto points = sample_points(f, plan);
    SplitMix64 rng = SplitMix64::stream(plan.seed, label_of(D1.name() + "|" + D2.name(), 0x73656d69ULL));
    for (const auto& x : points) {
        const FrameData frame = frame_at(f, x);
        const InducedMaps maps = induced_maps(J, frame);
        const Eigen::MatrixXd B1 = D1.frame_basis(frame);
        const Eigen::MatrixXd B2 = D2.frame_basis(frame);
        const double overlap = (B1.transpose() * B2).norm();
        if (overlap > tol) throw ConfigError("semi_slant_check: distributions are not orthogonal");
        if (B1.cols() + B2.cols() != frame.chart_dim())
            throw ConfigError("semi_slant_check: distributions do not span the tangent space");
        report.record("semi_slant.orthogonal", "g(D1, D2) = 0", overlap, tol);

        const Eigen::MatrixXd P2 = B2 * B2.transpose();
        const Eigen::MatrixXd TP2 = maps.T * P2;
        const Eigen::MatrixXd NP2 = maps.N * P2;
        const Eigen::Index n = frame.chart_dim();
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd square = TP2 * TP2 - cos2 * (p * TP2 + q * P2);
        for (int k = 0; k < plan.dirs_per_point; ++k) {
            const Eigen::VectorXd X1 = B1 * random_unit_vector(rng, B1.cols());
            report.record("semi_slant.D1_invariant", "N P1 X = 0", (maps.N * X1).norm(), tol);

            const Eigen::VectorXd X = random_unit_vector(rng, n);
            const Eigen::VectorXd Y = random_unit_vector(rng, n);
            const Eigen::VectorXd TX = TP2 * X;
            const Eigen::VectorXd TY = TP2 * Y;
            const double base = p * TX.dot(P2 * Y) + q * (P2 * X).dot(P2 * Y);
            report.record("semi_slant.TP2_in_D2", "T P2 X in D2", ((I - P2) * TX).norm(), tol);
            report.record("semi_slant.TP2_inner", "g(TP2 X, TP2 Y) = cos^2 [p g(TP2 X, P2 Y) + q g(P2 X, P2 Y)]",
                          std::abs(TX.dot(TY) - cos2 * base), tol);
            report.record("semi_slant.NP2_inner", "g(NP2 X, NP2 Y) = sin^2 [p g(TP2 X, P2 Y) + q g(P2 X, P2 Y)]",
                          std::abs((NP2 * X).dot(NP2 * Y) - sin2 * base), tol);
            report.record("semi_slant.TP2_square", "(TP2)^2 = cos^2 (p TP2 + q P2)", (square * X).norm(), tol);
        }
    }
    return report;
}

AngleRelation pointwise_angle_relation(const StructureOperator& J, const StructureOperator& F,
                                       const FrameData& frame, const Eigen::VectorXd& X, double tol) {
    if (!J.params) throw InputError("pointwise_angle_relation: operator has no metallic parameters");
    if (J.dim() != F.dim() || J.dim() != frame.ambient_dim())
        throw InputError("pointwise_angle_relation: dimension mismatch");
    const MetallicParams& prm = *J.params;
    const double gap = prm.root_gap();
    const Eigen::MatrixXd expected =
        (gap / 2) * F.matrix + (prm.p / 2.0) * Eigen::MatrixXd::Identity(J.dim(), J.dim());
    if (inf_norm(J.matrix - expected) > tol)
        throw ConfigError("pointwise_angle_relation: J is not built from F on the plus branch");
    require_tangent(frame, X);

    const Eigen::VectorXd JX = J.matrix * X;
    const Eigen::VectorXd FX = F.matrix * X;
    const double x2 = X.squaredNorm();
    // sin^2 as ||normal part||^2 / ||image||^2 avoids cancellation near 0.
    const double sin2_theta = frame.normal(JX).squaredNorm() / JX.squaredNorm();
    const double sin2_vartheta = frame.normal(FX).squaredNorm() / FX.squaredNorm();
    AngleRelation r;
    r.lhs = (gap * gap / 4) * x2 * sin2_vartheta;
    r.rhs = (prm.p * JX.dot(X) + prm.q * x2) * sin2_theta;
    r.residual = std::abs(r.lhs - r.rhs);
    return r;
}

AnglePrediction theorem_angle_relation(double theta, double vartheta, const MetallicParams& params) {
    AnglePrediction r;
    r.predicted_sin = params.root_gap() / (2 * params.sigma) * std::sin(vartheta);
    r.observed_sin = std::sin(theta);
    r.discrepancy = std::abs(r.observed_sin - r.predicted_sin);
    return r;
}

}  // namespace mslant
