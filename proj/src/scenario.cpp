#include "mslant/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <numbers>

#include <json.hpp>

#include "mslant/errors.hpp"

namespace mslant {

using json = nlohmann::ordered_json;

namespace {

std::string number_text(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// A JSON number or a constant expression string, returned as expression text.
std::string entry_text(const json& j, std::string_view where) {
    if (j.is_number()) return number_text(j.get<double>());
    if (j.is_string()) return j.get<std::string>();
    throw ConfigError(std::string(where) + ": expected a number or an expression string");
}

double constant_value(const std::string& text, const MetallicParams& params) {
    return parse(text, {}, params).evaluate(Eigen::VectorXd(0));
}

const json& require(const json& j, const char* key, std::string_view where) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(std::string(where) + ": missing '" + key + "'");
    return j.at(key);
}

template <class T>
T get_as(const json& j, std::string_view where) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(where) + ": wrong value type");
    }
}

std::vector<std::vector<std::string>> text_matrix(const json& j, std::string_view where) {
    if (!j.is_array()) throw ConfigError(std::string(where) + ": expected an array of rows");
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : j) {
        if (!row.is_array()) throw ConfigError(std::string(where) + ": expected an array of rows");
        auto& out = rows.emplace_back();
        for (const auto& e : row) out.push_back(entry_text(e, where));
    }
    return rows;
}

Eigen::MatrixXd eval_matrix(const std::vector<std::vector<std::string>>& rows, const MetallicParams& params,
                            Eigen::Index dim) {
    if (static_cast<Eigen::Index>(rows.size()) != dim) throw ConfigError("structure matrix has wrong row count");
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != dim) throw ConfigError("structure matrix has wrong column count");
        for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = constant_value(row[static_cast<std::size_t>(j)], params);
    }
    return m;
}

}  // namespace

const DistributionSpec& ResolvedScenario::distribution(std::string_view name) const {
    for (const auto& d : distributions)
        if (d.name() == name) return d;
    throw ConfigError("unknown distribution '" + std::string(name) + "'");
}

ResolvedScenario resolve(const Scenario& s) {
    const MetallicParams params = metallic_number(s.p, s.q);
    validate(s.sampling);
    if (s.extrinsic_points < 1 || s.extrinsic_pairs < 1) throw ConfigError("extrinsic sample counts must be >= 1");
    if (s.ambient_dim < 2 || s.ambient_dim > kMaxAmbientDim) throw ConfigError("ambient_dim out of range");
    if (static_cast<int>(s.components.size()) != s.ambient_dim)
        throw ConfigError("immersion has " + std::to_string(s.components.size()) +
                          " components but ambient_dim is " + std::to_string(s.ambient_dim));
    for (const auto& c : s.checks)
        if (std::find(std::begin(kCheckOrder), std::end(kCheckOrder), c) == std::end(kCheckOrder))
            throw ConfigError("unknown check '" + c + "'");

    const Eigen::Index dim = s.ambient_dim;
    Eigen::MatrixXd J;
    switch (s.structure.kind) {
        case StructureSpec::Kind::Diagonal: {
            if (static_cast<Eigen::Index>(s.structure.diagonal.size()) != dim)
                throw ConfigError("structure diagonal has wrong length");
            J = Eigen::MatrixXd::Zero(dim, dim);
            for (Eigen::Index i = 0; i < dim; ++i)
                J(i, i) = constant_value(s.structure.diagonal[static_cast<std::size_t>(i)], params);
            break;
        }
        case StructureSpec::Kind::Matrix:
            J = eval_matrix(s.structure.matrix, params, dim);
            break;
        case StructureSpec::Kind::Product: {
            const auto F = StructureOperator::almost_product(eval_matrix(s.structure.matrix, params, dim));
            require_valid(F);
            J = metallic_from_product(F, params, s.structure.branch).matrix;
            break;
        }
    }
    StructureField field{StructureOperator::metallic(std::move(J), params), std::nullopt};
    if (s.structure.scale) field.scale = parse(*s.structure.scale, s.vars, params);

    Immersion immersion = Immersion::parse(s.vars, s.components, s.box, params);

    std::vector<DistributionSpec> dists;
    for (const auto& d : s.distributions) {
        if (std::any_of(dists.begin(), dists.end(), [&](const auto& e) { return e.name() == d.name; }))
            throw ConfigError("duplicate distribution '" + d.name + "'");
        switch (d.kind) {
            case DistributionSpec::Kind::Coordinates:
                for (int i : d.coordinates)
                    if (i < 0 || i >= static_cast<int>(s.vars.size()))
                        throw ConfigError("distribution '" + d.name + "': coordinate index out of range");
                dists.push_back(DistributionSpec::coordinates(d.name, d.coordinates));
                break;
            case DistributionSpec::Kind::ChartFields:
            case DistributionSpec::Kind::FrameCoefficients: {
                std::vector<std::vector<Expr>> fields;
                for (const auto& field_src : d.fields) {
                    if (field_src.size() != s.vars.size())
                        throw ConfigError("distribution '" + d.name + "': field needs one entry per chart variable");
                    auto& out = fields.emplace_back();
                    for (const auto& c : field_src) out.push_back(parse(c, s.vars, params));
                }
                dists.push_back(d.kind == DistributionSpec::Kind::ChartFields
                                    ? DistributionSpec::chart_fields(d.name, std::move(fields))
                                    : DistributionSpec::frame_coefficients(d.name, std::move(fields)));
                break;
            }
        }
    }
    ResolvedScenario r{s, params, std::move(field), std::move(immersion), std::move(dists)};
    if (s.semi_slant) {
        (void)r.distribution(s.semi_slant->first);
        (void)r.distribution(s.semi_slant->second);
    }
    for (const auto& [name, expr] : s.expected.slant_cos) {
        (void)r.distribution(name);
        (void)parse(expr, {}, params);
    }
    if (!s.expected.induced_metric_diag.empty()) {
        if (s.expected.induced_metric_diag.size() != s.vars.size())
            throw ConfigError("expected induced metric diagonal has wrong length");
        for (const auto& e : s.expected.induced_metric_diag) (void)parse(e, s.vars, params);
    }
    return r;
}

Scenario scenario_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
    Scenario s;
    s.name = j.contains("name") ? get_as<std::string>(j.at("name"), "name") : "scenario";
    s.p = get_as<int>(require(j, "p", "scenario"), "p");
    s.q = get_as<int>(require(j, "q", "scenario"), "q");
    s.ambient_dim = get_as<int>(require(j, "ambient_dim", "scenario"), "ambient_dim");

    const json& st = require(j, "structure", "scenario");
    if (st.contains("diagonal")) {
        s.structure.kind = StructureSpec::Kind::Diagonal;
        for (const auto& e : st.at("diagonal")) s.structure.diagonal.push_back(entry_text(e, "structure.diagonal"));
    } else if (st.contains("matrix")) {
        s.structure.kind = StructureSpec::Kind::Matrix;
        s.structure.matrix = text_matrix(st.at("matrix"), "structure.matrix");
    } else if (st.contains("product")) {
        s.structure.kind = StructureSpec::Kind::Product;
        s.structure.matrix = text_matrix(st.at("product"), "structure.product");
        const std::string branch = st.contains("branch") ? get_as<std::string>(st.at("branch"), "branch") : "plus";
        if (branch == "plus")
            s.structure.branch = Branch::Plus;
        else if (branch == "minus")
            s.structure.branch = Branch::Minus;
        else
            throw ConfigError("structure.branch must be 'plus' or 'minus'");
    } else {
        throw ConfigError("structure needs one of 'diagonal', 'matrix', 'product'");
    }
    if (st.contains("scale")) s.structure.scale = get_as<std::string>(st.at("scale"), "structure.scale");

    const json& im = require(j, "immersion", "scenario");
    s.vars = get_as<std::vector<std::string>>(require(im, "vars", "immersion"), "immersion.vars");
    s.components = get_as<std::vector<std::string>>(require(im, "components", "immersion"), "immersion.components");
    for (const auto& interval : require(im, "box", "immersion")) {
        if (!interval.is_array() || interval.size() != 2) throw ConfigError("immersion.box: expected [lo, hi] pairs");
        const MetallicParams prm = metallic_number(std::max(s.p, 1), std::max(s.q, 1));
        s.box.emplace_back(constant_value(entry_text(interval[0], "immersion.box"), prm),
                           constant_value(entry_text(interval[1], "immersion.box"), prm));
    }

    if (j.contains("distributions")) {
        for (const auto& d : j.at("distributions")) {
            DistributionDef def;
            def.name = get_as<std::string>(require(d, "name", "distribution"), "distribution.name");
            if (d.contains("coordinates")) {
                def.kind = DistributionSpec::Kind::Coordinates;
                def.coordinates = get_as<std::vector<int>>(d.at("coordinates"), "distribution.coordinates");
            } else if (d.contains("chart_fields")) {
                def.kind = DistributionSpec::Kind::ChartFields;
                def.fields = text_matrix(d.at("chart_fields"), "distribution.chart_fields");
            } else if (d.contains("frame_coefficients")) {
                def.kind = DistributionSpec::Kind::FrameCoefficients;
                def.fields = text_matrix(d.at("frame_coefficients"), "distribution.frame_coefficients");
            } else {
                throw ConfigError("distribution '" + def.name +
                                  "' needs 'coordinates', 'chart_fields' or 'frame_coefficients'");
            }
            s.distributions.push_back(std::move(def));
        }
    }
    if (j.contains("semi_slant")) {
        const json& ss = j.at("semi_slant");
        s.semi_slant = std::make_pair(get_as<std::string>(require(ss, "invariant", "semi_slant"), "invariant"),
                                      get_as<std::string>(require(ss, "slant", "semi_slant"), "slant"));
    }
    if (j.contains("checks")) s.checks = get_as<std::vector<std::string>>(j.at("checks"), "checks");
    if (j.contains("sampling")) {
        const json& sp = j.at("sampling");
        if (sp.contains("seed")) s.sampling.seed = get_as<std::uint64_t>(sp.at("seed"), "sampling.seed");
        if (sp.contains("points")) s.sampling.point_count = get_as<int>(sp.at("points"), "sampling.points");
        if (sp.contains("dirs")) s.sampling.dirs_per_point = get_as<int>(sp.at("dirs"), "sampling.dirs");
        if (sp.contains("tol_algebraic")) s.sampling.tol.algebraic = get_as<double>(sp.at("tol_algebraic"), "tol");
        if (sp.contains("tol_fd")) s.sampling.tol.fd = get_as<double>(sp.at("tol_fd"), "tol");
        if (sp.contains("tol_angle")) s.sampling.tol.angle = get_as<double>(sp.at("tol_angle"), "tol");
        if (sp.contains("extrinsic_points"))
            s.extrinsic_points = get_as<int>(sp.at("extrinsic_points"), "sampling.extrinsic_points");
        if (sp.contains("extrinsic_pairs"))
            s.extrinsic_pairs = get_as<int>(sp.at("extrinsic_pairs"), "sampling.extrinsic_pairs");
    }
    if (j.contains("expected")) {
        const json& ex = j.at("expected");
        if (ex.contains("slant_cos"))
            for (const auto& [k, v] : ex.at("slant_cos").items())
                s.expected.slant_cos.emplace_back(k, get_as<std::string>(v, "expected.slant_cos"));
        if (ex.contains("induced_metric_diag"))
            s.expected.induced_metric_diag =
                get_as<std::vector<std::string>>(ex.at("induced_metric_diag"), "expected.induced_metric_diag");
    }
    return s;
}

std::string scenario_to_json(const Scenario& s, int indent) {
    json j;
    j["name"] = s.name;
    j["p"] = s.p;
    j["q"] = s.q;
    j["ambient_dim"] = s.ambient_dim;
    json st = json::object();
    switch (s.structure.kind) {
        case StructureSpec::Kind::Diagonal: st["diagonal"] = s.structure.diagonal; break;
        case StructureSpec::Kind::Matrix: st["matrix"] = s.structure.matrix; break;
        case StructureSpec::Kind::Product:
            st["product"] = s.structure.matrix;
            st["branch"] = s.structure.branch == Branch::Plus ? "plus" : "minus";
            break;
    }
    if (s.structure.scale) st["scale"] = *s.structure.scale;
    j["structure"] = st;
    json box = json::array();
    for (const auto& [lo, hi] : s.box) box.push_back({lo, hi});
    j["immersion"] = {{"vars", s.vars}, {"components", s.components}, {"box", box}};
    json dists = json::array();
    for (const auto& d : s.distributions) {
        json e = {{"name", d.name}};
        switch (d.kind) {
            case DistributionSpec::Kind::Coordinates: e["coordinates"] = d.coordinates; break;
            case DistributionSpec::Kind::ChartFields: e["chart_fields"] = d.fields; break;
            case DistributionSpec::Kind::FrameCoefficients: e["frame_coefficients"] = d.fields; break;
        }
        dists.push_back(std::move(e));
    }
    j["distributions"] = dists;
    if (s.semi_slant) j["semi_slant"] = {{"invariant", s.semi_slant->first}, {"slant", s.semi_slant->second}};
    if (!s.checks.empty()) j["checks"] = s.checks;
    j["sampling"] = {{"seed", s.sampling.seed},
                     {"points", s.sampling.point_count},
                     {"dirs", s.sampling.dirs_per_point},
                     {"tol_algebraic", s.sampling.tol.algebraic},
                     {"tol_fd", s.sampling.tol.fd},
                     {"tol_angle", s.sampling.tol.angle},
                     {"extrinsic_points", s.extrinsic_points},
                     {"extrinsic_pairs", s.extrinsic_pairs}};
    json expected = json::object();
    if (!s.expected.slant_cos.empty()) {
        json cos = json::object();
        for (const auto& [k, v] : s.expected.slant_cos) cos[k] = v;
        expected["slant_cos"] = cos;
    }
    if (!s.expected.induced_metric_diag.empty()) expected["induced_metric_diag"] = s.expected.induced_metric_diag;
    if (!expected.empty()) j["expected"] = expected;
    return j.dump(indent);
}

Scenario builtin_example1(int p, int q) {
    (void)metallic_number(p, q);
    Scenario s;
    s.name = "example1-p" + std::to_string(p) + "-q" + std::to_string(q);
    s.p = p;
    s.q = q;
    s.ambient_dim = 7;
    s.structure.diagonal = {"sigma", "sigma", "sigma_bar", "sigma_bar", "sigma_bar", "sigma", "sigma_bar"};
    s.vars = {"u", "t1", "t2"};
    s.components = {"u*cos(t1)", "u*sin(t1)", "u*cos(t2)", "u*sin(t2)", "u", "t1", "t2"};
    const double t_max = std::numbers::pi / 2 - 0.01;
    s.box = {{0.5, 3.0}, {0.0, t_max}, {0.0, t_max}};
    s.distributions = {DistributionDef{"D1", DistributionSpec::Kind::Coordinates, {1, 2}, {}},
                       DistributionDef{"D2", DistributionSpec::Kind::Coordinates, {0}, {}}};
    s.semi_slant = std::make_pair(std::string("D1"), std::string("D2"));
    s.expected.slant_cos = {{"D2", "(sigma + 2*sigma_bar)/sqrt(3*(sigma^2 + 2*sigma_bar^2))"}};
    s.expected.induced_metric_diag = {"3", "u^2 + 1", "u^2 + 1"};
    return s;
}

Scenario builtin_example2(int n, int p, int q) {
    (void)metallic_number(p, q);
    if (n < 1 || 3 * n + 1 > kMaxAmbientDim) throw InputError("example 2 needs 1 <= n and 3n+1 <= 1024");
    Scenario s;
    s.name = "example2-n" + std::to_string(n) + "-p" + std::to_string(p) + "-q" + std::to_string(q);
    s.p = p;
    s.q = q;
    s.ambient_dim = 3 * n + 1;
    s.structure.diagonal.assign(static_cast<std::size_t>(3 * n), "sigma");
    s.structure.diagonal.push_back("sigma_bar");
    s.vars = {"u"};
    for (int j = 1; j <= n; ++j) s.vars.push_back("a" + std::to_string(j));
    for (int j = 1; j <= n; ++j) s.components.push_back("u*cos(a" + std::to_string(j) + ")");
    for (int j = 1; j <= n; ++j) s.components.push_back("u*sin(a" + std::to_string(j) + ")");
    for (int j = 1; j <= n; ++j) s.components.push_back("a" + std::to_string(j));
    s.components.push_back("u");
    const double a_max = std::numbers::pi / 2 - 0.01;
    s.box = {{0.5, 3.0}};
    for (int j = 1; j <= n; ++j) s.box.emplace_back(0.0, a_max);
    std::vector<int> angles;
    for (int j = 1; j <= n; ++j) angles.push_back(j);
    s.distributions = {DistributionDef{"D1", DistributionSpec::Kind::Coordinates, angles, {}},
                       DistributionDef{"D2", DistributionSpec::Kind::Coordinates, {0}, {}}};
    s.semi_slant = std::make_pair(std::string("D1"), std::string("D2"));
    const std::string ns = std::to_string(n);
    s.expected.slant_cos = {
        {"D2", "(" + ns + "*sigma + sigma_bar)/sqrt((" + ns + " + 1)*(" + ns + "*sigma^2 + sigma_bar^2))"}};
    s.expected.induced_metric_diag = {std::to_string(n + 1)};
    for (int j = 1; j <= n; ++j) s.expected.induced_metric_diag.push_back("u^2 + 1");
    return s;
}

}  // namespace mslant
