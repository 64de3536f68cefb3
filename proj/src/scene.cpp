#include "morseflow/scene.hpp"
#include "morseflow/fixtures.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace morseflow {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ParseError("unknown key '" + it.key() + "' in " + where);
    }
}

ManifoldModel parse_model(const json& j) {
    reject_unknown_keys(j, {"kind", "surface", "polynomial", "dimension", "interval", "metric",
                            "box", "metric_scale"},
                        "model");
    const std::string kind = j.value("kind", "");
    MetricSpec metric;
    if (j.contains("metric")) {
        const json& mj = j.at("metric");
        reject_unknown_keys(mj, {"kind", "matrix"}, "model.metric");
        const std::string mk = mj.value("kind", "flat");
        if (mk == "induced")
            metric.kind = MetricKind::Induced;
        else if (mk == "flat")
            metric.kind = MetricKind::Flat;
        else if (mk == "explicit") {
            metric.kind = MetricKind::Explicit;
            const auto rows = mj.at("matrix").get<std::vector<std::vector<double>>>();
            Mat g(int(rows.size()), int(rows.front().size()));
            for (size_t i = 0; i < rows.size(); ++i)
                for (size_t k = 0; k < rows[i].size(); ++k) g(int(i), int(k)) = rows[i][k];
            metric.matrix = g;
        } else
            throw ParseError("unknown metric kind '" + mk + "'");
    }

    auto parse_surface_map = [&](const json& mj) -> AmbientMap {
        if (mj.is_string()) {
            const std::string s = mj.get<std::string>();
            if (s == "sphere") return sphere_constraint();
            if (s == "peanut") return peanut_constraint();
            throw ParseError("unknown builtin surface '" + s + "'");
        }
        // polynomial coefficient table: list of [i, j, k, c]
        std::vector<Poly3::Term> terms;
        for (const auto& t : mj) {
            if (!t.is_array() || t.size() != 4)
                throw ParseError("polynomial terms must be [i,j,k,c] quadruples");
            terms.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>(), t[3].get<double>()});
        }
        return Poly3(terms).as_map();
    };

    Vec lo, hi;
    if (j.contains("box")) {
        const auto b = j.at("box").get<std::vector<std::vector<double>>>();
        lo = Vec(int(b[0].size()));
        hi = Vec(int(b[1].size()));
        for (size_t i = 0; i < b[0].size(); ++i) lo[int(i)] = b[0][i];
        for (size_t i = 0; i < b[1].size(); ++i) hi[int(i)] = b[1][i];
    }

    if (kind == "implicit-surface") {
        if (metric.kind == MetricKind::Flat) metric.kind = MetricKind::Induced;
        return ManifoldModel::implicit_surface(
            parse_surface_map(j.contains("surface") ? j.at("surface") : j.at("polynomial")),
            metric, lo, hi);
    }
    if (kind == "antipodal-quotient")
        return ManifoldModel::antipodal_quotient(
            parse_surface_map(j.contains("surface") ? j.at("surface") : j.at("polynomial")), lo,
            hi);
    if (kind == "flat-torus") return ManifoldModel::flat_torus(j.value("dimension", 2), metric);
    if (kind == "real-line") {
        const auto iv = j.at("interval").get<std::vector<double>>();
        if (iv.size() != 2) throw ParseError("interval must be [lo, hi]");
        return ManifoldModel::real_line(iv[0], iv[1], j.value("metric_scale", 1.0));
    }
    throw ParseError("unknown model kind '" + kind + "'");
}

ScalarField parse_field(const json& j) {
    reject_unknown_keys(j, {"kind", "coefficients", "terms", "tilt", "n", "epsilon", "phases"},
                        "field");
    const std::string kind = j.value("kind", "");
    if (kind == "height") return height_field(j.value("tilt", 0.0));
    if (kind == "ellipsoid-quadratic") {
        const auto a = j.at("coefficients").get<std::vector<double>>();
        if (a.size() != 3) throw ParseError("ellipsoid-quadratic needs three coefficients");
        return ellipsoid_field(a[0], a[1], a[2]);
    }
    if (kind == "torus-cosine") {
        std::vector<double> a = j.contains("coefficients")
                                    ? j.at("coefficients").get<std::vector<double>>()
                                    : std::vector<double>{1.0, 2.0};
        std::vector<double> ph = j.contains("phases") ? j.at("phases").get<std::vector<double>>()
                                                      : std::vector<double>{0.0, 0.0};
        return torus_cosine_field(a[0], a[1], ph[0], ph[1]);
    }
    if (kind == "torus-trig") {
        std::vector<std::array<double, 4>> terms;
        for (const auto& t : j.at("terms")) {
            if (!t.is_array() || t.size() != 4)
                throw ParseError("torus-trig terms must be [c,a,b,phase] quadruples");
            terms.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>(),
                             t[3].get<double>()});
        }
        return torus_trig_field("torus-trig", terms);
    }
    if (kind == "monkey-saddle") return monkey_saddle_field();
    if (kind == "monkey-saddle-perturbed") return monkey_saddle_perturbed(j.value("epsilon", 0.1));
    if (kind == "polynomial") {
        std::vector<Poly3::Term> terms;
        for (const auto& t : j.at("terms"))
            terms.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>(), t[3].get<double>()});
        return ScalarField::from_poly("polynomial", Poly3(terms));
    }
    if (kind == "parabola") return real_line_parabola();
    if (kind == "slope") return real_line_slope();
    if (kind == "many-minima") return real_line_many_minima(j.value("n", 3));
    throw ParseError("unknown field kind '" + kind + "'");
}

} // namespace

Scene load_scene_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("cannot parse " + origin + ": " + e.what());
    }
    reject_unknown_keys(j,
                        {"name", "fixture", "model", "field", "pipeline", "tolerances", "search"},
                        "scene");
    if (j.contains("fixture")) {
        Scene sc = make_fixture(j.at("fixture").get<std::string>());
        if (j.contains("name")) sc.name = j.at("name").get<std::string>();
        return sc;
    }
    Scene sc;
    sc.name = j.value("name", origin);
    if (!j.contains("model") || !j.contains("field"))
        throw ParseError("scene needs 'model' and 'field' (or 'fixture')");
    sc.model = parse_model(j.at("model"));
    sc.field = parse_field(j.at("field"));
    if (j.contains("pipeline")) {
        const json& pj = j.at("pipeline");
        reject_unknown_keys(pj, {"count_moduli", "homology", "spectral", "scans"}, "pipeline");
        sc.run_moduli = pj.value("count_moduli", true);
        sc.run_homology = pj.value("homology", true);
        sc.run_spectral = pj.value("spectral", true);
        sc.run_scans = pj.value("scans", false);
    }
    if (j.contains("tolerances")) {
        const json& tj = j.at("tolerances");
        reject_unknown_keys(tj,
                            {"newton_tol", "dedup_radius", "seed_count", "eps_capture", "s_max",
                             "n_scan", "delta_seed"},
                            "tolerances");
        sc.search.newton_tol = tj.value("newton_tol", sc.search.newton_tol);
        sc.search.dedup_radius = tj.value("dedup_radius", sc.search.dedup_radius);
        sc.search.seed_count = tj.value("seed_count", sc.search.seed_count);
        sc.moduli.stop.eps_capture = tj.value("eps_capture", sc.moduli.stop.eps_capture);
        sc.moduli.stop.s_max = tj.value("s_max", sc.moduli.stop.s_max);
        sc.moduli.n_scan = tj.value("n_scan", sc.moduli.n_scan);
        sc.moduli.delta_seed = tj.value("delta_seed", sc.moduli.delta_seed);
    }
    if (j.contains("search")) {
        const json& sj = j.at("search");
        reject_unknown_keys(sj, {"seed_count", "newton_tol", "dedup_radius"}, "search");
        sc.search.seed_count = sj.value("seed_count", sc.search.seed_count);
        sc.search.newton_tol = sj.value("newton_tol", sc.search.newton_tol);
        sc.search.dedup_radius = sj.value("dedup_radius", sc.search.dedup_radius);
    }
    return sc;
}

Scene load_scene(const std::string& path_or_name) {
    if (is_builtin_fixture(path_or_name)) return make_fixture(path_or_name);
    std::ifstream in(path_or_name);
    if (!in)
        throw UnknownFixture("no builtin fixture or readable file named '" + path_or_name + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scene_json(ss.str(), path_or_name);
}

} // namespace morseflow
