#include "morseflow/continuation.hpp"
#include "morseflow/fixtures.hpp"
#include "morseflow/fredholm.hpp"
#include "morseflow/pipeline.hpp"
#include "morseflow/report.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

namespace py = pybind11;
using namespace morseflow;

namespace {

Scene scene_from_arg(const std::string& name_or_json) {
    if (!name_or_json.empty() && name_or_json.front() == '{')
        return load_scene_json(name_or_json, "inline");
    return load_scene(name_or_json);
}

// JSON text -> python object, so callers get plain dicts/lists.
py::object json_to_py(const nlohmann::json& j) {
    py::module_ pyjson = py::module_::import("json");
    return pyjson.attr("loads")(j.dump());
}

py::dict run_scene(const std::string& scene) {
    Scene sc = scene_from_arg(scene);
    Report rep = run_pipeline(sc);
    return json_to_py(nlohmann::json::parse(report_to_json(rep)));
}

py::list critical_points(const std::string& scene) {
    Scene sc = scene_from_arg(scene);
    auto res = find_critical_points(sc.field, sc.model, sc.search);
    py::list out;
    for (const auto& c : res.points) {
        py::dict d;
        d["label"] = c.label;
        std::vector<double> loc(c.location.data(), c.location.data() + c.location.size());
        d["location"] = loc;
        d["value"] = c.value;
        d["index"] = c.morse_index;
        d["degenerate"] = c.degenerate;
        d["eigenvalues"] = c.hessian_eigenvalues;
        out.append(d);
    }
    return out;
}

py::dict homology_of_complex(const std::vector<std::vector<std::pair<std::string, double>>>& gens,
                             const std::vector<std::vector<std::vector<int>>>& boundaries) {
    std::vector<std::vector<Generator>> G;
    for (const auto& degree : gens) {
        std::vector<Generator> row;
        for (const auto& [label, value] : degree) row.push_back({label, value});
        G.push_back(row);
    }
    ChainComplexGF2 cx = make_abstract_complex(G, boundaries);
    auto bc = verify_boundary_squared(cx);
    py::dict out;
    out["boundary_squared_ok"] = bc.ok;
    if (!bc.ok) {
        out["offending_degree"] = bc.offending_degree;
        return out;
    }
    auto h = homology(cx);
    out["betti"] = h.betti;
    auto rep = spectral_report(cx, h);
    out["homological_spectrum"] = rep.homological_spectrum;
    out["action_gap"] = rep.action_gap;
    return out;
}

double spectral_number_py(const std::vector<std::vector<std::pair<std::string, double>>>& gens,
                          const std::vector<std::vector<std::vector<int>>>& boundaries, int degree,
                          const std::vector<int>& xi) {
    std::vector<std::vector<Generator>> G;
    for (const auto& deg : gens) {
        std::vector<Generator> row;
        for (const auto& [label, value] : deg) row.push_back({label, value});
        G.push_back(row);
    }
    ChainComplexGF2 cx = make_abstract_complex(G, boundaries);
    BitVec v(cx.dim(degree));
    for (size_t i = 0; i < xi.size(); ++i)
        if (xi[i] % 2 != 0) v.set(int(i), true);
    return spectral_number(cx, degree, v);
}

py::dict fredholm_index_py(const std::string& domain, const std::vector<double>& eig_minus,
                           const std::vector<double>& eig_plus) {
    OperatorFamily fam;
    fam.n = int(eig_minus.size());
    fam.domain = domain == "full-line"         ? OperatorDomain::FullLine
                 : domain == "half-line-minus" ? OperatorDomain::HalfLineMinus
                 : domain == "half-line-plus"  ? OperatorDomain::HalfLinePlus
                                               : OperatorDomain::CompactInterval;
    Vec am(fam.n), ap(fam.n);
    for (int i = 0; i < fam.n; ++i) {
        am[i] = eig_minus[size_t(i)];
        ap[i] = eig_plus[size_t(i)];
    }
    fam.A_minus = Mat(am.asDiagonal());
    fam.A_plus = Mat(ap.asDiagonal());
    Mat Am = fam.A_minus, Ap = fam.A_plus;
    fam.A = [Am, Ap](double s) -> Mat {
        const double t = 0.5 * (1.0 + std::tanh(s));
        return (1.0 - t) * Am + t * Ap;
    };
    IndexReport rep = numeric_index(fam);
    py::dict out;
    out["dim_ker"] = rep.dim_ker;
    out["dim_coker"] = rep.dim_coker;
    out["index"] = rep.index;
    out["predicted_index"] = rep.predicted_index;
    out["matches"] = rep.prediction_matches;
    return out;
}

py::dict infinitesimal_glue_py(const std::vector<double>& H, double T,
                               const std::vector<double>& xi_plus,
                               const std::vector<double>& xi_minus) {
    Vec h(int(H.size())), xp(int(xi_plus.size())), xm(int(xi_minus.size()));
    for (size_t i = 0; i < H.size(); ++i) h[int(i)] = H[i];
    for (size_t i = 0; i < xi_plus.size(); ++i) xp[int(i)] = xi_plus[i];
    for (size_t i = 0; i < xi_minus.size(); ++i) xm[int(i)] = xi_minus[i];
    auto res = infinitesimal_glue(h, T, xp, xm);
    auto tolist = [](const Vec& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    py::dict out;
    out["blocks"] = py::make_tuple(tolist(res.block1), tolist(res.block2), tolist(res.block3),
                                   tolist(res.block4));
    out["max_error"] = res.max_error;
    return out;
}

py::dict integrate_flow_py(const std::string& scene, const std::vector<double>& start) {
    Scene sc = scene_from_arg(scene);
    auto crits = find_critical_points(sc.field, sc.model, sc.search).points;
    Vec p(int(start.size()));
    for (size_t i = 0; i < start.size(); ++i) p[int(i)] = start[i];
    StopRule stop{&crits, sc.moduli.stop.eps_capture, sc.moduli.stop.grad_capture,
                  sc.moduli.stop.s_max};
    FlowLine line = integrate(sc.model, sc.field, p, stop);
    py::dict out;
    out["target"] = line.target ? py::object(py::str(*line.target)) : py::none();
    out["energy"] = line.energy;
    out["samples"] = int(line.samples.size());
    out["monotone_violation"] = line.monotone_violation;
    std::vector<std::vector<double>> pts;
    for (const auto& smp : line.samples) {
        std::vector<double> row{smp.s};
        for (int i = 0; i < smp.p.size(); ++i) row.push_back(smp.p[i]);
        pts.push_back(row);
    }
    out["path"] = pts;
    return out;
}

py::dict continuation_map_py(const std::string& scene_a, const std::string& scene_b, double T) {
    Scene sa = scene_from_arg(scene_a);
    Scene sb = scene_from_arg(scene_b);
    ContinuationParams prm;
    SceneData da = build_scene_data(sa.model, sa.field, sa.moduli, sa.search);
    SceneData db = build_scene_data(sb.model, sb.field, sb.moduli, sb.search);
    Homotopy h;
    h.model = &sa.model;
    h.f_minus = sa.field;
    h.f_plus = sb.field;
    h.g_minus = sa.model.metric();
    h.g_plus = sb.model.metric();
    h.T = T;
    ChainMapGF2 phi = chain_map(h, da, db, prm);
    InducedMap Phi = induced_map(phi, da, db);
    py::dict out;
    out["chain_identity_ok"] = phi.chain_identity_ok;
    out["iso"] = Phi.iso;
    std::vector<std::vector<std::vector<int>>> mats;
    for (const auto& M : phi.phi) mats.push_back(M.to_rows01());
    out["phi"] = mats;
    std::vector<std::vector<std::vector<int>>> imats;
    for (const auto& M : Phi.matrix) imats.push_back(M.to_rows01());
    out["induced"] = imats;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Morse homology engine bindings";
    m.attr("__version__") = "0.1.0";

    py::register_exception<MorseViolation>(m, "MorseViolationError");
    py::register_exception<NonGenericWarning>(m, "NonGenericError");
    py::register_exception<ParseError>(m, "SceneParseError");
    py::register_exception<Error>(m, "MorseflowError");

    m.def("builtin_fixtures", &builtin_fixtures, "Names of the built-in scenes");
    m.def("run_scene", &run_scene, py::arg("scene"),
          "Run the full pipeline on a scene (builtin name, config path, or JSON text); "
          "returns the report as a dict");
    m.def("critical_points", &critical_points, py::arg("scene"),
          "Locate and classify the critical points of a scene");
    m.def("homology_of_complex", &homology_of_complex, py::arg("generators"),
          py::arg("boundaries"),
          "GF(2) homology of an explicit chain complex: generators per degree as "
          "(label, value) pairs, boundaries as 0/1 row lists");
    m.def("spectral_number", &spectral_number_py, py::arg("generators"), py::arg("boundaries"),
          py::arg("degree"), py::arg("xi"),
          "Minimal max-value over the coset of xi (0/1 coefficient list)");
    m.def("fredholm_index", &fredholm_index_py, py::arg("domain"), py::arg("eig_minus"),
          py::arg("eig_plus"),
          "Numeric index of d/ds + A(s) for a tanh interpolation between diagonal "
          "endpoints; domain in {'full-line','half-line-minus','half-line-plus','compact'}");
    m.def("infinitesimal_glue", &infinitesimal_glue_py, py::arg("H"), py::arg("T"),
          py::arg("xi_plus"), py::arg("xi_minus"),
          "Infinitesimal gluing of stable/unstable tangent data across [-T, T]");
    m.def("integrate_flow", &integrate_flow_py, py::arg("scene"), py::arg("start"),
          "Integrate the negative gradient flow from a starting point");
    m.def("continuation_map", &continuation_map_py, py::arg("scene_a"), py::arg("scene_b"),
          py::arg("T") = 2.0, "Continuation chain map and induced map between two scenes");
}
