#include "morseflow/fixtures.hpp"
#include "morseflow/fredholm.hpp"
#include "morseflow/pipeline.hpp"
#include "morseflow/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace morseflow;
using nlohmann::json;

namespace {

int cmd_run(const std::string& scene_name, const std::string& out, bool timing, bool scans) {
    Scene scene = load_scene(scene_name);
    if (scans) scene.run_scans = true;
    Report rep = run_pipeline(scene);
    const std::string doc = report_to_json(rep, timing);
    if (out.empty()) {
        std::cout << doc;
    } else {
        std::ofstream f(out);
        f << doc;
    }
    return rep.exit_status;
}

int cmd_fixtures() {
    for (const auto& name : builtin_fixtures()) std::cout << name << "\n";
    return 0;
}

OperatorDomain parse_domain(const std::string& s) {
    if (s == "full-line") return OperatorDomain::FullLine;
    if (s == "half-line-minus") return OperatorDomain::HalfLineMinus;
    if (s == "half-line-plus") return OperatorDomain::HalfLinePlus;
    if (s == "compact") return OperatorDomain::CompactInterval;
    throw ParseError("unknown operator domain '" + s + "'");
}

const char* domain_name(OperatorDomain d) {
    switch (d) {
    case OperatorDomain::FullLine: return "full-line";
    case OperatorDomain::HalfLineMinus: return "half-line-minus";
    case OperatorDomain::HalfLinePlus: return "half-line-plus";
    case OperatorDomain::CompactInterval: return "compact";
    }
    return "?";
}

int cmd_fredholm_sweep(const std::string& spec_path) {
    json spec;
    {
        std::ifstream in(spec_path);
        if (!in) throw ParseError("cannot open sweep spec '" + spec_path + "'");
        in >> spec;
    }
    const int count = spec.value("count", 20);
    const unsigned seed = spec.value("seed", 7u);
    const int n = spec.value("n", 2);
    const bool diagonal = spec.value("diagonal", false);
    GridSpec grid;
    grid.L = spec.value("L", 30.0);
    grid.m = spec.value("m", 3000);
    std::vector<std::string> domains =
        spec.value("domains", std::vector<std::string>{"full-line", "half-line-minus",
                                                       "half-line-plus", "compact"});
    std::mt19937_64 rng(seed);
    int failures = 0;
    for (const auto& dom : domains) {
        for (int k = 0; k < count; ++k) {
            OperatorFamily fam = random_tanh_family(n, parse_domain(dom), rng, diagonal);
            IndexReport rep = verify_index_formula(fam, grid);
            std::cout << dom << " family " << k << ": index " << rep.index << " predicted "
                      << rep.predicted_index << " ker " << rep.dim_ker << " coker "
                      << rep.dim_coker << (rep.prediction_matches ? "  ok" : "  MISMATCH")
                      << "\n";
            if (!rep.prediction_matches) ++failures;
        }
    }
    std::cout << "sweep complete: " << failures << " mismatches\n";
    return failures == 0 ? 0 : 2;
}

int cmd_continue(const std::string& a, const std::string& b, double T, bool timing) {
    Scene sa = load_scene(a);
    Scene sb = load_scene(b);
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
    const auto t0 = std::chrono::steady_clock::now();
    ChainMapGF2 phi = chain_map(h, da, db, prm);
    InducedMap Phi = induced_map(phi, da, db);
    LipschitzReport lip = spectral_lipschitz_check(da, db, Phi);
    EnergyBoundReport en = energy_bound_check(h, phi.counts, da, db);

    json j;
    j["scene_from"] = sa.name;
    j["scene_to"] = sb.name;
    j["chain_identity_ok"] = phi.chain_identity_ok;
    j["iso"] = Phi.iso;
    json mats = json::array();
    for (const auto& M : phi.phi) mats.push_back(M.to_rows01());
    j["phi"] = mats;
    json imats = json::array();
    for (const auto& M : Phi.matrix) imats.push_back(M.to_rows01());
    j["induced"] = imats;
    json counts = json::array();
    for (const auto& mc : phi.counts)
        counts.push_back({{"source", mc.source},
                          {"target", mc.target},
                          {"count", mc.count},
                          {"mod2", mc.count_mod2}});
    j["counts"] = counts;
    j["lipschitz"] = {{"c0_distance", lip.c0_distance}, {"all_ok", lip.all_ok}};
    j["energy_bounds"] = {{"checked", en.checked}, {"ok", en.ok}};
    if (timing)
        j["elapsed_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << j.dump(2) << "\n";
    return (phi.chain_identity_ok && Phi.iso) ? 0 : 2;
}

int cmd_export_flows(const std::string& scene_name, const std::string& dir) {
    Scene scene = load_scene(scene_name);
    if (scene.is_abstract) throw Error("abstract scenes have no flow lines to export");
    std::filesystem::create_directories(dir);
    Report rep = run_pipeline(scene);
    {
        std::ofstream f(std::filesystem::path(dir) / (scene.name + "__criticals.csv"));
        f << critical_table_csv(rep.criticals);
    }
    int written = 0;
    const auto& source_counts = rep.cover_counts.empty() ? rep.counts : rep.cover_counts;
    for (const auto& mc : source_counts) {
        int k = 0;
        for (const auto& w : mc.witnesses) {
            std::ostringstream name;
            name << scene.name << "__" << mc.source << "__" << mc.target << "__" << k++ << ".csv";
            std::ofstream f(std::filesystem::path(dir) / name.str());
            f << flow_line_csv(w);
            ++written;
        }
    }
    std::cout << "wrote " << written << " flow tables to " << dir << "\n";
    return rep.exit_status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Morse homology engine: critical points, flow-line counting, GF(2) homology, "
                 "spectral numbers, continuation maps, Fredholm index checks"};
    app.require_subcommand(1);

    std::string scene, out, dir, spec, scene_b;
    bool timing = false, scans = false;
    double T = 2.0;

    auto* run = app.add_subcommand("run", "Run the pipeline on a scene (builtin name or JSON file)");
    run->add_option("scene", scene, "Scene name or config path")->required();
    run->add_option("--out", out, "Write the JSON report to a file");
    run->add_flag("--timing", timing, "Include elapsed time in the report");
    run->add_flag("--scans", scans, "Run index-gap-two moduli scans");

    auto* fixtures_cmd = app.add_subcommand("fixtures", "List builtin scenes");

    auto* fredholm_cmd = app.add_subcommand("fredholm", "Fredholm index laboratory");
    auto* sweep = fredholm_cmd->add_subcommand("sweep", "Random-family index sweep from a JSON spec");
    sweep->add_option("spec", spec, "Sweep spec JSON path")->required();

    auto* cont = app.add_subcommand("continue", "Continuation map between two scenes");
    cont->add_option("sceneA", scene, "Source scene")->required();
    cont->add_option("sceneB", scene_b, "Target scene")->required();
    cont->add_option("--T", T, "Homotopy half-width");
    cont->add_flag("--timing", timing, "Include elapsed time");

    auto* exp = app.add_subcommand("export-flows", "Export witness flow lines as CSV tables");
    exp->add_option("scene", scene, "Scene name or config path")->required();
    exp->add_option("dir", dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(scene, out, timing, scans);
        if (fixtures_cmd->parsed()) return cmd_fixtures();
        if (fredholm_cmd->parsed() && sweep->parsed()) return cmd_fredholm_sweep(spec);
        if (cont->parsed()) return cmd_continue(scene, scene_b, T, timing);
        if (exp->parsed()) return cmd_export_flows(scene, dir);
    } catch (const MorseViolation& e) {
        std::cerr << "MorseViolation: " << e.what() << "\n";
        return 2;
    } catch (const NonGenericWarning& e) {
        std::cerr << "NonGenericWarning: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
