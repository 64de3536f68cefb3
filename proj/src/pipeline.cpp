#include "morseflow/pipeline.hpp"

#include <chrono>
#include <map>

namespace morseflow {

namespace {

// Complex + homology + spectral for a list of Morse critical points with
// their pair counts.
void algebra_stages(Report& rep, const Scene& scene, const std::vector<CriticalPoint>& gens,
                    const std::vector<ModuliCount>& counts) {
    std::vector<PairCount> pairs;
    for (const auto& mc : counts) pairs.push_back(mc.as_pair());
    rep.complex = build_complex(gens, pairs);
    rep.has_complex = true;
    rep.boundary_check = verify_boundary_squared(rep.complex);
    if (!rep.boundary_check.ok) {
        rep.warnings.push_back("boundary squared fails at degree " +
                               std::to_string(rep.boundary_check.offending_degree));
        rep.exit_status = 2;
        return;
    }
    if (!scene.run_homology) return;
    rep.homol = homology(rep.complex);
    rep.has_homology = true;
    rep.morse_check = morse_inequality_check(rep.complex.total_generators(), rep.homol);
    if (scene.run_spectral) {
        rep.spectral = spectral_report(rep.complex, rep.homol);
        rep.has_spectral = true;
    }
}

} // namespace

Report run_pipeline(const Scene& scene) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep.scene = scene.name;

    if (scene.is_abstract) {
        rep.complex = scene.abstract_complex;
        rep.has_complex = true;
        rep.boundary_check = verify_boundary_squared(rep.complex);
        if (!rep.boundary_check.ok) {
            rep.warnings.push_back("boundary squared fails at degree " +
                                   std::to_string(rep.boundary_check.offending_degree));
            rep.exit_status = 2;
        } else if (scene.run_homology) {
            rep.homol = homology(rep.complex);
            rep.has_homology = true;
            rep.morse_check = morse_inequality_check(rep.complex.total_generators(), rep.homol);
            if (scene.run_spectral) {
                rep.spectral = spectral_report(rep.complex, rep.homol);
                rep.has_spectral = true;
            }
        }
        rep.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }

    // ---- critical stage
    CriticalSearchResult found = find_critical_points(scene.field, scene.model, scene.search);
    rep.criticals = found.points;
    rep.search_stats = found.stats;
    if (found.stats.empty_result) rep.warnings.push_back("empty critical point list");
    for (const auto& c : rep.criticals) {
        rep.euler_characteristic +=
            (c.morse_index % 2 == 0 ? 1 : -1) * (c.degenerate ? 0 : 1);
    }
    std::vector<std::string> degenerate;
    for (const auto& c : rep.criticals)
        if (c.degenerate) degenerate.push_back(c.label);
    if (!degenerate.empty()) {
        std::string msg = "MorseViolation: degenerate critical point(s)";
        for (const auto& l : degenerate) msg += " " + l;
        rep.warnings.push_back(msg);
        rep.exit_status = 2;
        rep.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }
    if (!scene.run_moduli) {
        rep.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }

    // ---- moduli stage
    try {
        std::map<std::string, CircleScan> circle_cache;
        for (const auto& up : rep.criticals)
            if (up.morse_index == 2)
                circle_cache[up.label] =
                    scan_unstable_circle(scene.model, scene.field, rep.criticals, up, scene.moduli);

        std::vector<ModuliCount> counts;
        for (const auto& up : rep.criticals) {
            for (const auto& dn : rep.criticals) {
                if (up.morse_index != dn.morse_index + 1) continue;
                const CircleScan* cached =
                    circle_cache.count(up.label) ? &circle_cache.at(up.label) : nullptr;
                counts.push_back(count_flow_lines(scene.model, scene.field, rep.criticals, up, dn,
                                                  scene.moduli, cached));
            }
        }

        if (scene.run_scans) {
            for (const auto& up : rep.criticals) {
                for (const auto& dn : rep.criticals) {
                    if (up.morse_index != 2 || dn.morse_index != 0) continue;
                    const CircleScan* cached =
                        circle_cache.count(up.label) ? &circle_cache.at(up.label) : nullptr;
                    rep.scans.push_back(moduli_scan(scene.model, scene.field, rep.criticals, up,
                                                    dn, scene.moduli, cached));
                }
            }
        }

        // ---- quotient identification
        if (scene.model.kind() == ModelKind::AntipodalQuotient) {
            rep.quotient_classes = quotient_identify(rep.criticals, scene.field, scene.model);
            rep.cover_counts = counts;
            rep.counts = quotient_count(counts, rep.quotient_classes);
            std::vector<CriticalPoint> reps;
            for (const auto& cls : rep.quotient_classes) reps.push_back(cls.representative);
            reps = label_sorted(std::move(reps));
            // labels of representatives must match those used in quotient_count
            algebra_stages(rep, scene, reps, rep.counts);
        } else {
            rep.counts = counts;
            algebra_stages(rep, scene, rep.criticals, rep.counts);
        }
    } catch (const NonGenericWarning& w) {
        rep.warnings.push_back(std::string("NonGenericWarning: ") + w.what());
        rep.exit_status = 2;
    }

    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

SceneData scene_data_from_report(const Scene& scene, const Report& rep) {
    SceneData sd;
    sd.model = &scene.model;
    sd.field = scene.field;
    sd.metric = scene.model.metric();
    sd.crits = rep.criticals;
    sd.complex = rep.complex;
    sd.homol = rep.homol;
    return sd;
}

} // namespace morseflow
