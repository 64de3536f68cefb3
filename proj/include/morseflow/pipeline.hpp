#ifndef MORSEFLOW_PIPELINE_HPP
#define MORSEFLOW_PIPELINE_HPP

#include "morseflow/continuation.hpp"
#include "morseflow/scene.hpp"

namespace morseflow {

struct Report {
    std::string scene;
    // critical points (covering points for quotients; classes reported too)
    std::vector<CriticalPoint> criticals;
    std::vector<CriticalClass> quotient_classes;
    SearchStats search_stats;
    std::vector<ModuliCount> counts;       // the counts entering the complex
    std::vector<ModuliCount> cover_counts; // pre-identification (quotients)
    std::vector<ModuliScan> scans;
    bool has_complex = false;
    ChainComplexGF2 complex;
    BoundaryCheck boundary_check;
    bool has_homology = false;
    HomologyResult homol;
    MorseInequalityCheck morse_check;
    bool has_spectral = false;
    SpectralReport spectral;
    int euler_characteristic = 0;
    std::vector<std::string> warnings;
    // 0 = clean, 2 = Morse/genericity violation surfaced in warnings
    int exit_status = 0;
    double elapsed_seconds = 0.0;
};

Report run_pipeline(const Scene& scene);

// The per-scene data continuation needs, produced by the same stages.
SceneData scene_data_from_report(const Scene& scene, const Report& rep);

} // namespace morseflow

#endif
