#ifndef MORSEFLOW_SCENE_HPP
#define MORSEFLOW_SCENE_HPP

#include "morseflow/algebra.hpp"
#include "morseflow/moduli.hpp"

#include <string>

namespace morseflow {

// A fully resolved scene: model + field + pipeline switches, or a declared
// abstract complex that bypasses geometry.
struct Scene {
    std::string name;
    bool is_abstract = false;

    ManifoldModel model = ManifoldModel::flat_torus(2);
    ScalarField field;
    ChainComplexGF2 abstract_complex;

    bool run_moduli = true;
    bool run_homology = true;
    bool run_spectral = true;
    bool run_scans = false;

    SearchParams search;
    ModuliParams moduli;
};

// Parse a scene from a JSON document (path or text); builtin names resolve
// through the fixture registry. Unknown keys are rejected.
Scene load_scene(const std::string& path_or_name);
Scene load_scene_json(const std::string& json_text, const std::string& origin);

} // namespace morseflow

#endif
