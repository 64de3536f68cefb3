#ifndef MORSEFLOW_FIXTURES_HPP
#define MORSEFLOW_FIXTURES_HPP

#include "morseflow/scene.hpp"

namespace morseflow {

// Names of the built-in scenes, in registry order.
std::vector<std::string> builtin_fixtures();

// Resolve a fixture by name; parameterized forms accept an argument list,
// e.g. "real-line-many-minima(3)", "ellipsoid(1,2,3)", "genus-g-complex(2)".
Scene make_fixture(const std::string& name);

bool is_builtin_fixture(const std::string& name);

// Field builders shared with the config loader.
ScalarField height_field(double tilt_x = 0.0);
ScalarField ellipsoid_field(double a1, double a2, double a3);
ScalarField torus_trig_field(const std::string& name,
                             const std::vector<std::array<double, 4>>& terms);
ScalarField torus_cosine_field(double c1, double c2, double phase_x = 0.0, double phase_y = 0.0);
ScalarField monkey_saddle_field();
ScalarField monkey_saddle_perturbed(double eps);
ScalarField real_line_parabola();
ScalarField real_line_slope();
ScalarField real_line_many_minima(int n);

AmbientMap sphere_constraint();
AmbientMap peanut_constraint();

} // namespace morseflow

#endif
