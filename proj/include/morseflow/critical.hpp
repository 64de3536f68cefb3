#ifndef MORSEFLOW_CRITICAL_HPP
#define MORSEFLOW_CRITICAL_HPP

#include "morseflow/fields.hpp"

#include <optional>
#include <string>
#include <vector>

namespace morseflow {

struct CriticalPoint {
    Vec location;
    double value = 0.0;
    std::vector<double> hessian_eigenvalues; // sorted ascending
    SylvesterTriple sylvester;
    int morse_index = 0; // n_minus of the metric Hessian
    bool degenerate = false;
    std::string label;

    double smallest_positive_eigenvalue() const;
    double largest_negative_eigenvalue_magnitude() const;
};

struct SearchParams {
    int seed_count = 512;
    double newton_tol = 1e-9;
    double dedup_radius = 1e-4;
    int max_newton_iter = 80;
};

struct SearchStats {
    int seeds = 0;
    int converged = 0;
    int dropped = 0;
    int distinct = 0;
    bool empty_result = false;
};

struct CriticalSearchResult {
    std::vector<CriticalPoint> points;
    SearchStats stats;
};

// Damped Newton on the stationarity system from quasi-random seeds; on
// implicit surfaces the system is the Lagrange system grad f = lambda grad G,
// G = 0. Results are deduplicated and labeled by (descending value, then
// lexicographic location).
CriticalSearchResult find_critical_points(const ScalarField& f, const ManifoldModel& m,
                                          const SearchParams& params = {});

// Fill eigendata, Sylvester triple, Morse index and degeneracy flag at a
// stationary point.
CriticalPoint classify(const ScalarField& f, const ManifoldModel& m, const Vec& p,
                       double tau_crit = 1e-9);

// Distinct critical values merged within tau_val, ascending.
std::vector<double> spectrum(const std::vector<CriticalPoint>& crits, double tau_val = 1e-9);

struct CriticalClass {
    CriticalPoint representative;        // canonical representative
    std::vector<CriticalPoint> orbit;    // both covering points
};

// Group covering-sphere critical points into antipodal orbits of size two.
std::vector<CriticalClass> quotient_identify(const std::vector<CriticalPoint>& crits,
                                             const ScalarField& f, const ManifoldModel& m);

// Assign labels by (descending value, lexicographic location); returns the
// sorted list.
std::vector<CriticalPoint> label_sorted(std::vector<CriticalPoint> crits);

} // namespace morseflow

#endif
