#ifndef MORSEFLOW_COMMON_HPP
#define MORSEFLOW_COMMON_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace morseflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy. Every failure mode named in the module contracts gets its
// own type so callers (and the CLI exit-code logic) can discriminate.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define MORSEFLOW_ERROR(Name)                                                  \
    struct Name : Error {                                                      \
        using Error::Error;                                                    \
    }

MORSEFLOW_ERROR(RegularityError);        // |grad G| below regularity floor
MORSEFLOW_ERROR(ProjectionDivergence);   // Newton projection onto {G=0} failed
MORSEFLOW_ERROR(NotCriticalError);
MORSEFLOW_ERROR(DegenerateCritical);
MORSEFLOW_ERROR(NotInvariantError);      // field not antipodally invariant
MORSEFLOW_ERROR(StepCollapse);
MORSEFLOW_ERROR(EscapedDomain);
MORSEFLOW_ERROR(InsufficientTail);
MORSEFLOW_ERROR(ChartOverflow);
MORSEFLOW_ERROR(NonGenericWarning);      // suspected non-Morse-Smale data
MORSEFLOW_ERROR(OddOrbitError);
MORSEFLOW_ERROR(MissingPairError);
MORSEFLOW_ERROR(NotAComplexError);
MORSEFLOW_ERROR(ZeroClassError);
MORSEFLOW_ERROR(ChainIdentityFailure);
MORSEFLOW_ERROR(BoundViolation);
MORSEFLOW_ERROR(NotCauchy);
MORSEFLOW_ERROR(GridTooCoarse);
MORSEFLOW_ERROR(ThresholdAmbiguity);
MORSEFLOW_ERROR(IllConditioned);
MORSEFLOW_ERROR(ParseError);
MORSEFLOW_ERROR(UnknownFixture);
MORSEFLOW_ERROR(MorseViolation);

#undef MORSEFLOW_ERROR

// Default tolerances shared across modules (overridable through Scene).
struct Tolerances {
    double tau_surf = 1e-10;   // constraint residual after retraction
    double eps_reg = 1e-6;     // regularity floor for |grad G|
    int n_proj = 50;           // Newton projection iteration cap
    double h_max = 0.1;        // maximal retraction step length
    double tau_tan = 1e-10;    // tangency tolerance
    double h_fd = 1e-5;        // central finite-difference step
    double tau_crit = 1e-9;    // gradient norm at accepted critical points
    double tau_val = 1e-9;     // merging tolerance for critical values
    double dedup_radius = 1e-4;
    double eps_capture = 1e-6; // capture ball radius around critical points
    double grad_capture = 1e-6;
    double s_max = 500.0;      // flow-time budget before giving up
    double tau_mono = 1e-9;    // allowed numerical uphill drift
    double tau_energy = 1e-6;  // energy identity tolerance (relative)
    double delta_seed = 1e-4;  // unstable-sphere seed offset
    int n_scan = 2048;         // angles on the unstable circle
    int bisect_depth = 50;
    double angle_tol = 1e-10;
};

// Halton low-discrepancy sequence, one value per (index, base).
double halton(std::uint64_t index, std::uint32_t base);

// Quasi-random point in [0,1)^dim.
Vec halton_point(std::uint64_t index, int dim);

// Quintic smoothstep: 0 for t <= 0, 1 for t >= 1, C^2 across the joints.
double smoothstep5(double t);
double smoothstep5_deriv(double t);

// Cubic smoothstep (used to exercise cutoff independence).
double smoothstep3(double t);

inline double sq(double x) { return x * x; }

} // namespace morseflow

#endif
