#ifndef MORSEFLOW_CONTINUATION_HPP
#define MORSEFLOW_CONTINUATION_HPP

#include "morseflow/moduli.hpp"

namespace morseflow {

// A Morse-Smale scene: everything the continuation machinery needs to know
// about one (f, g) pair on a shared manifold.
struct SceneData {
    const ManifoldModel* model = nullptr;
    ScalarField field;
    MetricSpec metric;
    std::vector<CriticalPoint> crits;
    ChainComplexGF2 complex;
    HomologyResult homol;

    const CriticalPoint* find(const std::string& label) const;
};

// Runs critical search, flow-line counting, complex assembly and homology for
// one scene (throws MorseViolation on degenerate critical points).
SceneData build_scene_data(const ManifoldModel& m, const ScalarField& f,
                           const ModuliParams& prm, const SearchParams& sp = {});

enum class HomotopyMode { ConvexCombination, GeneralInterpolation };

// Interpolating family f_s = beta(s) f_+ + (1 - beta) f_-, frozen outside
// [-T, T]; metrics interpolate pointwise-convexly on flat charts.
struct Homotopy {
    const ManifoldModel* model = nullptr;
    ScalarField f_minus, f_plus;
    MetricSpec g_minus, g_plus;
    double T = 2.0;
    HomotopyMode mode = HomotopyMode::ConvexCombination;
    std::function<double(double)> beta_raw; // optional override on [0,1]

    double beta(double s) const;
    double f_at(double s, const Vec& p) const;
    Vec ambient_grad_at(double s, const Vec& p) const;
    Mat metric_matrix_at(double s) const; // flat charts only
    VelocityField field() const;          // -grad_{g_s} f_s
    Homotopy reversed() const;            // time reversal (f -> -f swap)
};

struct ContinuationParams {
    ModuliParams moduli;
    double s_pad = 10.0;     // post-window autonomous budget multiplier base
    int n_offsets = 512;     // offset scan resolution per sign
    double offset_max = 2e-2;
    double offset_min = 1e-12;
};

// Count solutions of the time-dependent gradient flow from c1 (crit of f_-)
// to c2 (crit of f_+), both of the same Morse index.
ModuliCount count_continuation_lines(const Homotopy& h, const SceneData& from,
                                     const SceneData& to, const CriticalPoint& c1,
                                     const CriticalPoint& c2, const ContinuationParams& prm);

struct ChainMapGF2 {
    std::vector<BitMatrix> phi; // degree k: rows = crit_k(f_+), cols = crit_k(f_-)
    std::vector<ModuliCount> counts;
    bool chain_identity_ok = false;
    int failing_degree = -1;
};

ChainMapGF2 chain_map(const Homotopy& h, const SceneData& from, const SceneData& to,
                      const ContinuationParams& prm);

struct InducedMap {
    std::vector<BitMatrix> matrix; // on homology bases per degree
    bool iso = false;
};

InducedMap induced_map(const ChainMapGF2& phi, const SceneData& from, const SceneData& to);

// Compose induced maps (degreewise product b . a).
InducedMap compose(const InducedMap& b, const InducedMap& a);

struct EnergyBoundReport {
    int checked = 0;
    double worst_action_slack = -std::numeric_limits<double>::infinity();
    double worst_energy_slack = -std::numeric_limits<double>::infinity();
    double sup_fplus_minus_fminus = 0.0;
    bool ok = true;
};

EnergyBoundReport energy_bound_check(const Homotopy& h, const std::vector<ModuliCount>& counts,
                                     const SceneData& from, const SceneData& to,
                                     double tau_energy = 1e-6);

struct LipschitzReport {
    struct Entry {
        int degree;
        double sigma_from, sigma_to, bound, slack;
        bool ok;
    };
    std::vector<Entry> entries;
    double c0_distance = 0.0;
    bool all_ok = true;
};

LipschitzReport spectral_lipschitz_check(const SceneData& from, const SceneData& to,
                                         const InducedMap& Phi, int c0_samples = 100000);

// C0 distance of two fields over the model by quasi-random sampling.
double c0_distance(const ManifoldModel& m, const ScalarField& a, const ScalarField& b,
                   int samples = 100000);

double c0_norm(const ManifoldModel& m, const ScalarField& a, int samples = 100000);

struct ExtensionTrace {
    int degree = 0;
    int class_index = 0;
    std::vector<double> values;   // spectral number per member, transported
    double limit = 0.0;
    double nearest_critical_value = 0.0;
    double distance_to_spectrum = 0.0;
};

struct ExtensionResult {
    std::vector<ExtensionTrace> traces;
    std::vector<double> member_c0_steps; // ||f_{j+1} - f_j||_C0
    bool cauchy_ok = true;
};

// Extend spectral numbers to a non-Morse field along a C0-converging sequence
// of Morse scenes; classes transported through continuation isomorphisms.
ExtensionResult spectral_extend(const std::vector<SceneData>& members,
                                const ScalarField& degenerate_limit, const ManifoldModel& m,
                                const ContinuationParams& prm, double tau = 1e-6);

} // namespace morseflow

#endif
