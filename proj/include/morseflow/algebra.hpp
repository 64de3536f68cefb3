#ifndef MORSEFLOW_ALGEBRA_HPP
#define MORSEFLOW_ALGEBRA_HPP

#include "morseflow/critical.hpp"
#include "morseflow/gf2.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace morseflow {

struct Generator {
    std::string label;
    double value = 0.0;
};

// Counts of unparametrized connecting flow lines between labeled critical
// points (produced by the moduli module or declared by abstract fixtures).
struct PairCount {
    std::string source; // higher index
    std::string target; // lower index
    long count = 0;
    int count_mod2 = 0;
};

// GF(2) Morse chain complex: graded generators plus boundary matrices
// boundary[k] : CM_k -> CM_{k-1} (rows = degree k-1, cols = degree k).
struct ChainComplexGF2 {
    std::vector<std::vector<Generator>> generators; // by degree 0..max
    std::vector<BitMatrix> boundary;                // boundary[0] has 0 rows

    int max_degree() const { return int(generators.size()) - 1; }
    int dim(int k) const {
        return (k < 0 || k > max_degree()) ? 0 : int(generators[size_t(k)].size());
    }
    int generator_index(int degree, const std::string& label) const;
    int total_generators() const;
};

struct BoundaryCheck {
    bool ok = true;
    int offending_degree = -1;
};

struct HomologyResult {
    std::vector<int> betti;
    std::vector<std::vector<BitVec>> representatives; // kernel vectors per degree
};

struct MorseInequalityCheck {
    bool ok = true;
    int slack = 0;
};

struct SpectralClass {
    int degree = 0;
    BitVec representative;   // minimizing representative
    double sigma = 0.0;
    std::string witness;     // generator realizing the max
};

struct SpectralReport {
    std::vector<SpectralClass> classes;
    std::vector<double> spectrum;             // S_f: all critical values
    std::vector<double> homological_spectrum; // S^h_f: spectral values
    double action_gap = std::numeric_limits<double>::infinity();
    bool singleton_spectrum = false;
};

// Assemble the complex from classified critical points and pair counts.
// Degenerate points must be filtered out by the caller (MorseViolation).
ChainComplexGF2 build_complex(const std::vector<CriticalPoint>& crits,
                              const std::vector<PairCount>& counts);

// Abstract complexes (fixtures) are declared directly.
ChainComplexGF2 make_abstract_complex(std::vector<std::vector<Generator>> gens,
                                      std::vector<std::vector<std::vector<int>>> boundaries01);

BoundaryCheck verify_boundary_squared(const ChainComplexGF2& cx);

HomologyResult homology(const ChainComplexGF2& cx);

MorseInequalityCheck morse_inequality_check(int n_critical, const HomologyResult& h);

// Minimal max-value over the coset xi + im boundary_{k+1}: exhaustive when the
// image rank is small, value-ordered greedy reduction otherwise.
double spectral_number(const ChainComplexGF2& cx, int degree, const BitVec& xi,
                       int exhaustive_rank_cap = 20);

// Exhaustive-only variant (oracle; throws if rank exceeds the cap).
double spectral_number_exhaustive(const ChainComplexGF2& cx, int degree, const BitVec& xi,
                                  int rank_cap = 20);

// Greedy-only variant.
double spectral_number_greedy(const ChainComplexGF2& cx, int degree, const BitVec& xi);

// The minimizing representative found by the greedy reduction.
BitVec spectral_representative(const ChainComplexGF2& cx, int degree, const BitVec& xi);

SpectralReport spectral_report(const ChainComplexGF2& cx, const HomologyResult& h,
                               double tau_val = 1e-9);

// Minimal distance between distinct homological spectral values; infinity
// (singleton flag) when fewer than two values exist.
double action_gap(const SpectralReport& rep);

double sigma_of(const ChainComplexGF2& cx, int degree, const BitVec& xi); // max value over support

} // namespace morseflow

#endif
