#ifndef MORSEFLOW_FREDHOLM_HPP
#define MORSEFLOW_FREDHOLM_HPP

#include "morseflow/common.hpp"

#include <functional>
#include <random>

namespace morseflow {

enum class OperatorDomain { FullLine, HalfLineMinus, HalfLinePlus, CompactInterval };

// Family s -> A(s) of n x n matrices with symmetric nondegenerate asymptotics
// where the domain requires them.
struct OperatorFamily {
    int n = 1;
    OperatorDomain domain = OperatorDomain::FullLine;
    std::function<Mat(double)> A;
    Mat A_minus; // required for FullLine / HalfLineMinus
    Mat A_plus;  // required for FullLine / HalfLinePlus
    double T = 1.0; // half-width for CompactInterval

    double eps_asym() const; // smallest |eigenvalue| over the required ends
    int mu_minus() const;    // Morse index of A_minus
    int mu_plus() const;
    void validate(double L_check = 30.0) const;
};

struct GridSpec {
    double L = 30.0;  // truncation half-width for unbounded directions
    int m = 3000;     // grid size
};

// Auto-scaled grid so truncation and weight margins beat the 1e-6 threshold.
GridSpec recommended_grid(const OperatorFamily& fam, const GridSpec& request = {});

// Discretized operator: weighted collocation matrix in block-banded form,
// carrying what the singular-value analysis needs.
struct Discretization {
    int n = 1;
    int m = 0;        // nodes
    double h = 0.0;
    double lo = 0.0, hi = 0.0;
    double delta = 0.0;  // weight exponent
    // Normal matrix M^T M in block-tridiagonal form.
    std::vector<Mat> diag;  // m blocks, n x n
    std::vector<Mat> sub;   // m-1 blocks (coupling k to k+1)
    int structural_kernel = 0; // exact zero singular values by shape (compact D)
    double sigma_max = 0.0;    // largest singular value of M

    // #eigenvalues of M^T M strictly below lambda (Sturm count).
    int eigen_count_below(double lambda) const;
    // k smallest singular values of M (by bisection on the count).
    std::vector<double> smallest_singulars(int k) const;
    Mat dense() const; // small-problem debugging / oracle use
};

// Build the weighted discretization of d/ds + A(s) on the family's domain.
// adjoint = true discretizes -A^T with the adjoint's end conditions.
Discretization discretize(const OperatorFamily& fam, const GridSpec& grid, bool adjoint = false);

struct IndexReport {
    int dim_ker = 0;
    int dim_coker = 0;
    int index = 0;
    int predicted_index = 0;
    bool prediction_matches = false;
    std::vector<double> singular_tail; // smallest singular values used
};

// Kernel count by thresholding; sigma_tol = tol_factor * sigma_max.
int numeric_kernel_dim(const Discretization& d, double tol_factor = 1e-6);

IndexReport numeric_index(const OperatorFamily& fam, const GridSpec& grid = {},
                          double tol_factor = 1e-6);

int predicted_index(const OperatorFamily& fam);

IndexReport verify_index_formula(const OperatorFamily& fam, const GridSpec& grid = {});

// Random tanh-profile family between symmetric nondegenerate endpoints with
// eigenvalues in [0.3, 3] in absolute value; diagonal variant keeps both ends
// simultaneously diagonal with sorted entries.
OperatorFamily random_tanh_family(int n, OperatorDomain domain, std::mt19937_64& rng,
                                  bool diagonal = false);

// ---------------------------------------------------------------- gluing

struct InfinitesimalGlueResult {
    Vec block1; // size mu      : e^{2T H_-} xi_-
    Vec block2; // size n - mu  : xi_+
    Vec block3; // size mu      : xi_-
    Vec block4; // size n - mu  : e^{-2T H_+} xi_+
    Vec closed_form1, closed_form2, closed_form3, closed_form4;
    double max_error = 0.0;
};

// Projection of the preglued infinitesimal vector onto ker D^T along the
// boundary-condition complement, solved on a grid; H diagonal with the
// negative block leading.
InfinitesimalGlueResult infinitesimal_glue(const Vec& H_diag, double T, const Vec& xi_plus,
                                           const Vec& xi_minus,
                                           const std::function<double(double)>& cutoff = nullptr);

} // namespace morseflow

#endif
