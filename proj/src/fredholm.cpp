#include "morseflow/fredholm.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace morseflow {

namespace {

double min_abs_eig(const Mat& A) {
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    return es.eigenvalues().cwiseAbs().minCoeff();
}

int morse_index_of(const Mat& A) {
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    int mu = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] < 0.0) ++mu;
    return mu;
}

} // namespace

double OperatorFamily::eps_asym() const {
    double e = std::numeric_limits<double>::infinity();
    if (domain == OperatorDomain::FullLine || domain == OperatorDomain::HalfLineMinus)
        e = std::min(e, min_abs_eig(A_minus));
    if (domain == OperatorDomain::FullLine || domain == OperatorDomain::HalfLinePlus)
        e = std::min(e, min_abs_eig(A_plus));
    if (domain == OperatorDomain::CompactInterval) e = 1.0; // no asymptotics required
    return e;
}

int OperatorFamily::mu_minus() const { return morse_index_of(A_minus); }
int OperatorFamily::mu_plus() const { return morse_index_of(A_plus); }

void OperatorFamily::validate(double L_check) const {
    const double eps_floor = 1e-3;
    auto check_end = [&](const Mat& Aend, double s) {
        if ((Aend - Aend.transpose()).norm() > 1e-10)
            throw Error("asymptotic matrix is not symmetric");
        if (min_abs_eig(Aend) < eps_floor)
            throw Error("asymptotic matrix is numerically degenerate");
        if ((A(s) - Aend).norm() > 1e-6 * (1.0 + Aend.norm()))
            throw Error("family has not saturated at the checked endpoint");
    };
    if (domain == OperatorDomain::FullLine || domain == OperatorDomain::HalfLineMinus)
        check_end(A_minus, -L_check);
    if (domain == OperatorDomain::FullLine || domain == OperatorDomain::HalfLinePlus)
        check_end(A_plus, L_check);
}

GridSpec recommended_grid(const OperatorFamily& fam, const GridSpec& request) {
    GridSpec g = request;
    if (fam.domain == OperatorDomain::CompactInterval) {
        g.L = fam.T;
    } else {
        // truncated kernel tails must clear the 1e-6 threshold: (eps/2) L >= 10
        g.L = std::max(request.L, 20.0 / fam.eps_asym());
    }
    const double span = (fam.domain == OperatorDomain::FullLine) ? 2.0 * g.L
                        : (fam.domain == OperatorDomain::CompactInterval) ? 2.0 * fam.T
                                                                          : g.L;
    const double h_target = 0.003;
    g.m = std::max(request.m, int(std::ceil(span / h_target)) + 1);
    if (g.m < 200) throw GridTooCoarse("grid size below the minimum of 200 nodes");
    return g;
}

Discretization discretize(const OperatorFamily& fam, const GridSpec& grid, bool adjoint) {
    const int n = fam.n;
    double lo = 0.0, hi = 0.0;
    bool weight_lo = false, weight_hi = false; // conjugation toward infinite ends
    bool row_lo = false, row_hi = false;       // decay / Dirichlet rows
    switch (fam.domain) {
    case OperatorDomain::FullLine:
        lo = -grid.L; hi = grid.L;
        weight_lo = weight_hi = true;
        row_lo = row_hi = true;
        break;
    case OperatorDomain::HalfLineMinus:
        lo = -grid.L; hi = 0.0;
        weight_lo = true;
        row_lo = true;
        row_hi = adjoint; // adjoint kernel vanishes at the finite end
        break;
    case OperatorDomain::HalfLinePlus:
        lo = 0.0; hi = grid.L;
        weight_hi = true;
        row_hi = true;
        row_lo = adjoint;
        break;
    case OperatorDomain::CompactInterval:
        lo = -fam.T; hi = fam.T;
        row_lo = row_hi = adjoint;
        break;
    }
    const int m = grid.m;
    if (m < 200) throw GridTooCoarse("grid size below the minimum of 200 nodes");
    const double h = (hi - lo) / double(m - 1);
    const double delta =
        (fam.domain == OperatorDomain::CompactInterval) ? 0.0 : 0.5 * fam.eps_asym();

    // weight exponent f(s) >= 0 growing toward infinite ends; xi = e^{-f} eta
    auto fw = [&](double s) {
        double f = 0.0;
        if (weight_lo && s < 0.0) f = std::max(f, -delta * s);
        if (weight_hi && s > 0.0) f = std::max(f, delta * s);
        return f;
    };
    auto Afun = [&](double s) -> Mat {
        Mat As = fam.A(s);
        if (adjoint) return (-As.transpose()).eval();
        return As;
    };

    Discretization d;
    d.n = n;
    d.m = m;
    d.h = h;
    d.lo = lo;
    d.hi = hi;
    d.delta = delta;
    d.diag.assign(size_t(m), Mat::Zero(n, n));
    d.sub.assign(size_t(m - 1), Mat::Zero(n, n));

    // Box-scheme rows r_k (midpoint collocation): in the weighted unknowns,
    //   P_k eta_k + Q_k eta_{k+1} = 0,
    //   P_k = e^{f(s_mid)} [ -e^{-f(s_k)}/h I + A(s_mid) e^{-f(s_k)}/2 ]
    //   Q_k = e^{f(s_mid)} [  e^{-f(s_{k+1})}/h I + A(s_mid) e^{-f(s_{k+1})}/2 ]
    // Accumulate M^T M block-tridiagonally.
    for (int k = 0; k + 1 < m; ++k) {
        const double sk = lo + k * h;
        const double smid = sk + 0.5 * h;
        const Mat Amid = Afun(smid);
        const double wk = std::exp(fw(smid) - fw(sk));
        const double wk1 = std::exp(fw(smid) - fw(sk + h));
        Mat P = wk * (Amid * 0.5 - Mat::Identity(n, n) / h);
        Mat Q = wk1 * (Amid * 0.5 + Mat::Identity(n, n) / h);
        d.diag[size_t(k)] += P.transpose() * P;
        d.diag[size_t(k) + 1] += Q.transpose() * Q;
        d.sub[size_t(k)] += P.transpose() * Q;
    }
    const double gamma = 1.0;
    if (row_lo) d.diag[0] += gamma * gamma * Mat::Identity(n, n);
    if (row_hi) d.diag[size_t(m) - 1] += gamma * gamma * Mat::Identity(n, n);
    if (fam.domain == OperatorDomain::CompactInterval && !adjoint) d.structural_kernel = n;

    // Largest singular value by power iteration on M^T M.
    Vec v = Vec::Ones(n * m).normalized();
    double lam = 0.0;
    for (int it = 0; it < 40; ++it) {
        Vec w = Vec::Zero(n * m);
        for (int k = 0; k < m; ++k) {
            w.segment(k * n, n) += d.diag[size_t(k)] * v.segment(k * n, n);
            if (k + 1 < m) {
                w.segment(k * n, n) += d.sub[size_t(k)] * v.segment((k + 1) * n, n);
                w.segment((k + 1) * n, n) += d.sub[size_t(k)].transpose() * v.segment(k * n, n);
            }
        }
        lam = w.norm();
        if (lam == 0.0) break;
        v = w / lam;
    }
    d.sigma_max = std::sqrt(lam);
    return d;
}

int Discretization::eigen_count_below(double lambda) const {
    // Scalar banded LDL^T of (M^T M - lambda I); the inertia (count of
    // negative pivots) equals the number of eigenvalues below lambda.
    const int N = n * m;
    const int bw = 2 * n - 1;
    auto entry = [&](int i, int j) -> double { // i >= j
        const int ki = i / n, kj = j / n;
        if (ki == kj) return diag[size_t(ki)](i % n, j % n) - (i == j ? lambda : 0.0);
        if (ki == kj + 1) return sub[size_t(kj)].transpose()(i % n, j % n);
        return 0.0;
    };
    // band[r][j] = A(j + r, j), r = 0..bw, rolling over columns
    std::vector<std::vector<double>> band(size_t(bw) + 1, std::vector<double>(size_t(N), 0.0));
    for (int j = 0; j < N; ++j)
        for (int r = 0; r <= bw && j + r < N; ++r) band[size_t(r)][size_t(j)] = entry(j + r, j);
    int count = 0;
    std::vector<double> l(size_t(bw) + 1);
    for (int j = 0; j < N; ++j) {
        const double dj = band[0][size_t(j)];
        if (dj < 0.0) ++count;
        if (dj == 0.0) continue; // exact breakdown: treat as nonnegative pivot
        const int reach = std::min(bw, N - 1 - j);
        for (int r = 1; r <= reach; ++r) l[size_t(r)] = band[size_t(r)][size_t(j)] / dj;
        for (int r = 1; r <= reach; ++r) {
            const double lr_d = l[size_t(r)] * dj;
            for (int c = r; c <= reach; ++c)
                band[size_t(c - r)][size_t(j + r)] -= l[size_t(c)] * lr_d;
        }
    }
    return count;
}

std::vector<double> Discretization::smallest_singulars(int k) const {
    std::vector<double> out;
    // peel off the k smallest eigenvalues of M^T M by bisection on the count
    for (int j = 1; j <= k; ++j) {
        double a = 0.0, b = sq(sigma_max);
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (a + b);
            if (eigen_count_below(mid) >= j)
                b = mid;
            else
                a = mid;
        }
        out.push_back(std::sqrt(std::max(0.0, 0.5 * (a + b))));
    }
    return out;
}

Mat Discretization::dense() const {
    Mat B = Mat::Zero(n * m, n * m);
    for (int k = 0; k < m; ++k) {
        B.block(k * n, k * n, n, n) = diag[size_t(k)];
        if (k + 1 < m) {
            B.block(k * n, (k + 1) * n, n, n) = sub[size_t(k)];
            B.block((k + 1) * n, k * n, n, n) = sub[size_t(k)].transpose();
        }
    }
    return B;
}

int numeric_kernel_dim(const Discretization& d, double tol_factor) {
    const double sigma_tol = tol_factor * d.sigma_max;
    const int count = d.eigen_count_below(sq(sigma_tol));
    // threshold hygiene: nothing within a factor 10 of the cut
    const int below_band = d.eigen_count_below(sq(sigma_tol / 10.0));
    const int above_band = d.eigen_count_below(sq(sigma_tol * 10.0));
    if (below_band != count || above_band != count)
        throw ThresholdAmbiguity("singular value within a factor 10 of the threshold; refine the grid");
    return count;
}

int predicted_index(const OperatorFamily& fam) {
    switch (fam.domain) {
    case OperatorDomain::FullLine:
        return fam.mu_minus() - fam.mu_plus();
    case OperatorDomain::HalfLineMinus:
        return fam.mu_minus();
    case OperatorDomain::HalfLinePlus:
        return fam.n - fam.mu_plus();
    case OperatorDomain::CompactInterval:
        return fam.n;
    }
    return 0;
}

IndexReport numeric_index(const OperatorFamily& fam, const GridSpec& grid, double tol_factor) {
    const GridSpec g = recommended_grid(fam, grid);
    Discretization D = discretize(fam, g, /*adjoint=*/false);
    Discretization Dt = discretize(fam, g, /*adjoint=*/true);
    IndexReport rep;
    rep.dim_ker = numeric_kernel_dim(D, tol_factor);
    rep.dim_coker = numeric_kernel_dim(Dt, tol_factor);
    rep.index = rep.dim_ker - rep.dim_coker;
    rep.predicted_index = predicted_index(fam);
    rep.prediction_matches = rep.index == rep.predicted_index;
    rep.singular_tail = D.smallest_singulars(std::min(6, rep.dim_ker + 2));
    return rep;
}

IndexReport verify_index_formula(const OperatorFamily& fam, const GridSpec& grid) {
    fam.validate(std::max(grid.L, 30.0));
    return numeric_index(fam, grid);
}

OperatorFamily random_tanh_family(int n, OperatorDomain domain, std::mt19937_64& rng,
                                  bool diagonal) {
    std::uniform_real_distribution<double> mag(0.3, 3.0);
    auto random_sym = [&](int mu) {
        // eigenvalues with |.| in [0.3,3], mu of them negative, conjugated by
        // a random rotation (identity in the diagonal variant)
        Vec eigs(n);
        for (int i = 0; i < n; ++i) eigs[i] = (i < mu ? -1.0 : 1.0) * mag(rng);
        std::sort(eigs.data(), eigs.data() + n);
        if (diagonal) return Mat(eigs.asDiagonal());
        Mat G(n, n);
        std::normal_distribution<double> nd;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) G(i, j) = nd(rng);
        Eigen::HouseholderQR<Mat> qr(G);
        Mat Q = qr.householderQ();
        return Mat(Q * eigs.asDiagonal() * Q.transpose());
    };
    std::uniform_int_distribution<int> mu_dist(0, n);
    OperatorFamily fam;
    fam.n = n;
    fam.domain = domain;
    fam.A_minus = random_sym(mu_dist(rng));
    fam.A_plus = random_sym(mu_dist(rng));
    fam.T = 1.0 + mag(rng);
    Mat Am = fam.A_minus, Ap = fam.A_plus;
    fam.A = [Am, Ap](double s) -> Mat {
        const double t = 0.5 * (1.0 + std::tanh(s));
        return (1.0 - t) * Am + t * Ap;
    };
    return fam;
}

// ------------------------------------------------------------------ gluing

namespace {

// One-step Pade(2,2) multiplier for eta' = -a eta (4th order, A-stable).
double pade22(double z) {
    // R(z) approximates e^z
    const double num = 1.0 + z / 2.0 + z * z / 12.0;
    const double den = 1.0 - z / 2.0 + z * z / 12.0;
    return num / den;
}

} // namespace

InfinitesimalGlueResult infinitesimal_glue(const Vec& H_diag, double T, const Vec& xi_plus,
                                           const Vec& xi_minus,
                                           const std::function<double(double)>& cutoff) {
    const int n = int(H_diag.size());
    int mu = 0;
    for (int i = 0; i < n; ++i)
        if (H_diag[i] < 0.0) ++mu;
    for (int i = 0; i < mu; ++i)
        if (H_diag[i] >= 0.0) throw Error("H must carry its negative block first");
    if (int(xi_minus.size()) != mu || int(xi_plus.size()) != n - mu)
        throw Error("xi block sizes must match the Morse index split");
    if (T < 2.0) throw Error("pregluing requires T >= 2");
    const double worst = T * H_diag.cwiseAbs().maxCoeff();
    if (worst > 300.0) throw IllConditioned("T * max |eigenvalue| exceeds the overflow guard");

    auto beta = cutoff ? cutoff : [](double t) { return smoothstep5(t); };

    // grid over [-T, T]
    const double h_target = 1e-3 / std::max(1.0, H_diag.cwiseAbs().maxCoeff() / 4.0);
    const int m = std::max(2001, int(std::ceil(2.0 * T / h_target)) + 1);
    const double h = 2.0 * T / double(m - 1);

    // per-component step multipliers for eta' = -a eta
    std::vector<double> rho(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) rho[size_t(i)] = pade22(-h * H_diag[i]);

    // preglued tangent field zeta on the grid:
    //   zeta(s) = (1 - beta(s + T/2 + 1)) zeta_plus(s + T) + beta(s - T/2) zeta_minus(s - T)
    // zeta_plus solves the linear flow on [0, 2T] from (0, xi_plus);
    // zeta_minus solves it on [-2T, 0] ending at (xi_minus, 0).
    std::vector<Vec> zeta(static_cast<size_t>(m), Vec::Zero(n));
    {
        // forward recursion for the stable block of zeta_plus
        Vec zp = Vec::Zero(n);
        zp.tail(n - mu) = xi_plus;
        std::vector<Vec> zplus(static_cast<size_t>(m)); // zeta_plus(k h), k = 0..m-1 over [0,2T]
        zplus[0] = zp;
        for (int k = 1; k < m; ++k) {
            for (int i = mu; i < n; ++i) zp[i] *= rho[size_t(i)];
            zplus[size_t(k)] = zp;
        }
        // backward recursion for the unstable block of zeta_minus
        Vec zm = Vec::Zero(n);
        zm.head(mu) = xi_minus;
        std::vector<Vec> zminus(static_cast<size_t>(m)); // zeta_minus(-2T + k h), k = 0..m-1
        zminus[size_t(m) - 1] = zm;
        for (int k = m - 2; k >= 0; --k) {
            for (int i = 0; i < mu; ++i) zm[i] /= rho[size_t(i)];
            zminus[size_t(k)] = zm;
        }
        for (int k = 0; k < m; ++k) {
            const double s = -T + k * h;
            const double w_up = 1.0 - beta(s + T / 2.0 + 1.0);
            const double w_dn = beta(s - T / 2.0);
            zeta[size_t(k)] = w_up * zplus[size_t(k)] + w_dn * zminus[size_t(k)];
        }
    }

    // Solve for the kernel element eta(s) = e^{-Hs} eta0 with the complement
    // conditions  pi(eta(T)) = pi(zeta(T)),  (1-pi)(eta(-T)) = (1-pi)(zeta(-T)).
    // Discretely each component is anchored at its stable end and propagated
    // by the same one-step recursion.
    Vec eta_minusT(n), eta_plusT(n);
    for (int i = 0; i < n; ++i) {
        if (i < mu) {
            // anchored at +T, propagate backward (stable: |1/rho| < 1)
            double val = zeta[size_t(m) - 1][i];
            eta_plusT[i] = val;
            for (int k = m - 2; k >= 0; --k) val /= rho[size_t(i)];
            eta_minusT[i] = val;
        } else {
            // anchored at -T, propagate forward (stable: |rho| < 1)
            double val = zeta[0][i];
            eta_minusT[i] = val;
            for (int k = 1; k < m; ++k) val *= rho[size_t(i)];
            eta_plusT[i] = val;
        }
    }

    InfinitesimalGlueResult out;
    out.block1 = eta_minusT.head(mu);
    out.block2 = eta_minusT.tail(n - mu);
    out.block3 = eta_plusT.head(mu);
    out.block4 = eta_plusT.tail(n - mu);
    out.closed_form1 = Vec(mu);
    for (int i = 0; i < mu; ++i) out.closed_form1[i] = std::exp(2.0 * T * H_diag[i]) * xi_minus[i];
    out.closed_form2 = xi_plus;
    out.closed_form3 = xi_minus;
    out.closed_form4 = Vec(n - mu);
    for (int i = mu; i < n; ++i)
        out.closed_form4[i - mu] = std::exp(-2.0 * T * H_diag[i]) * xi_plus[i - mu];
    double err = 0.0;
    auto upd = [&err](const Vec& a, const Vec& b) {
        if (a.size() > 0) err = std::max(err, (a - b).cwiseAbs().maxCoeff());
    };
    upd(out.block1, out.closed_form1);
    upd(out.block2, out.closed_form2);
    upd(out.block3, out.closed_form3);
    upd(out.block4, out.closed_form4);
    out.max_error = err;
    return out;
}

} // namespace morseflow
