#include "morseflow/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace morseflow {

int ChainComplexGF2::generator_index(int degree, const std::string& label) const {
    const auto& g = generators[size_t(degree)];
    for (size_t i = 0; i < g.size(); ++i)
        if (g[i].label == label) return int(i);
    return -1;
}

int ChainComplexGF2::total_generators() const {
    int n = 0;
    for (const auto& g : generators) n += int(g.size());
    return n;
}

ChainComplexGF2 build_complex(const std::vector<CriticalPoint>& crits,
                              const std::vector<PairCount>& counts) {
    ChainComplexGF2 cx;
    int maxk = 0;
    for (const auto& c : crits) {
        if (c.degenerate)
            throw MorseViolation("degenerate critical point " + c.label + " cannot enter the complex");
        maxk = std::max(maxk, c.morse_index);
    }
    cx.generators.assign(size_t(maxk) + 1, {});
    std::map<std::string, int> index_of;
    for (const auto& c : crits) {
        index_of[c.label] = c.morse_index;
        cx.generators[size_t(c.morse_index)].push_back({c.label, c.value});
    }
    cx.boundary.resize(size_t(maxk) + 1);
    for (int k = 0; k <= maxk; ++k)
        cx.boundary[size_t(k)] = BitMatrix(cx.dim(k - 1), cx.dim(k));
    // fill columns from the counts; verify coverage of all adjacent pairs
    std::map<std::pair<std::string, std::string>, int> table;
    for (const auto& pc : counts) table[{pc.source, pc.target}] = pc.count_mod2;
    for (int k = 1; k <= maxk; ++k) {
        for (int j = 0; j < cx.dim(k); ++j) {
            for (int i = 0; i < cx.dim(k - 1); ++i) {
                const auto key = std::make_pair(cx.generators[size_t(k)][size_t(j)].label,
                                                cx.generators[size_t(k - 1)][size_t(i)].label);
                auto it = table.find(key);
                if (it == table.end())
                    throw MissingPairError("no flow-line count for pair " + key.first + " -> " +
                                           key.second);
                cx.boundary[size_t(k)].set(i, j, it->second != 0);
            }
        }
    }
    return cx;
}

ChainComplexGF2 make_abstract_complex(std::vector<std::vector<Generator>> gens,
                                      std::vector<std::vector<std::vector<int>>> boundaries01) {
    ChainComplexGF2 cx;
    cx.generators = std::move(gens);
    const int maxk = cx.max_degree();
    cx.boundary.resize(size_t(maxk) + 1);
    for (int k = 0; k <= maxk; ++k) {
        BitMatrix B(cx.dim(k - 1), cx.dim(k));
        if (k < int(boundaries01.size())) {
            const auto& rows = boundaries01[size_t(k)];
            for (size_t i = 0; i < rows.size(); ++i)
                for (size_t j = 0; j < rows[i].size(); ++j)
                    if (rows[i][j] % 2 != 0) B.set(int(i), int(j), true);
        }
        cx.boundary[size_t(k)] = B;
    }
    return cx;
}

BoundaryCheck verify_boundary_squared(const ChainComplexGF2& cx) {
    BoundaryCheck bc;
    for (int k = 1; k < int(cx.boundary.size()); ++k) {
        if (cx.dim(k - 2) == 0 || cx.dim(k) == 0) continue;
        BitMatrix prod = cx.boundary[size_t(k - 1)].multiply(cx.boundary[size_t(k)]);
        if (!prod.is_zero()) {
            bc.ok = false;
            bc.offending_degree = k;
            return bc;
        }
    }
    return bc;
}

HomologyResult homology(const ChainComplexGF2& cx) {
    if (!verify_boundary_squared(cx).ok)
        throw NotAComplexError("boundary squared does not vanish");
    HomologyResult h;
    const int maxk = cx.max_degree();
    h.betti.assign(size_t(maxk) + 1, 0);
    h.representatives.assign(size_t(maxk) + 1, {});
    for (int k = 0; k <= maxk; ++k) {
        const int nk = cx.dim(k);
        if (nk == 0) continue;
        std::vector<BitVec> ker = cx.boundary[size_t(k)].kernel_basis();
        std::vector<BitVec> img;
        if (k + 1 <= maxk && cx.dim(k + 1) > 0) img = cx.boundary[size_t(k + 1)].image_basis();
        h.betti[size_t(k)] = int(ker.size()) - int(img.size());
        // representatives: kernel vectors independent modulo the image
        std::vector<BitVec> span = img; // grows as reps are accepted
        for (const auto& v : ker) {
            BitVec r = reduce_mod(v, span);
            if (r.any()) {
                h.representatives[size_t(k)].push_back(v);
                span.push_back(r);
            }
            if (int(h.representatives[size_t(k)].size()) == h.betti[size_t(k)]) break;
        }
    }
    return h;
}

MorseInequalityCheck morse_inequality_check(int n_critical, const HomologyResult& h) {
    int sum = 0;
    for (int b : h.betti) sum += b;
    MorseInequalityCheck mc;
    mc.slack = n_critical - sum;
    mc.ok = mc.slack >= 0;
    return mc;
}

double sigma_of(const ChainComplexGF2& cx, int degree, const BitVec& xi) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < xi.size(); ++j)
        if (xi.get(j)) best = std::max(best, cx.generators[size_t(degree)][size_t(j)].value);
    return best;
}

namespace {

std::string sigma_witness(const ChainComplexGF2& cx, int degree, const BitVec& xi) {
    double best = -std::numeric_limits<double>::infinity();
    std::string w;
    // ties broken by label order
    for (int j = 0; j < xi.size(); ++j) {
        if (!xi.get(j)) continue;
        const auto& g = cx.generators[size_t(degree)][size_t(j)];
        if (g.value > best || (g.value == best && (w.empty() || g.label < w))) {
            best = g.value;
            w = g.label;
        }
    }
    return w;
}

// Order of degree-k generator indices by descending value (label tie-break).
std::vector<int> value_order(const ChainComplexGF2& cx, int degree) {
    std::vector<int> idx(size_t(cx.dim(degree)));
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const auto& ga = cx.generators[size_t(degree)][size_t(a)];
        const auto& gb = cx.generators[size_t(degree)][size_t(b)];
        if (ga.value != gb.value) return ga.value > gb.value;
        return ga.label < gb.label;
    });
    return idx;
}

} // namespace

double spectral_number_exhaustive(const ChainComplexGF2& cx, int degree, const BitVec& xi,
                                  int rank_cap) {
    if (!xi.any()) throw ZeroClassError("spectral number of the zero class");
    std::vector<BitVec> img;
    if (degree + 1 <= cx.max_degree()) img = cx.boundary[size_t(degree + 1)].image_basis();
    const int r = int(img.size());
    if (r > rank_cap) throw Error("exhaustive coset enumeration beyond the rank cap");
    double best = sigma_of(cx, degree, xi);
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << r); ++mask) {
        BitVec cand = xi;
        for (int b = 0; b < r; ++b)
            if ((mask >> b) & 1) cand ^= img[size_t(b)];
        if (!cand.any()) continue; // zero is not an admissible representative
        best = std::min(best, sigma_of(cx, degree, cand));
    }
    return best;
}

BitVec spectral_representative(const ChainComplexGF2& cx, int degree, const BitVec& xi) {
    if (!xi.any()) throw ZeroClassError("spectral number of the zero class");
    std::vector<BitVec> img;
    if (degree + 1 <= cx.max_degree()) img = cx.boundary[size_t(degree + 1)].image_basis();
    const std::vector<int> order = value_order(cx, degree);
    // position of each generator in the value order ("low" = earliest position)
    std::vector<int> pos(order.size());
    for (size_t k = 0; k < order.size(); ++k) pos[size_t(order[k])] = int(k);
    auto low = [&](const BitVec& v) {
        int best = int(order.size());
        for (int j = 0; j < v.size(); ++j)
            if (v.get(j)) best = std::min(best, pos[size_t(j)]);
        return best; // smaller position = higher value
    };
    // reduce the image basis so the lows are distinct (persistence-style)
    std::vector<BitVec> reduced;
    for (BitVec b : img) {
        bool again = true;
        while (again && b.any()) {
            again = false;
            const int lb = low(b);
            for (const auto& e : reduced) {
                if (low(e) == lb) {
                    b ^= e;
                    again = true;
                    break;
                }
            }
        }
        if (b.any()) reduced.push_back(b);
    }
    // eliminate the representative's top entries while possible
    BitVec r = xi;
    bool changed = true;
    while (changed && r.any()) {
        changed = false;
        const int lr = low(r);
        for (const auto& e : reduced) {
            if (low(e) == lr) {
                r ^= e;
                changed = true;
                break;
            }
        }
    }
    if (!r.any())
        throw ZeroClassError("representative reduced to zero: class vanishes in homology");
    return r;
}

double spectral_number_greedy(const ChainComplexGF2& cx, int degree, const BitVec& xi) {
    return sigma_of(cx, degree, spectral_representative(cx, degree, xi));
}

double spectral_number(const ChainComplexGF2& cx, int degree, const BitVec& xi,
                       int exhaustive_rank_cap) {
    std::vector<BitVec> img;
    if (degree + 1 <= cx.max_degree()) img = cx.boundary[size_t(degree + 1)].image_basis();
    if (int(img.size()) <= exhaustive_rank_cap)
        return spectral_number_exhaustive(cx, degree, xi, exhaustive_rank_cap);
    return spectral_number_greedy(cx, degree, xi);
}

SpectralReport spectral_report(const ChainComplexGF2& cx, const HomologyResult& h,
                               double tau_val) {
    SpectralReport rep;
    std::vector<double> values;
    for (const auto& degree_gens : cx.generators)
        for (const auto& g : degree_gens) values.push_back(g.value);
    std::sort(values.begin(), values.end());
    for (double v : values)
        if (rep.spectrum.empty() || v - rep.spectrum.back() > tau_val) rep.spectrum.push_back(v);

    for (int k = 0; k <= cx.max_degree(); ++k) {
        for (const auto& v : h.representatives[size_t(k)]) {
            SpectralClass sc;
            sc.degree = k;
            sc.representative = spectral_representative(cx, k, v);
            sc.sigma = spectral_number(cx, k, v);
            sc.witness = sigma_witness(cx, k, sc.representative);
            rep.classes.push_back(std::move(sc));
        }
    }
    std::vector<double> hs;
    for (const auto& sc : rep.classes) hs.push_back(sc.sigma);
    std::sort(hs.begin(), hs.end());
    for (double v : hs)
        if (rep.homological_spectrum.empty() || v - rep.homological_spectrum.back() > tau_val)
            rep.homological_spectrum.push_back(v);
    rep.action_gap = action_gap(rep);
    rep.singleton_spectrum = rep.homological_spectrum.size() < 2;
    return rep;
}

double action_gap(const SpectralReport& rep) {
    const auto& hs = rep.homological_spectrum;
    if (hs.size() < 2) return std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < hs.size(); ++i) gap = std::min(gap, hs[i] - hs[i - 1]);
    return gap;
}

} // namespace morseflow
