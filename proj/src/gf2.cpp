#include "morseflow/gf2.hpp"

#include <bit>

namespace morseflow {

int BitVec::highest_set() const {
    for (int k = int(w_.size()) - 1; k >= 0; --k) {
        if (w_[size_t(k)])
            return k * 64 + 63 - std::countl_zero(w_[size_t(k)]);
    }
    return -1;
}

std::vector<int> BitVec::support() const {
    std::vector<int> out;
    for (int i = 0; i < n_; ++i)
        if (get(i)) out.push_back(i);
    return out;
}

std::string BitVec::to_string() const {
    std::string s(size_t(n_), '0');
    for (int i = 0; i < n_; ++i)
        if (get(i)) s[size_t(i)] = '1';
    return s;
}

BitVec BitMatrix::col(int j) const {
    BitVec v(r_);
    for (int i = 0; i < r_; ++i) v.set(i, get(i, j));
    return v;
}

BitVec BitMatrix::apply(const BitVec& x) const {
    BitVec y(r_);
    for (int i = 0; i < r_; ++i) {
        // parity of AND between row i and x
        int par = 0;
        for (int j = 0; j < c_; ++j) par ^= int(rows_[i].get(j) & x.get(j));
        y.set(i, par);
    }
    return y;
}

BitMatrix BitMatrix::multiply(const BitMatrix& o) const {
    BitMatrix out(r_, o.c_);
    for (int i = 0; i < r_; ++i)
        for (int k = 0; k < c_; ++k)
            if (get(i, k)) out.rows_[i] ^= o.rows_[k];
    return out;
}

BitMatrix BitMatrix::transpose() const {
    BitMatrix out(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j)
            if (get(i, j)) out.set(j, i, true);
    return out;
}

BitMatrix BitMatrix::identity(int n) {
    BitMatrix I(n, n);
    for (int i = 0; i < n; ++i) I.set(i, i, true);
    return I;
}

bool BitMatrix::is_zero() const {
    for (const auto& r : rows_)
        if (r.any()) return false;
    return true;
}

namespace {

// Row echelon reduction; returns pivot columns and the echelon rows.
struct Echelon {
    std::vector<BitVec> rows;
    std::vector<int> pivot_col;
};

Echelon echelon(const BitMatrix& A) {
    Echelon e;
    std::vector<BitVec> work;
    work.reserve(size_t(A.rows()));
    for (int i = 0; i < A.rows(); ++i) work.push_back(A.row(i));
    int row = 0;
    for (int col = 0; col < A.cols() && row < A.rows(); ++col) {
        int piv = -1;
        for (int i = row; i < int(work.size()); ++i)
            if (work[size_t(i)].get(col)) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(work[size_t(row)], work[size_t(piv)]);
        for (int i = 0; i < int(work.size()); ++i)
            if (i != row && work[size_t(i)].get(col)) work[size_t(i)] ^= work[size_t(row)];
        e.pivot_col.push_back(col);
        ++row;
    }
    // rows keep changing while later pivots eliminate upwards, so the reduced
    // rows are only collected once elimination has finished
    e.rows.assign(work.begin(), work.begin() + row);
    return e;
}

} // namespace

int BitMatrix::rank() const { return int(echelon(*this).pivot_col.size()); }

std::vector<BitVec> BitMatrix::kernel_basis() const {
    Echelon e = echelon(*this);
    std::vector<bool> is_pivot(size_t(c_), false);
    for (int p : e.pivot_col) is_pivot[size_t(p)] = true;
    std::vector<BitVec> basis;
    for (int j = 0; j < c_; ++j) {
        if (is_pivot[size_t(j)]) continue;
        BitVec v(c_);
        v.set(j, true);
        for (size_t r = 0; r < e.rows.size(); ++r) {
            if (e.rows[r].get(j)) v.set(e.pivot_col[r], true);
        }
        basis.push_back(v);
    }
    return basis;
}

std::vector<BitVec> BitMatrix::image_basis() const {
    Echelon e = echelon(transpose());
    return e.rows; // row space of A^T = column space of A
}

bool BitMatrix::solve(const BitVec& b, BitVec& x) const {
    // Gaussian elimination on [A|b]
    std::vector<BitVec> work;
    std::vector<bool> rhs(static_cast<size_t>(r_), false);
    for (int i = 0; i < r_; ++i) {
        work.push_back(rows_[size_t(i)]);
        rhs[size_t(i)] = b.get(i);
    }
    std::vector<int> pivot_of_col(static_cast<size_t>(c_), -1);
    int row = 0;
    for (int col = 0; col < c_ && row < r_; ++col) {
        int piv = -1;
        for (int i = row; i < r_; ++i)
            if (work[size_t(i)].get(col)) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(work[size_t(row)], work[size_t(piv)]);
        std::swap(rhs[size_t(row)], rhs[size_t(piv)]);
        for (int i = 0; i < r_; ++i) {
            if (i != row && work[size_t(i)].get(col)) {
                work[size_t(i)] ^= work[size_t(row)];
                rhs[size_t(i)] = rhs[size_t(i)] ^ rhs[size_t(row)];
            }
        }
        pivot_of_col[size_t(col)] = row;
        ++row;
    }
    for (int i = row; i < r_; ++i)
        if (rhs[size_t(i)]) return false;
    x = BitVec(c_);
    for (int col = 0; col < c_; ++col)
        if (pivot_of_col[size_t(col)] >= 0) x.set(col, rhs[size_t(pivot_of_col[size_t(col)])]);
    return true;
}

std::vector<std::vector<int>> BitMatrix::to_rows01() const {
    std::vector<std::vector<int>> out(size_t(r_), std::vector<int>(size_t(c_), 0));
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) out[size_t(i)][size_t(j)] = get(i, j) ? 1 : 0;
    return out;
}

BitVec reduce_mod(const BitVec& v, const std::vector<BitVec>& basis) {
    // bring basis to echelon form keyed by highest set bit
    std::vector<BitVec> ech;
    for (BitVec b : basis) {
        for (const auto& e : ech) {
            const int h = e.highest_set();
            if (h >= 0 && b.get(h)) b ^= e;
        }
        if (b.any()) ech.push_back(b);
    }
    BitVec r = v;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : ech) {
            const int h = e.highest_set();
            if (h >= 0 && r.get(h)) {
                r ^= e;
                changed = true;
            }
        }
    }
    return r;
}

} // namespace morseflow
