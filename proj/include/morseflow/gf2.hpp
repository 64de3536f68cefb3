#ifndef MORSEFLOW_GF2_HPP
#define MORSEFLOW_GF2_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace morseflow {

// Dense bit-vector over the two-element field.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(int n) : n_(n), w_((n + 63) / 64, 0) {}

    int size() const { return n_; }
    bool get(int i) const { return (w_[size_t(i) >> 6] >> (i & 63)) & 1u; }
    void set(int i, bool v) {
        const std::uint64_t m = std::uint64_t(1) << (i & 63);
        if (v)
            w_[size_t(i) >> 6] |= m;
        else
            w_[size_t(i) >> 6] &= ~m;
    }
    void flip(int i) { w_[size_t(i) >> 6] ^= std::uint64_t(1) << (i & 63); }
    BitVec& operator^=(const BitVec& o) {
        for (size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
        return *this;
    }
    bool any() const {
        for (auto w : w_)
            if (w) return true;
        return false;
    }
    int highest_set() const; // -1 when zero
    bool operator==(const BitVec&) const = default;
    std::vector<int> support() const;
    std::string to_string() const;

private:
    int n_ = 0;
    std::vector<std::uint64_t> w_;
};

// Dense GF(2) matrix, rows x cols.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols) : r_(rows), c_(cols), rows_(rows, BitVec(cols)) {}

    int rows() const { return r_; }
    int cols() const { return c_; }
    bool get(int i, int j) const { return rows_[i].get(j); }
    void set(int i, int j, bool v) { rows_[i].set(j, v); }
    const BitVec& row(int i) const { return rows_[i]; }
    BitVec& row(int i) { return rows_[i]; }

    BitVec col(int j) const;
    BitVec apply(const BitVec& x) const;       // matrix * vector
    BitMatrix multiply(const BitMatrix& o) const;
    BitMatrix transpose() const;
    static BitMatrix identity(int n);
    bool is_zero() const;
    bool operator==(const BitMatrix&) const = default;

    int rank() const;
    // Basis of the null space (as column vectors of length cols()).
    std::vector<BitVec> kernel_basis() const;
    // Basis of the column space.
    std::vector<BitVec> image_basis() const;
    // Solve A x = b; empty optional encoded as bool flag.
    bool solve(const BitVec& b, BitVec& x) const;

    std::vector<std::vector<int>> to_rows01() const;

private:
    int r_ = 0, c_ = 0;
    std::vector<BitVec> rows_;
};

// Reduce v modulo the span of basis vectors (Gaussian, highest-bit pivots).
BitVec reduce_mod(const BitVec& v, const std::vector<BitVec>& basis);

} // namespace morseflow

#endif
