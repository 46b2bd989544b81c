// Bit-packed linear algebra over GF(2): matrices, rank/column-space queries,
// Kronecker powers, and seeded sampling of nonsingular kernels.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace polarlab {

// Dense binary matrix. Each row is packed into 64-bit words, bit c of word
// c/64 holding entry (r, c). Row-major storage; all indices are 0-based.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols);

    static BitMatrix identity(int n);
    static BitMatrix from_rows(const std::vector<std::string>& rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int words_per_row() const { return words_per_row_; }

    bool get(int r, int c) const {
        return (data_[static_cast<size_t>(r) * words_per_row_ + (c >> 6)] >> (c & 63)) & 1u;
    }
    void set(int r, int c, bool v) {
        uint64_t& w = data_[static_cast<size_t>(r) * words_per_row_ + (c >> 6)];
        const uint64_t bit = uint64_t(1) << (c & 63);
        w = v ? (w | bit) : (w & ~bit);
    }

    const uint64_t* row(int r) const { return data_.data() + static_cast<size_t>(r) * words_per_row_; }
    uint64_t* row(int r) { return data_.data() + static_cast<size_t>(r) * words_per_row_; }

    // Column c as a word of row-bits; valid only when rows() <= 64.
    uint64_t column_word(int c) const;

    BitMatrix transposed() const;
    BitMatrix multiplied(const BitMatrix& rhs) const;

    bool operator==(const BitMatrix& o) const;
    bool operator!=(const BitMatrix& o) const { return !(*this == o); }

    // FNV-1a hash of the canonical text form, as 16 hex digits.
    std::string digest() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    int words_per_row_ = 0;
    std::vector<uint64_t> data_;
};

// dims[j] = dim(colspace(M) ∩ span{e_0..e_{j-1}}) for j = 0..rows(M).
// Consecutive entries differ by 0 or 1 and dims.back() equals rank(M).
struct PrefixDims {
    std::vector<int> dims;
};

int rank(const BitMatrix& m);

// True iff v (one byte per row, values 0/1) lies in the span of M's columns.
bool in_column_space(const BitMatrix& m, const std::vector<uint8_t>& v);

PrefixDims prefix_intersection_dims(const BitMatrix& m);

BitMatrix kron(const BitMatrix& a, const BitMatrix& b);

// m-fold Kronecker power; throws std::length_error once the result would
// exceed max_dim rows (the dense form is for oracles and small codes only).
BitMatrix kron_power(const BitMatrix& k, int m, int max_dim = 1 << 12);

// Deterministic seed: a value plus a stream index. derive() gives a
// statistically independent child seed for substream idx, so per-stratum and
// per-trial generators never depend on scheduling order.
struct Seed {
    uint64_t value = 0;
    uint64_t stream = 0;

    Seed derive(uint64_t idx) const;
    std::mt19937_64 rng() const;
};

// Uniform over nonsingular l x l binary matrices (rejection from uniform
// bits; acceptance probability tends to ~0.2888). Requires 1 <= l <= 64.
BitMatrix sample_nonsingular(int l, Seed seed);

// A kernel polarizes iff no column permutation of it is upper triangular.
// Checked via the sorted last-nonzero-row (Hall) condition.
bool is_polarizing(const BitMatrix& k);

// Kernel text format: first line "l=<n>", then n lines of n characters 0/1,
// row r of the kernel on line r+2. Throws std::invalid_argument on bad input.
BitMatrix read_kernel(std::istream& in);
BitMatrix read_kernel_file(const std::string& path);
void write_kernel(std::ostream& out, const BitMatrix& k);
void write_kernel_file(const std::string& path, const BitMatrix& k);

// The 2x2 kernel [[1,0],[1,1]].
BitMatrix arikan_kernel();

uint64_t fnv1a64(const void* data, size_t len, uint64_t basis = 14695981039346656037ull);
std::string to_hex64(uint64_t v);

} // namespace polarlab
