#include "polarlab/gf2.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace polarlab {

BitMatrix::BitMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("BitMatrix: negative dimension");
    words_per_row_ = (cols + 63) / 64;
    data_.assign(static_cast<size_t>(rows) * words_per_row_, 0);
}

BitMatrix BitMatrix::identity(int n) {
    BitMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<std::string>& rows) {
    if (rows.empty())
        throw std::invalid_argument("BitMatrix::from_rows: no rows");
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows[0].size());
    BitMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
            throw std::invalid_argument("BitMatrix::from_rows: ragged rows");
        for (int j = 0; j < c; ++j) {
            const char ch = rows[i][j];
            if (ch != '0' && ch != '1')
                throw std::invalid_argument("BitMatrix::from_rows: expected 0/1");
            m.set(i, j, ch == '1');
        }
    }
    return m;
}

uint64_t BitMatrix::column_word(int c) const {
    if (rows_ > 64) throw std::logic_error("column_word: more than 64 rows");
    uint64_t w = 0;
    for (int r = 0; r < rows_; ++r)
        if (get(r, c)) w |= uint64_t(1) << r;
    return w;
}

BitMatrix BitMatrix::transposed() const {
    BitMatrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c)
            if (get(r, c)) t.set(c, r, true);
    return t;
}

BitMatrix BitMatrix::multiplied(const BitMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("multiplied: dimension mismatch");
    BitMatrix out(rows_, rhs.cols_);
    // Row-by-row: out.row(r) = XOR of rhs rows selected by this row's bits.
    for (int r = 0; r < rows_; ++r) {
        uint64_t* dst = out.row(r);
        for (int c = 0; c < cols_; ++c)
            if (get(r, c)) {
                const uint64_t* src = rhs.row(c);
                for (int w = 0; w < rhs.words_per_row_; ++w) dst[w] ^= src[w];
            }
    }
    return out;
}

bool BitMatrix::operator==(const BitMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

std::string BitMatrix::digest() const {
    std::ostringstream ss;
    write_kernel(ss, *this);
    const std::string text = ss.str();
    return to_hex64(fnv1a64(text.data(), text.size()));
}

namespace {

// Packed column vectors (one word per 64 rows) with elimination keyed on the
// last (highest-index) nonzero row. Shared by rank and the prefix-dim query.
struct ColumnEchelon {
    int words;
    // pivots[t] = basis vector whose last set bit is row t (empty if none).
    std::vector<std::vector<uint64_t>> pivots;

    explicit ColumnEchelon(int nrows) : words((nrows + 63) / 64), pivots(nrows) {}

    static int last_set_bit(const std::vector<uint64_t>& v) {
        for (int w = static_cast<int>(v.size()) - 1; w >= 0; --w)
            if (v[w]) return w * 64 + 63 - std::countl_zero(v[w]);
        return -1;
    }

    // Reduces v against the basis; if independent, installs it and returns
    // its trailing row, else returns -1.
    int add(std::vector<uint64_t> v) {
        for (;;) {
            const int t = last_set_bit(v);
            if (t < 0) return -1;
            if (pivots[t].empty()) {
                pivots[t] = std::move(v);
                return t;
            }
            for (int w = 0; w < words; ++w) v[w] ^= pivots[t][w];
        }
    }

    bool contains(std::vector<uint64_t> v) const {
        for (;;) {
            const int t = last_set_bit(v);
            if (t < 0) return true;
            if (pivots[t].empty()) return false;
            for (int w = 0; w < words; ++w) v[w] ^= pivots[t][w];
        }
    }
};

std::vector<uint64_t> packed_column(const BitMatrix& m, int c) {
    std::vector<uint64_t> v((m.rows() + 63) / 64, 0);
    for (int r = 0; r < m.rows(); ++r)
        if (m.get(r, c)) v[r >> 6] |= uint64_t(1) << (r & 63);
    return v;
}

} // namespace

int rank(const BitMatrix& m) {
    ColumnEchelon ech(m.rows());
    int r = 0;
    for (int c = 0; c < m.cols(); ++c)
        if (ech.add(packed_column(m, c)) >= 0) ++r;
    return r;
}

bool in_column_space(const BitMatrix& m, const std::vector<uint8_t>& v) {
    if (static_cast<int>(v.size()) != m.rows())
        throw std::invalid_argument("in_column_space: vector length != rows");
    ColumnEchelon ech(m.rows());
    for (int c = 0; c < m.cols(); ++c) ech.add(packed_column(m, c));
    std::vector<uint64_t> pv((m.rows() + 63) / 64, 0);
    for (int r = 0; r < m.rows(); ++r)
        if (v[r]) pv[r >> 6] |= uint64_t(1) << (r & 63);
    return ech.contains(std::move(pv));
}

PrefixDims prefix_intersection_dims(const BitMatrix& m) {
    // With the column basis in trailing-row echelon form, a basis vector with
    // trailing row t lies in span{e_0..e_t} and the trailing rows are
    // distinct, so dim(V ∩ E_j) counts pivots with trailing row < j.
    ColumnEchelon ech(m.rows());
    for (int c = 0; c < m.cols(); ++c) ech.add(packed_column(m, c));
    PrefixDims out;
    out.dims.assign(m.rows() + 1, 0);
    int acc = 0;
    for (int t = 0; t < m.rows(); ++t) {
        if (!ech.pivots[t].empty()) ++acc;
        out.dims[t + 1] = acc;
    }
    return out;
}

BitMatrix kron(const BitMatrix& a, const BitMatrix& b) {
    BitMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int ra = 0; ra < a.rows(); ++ra)
        for (int ca = 0; ca < a.cols(); ++ca) {
            if (!a.get(ra, ca)) continue;
            for (int rb = 0; rb < b.rows(); ++rb)
                for (int cb = 0; cb < b.cols(); ++cb)
                    if (b.get(rb, cb))
                        out.set(ra * b.rows() + rb, ca * b.cols() + cb, true);
        }
    return out;
}

BitMatrix kron_power(const BitMatrix& k, int m, int max_dim) {
    if (k.rows() != k.cols()) throw std::invalid_argument("kron_power: kernel not square");
    if (m < 0) throw std::invalid_argument("kron_power: m must be >= 0");
    if (m == 0) return BitMatrix::identity(1);
    long long dim = 1;
    for (int i = 0; i < m; ++i) {
        dim *= k.rows();
        if (dim > max_dim) throw std::length_error("kron_power: result exceeds size cap");
    }
    BitMatrix out = k;
    for (int i = 1; i < m; ++i) out = kron(out, k);
    return out;
}

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

Seed Seed::derive(uint64_t idx) const {
    Seed child;
    child.value = splitmix64(value ^ splitmix64(stream ^ (idx * 0xd1342543de82ef95ull)));
    child.stream = splitmix64(stream + 0x9e3779b97f4a7c15ull * (idx + 1));
    return child;
}

std::mt19937_64 Seed::rng() const {
    std::seed_seq seq{static_cast<uint32_t>(value), static_cast<uint32_t>(value >> 32),
                      static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

BitMatrix sample_nonsingular(int l, Seed seed) {
    if (l < 1 || l > 64) throw std::invalid_argument("sample_nonsingular: l out of [1,64]");
    auto gen = seed.rng();
    for (;;) {
        // Draw columns directly as row-bit words so the rank check needs no
        // repacking; the uniform distribution over matrices is unchanged.
        std::vector<uint64_t> cols(l);
        const uint64_t mask = (l == 64) ? ~uint64_t(0) : ((uint64_t(1) << l) - 1);
        for (auto& c : cols) c = gen() & mask;
        std::vector<uint64_t> piv(l, 0);
        bool ok = true;
        for (uint64_t v : cols) {
            for (;;) {
                if (!v) { ok = false; break; }
                const int t = 63 - std::countl_zero(v);
                if (!piv[t]) { piv[t] = v; break; }
                v ^= piv[t];
            }
            if (!ok) break;
        }
        if (!ok) continue;
        BitMatrix m(l, l);
        for (int c = 0; c < l; ++c)
            for (int r = 0; r < l; ++r)
                if ((cols[c] >> r) & 1) m.set(r, c, true);
        return m;
    }
}

bool is_polarizing(const BitMatrix& k) {
    if (k.rows() != k.cols()) throw std::invalid_argument("is_polarizing: kernel not square");
    const int l = k.rows();
    // Column c may sit at diagonal position p iff its last nonzero row <= p.
    // A feasible assignment exists (Hall) iff after sorting the trailing rows
    // ascending, the j-th smallest is <= j.
    std::vector<int> trail(l, -1);
    for (int c = 0; c < l; ++c)
        for (int r = l - 1; r >= 0; --r)
            if (k.get(r, c)) { trail[c] = r; break; }
    std::sort(trail.begin(), trail.end());
    for (int j = 0; j < l; ++j)
        if (trail[j] > j) return true; // no upper-triangular column permutation
    return false;
}

BitMatrix read_kernel(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("kernel: empty input");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header.rfind("l=", 0) != 0) throw std::invalid_argument("kernel: first line must be l=<n>");
    int l = 0;
    try {
        size_t pos = 0;
        l = std::stoi(header.substr(2), &pos);
        if (pos != header.size() - 2) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw std::invalid_argument("kernel: bad size in header");
    }
    if (l < 1 || l > 64) throw std::invalid_argument("kernel: size out of [1,64]");
    std::vector<std::string> rows;
    for (int r = 0; r < l; ++r) {
        std::string line;
        if (!std::getline(in, line)) throw std::invalid_argument("kernel: missing rows");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (static_cast<int>(line.size()) != l)
            throw std::invalid_argument("kernel: row length != l");
        rows.push_back(line);
    }
    return BitMatrix::from_rows(rows);
}

BitMatrix read_kernel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("kernel: cannot open " + path);
    return read_kernel(in);
}

void write_kernel(std::ostream& out, const BitMatrix& k) {
    out << "l=" << k.rows() << '\n';
    for (int r = 0; r < k.rows(); ++r) {
        for (int c = 0; c < k.cols(); ++c) out << (k.get(r, c) ? '1' : '0');
        out << '\n';
    }
}

void write_kernel_file(const std::string& path, const BitMatrix& k) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("kernel: cannot open " + path);
    write_kernel(out, k);
}

BitMatrix arikan_kernel() {
    return BitMatrix::from_rows({"10", "11"});
}

uint64_t fnv1a64(const void* data, size_t len, uint64_t basis) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = basis;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string to_hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

} // namespace polarlab
