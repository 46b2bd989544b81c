#include "polarlab/behavior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace polarlab {

namespace {

// Single-word column echelon keyed on the highest set row bit. Columns of a
// nonsingular kernel are linearly independent, so add() never sees a vector
// reduce to zero when fed a subset of kernel columns.
struct WordEchelon {
    uint64_t piv[64] = {};
    uint64_t occupied = 0; // bit t set = pivot with trailing row t present

    int add(uint64_t v) {
        for (;;) {
            const int t = 63 - std::countl_zero(v);
            if (!((occupied >> t) & 1)) {
                piv[t] = v;
                occupied |= uint64_t(1) << t;
                return t;
            }
            v ^= piv[t];
        }
    }
};

} // namespace

Kernel::Kernel(BitMatrix k) : mat_(std::move(k)) {
    if (mat_.rows() != mat_.cols()) throw std::invalid_argument("Kernel: matrix not square");
    ell_ = mat_.rows();
    if (ell_ < 1 || ell_ > 64) throw std::invalid_argument("Kernel: size out of [1,64]");
    if (rank(mat_) != ell_) throw std::invalid_argument("Kernel: matrix is singular");
    cols_.resize(ell_);
    for (int c = 0; c < ell_; ++c) cols_[c] = mat_.column_word(c);
    polarizing_ = is_polarizing(mat_);
    digest_ = mat_.digest();
}

uint64_t undecodable_mask(const Kernel& k, ErasurePattern erased) {
    const int l = k.ell();
    const uint64_t all = (l == 64) ? ~uint64_t(0) : ((uint64_t(1) << l) - 1);
    WordEchelon ech;
    for (int c = 0; c < l; ++c)
        if (!((erased >> c) & 1)) ech.add(k.column(c));
    // Input i is decodable iff the echelon has a pivot trailing at row i.
    return all & ~ech.occupied;
}

bool is_decodable(const Kernel& k, int input, ErasurePattern erased) {
    if (input < 0 || input >= k.ell()) throw std::invalid_argument("is_decodable: input out of range");
    return !((undecodable_mask(k, erased) >> input) & 1);
}

uint64_t binom64(int n, int k) {
    static const auto table = [] {
        std::vector<std::vector<uint64_t>> t(65, std::vector<uint64_t>(65, 0));
        for (int i = 0; i <= 64; ++i) {
            t[i][0] = 1;
            for (int j = 1; j <= i; ++j)
                t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0);
        }
        return t;
    }();
    if (n < 0 || k < 0 || k > n || n > 64) return 0;
    return table[n][k];
}

PolarizationBehavior exact_behavior(const Kernel& k, int max_ell) {
    const int l = k.ell();
    if (l > max_ell || l > 32)
        throw std::domain_error("exact_behavior: kernel size exceeds enumeration cap");

    PolarizationBehavior b;
    b.ell = l;
    b.mode = PolarizationBehavior::Mode::exact;
    b.kernel_digest = k.digest();
    b.counts.assign(static_cast<size_t>(l) * (l + 1), 0);

    const uint64_t all = (uint64_t(1) << l) - 1;
    WordEchelon ech;

    // Depth-first over outputs: branch "erased" leaves the basis untouched,
    // branch "kept" installs one pivot, undone by clearing that slot. Along
    // any path columns are only added, so each step is one O(l) reduction.
    auto walk = [&](auto&& self, int pos, int erased_count) -> void {
        if (pos == l) {
            uint64_t und = all & ~ech.occupied;
            while (und) {
                const int i = std::countr_zero(und);
                und &= und - 1;
                ++b.count(i, erased_count);
            }
            return;
        }
        self(self, pos + 1, erased_count + 1);
        const int t = ech.add(k.column(pos));
        self(self, pos + 1, erased_count);
        ech.occupied &= ~(uint64_t(1) << t);
    };
    walk(walk, 0, 0);
    return b;
}

PolarizationBehavior mc_behavior(const Kernel& k, uint64_t samples_per_weight, Seed seed) {
    if (samples_per_weight == 0) throw std::invalid_argument("mc_behavior: zero samples");
    const int l = k.ell();

    PolarizationBehavior b;
    b.ell = l;
    b.mode = PolarizationBehavior::Mode::monte_carlo;
    b.samples_per_weight = samples_per_weight;
    b.kernel_digest = k.digest();
    b.counts.assign(static_cast<size_t>(l) * (l + 1), 0);

    // s = 0 leaves everything decodable; s = l erases everything. Both are
    // deterministic, so fill them exactly: counts stay 0 and binom(l,l)=1.
    for (int i = 0; i < l; ++i) b.count(i, l) = 1;

    std::vector<int> base(l);
    std::iota(base.begin(), base.end(), 0);
    std::vector<int> perm(l);
    std::vector<uint64_t> hits(l);

    for (int s = 1; s < l; ++s) {
        auto gen = seed.derive(static_cast<uint64_t>(s)).rng();
        std::fill(hits.begin(), hits.end(), 0);
        for (uint64_t trial = 0; trial < samples_per_weight; ++trial) {
            // Partial Fisher-Yates: the first s slots become the erased set.
            perm = base;
            uint64_t erased = 0;
            for (int j = 0; j < s; ++j) {
                std::uniform_int_distribution<int> pick(j, l - 1);
                std::swap(perm[j], perm[pick(gen)]);
                erased |= uint64_t(1) << perm[j];
            }
            uint64_t und = undecodable_mask(k, erased);
            while (und) {
                ++hits[std::countr_zero(und)];
                und &= und - 1;
            }
        }
        const long double scale = static_cast<long double>(binom64(l, s)) / samples_per_weight;
        for (int i = 0; i < l; ++i)
            b.count(i, s) = static_cast<uint64_t>(llroundl(hits[i] * scale));
    }
    return b;
}

namespace {

constexpr double kLog2E = 1.4426950408889634074;

double log2_term(uint64_t c, int s, int l, double z) {
    // log2 of c * z^s * (1-z)^(l-s); -inf signals a vanished term.
    if (c == 0) return -HUGE_VAL;
    double acc = std::log2(static_cast<double>(c));
    if (s > 0) {
        if (z <= 0.0) return -HUGE_VAL;
        acc += s * std::log2(z);
    }
    if (l - s > 0) {
        if (z >= 1.0) return -HUGE_VAL;
        acc += (l - s) * std::log1p(-z) * kLog2E;
    }
    return acc;
}

double logsumexp2(const std::vector<double>& t) {
    double mx = -HUGE_VAL;
    for (double v : t) mx = std::max(mx, v);
    if (mx == -HUGE_VAL) return mx;
    double acc = 0.0;
    for (double v : t)
        if (v != -HUGE_VAL) acc += std::exp2(v - mx);
    return mx + std::log2(acc);
}

// Accumulates log2 of sum over s of weight[s] * z^s (1-z)^(l-s).
double log2_poly(const PolarizationBehavior& b, int input, double z, bool complement) {
    const int l = b.ell;
    std::vector<double> terms(l + 1);
    for (int s = 0; s <= l; ++s) {
        const uint64_t c = complement ? binom64(l, s) - b.count(input, s) : b.count(input, s);
        terms[s] = log2_term(c, s, l, z);
    }
    return logsumexp2(terms);
}

} // namespace

double eval_f_log2(const PolarizationBehavior& b, int input, double z) {
    if (input < 0 || input >= b.ell) throw std::invalid_argument("eval_f: input out of range");
    if (z < 0.0 || z > 1.0) throw std::invalid_argument("eval_f: z out of [0,1]");
    return std::min(log2_poly(b, input, z, false), 0.0);
}

double eval_f_complement_log2(const PolarizationBehavior& b, int input, double z) {
    if (input < 0 || input >= b.ell) throw std::invalid_argument("eval_f: input out of range");
    if (z < 0.0 || z > 1.0) throw std::invalid_argument("eval_f: z out of [0,1]");
    return std::min(log2_poly(b, input, z, true), 0.0);
}

std::vector<double> eval_f_all(const PolarizationBehavior& b, double z) {
    if (z < 0.0 || z > 1.0) throw std::invalid_argument("eval_f: z out of [0,1]");
    const int l = b.ell;
    std::vector<double> out(l);
    if (l > 40) {
        for (int i = 0; i < l; ++i) out[i] = std::exp2(log2_poly(b, i, z, false));
    } else {
        std::vector<double> w(l + 1);
        double zp = 1.0;
        for (int s = 0; s <= l; ++s) {
            w[s] = zp;
            zp *= z;
        }
        double op = 1.0;
        for (int s = l; s >= 0; --s) {
            w[s] *= op;
            op *= 1.0 - z;
        }
        for (int i = 0; i < l; ++i) {
            double acc = 0.0;
            for (int s = 0; s <= l; ++s) acc += static_cast<double>(b.count(i, s)) * w[s];
            out[i] = acc;
        }
    }
    for (double& v : out) v = std::clamp(v, 0.0, 1.0);
    return out;
}

double eval_f(const PolarizationBehavior& b, int input, double z) {
    if (input < 0 || input >= b.ell) throw std::invalid_argument("eval_f: input out of range");
    if (z < 0.0 || z > 1.0) throw std::invalid_argument("eval_f: z out of [0,1]");
    const int l = b.ell;
    if (l > 40) return std::clamp(std::exp2(log2_poly(b, input, z, false)), 0.0, 1.0);
    double acc = 0.0;
    double zp = 1.0;
    std::vector<double> zpow(l + 1);
    for (int s = 0; s <= l; ++s) {
        zpow[s] = zp;
        zp *= z;
    }
    double op = 1.0;
    for (int s = l; s >= 0; --s) {
        acc += static_cast<double>(b.count(input, s)) * zpow[s] * op;
        op *= 1.0 - z;
    }
    return std::clamp(acc, 0.0, 1.0);
}

void write_behavior_csv(std::ostream& out, const PolarizationBehavior& b) {
    std::string mode = "exact";
    if (b.mode == PolarizationBehavior::Mode::monte_carlo)
        mode = "mc:" + std::to_string(b.samples_per_weight);
    out << "i,s,count,total_patterns,mode\n";
    for (int i = 0; i < b.ell; ++i)
        for (int s = 0; s <= b.ell; ++s)
            out << (i + 1) << ',' << s << ',' << b.count(i, s) << ','
                << binom64(b.ell, s) << ',' << mode << '\n';
}

} // namespace polarlab
