// Polarization behavior of an l x l binary kernel over the erasure channel:
// for each input i, the count of weight-s erasure patterns that leave u_i
// undecodable, and the induced per-input erasure polynomials f_i(z).
#pragma once

#include "polarlab/gf2.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace polarlab {

// A validated square nonsingular kernel with cached per-column words.
class Kernel {
public:
    explicit Kernel(BitMatrix k);

    const BitMatrix& matrix() const { return mat_; }
    int ell() const { return ell_; }
    bool polarizing() const { return polarizing_; }
    uint64_t column(int c) const { return cols_[c]; }
    const std::vector<uint64_t>& columns() const { return cols_; }
    const std::string& digest() const { return digest_; }

private:
    BitMatrix mat_;
    int ell_ = 0;
    bool polarizing_ = false;
    std::vector<uint64_t> cols_;
    std::string digest_;
};

// Erased-output subset as a bitmask: bit o set means output o was erased.
using ErasurePattern = uint64_t;

// Given the erasure pattern, input i is decodable iff knowing the unerased
// outputs and inputs 0..i-1 determines u_i; equivalently iff the column
// space of the kept kernel columns meets span{e_0..e_i} outside
// span{e_0..e_{i-1}}. Indices are 0-based.
bool is_decodable(const Kernel& k, int input, ErasurePattern erased);

// Undecodable-input mask for one pattern (bit i set = u_i undecodable).
uint64_t undecodable_mask(const Kernel& k, ErasurePattern erased);

struct PolarizationBehavior {
    enum class Mode { exact, monte_carlo };

    int ell = 0;
    Mode mode = Mode::exact;
    uint64_t samples_per_weight = 0; // monte_carlo only
    std::string kernel_digest;
    // counts[i*(ell+1)+s] = number of weight-s patterns leaving input i
    // undecodable (exact), or binom(ell,s) times the observed frequency,
    // rounded (monte_carlo).
    std::vector<uint64_t> counts;

    uint64_t count(int i, int s) const { return counts[static_cast<size_t>(i) * (ell + 1) + s]; }
    uint64_t& count(int i, int s) { return counts[static_cast<size_t>(i) * (ell + 1) + s]; }
};

// Enumerates all 2^l erasure patterns with an incremental column-echelon
// walk. Throws std::domain_error when l exceeds max_ell.
PolarizationBehavior exact_behavior(const Kernel& k, int max_ell = 24);

// Stratified Monte Carlo: samples_per_weight uniform weight-s patterns per
// stratum, each stratum seeded by seed.derive(s). Weights 0 and l are
// deterministic and filled exactly.
PolarizationBehavior mc_behavior(const Kernel& k, uint64_t samples_per_weight, Seed seed);

// f_i(z) = sum_s counts[i][s] z^s (1-z)^(l-s), clamped into [0,1] to absorb
// Monte Carlo rounding. Terms go through the log domain for l > 40.
double eval_f(const PolarizationBehavior& b, int input, double z);

// All inputs at once (shares the per-z weight table).
std::vector<double> eval_f_all(const PolarizationBehavior& b, double z);

// log2 f_i(z) and log2(1 - f_i(z)); the complement uses the complementary
// counts binom(l,s) - counts[i][s], so both stay accurate near 0 and 1.
double eval_f_log2(const PolarizationBehavior& b, int input, double z);
double eval_f_complement_log2(const PolarizationBehavior& b, int input, double z);

// CSV schema: i,s,count,total_patterns,mode with i reported 1-based and
// total_patterns = binom(l,s).
void write_behavior_csv(std::ostream& out, const PolarizationBehavior& b);

// Pascal-table binomial; valid through n = 64 (peak fits in 64 bits).
uint64_t binom64(int n, int k);

} // namespace polarlab
