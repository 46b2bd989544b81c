// Polar encoder and successive-cancellation decoder over the binary erasure
// channel, for codes built from an l x l kernel raised to the m-th Kronecker
// power. Code construction freezes the worst bit-channels using their exact
// erasure probabilities.
#pragma once

#include "polarlab/behavior.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace polarlab {

enum class Symbol : uint8_t { Zero = 0, One = 1, Erased = 2 };

inline Symbol symbol_from_bit(int b) { return b ? Symbol::One : Symbol::Zero; }

std::vector<Symbol> parse_symbols(const std::string& s); // chars 0, 1, e
std::string format_symbols(const std::vector<Symbol>& v);

std::string bits_to_hex(const std::vector<uint8_t>& bits); // nibble t holds bits 4t..4t+3
std::vector<uint8_t> hex_to_bits(const std::string& hex, uint64_t n);

struct PolarCode {
    Kernel kernel;
    int m = 0;
    uint64_t n = 0; // l^m
    double design_z = 0.0;
    double target_pe = 0.0;
    std::vector<uint8_t> frozen; // 1 = frozen to zero
    uint64_t k_info = 0;
    // Exact per-channel erasure probabilities at design_z. Populated by the
    // construction routines; left empty when a code is loaded from JSON.
    std::vector<double> channel_p;
};

// Freezes every bit-channel whose exact erasure probability at design_z
// exceeds target_pe / n, so the union bound over the information set stays
// at or below target_pe.
PolarCode construct_code(const Kernel& k, int m, double design_z, double target_pe,
                         uint64_t cap = uint64_t(1) << 24);

// Keeps exactly k_info channels, picking the smallest erasure probabilities
// (ties broken by lower index).
PolarCode construct_code_fixed_rate(const Kernel& k, int m, double design_z, uint64_t k_info,
                                    uint64_t cap = uint64_t(1) << 24);

std::string code_to_json(const PolarCode& code);
PolarCode code_from_json(const std::string& text);

// x = u K^(x)m via m in-place butterfly stages; stage k applies the kernel to
// l-tuples at stride l^(k-1), contiguous tuples first.
std::vector<uint8_t> encode(const Kernel& k, int m, std::vector<uint8_t> u);
std::vector<uint8_t> encode(const PolarCode& code, std::vector<uint8_t> u);

// Scatters message bits into the information positions (ascending index),
// zeros elsewhere.
std::vector<uint8_t> expand_message(const PolarCode& code, const std::vector<uint8_t>& msg);

std::vector<Symbol> transmit_bec(const std::vector<uint8_t>& x, double z, Seed seed);

struct DecodeResult {
    std::vector<uint8_t> u;      // decided inputs, frozen forced to zero
    std::vector<uint8_t> erased; // 1 where the input could not be determined
    uint64_t erased_info = 0;
};

// Successive cancellation: inputs are decided in index order, each from the
// kernel constraints the unerased outputs impose given all earlier
// decisions. An undetermined information bit is marked erased; when true_u
// is supplied (genie mode) its true value is used for the remaining
// decisions, otherwise zero is used. Undetermined decisions are never
// counted as correct either way, and determined ones are exact, so both
// modes report the same failures.
DecodeResult sc_decode(const PolarCode& code, const std::vector<Symbol>& received,
                       const std::vector<uint8_t>* true_u = nullptr);

struct FerStats {
    uint64_t trials = 0;
    uint64_t failures = 0; // frames with at least one erased information bit
    double fer = 0.0;
    bool never_wrong = true; // no determined information bit ever disagreed
};

// All-zero-codeword Monte Carlo over BEC(z), one generator per trial.
FerStats simulate_fer(const PolarCode& code, double z, uint64_t trials, Seed seed,
                      bool genie = true);

} // namespace polarlab
