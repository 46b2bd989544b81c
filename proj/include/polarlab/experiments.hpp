// Batch experiment harness: kernel sampling campaigns with concentration and
// sharpness reports, scaling-exponent fits, and CSV/JSON artifact emission
// with reproducibility manifests.
#pragma once

#include "polarlab/behavior.hpp"
#include "polarlab/scaling.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace polarlab {

struct ExperimentConfig {
    std::string name = "experiment";
    std::vector<int> ells{8, 16, 32, 64};
    int kernels_per_ell = 50;
    bool exhaustive_small = false; // enumerate all nonsingular matrices when l <= 4
    double alpha = 0.0625;
    uint64_t mc_samples = 10000; // per weight, used above exact_max
    int exact_max = 24;
    LambdaGridSpec grid;
    double z0 = 0.5;
    double target_pe = 0.01;
    int m_min = 7;
    int m_max = 14;
    int power_grid = 4096;
    Seed seed;
    std::string out_dir = ".";
};

// Canonical text form of the configuration; its fnv1a64 hash is embedded in
// every artifact so outputs can be traced back to their settings.
std::string canonical_config_string(const ExperimentConfig& cfg);

// All nonsingular l x l binary matrices, l <= 4, in lexicographic row order.
std::vector<Kernel> all_nonsingular(int l);

// Interpolated quantile of the values (p in [0,1]); sorts a copy.
double quantile(std::vector<double> values, double p);

// Transition sharpness of one kernel's behavior: for each input i (1-based)
// the window points b_i = i/l - w and a_i = i/l + w with w = 5 log2(l)/sqrt(l),
// clamped into (0,1); input i passes when f_i(b_i) and 1 - f_i(a_i) both fall
// at or below the threshold l^-(2+log2 l). Clamped upper points are measured
// in the complement domain so the tiny distance to 1 is not lost to rounding.
struct SharpnessReport {
    int ell = 0;
    double threshold = 0.0;
    std::vector<double> a, b;         // clamped window points per input
    std::vector<double> f_at_b;       // f_i(b_i)
    std::vector<double> comp_at_a;    // 1 - f_i(a_i)
    std::vector<uint8_t> pass;
    double failure_fraction = 0.0;
};

SharpnessReport sharpness_report(const PolarizationBehavior& b);

struct KernelRow {
    int ell = 0;
    std::string digest;
    std::string mode;
    double lambda_star = 0.0;
    double argmax = 0.0;
    double log_l_lambda = 0.0;
    double sharp_fail_frac = 0.0;
};

struct EllSummary {
    int ell = 0;
    int kernels = 0;
    double median = 0.0; // of log_l lambda*
    double q1 = 0.0;
    double q3 = 0.0;
    double frac_ineq = 0.0;       // fraction with log_l lambda* <= -1/2 + 5 alpha
    double sharp_all_pass = 0.0;  // fraction of kernels with no sharpness failure
};

struct ConcentrationResult {
    std::vector<KernelRow> rows; // sorted by (l, digest)
    std::vector<EllSummary> summaries;
    std::vector<std::string> artifacts; // kernels csv, summary csv, manifest json
};

// Samples kernels_per_ell kernels for each l (or enumerates them all when
// exhaustive_small and l <= 4), computes behaviors (exact up to exact_max,
// Monte Carlo above), scans lambda* at cfg.alpha and writes
// <name>_kernels.csv, <name>_summary.csv and <name>_manifest.json under
// cfg.out_dir.
ConcentrationResult run_concentration(const ExperimentConfig& cfg);

struct ScalingFitResult {
    MuEstimate empirical;
    MuEstimate power;
    bool lambda_bound_ok = false;
    MuEstimate lambda_bound;
    std::string lambda_bound_error;
    std::vector<std::string> artifacts; // fit csv, mu json, manifest json
};

// Exact multi-step rate/gap table for one kernel over m in [m_min, m_max]
// plus three scaling-exponent estimates (least-squares fit, power iteration,
// contraction bound at cfg.alpha); writes <name>_fit.csv and <name>_mu.json
// under cfg.out_dir.
ScalingFitResult run_scaling_fit(const ExperimentConfig& cfg, const Kernel& k);

} // namespace polarlab
