// Scaling diagnostics for a kernel's polarization behavior: the contraction
// coefficient lambda* of g_alpha under the one-step transform, three scaling
// exponent estimators, the random polarization process, and exact bit-channel
// erasure probabilities for multi-step transforms.
#pragma once

#include "polarlab/behavior.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace polarlab {

// g_alpha(z) = (z(1-z))^alpha; the contraction is measured against it.
double g_alpha(double z, double alpha);

// lambda(z) = (1/l) sum_i g_alpha(f_i(z)) / g_alpha(z). Requires z in (0,1);
// evaluated through log2 space when z or any f_i(z) would underflow.
double lambda_at(const PolarizationBehavior& b, double alpha, double z);

struct LambdaGridSpec {
    int interior_points = 4096; // uniform in (0,1)
    int tail_points = 256;      // geometric in (tail_floor, l^-2), mirrored near 1
    double tail_floor = 1e-12;
    double argmax_tol = 1e-9;   // golden-section window width on z
};

struct LambdaScan {
    double alpha = 0.0;
    double lambda_star = 0.0;
    double argmax = 0.0;
    // The grid evaluations (z ascending), before refinement.
    std::vector<std::pair<double, double>> points;
};

LambdaScan lambda_star(const PolarizationBehavior& b, double alpha, LambdaGridSpec grid = {});

struct MuEstimate {
    std::string method;
    double mu = 0.0;
    std::map<std::string, double> diagnostics;
};

// mu = 1/(rho - alpha) with rho = -log_l(lambda_star). Throws
// std::domain_error when rho <= alpha (the bound is vacuous). Also reports
// the companion constants c1 = 2 Pe^-alpha + Pe and beta = (1+2 Pe^-0.01)^3.
MuEstimate mu_from_lambda(double lambda_star_value, double alpha, int l, double target_pe = 0.01);

// Dominant contraction factor of (Th)(z) = (1/l) sum_i h(f_i(z)) over
// functions vanishing at 0 and 1, by power iteration on a uniform grid with
// linear interpolation and sup-norm normalization; mu = -1/log_l(lambda).
// Throws std::domain_error for non-polarizing kernels (lambda reaches 1) and
// std::runtime_error if the iteration does not settle within max_iter.
MuEstimate mu_power_iteration(const PolarizationBehavior& b, int grid = 4096, double tol = 1e-12,
                              int max_iter = 5000);

struct ProcessStats {
    int m = 0;
    uint64_t trials = 0;
    double z0 = 0.0;
    double alpha = 0.0;
    double eps = 0.0;
    double mean_g = 0.0; // sample mean of g_alpha(Z_m)
    double se_g = 0.0;   // standard error of that mean
    double mean_z = 0.0;
    double tail_low = 0.0;  // fraction with Z_m <= eps
    double tail_mid = 0.0;  // fraction strictly between
    double tail_high = 0.0; // fraction with Z_m >= 1-eps
    double ci = 0.0;        // 1.96 * se_g
};

// Z_{k+1} = f_B(Z_k) with B uniform over inputs; one independent generator
// per trial (seed.derive(trial)), so results do not depend on batching.
ProcessStats simulate_process(const PolarizationBehavior& b, double z0, int m, uint64_t trials,
                              double alpha, double eps, Seed seed);

// Same walk, reporting stats after every step 1..m in a single pass.
std::vector<ProcessStats> simulate_process_trajectory(const PolarizationBehavior& b, double z0, int m,
                                                      uint64_t trials, double alpha, double eps,
                                                      Seed seed);

// Exact erasure probabilities of all l^m bit-channels of the m-step
// transform at channel parameter z0. Entry order: index i has base-l digits
// d_1..d_m (most significant first) and erasure f_{d_m}(...f_{d_1}(z0)...),
// i.e. level 1 consumes the most significant digit. Throws std::domain_error
// when l^m exceeds cap.
std::vector<double> exact_bitchannel_erasures(const PolarizationBehavior& b, double z0, int m,
                                              uint64_t cap = uint64_t(1) << 24);

// Fits log(l^m) against log(1/gap(m)) for m in [m_min, m_max], where
// gap(m) = (1-z0) - |{i : p_i <= target_pe}| / l^m; the slope estimates the
// scaling exponent. Throws std::domain_error when any gap is nonpositive or
// the regressor degenerates (e.g. non-polarizing kernels).
MuEstimate empirical_mu_fit(const PolarizationBehavior& b, double z0, double target_pe, int m_min,
                            int m_max, uint64_t cap = uint64_t(1) << 24);

} // namespace polarlab
