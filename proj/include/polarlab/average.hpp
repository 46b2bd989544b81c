// Erasure probabilities averaged over a uniformly random nonsingular kernel:
// the conditional probability p_{i|s} that input i is undecodable given s
// erased outputs, its closed form via Gaussian binomials, the averaged
// polynomial F_i(z), and the interval bounds with their applicability windows.
#pragma once

#include <vector>

namespace polarlab {

// log2 of the Gaussian binomial [n over k]_2 (number of k-dim subspaces of
// F_2^n). Requires 0 <= k <= n <= 64. [2 over 1]_2 = 3, [4 over 2]_2 = 35.
double gaussian_binomial_log2(int n, int k);

// P{input i undecodable | s uniformly-placed erasures} averaged over uniform
// nonsingular kernels of size l. 0-based input; 0 <= s <= l. Evaluated in the
// log2 domain with a log-sum-exp over the rank-overlap parameter t.
double p_given_s(int l, int input, int s);

// F_i(z) = sum_s binom(l,s) z^s (1-z)^(l-s) p_{i|s}.
double avg_F(int l, int input, double z);

// Full conditional table p[input][s] for one l (rows: l inputs, cols: l+1).
std::vector<std::vector<double>> p_given_s_table(int l);

// max(0, 1 - 2^-(s-i)) with 1-based i = input+1; vacuous (0) when s <= i.
double bound_p_lower(int input, int s);

// min(1, 2*(2/3)^(i-s-1)) with 1-based i = input+1; vacuous (1) when the
// exponent is nonpositive.
double bound_p_upper(int input, int s);

struct BoundSpec {
    double beta = 1.0;
    double delta = 1.0;
};

// floor((delta*log2(l) + log2(6)) / (log2(3) - 1)).
int g_of_delta(int l, double delta);

// Two one-sided bounds on F_i(z), each valid only inside its z-window:
//   z > i/l + ceil(delta*log2 l)/l + sqrt(beta*ln(l)/(2l))  =>  F_i(z) > lower
//   z < i/l - g(delta)/l - sqrt(beta*ln(l)/(2l))            =>  F_i(z) < upper
// (1-based i in the formulas; the struct reports the thresholds used.)
struct AvgBounds {
    bool lower_applicable = false;
    double lower = 0.0;
    double lower_threshold = 0.0;
    bool upper_applicable = false;
    double upper = 1.0;
    double upper_threshold = 0.0;
};

AvgBounds bound_F(int l, int input, double z, BoundSpec spec);

} // namespace polarlab
