#include "polarlab/average.hpp"

#include "polarlab/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polarlab {

namespace {

constexpr double kLog2E = 1.4426950408889634074;

// log2(2^d - 1) for d = 1..64, stable for all d via log1p.
double log2_pow2_minus_1(int d) {
    static const auto table = [] {
        std::vector<double> t(65, 0.0);
        for (int d = 1; d <= 64; ++d)
            t[d] = d + std::log1p(-std::exp2(static_cast<double>(-d))) * kLog2E;
        return t;
    }();
    return table[d];
}

// log2(2^a - 2^b) for a > b >= 0.
double log2_pow2_diff(int a, int b) {
    return b + log2_pow2_minus_1(a - b);
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

} // namespace

double gaussian_binomial_log2(int n, int k) {
    if (k < 0 || n < 0 || k > n || n > 64)
        throw std::invalid_argument("gaussian_binomial_log2: need 0 <= k <= n <= 64");
    double acc = 0.0;
    for (int j = 0; j < k; ++j)
        acc += log2_pow2_minus_1(n - j) - log2_pow2_minus_1(k - j);
    return acc;
}

namespace {

// log2 of the t-th summand of the closed form: the count of (l-s)-dim
// subspaces whose intersection with E_i has dimension t and avoids the new
// coordinate direction, divided out later by the subspace total.
double log2_gamma_term(int l, int i, int s, int t) {
    double acc = gaussian_binomial_log2(i - 1, t);
    const int len = l - s - t;
    for (int j = 0; j < len; ++j)
        acc += log2_pow2_diff(l, i + j) - log2_pow2_diff(l - s, t + j);
    return acc;
}

} // namespace

double p_given_s(int l, int input, int s) {
    if (l < 1 || l > 64) throw std::invalid_argument("p_given_s: l out of [1,64]");
    if (input < 0 || input >= l) throw std::invalid_argument("p_given_s: input out of range");
    if (s < 0 || s > l) throw std::invalid_argument("p_given_s: s out of range");
    const int i = input + 1;
    const int t_lo = std::max(i - s, 0);
    const int t_hi = std::min(l - s, i - 1);
    if (t_lo > t_hi) return 0.0; // only happens at s = 0: no erasures, always decodable
    std::vector<double> terms;
    terms.reserve(t_hi - t_lo + 1);
    for (int t = t_lo; t <= t_hi; ++t) terms.push_back(log2_gamma_term(l, i, s, t));
    const double log2p = logsumexp2(terms) - gaussian_binomial_log2(l, l - s);
    return std::min(1.0, std::exp2(log2p));
}

double avg_F(int l, int input, double z) {
    if (z < 0.0 || z > 1.0) throw std::invalid_argument("avg_F: z out of [0,1]");
    std::vector<double> terms(l + 1, -HUGE_VAL);
    for (int s = 0; s <= l; ++s) {
        const double p = p_given_s(l, input, s);
        if (p <= 0.0) continue;
        double t = std::log2(static_cast<double>(binom64(l, s))) + std::log2(p);
        if (s > 0) {
            if (z <= 0.0) continue;
            t += s * std::log2(z);
        }
        if (l - s > 0) {
            if (z >= 1.0) continue;
            t += (l - s) * std::log1p(-z) * kLog2E;
        }
        terms[s] = t;
    }
    const double lf = logsumexp2(terms);
    if (lf == -HUGE_VAL) return 0.0;
    return std::clamp(std::exp2(lf), 0.0, 1.0);
}

std::vector<std::vector<double>> p_given_s_table(int l) {
    std::vector<std::vector<double>> t(l, std::vector<double>(l + 1));
    for (int i = 0; i < l; ++i)
        for (int s = 0; s <= l; ++s) t[i][s] = p_given_s(l, i, s);
    return t;
}

double bound_p_lower(int input, int s) {
    const int i = input + 1;
    if (s <= i) return 0.0;
    return 1.0 - std::exp2(static_cast<double>(-(s - i)));
}

double bound_p_upper(int input, int s) {
    const int i = input + 1;
    const double v = 2.0 * std::pow(2.0 / 3.0, i - s - 1);
    return std::min(1.0, v);
}

int g_of_delta(int l, double delta) {
    return static_cast<int>(std::floor((delta * std::log2(static_cast<double>(l)) + std::log2(6.0)) /
                                       (std::log2(3.0) - 1.0)));
}

AvgBounds bound_F(int l, int input, double z, BoundSpec spec) {
    if (l < 2 || l > 64) throw std::invalid_argument("bound_F: l out of [2,64]");
    if (input < 0 || input >= l) throw std::invalid_argument("bound_F: input out of range");
    const int i = input + 1;
    const double tail = std::sqrt(spec.beta * std::log(static_cast<double>(l)) / (2.0 * l));
    AvgBounds out;
    out.lower_threshold =
        static_cast<double>(i) / l + std::ceil(spec.delta * std::log2(static_cast<double>(l))) / l + tail;
    out.upper_threshold = static_cast<double>(i) / l - static_cast<double>(g_of_delta(l, spec.delta)) / l - tail;
    const double lb = std::pow(static_cast<double>(l), -spec.beta);
    const double ld = std::pow(static_cast<double>(l), -spec.delta);
    if (z > out.lower_threshold) {
        out.lower_applicable = true;
        out.lower = (1.0 - lb) * (1.0 - ld);
    }
    if (z < out.upper_threshold) {
        out.upper_applicable = true;
        out.upper = lb + ld;
    }
    return out;
}

} // namespace polarlab
