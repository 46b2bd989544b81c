#include "polarlab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace polarlab {

namespace {

constexpr double kLog2E = 1.4426950408889634074;

double logsumexp2(const std::vector<double>& terms) {
    double mx = -HUGE_VAL;
    for (double t : terms) mx = std::max(mx, t);
    if (mx == -HUGE_VAL) return -HUGE_VAL;
    double acc = 0.0;
    for (double t : terms) acc += std::exp2(t - mx);
    return mx + std::log2(acc);
}

// Direct products of the form z^l stay far from the representable floor
// under this test, so the plain polynomial path is safe.
bool direct_eval_safe(int l, double z) {
    double mn = std::min(z, 1.0 - z);
    if (mn <= 0.0) return false;
    return double(l) * std::log2(mn) > -900.0;
}

} // namespace

double g_alpha(double z, double alpha) {
    if (z <= 0.0 || z >= 1.0) return 0.0;
    return std::pow(z * (1.0 - z), alpha);
}

double lambda_at(const PolarizationBehavior& b, double alpha, double z) {
    if (!(z > 0.0 && z < 1.0)) throw std::domain_error("lambda_at: z must lie in (0,1)");
    const int l = b.ell;
    if (direct_eval_safe(l, z)) {
        std::vector<double> fs = eval_f_all(b, z);
        const double base = z * (1.0 - z);
        double acc = 0.0;
        for (double f : fs) acc += std::pow(f * (1.0 - f) / base, alpha);
        return acc / l;
    }
    const double lz = std::log2(z);
    const double lcz = std::log1p(-z) * kLog2E;
    std::vector<double> terms(l);
    for (int i = 0; i < l; ++i) {
        double lf = eval_f_log2(b, i, z);
        double lc = eval_f_complement_log2(b, i, z);
        terms[i] = alpha * (lf + lc - lz - lcz);
    }
    double lse = logsumexp2(terms);
    if (lse == -HUGE_VAL) return 0.0;
    return std::exp2(lse - std::log2(double(l)));
}

LambdaScan lambda_star(const PolarizationBehavior& b, double alpha, LambdaGridSpec grid) {
    const int l = b.ell;
    std::vector<double> zs;
    zs.reserve(size_t(grid.interior_points) + 2 * size_t(std::max(grid.tail_points, 0)));
    for (int k = 1; k <= grid.interior_points; ++k)
        zs.push_back(double(k) / (grid.interior_points + 1));
    const double hi = 1.0 / (double(l) * l);
    if (grid.tail_points > 1 && grid.tail_floor > 0.0 && grid.tail_floor < hi) {
        const double ratio = std::pow(hi / grid.tail_floor, 1.0 / (grid.tail_points - 1));
        double z = grid.tail_floor;
        for (int j = 0; j < grid.tail_points; ++j, z *= ratio) {
            zs.push_back(z);
            zs.push_back(1.0 - z);
        }
    }
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

    LambdaScan scan;
    scan.alpha = alpha;
    scan.points.reserve(zs.size());
    size_t best = 0;
    for (size_t k = 0; k < zs.size(); ++k) {
        double v = lambda_at(b, alpha, zs[k]);
        scan.points.emplace_back(zs[k], v);
        if (v > scan.points[best].second) best = k;
    }
    scan.lambda_star = scan.points[best].second;
    scan.argmax = scan.points[best].first;

    // Golden-section refinement between the grid neighbors of the best point.
    double a = best > 0 ? zs[best - 1] : zs[best];
    double c = best + 1 < zs.size() ? zs[best + 1] : zs[best];
    if (c > a) {
        constexpr double kInvPhi = 0.6180339887498949;
        double x1 = c - kInvPhi * (c - a);
        double x2 = a + kInvPhi * (c - a);
        double f1 = lambda_at(b, alpha, x1);
        double f2 = lambda_at(b, alpha, x2);
        while (c - a > grid.argmax_tol) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + kInvPhi * (c - a);
                f2 = lambda_at(b, alpha, x2);
            } else {
                c = x2;
                x2 = x1;
                f2 = f1;
                x1 = c - kInvPhi * (c - a);
                f1 = lambda_at(b, alpha, x1);
            }
        }
        double xm = 0.5 * (a + c);
        double fm = lambda_at(b, alpha, xm);
        if (fm > scan.lambda_star) {
            scan.lambda_star = fm;
            scan.argmax = xm;
        }
    }
    return scan;
}

MuEstimate mu_from_lambda(double lambda_star_value, double alpha, int l, double target_pe) {
    if (l < 2) throw std::domain_error("mu_from_lambda: need l >= 2");
    if (!(lambda_star_value > 0.0)) throw std::domain_error("mu_from_lambda: lambda must be positive");
    double rho = -std::log2(lambda_star_value) / std::log2(double(l));
    if (!(rho > alpha))
        throw std::domain_error("mu_from_lambda: rho <= alpha, the bound is vacuous for this kernel");
    MuEstimate est;
    est.method = "lambda-bound";
    est.mu = 1.0 / (rho - alpha);
    est.diagnostics["lambda_star"] = lambda_star_value;
    est.diagnostics["alpha"] = alpha;
    est.diagnostics["rho"] = rho;
    est.diagnostics["c1"] = 2.0 * std::pow(target_pe, -alpha) + target_pe;
    est.diagnostics["beta"] = std::pow(1.0 + 2.0 * std::pow(target_pe, -0.01), 3.0);
    return est;
}

MuEstimate mu_power_iteration(const PolarizationBehavior& b, int grid, double tol, int max_iter) {
    if (grid < 8) throw std::domain_error("mu_power_iteration: grid too small");
    const int l = b.ell;
    const int n = grid + 2; // interior nodes plus both endpoints
    const double step = 1.0 / (grid + 1);

    // f_i at every grid node, flattened as fs[i * n + j].
    std::vector<double> fs(size_t(l) * n);
    for (int j = 0; j < n; ++j) {
        std::vector<double> col = eval_f_all(b, j * step);
        for (int i = 0; i < l; ++i) fs[size_t(i) * n + j] = col[i];
    }

    std::vector<double> h(n), th(n);
    for (int j = 0; j < n; ++j) {
        double z = j * step;
        h[j] = std::sqrt(z * (1.0 - z));
    }

    auto interp = [&](double x) {
        double pos = x * (grid + 1);
        int k = std::min(int(pos), n - 2);
        if (k < 0) k = 0;
        double frac = pos - k;
        return h[k] * (1.0 - frac) + h[k + 1] * frac;
    };

    double lambda = 0.0, prev = -1.0;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < l; ++i) acc += interp(fs[size_t(i) * n + j]);
            th[j] = acc / l;
        }
        lambda = 0.0;
        for (int j = 0; j < n; ++j) lambda = std::max(lambda, th[j]);
        if (lambda <= 0.0) throw std::runtime_error("mu_power_iteration: operator collapsed to zero");
        for (int j = 0; j < n; ++j) h[j] = th[j] / lambda;
        if (iter > 0 && std::abs(lambda - prev) < tol) break;
        prev = lambda;
    }
    if (iter >= max_iter)
        throw std::runtime_error("mu_power_iteration: no convergence within max_iter");
    if (lambda >= 1.0 - 1e-9)
        throw std::domain_error("mu_power_iteration: kernel does not polarize (lambda reaches 1)");

    MuEstimate est;
    est.method = "power-iteration";
    est.mu = -std::log(double(l)) / std::log(lambda);
    est.diagnostics["lambda"] = lambda;
    est.diagnostics["iterations"] = double(iter + 1);
    est.diagnostics["grid"] = double(grid);
    return est;
}

std::vector<ProcessStats> simulate_process_trajectory(const PolarizationBehavior& b, double z0, int m,
                                                      uint64_t trials, double alpha, double eps,
                                                      Seed seed) {
    if (!(z0 >= 0.0 && z0 <= 1.0)) throw std::domain_error("simulate_process: z0 must lie in [0,1]");
    if (m < 1 || trials == 0) throw std::domain_error("simulate_process: need m >= 1 and trials >= 1");
    const int l = b.ell;
    struct Acc {
        double sum_g = 0.0, sum_g2 = 0.0, sum_z = 0.0;
        uint64_t low = 0, high = 0;
    };
    std::vector<Acc> acc(m);
    for (uint64_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng = seed.derive(t).rng();
        std::uniform_int_distribution<int> branch(0, l - 1);
        double z = z0;
        for (int k = 0; k < m; ++k) {
            z = eval_f(b, branch(rng), z);
            Acc& a = acc[k];
            double g = g_alpha(z, alpha);
            a.sum_g += g;
            a.sum_g2 += g * g;
            a.sum_z += z;
            if (z <= eps)
                ++a.low;
            else if (z >= 1.0 - eps)
                ++a.high;
        }
    }
    std::vector<ProcessStats> out(m);
    for (int k = 0; k < m; ++k) {
        ProcessStats& s = out[k];
        s.m = k + 1;
        s.trials = trials;
        s.z0 = z0;
        s.alpha = alpha;
        s.eps = eps;
        s.mean_g = acc[k].sum_g / trials;
        s.mean_z = acc[k].sum_z / trials;
        if (trials > 1) {
            double var = (acc[k].sum_g2 - trials * s.mean_g * s.mean_g) / double(trials - 1);
            s.se_g = std::sqrt(std::max(var, 0.0) / trials);
        }
        s.tail_low = double(acc[k].low) / trials;
        s.tail_high = double(acc[k].high) / trials;
        s.tail_mid = 1.0 - s.tail_low - s.tail_high;
        s.ci = 1.96 * s.se_g;
    }
    return out;
}

ProcessStats simulate_process(const PolarizationBehavior& b, double z0, int m, uint64_t trials,
                              double alpha, double eps, Seed seed) {
    return simulate_process_trajectory(b, z0, m, trials, alpha, eps, seed).back();
}

std::vector<double> exact_bitchannel_erasures(const PolarizationBehavior& b, double z0, int m,
                                              uint64_t cap) {
    if (!(z0 >= 0.0 && z0 <= 1.0))
        throw std::domain_error("exact_bitchannel_erasures: z0 must lie in [0,1]");
    if (m < 0) throw std::domain_error("exact_bitchannel_erasures: m must be nonnegative");
    const int l = b.ell;
    uint64_t n = 1;
    for (int k = 0; k < m; ++k) {
        if (n > cap / uint64_t(l))
            throw std::domain_error("exact_bitchannel_erasures: l^m exceeds cap");
        n *= uint64_t(l);
    }
    std::vector<double> cur{z0}, next;
    std::vector<double> zpow(l + 1), opow(l + 1), w(l + 1);
    for (int k = 0; k < m; ++k) {
        next.resize(cur.size() * l);
        for (size_t p = 0; p < cur.size(); ++p) {
            const double z = cur[p];
            zpow[0] = 1.0;
            opow[l] = 1.0;
            for (int s = 1; s <= l; ++s) zpow[s] = zpow[s - 1] * z;
            for (int s = l - 1; s >= 0; --s) opow[s] = opow[s + 1] * (1.0 - z);
            for (int s = 0; s <= l; ++s) w[s] = zpow[s] * opow[s];
            for (int d = 0; d < l; ++d) {
                double acc = 0.0;
                for (int s = 0; s <= l; ++s) acc += double(b.count(d, s)) * w[s];
                next[p * l + d] = std::clamp(acc, 0.0, 1.0);
            }
        }
        cur.swap(next);
    }
    return cur;
}

MuEstimate empirical_mu_fit(const PolarizationBehavior& b, double z0, double target_pe, int m_min,
                            int m_max, uint64_t cap) {
    if (m_min < 1 || m_max < m_min + 1)
        throw std::domain_error("empirical_mu_fit: need m_min >= 1 and at least two fit points");
    const int l = b.ell;
    MuEstimate est;
    est.method = "empirical-fit";
    std::vector<double> xs, ys;
    for (int m = m_min; m <= m_max; ++m) {
        std::vector<double> p = exact_bitchannel_erasures(b, z0, m, cap);
        uint64_t good = 0;
        for (double v : p) good += (v <= target_pe);
        double rate = double(good) / double(p.size());
        double gap = (1.0 - z0) - rate;
        est.diagnostics["gap_m" + std::to_string(m)] = gap;
        if (!(gap > 0.0))
            throw std::domain_error("empirical_mu_fit: nonpositive capacity gap at m=" +
                                    std::to_string(m));
        xs.push_back(-std::log(gap));
        ys.push_back(m * std::log(double(l)));
    }
    const size_t npts = xs.size();
    double mx = 0.0, my = 0.0;
    for (size_t k = 0; k < npts; ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= npts;
    my /= npts;
    double sxx = 0.0, sxy = 0.0;
    for (size_t k = 0; k < npts; ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    if (sxx < 1e-18)
        throw std::domain_error("empirical_mu_fit: capacity gap does not shrink, fit is degenerate");
    est.mu = sxy / sxx;
    double intercept = my - est.mu * mx;
    double ss = 0.0;
    for (size_t k = 0; k < npts; ++k) {
        double r = ys[k] - (intercept + est.mu * xs[k]);
        ss += r * r;
    }
    est.diagnostics["intercept"] = intercept;
    est.diagnostics["rms_residual"] = std::sqrt(ss / npts);
    est.diagnostics["points"] = double(npts);
    return est;
}

} // namespace polarlab
