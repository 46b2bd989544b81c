#include "polarlab/experiments.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace polarlab {

namespace {

// Window points that clamp against 1 are measured at distance kEdge from the
// endpoint, in the complement domain; 1 - kEdge itself is not representable.
constexpr double kEdge = 1e-18;

std::string fmt(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::string iso_now() {
    std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
    std::string s = canonical_config_string(cfg);
    return to_hex64(fnv1a64(s.data(), s.size()));
}

std::string artifact_header(const ExperimentConfig& cfg) {
    std::ostringstream ss;
    ss << "# seed=" << cfg.seed.value << "/" << cfg.seed.stream << " config=" << config_hash_hex(cfg)
       << "\n";
    return ss.str();
}

std::string write_manifest(const ExperimentConfig& cfg, const std::string& command,
                           const std::vector<std::string>& artifacts, const std::string& start,
                           double duration_ms) {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = nlohmann::json{{"name", cfg.name},
                                 {"ells", cfg.ells},
                                 {"kernels_per_ell", cfg.kernels_per_ell},
                                 {"exhaustive_small", cfg.exhaustive_small},
                                 {"alpha", cfg.alpha},
                                 {"mc_samples", cfg.mc_samples},
                                 {"exact_max", cfg.exact_max},
                                 {"z0", cfg.z0},
                                 {"target_pe", cfg.target_pe},
                                 {"m_min", cfg.m_min},
                                 {"m_max", cfg.m_max},
                                 {"power_grid", cfg.power_grid},
                                 {"grid_interior", cfg.grid.interior_points},
                                 {"grid_tail", cfg.grid.tail_points},
                                 {"out_dir", cfg.out_dir}};
    j["config_hash"] = config_hash_hex(cfg);
    j["seed"] = {{"value", cfg.seed.value}, {"stream", cfg.seed.stream}};
    j["version"] = "polarlab 0.1.0";
    j["start"] = start;
    j["duration_ms"] = duration_ms;
    nlohmann::json arts = nlohmann::json::array();
    for (const std::string& p : artifacts) {
        std::string bytes = slurp(p);
        arts.push_back({{"path", p}, {"fnv1a64", to_hex64(fnv1a64(bytes.data(), bytes.size()))}});
    }
    j["artifacts"] = arts;
    std::string path =
        (std::filesystem::path(cfg.out_dir) / (cfg.name + "_manifest.json")).string();
    spit(path, j.dump(2) + "\n");
    return path;
}

// 1 - f_i(1 - delta), summed directly over the complement counts so that the
// distance to 1 survives in floating point.
double complement_near_one(const PolarizationBehavior& pb, int input, double delta) {
    const int l = pb.ell;
    double acc = 0.0;
    for (int s = 0; s <= l; ++s) {
        double gap = double(binom64(l, s) - pb.count(input, s));
        if (gap == 0.0) continue;
        acc += gap * std::pow(1.0 - delta, s) * std::pow(delta, l - s);
    }
    return std::clamp(acc, 0.0, 1.0);
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.ells.empty()) throw std::domain_error("config: need at least one l");
    for (int l : cfg.ells)
        if (l < 1 || l > 64) throw std::domain_error("config: l out of range [1,64]");
    if (cfg.kernels_per_ell < 1 && !cfg.exhaustive_small)
        throw std::domain_error("config: kernels_per_ell must be >= 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw std::domain_error("config: alpha in (0,1)");
    if (cfg.mc_samples < 1) throw std::domain_error("config: mc_samples must be >= 1");
    if (cfg.exact_max < 1) throw std::domain_error("config: exact_max must be >= 1");
    if (cfg.name.empty()) throw std::domain_error("config: name must be nonempty");
}

} // namespace

std::string canonical_config_string(const ExperimentConfig& cfg) {
    std::ostringstream ss;
    ss << "name=" << cfg.name << "|ells=";
    for (size_t i = 0; i < cfg.ells.size(); ++i) ss << (i ? "," : "") << cfg.ells[i];
    ss << "|kernels=" << cfg.kernels_per_ell << "|exhaustive=" << (cfg.exhaustive_small ? 1 : 0)
       << "|alpha=" << fmt(cfg.alpha) << "|mc_samples=" << cfg.mc_samples
       << "|exact_max=" << cfg.exact_max << "|grid=" << cfg.grid.interior_points << ","
       << cfg.grid.tail_points << "," << fmt(cfg.grid.tail_floor) << "|z0=" << fmt(cfg.z0)
       << "|pe=" << fmt(cfg.target_pe) << "|m=" << cfg.m_min << ".." << cfg.m_max
       << "|power_grid=" << cfg.power_grid << "|seed=" << cfg.seed.value << "/" << cfg.seed.stream;
    return ss.str();
}

std::vector<Kernel> all_nonsingular(int l) {
    if (l < 1 || l > 4) throw std::domain_error("all_nonsingular: supported for l <= 4 only");
    std::vector<Kernel> out;
    const uint64_t total = uint64_t(1) << (l * l);
    for (uint64_t mask = 0; mask < total; ++mask) {
        BitMatrix m(l, l);
        for (int r = 0; r < l; ++r)
            for (int c = 0; c < l; ++c)
                if ((mask >> (r * l + c)) & 1) m.set(r, c, true);
        if (rank(m) == l) out.emplace_back(m);
    }
    return out;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::domain_error("quantile: empty sample");
    std::sort(values.begin(), values.end());
    if (p <= 0.0) return values.front();
    if (p >= 1.0) return values.back();
    double pos = p * double(values.size() - 1);
    size_t k = size_t(pos);
    double frac = pos - double(k);
    if (k + 1 >= values.size()) return values.back();
    return values[k] * (1.0 - frac) + values[k + 1] * frac;
}

SharpnessReport sharpness_report(const PolarizationBehavior& pb) {
    const int l = pb.ell;
    SharpnessReport rep;
    rep.ell = l;
    const double lg = std::log2(double(l));
    rep.threshold = std::exp2(-(2.0 + lg) * lg);
    const double w = 5.0 * lg / std::sqrt(double(l));
    rep.a.resize(l);
    rep.b.resize(l);
    rep.f_at_b.resize(l);
    rep.comp_at_a.resize(l);
    rep.pass.resize(l);
    int failures = 0;
    for (int i = 1; i <= l; ++i) {
        double center = double(i) / l;
        double bi = std::max(center - w, kEdge);
        double ai = std::min(center + w, 1.0 - kEdge);
        rep.b[i - 1] = bi;
        rep.a[i - 1] = ai;
        rep.f_at_b[i - 1] = eval_f(pb, i - 1, bi);
        if (ai > 1.0 - 1e-12)
            rep.comp_at_a[i - 1] = complement_near_one(pb, i - 1, kEdge);
        else
            rep.comp_at_a[i - 1] =
                std::clamp(std::exp2(eval_f_complement_log2(pb, i - 1, ai)), 0.0, 1.0);
        bool ok = rep.f_at_b[i - 1] <= rep.threshold && rep.comp_at_a[i - 1] <= rep.threshold;
        rep.pass[i - 1] = ok;
        failures += !ok;
    }
    rep.failure_fraction = double(failures) / l;
    return rep;
}

ConcentrationResult run_concentration(const ExperimentConfig& cfg) {
    validate(cfg);
    const std::string start = iso_now();
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(cfg.out_dir);

    ConcentrationResult result;
    std::set<int> seen;
    for (int l : cfg.ells) {
        if (!seen.insert(l).second) continue;
        std::vector<Kernel> kernels;
        if (cfg.exhaustive_small && l <= 4) {
            kernels = all_nonsingular(l);
        } else {
            kernels.reserve(cfg.kernels_per_ell);
            for (int idx = 0; idx < cfg.kernels_per_ell; ++idx) {
                Seed ks = cfg.seed.derive((uint64_t(l) << 32) | uint64_t(idx));
                kernels.emplace_back(sample_nonsingular(l, ks));
            }
        }
        std::vector<double> logs;
        std::vector<KernelRow> lrows;
        int sharp_clean = 0;
        for (size_t idx = 0; idx < kernels.size(); ++idx) {
            const Kernel& k = kernels[idx];
            PolarizationBehavior pb =
                (l <= std::min(cfg.exact_max, 32))
                    ? exact_behavior(k)
                    : mc_behavior(k, cfg.mc_samples,
                                  cfg.seed.derive((uint64_t(l) << 32) | uint64_t(idx)).derive(1));
            LambdaScan scan = lambda_star(pb, cfg.alpha, cfg.grid);
            SharpnessReport sharp = sharpness_report(pb);
            KernelRow row;
            row.ell = l;
            row.digest = k.digest();
            row.mode = pb.mode == PolarizationBehavior::Mode::exact
                           ? "exact"
                           : "mc:" + std::to_string(cfg.mc_samples);
            row.lambda_star = scan.lambda_star;
            row.argmax = scan.argmax;
            row.log_l_lambda = std::log2(scan.lambda_star) / std::log2(double(l));
            row.sharp_fail_frac = sharp.failure_fraction;
            lrows.push_back(row);
            logs.push_back(row.log_l_lambda);
            sharp_clean += sharp.failure_fraction == 0.0;
        }
        EllSummary sum;
        sum.ell = l;
        sum.kernels = int(lrows.size());
        sum.median = quantile(logs, 0.5);
        sum.q1 = quantile(logs, 0.25);
        sum.q3 = quantile(logs, 0.75);
        int ineq = 0;
        for (double v : logs) ineq += v <= -0.5 + 5.0 * cfg.alpha;
        sum.frac_ineq = double(ineq) / double(logs.size());
        sum.sharp_all_pass = double(sharp_clean) / double(lrows.size());
        result.summaries.push_back(sum);
        result.rows.insert(result.rows.end(), lrows.begin(), lrows.end());
    }
    std::sort(result.rows.begin(), result.rows.end(), [](const KernelRow& a, const KernelRow& b) {
        if (a.ell != b.ell) return a.ell < b.ell;
        return a.digest < b.digest;
    });
    std::sort(result.summaries.begin(), result.summaries.end(),
              [](const EllSummary& a, const EllSummary& b) { return a.ell < b.ell; });

    std::ostringstream kc;
    kc << artifact_header(cfg);
    kc << "l,kernel,mode,lambda_star,argmax_z,log_l_lambda,sharp_fail_frac\n";
    for (const KernelRow& r : result.rows)
        kc << r.ell << "," << r.digest << "," << r.mode << "," << fmt(r.lambda_star) << ","
           << fmt(r.argmax) << "," << fmt(r.log_l_lambda) << "," << fmt(r.sharp_fail_frac) << "\n";
    std::string kpath = (std::filesystem::path(cfg.out_dir) / (cfg.name + "_kernels.csv")).string();
    spit(kpath, kc.str());

    std::ostringstream sc;
    sc << artifact_header(cfg);
    sc << "l,kernels,median_log_l_lambda,q1,q3,frac_ineq,sharp_all_pass\n";
    for (const EllSummary& s : result.summaries)
        sc << s.ell << "," << s.kernels << "," << fmt(s.median) << "," << fmt(s.q1) << ","
           << fmt(s.q3) << "," << fmt(s.frac_ineq) << "," << fmt(s.sharp_all_pass) << "\n";
    std::string spath = (std::filesystem::path(cfg.out_dir) / (cfg.name + "_summary.csv")).string();
    spit(spath, sc.str());

    result.artifacts = {kpath, spath};
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    result.artifacts.push_back(
        write_manifest(cfg, "exp concentration", {kpath, spath}, start, ms));
    return result;
}

ScalingFitResult run_scaling_fit(const ExperimentConfig& cfg, const Kernel& k) {
    validate(cfg);
    const std::string start = iso_now();
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(cfg.out_dir);

    PolarizationBehavior pb = exact_behavior(k);
    ScalingFitResult result;
    result.empirical = empirical_mu_fit(pb, cfg.z0, cfg.target_pe, cfg.m_min, cfg.m_max);
    result.power = mu_power_iteration(pb, cfg.power_grid);
    LambdaScan scan = lambda_star(pb, cfg.alpha, cfg.grid);
    try {
        result.lambda_bound = mu_from_lambda(scan.lambda_star, cfg.alpha, k.ell(), cfg.target_pe);
        result.lambda_bound_ok = true;
    } catch (const std::domain_error& e) {
        result.lambda_bound_error = e.what();
    }

    std::ostringstream fc;
    fc << artifact_header(cfg);
    fc << "m,n,rate,gap,union_bound\n";
    for (int m = cfg.m_min; m <= cfg.m_max; ++m) {
        std::vector<double> p = exact_bitchannel_erasures(pb, cfg.z0, m);
        uint64_t good = 0;
        double ub = 0.0;
        for (double v : p)
            if (v <= cfg.target_pe) {
                ++good;
                ub += v;
            }
        double rate = double(good) / double(p.size());
        fc << m << "," << p.size() << "," << fmt(rate) << "," << fmt((1.0 - cfg.z0) - rate) << ","
           << fmt(ub) << "\n";
    }
    std::string fpath = (std::filesystem::path(cfg.out_dir) / (cfg.name + "_fit.csv")).string();
    spit(fpath, fc.str());

    nlohmann::json j;
    auto put = [&](const char* key, const MuEstimate& est) {
        j[key] = {{"method", est.method}, {"mu", est.mu}, {"diagnostics", est.diagnostics}};
    };
    put("empirical", result.empirical);
    put("power_iteration", result.power);
    if (result.lambda_bound_ok)
        put("lambda_bound", result.lambda_bound);
    else
        j["lambda_bound"] = {{"error", result.lambda_bound_error}};
    j["kernel"] = k.digest();
    j["seed"] = {{"value", cfg.seed.value}, {"stream", cfg.seed.stream}};
    j["config_hash"] = config_hash_hex(cfg);
    std::string jpath = (std::filesystem::path(cfg.out_dir) / (cfg.name + "_mu.json")).string();
    spit(jpath, j.dump(2) + "\n");

    result.artifacts = {fpath, jpath};
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    result.artifacts.push_back(write_manifest(cfg, "exp scaling-fit", {fpath, jpath}, start, ms));
    return result;
}

} // namespace polarlab
