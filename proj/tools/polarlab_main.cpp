// polarlab: command-line front end for kernel sampling, polarization
// behaviors, average-behavior tables, scaling diagnostics, polar codes over
// the erasure channel, and batch experiments.

#include "polarlab/average.hpp"
#include "polarlab/behavior.hpp"
#include "polarlab/codec.hpp"
#include "polarlab/experiments.hpp"
#include "polarlab/gf2.hpp"
#include "polarlab/scaling.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace polarlab;

std::string default_out_dir() {
    const char* env = std::getenv("POLARLAB_OUT");
    return env && *env ? env : ".";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

// Shared --file / --arikan kernel source.
struct KernelSource {
    std::string file;
    bool arikan = false;

    void attach(CLI::App* cmd) {
        auto* g = cmd->add_option_group("kernel source");
        g->add_option("--file", file, "kernel file (l=<n> header plus 0/1 rows)");
        g->add_flag("--arikan", arikan, "use the 2x2 kernel [[1,0],[1,1]]");
        g->require_option(1);
    }
    BitMatrix matrix() const { return arikan ? arikan_kernel() : read_kernel_file(file); }
    Kernel kernel() const { return Kernel(matrix()); }
};

struct BehaviorSource {
    KernelSource src;
    uint64_t mc_samples = 0; // 0 = exact
    uint64_t seed = 0;
    uint64_t stream = 0;

    void attach(CLI::App* cmd) {
        src.attach(cmd);
        cmd->add_option("--mc-samples", mc_samples,
                        "Monte Carlo patterns per weight (0 = exact enumeration)");
        cmd->add_option("--seed", seed, "seed for Monte Carlo sampling");
        cmd->add_option("--stream", stream, "seed stream index");
    }
    PolarizationBehavior behavior() const {
        Kernel k = src.kernel();
        if (mc_samples == 0) return exact_behavior(k);
        return mc_behavior(k, mc_samples, Seed{seed, stream});
    }
};

std::string behavior_csv(const PolarizationBehavior& b) {
    std::ostringstream ss;
    write_behavior_csv(ss, b);
    return ss.str();
}

std::string read_bits_arg(const std::string& inline_bits, const std::string& file) {
    std::string s = file.empty() ? inline_bits : slurp(file);
    std::string clean;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
    return clean;
}

std::vector<uint8_t> parse_bitstring(const std::string& s) {
    std::vector<uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("bit string: expected only 0 and 1");
        bits.push_back(c == '1');
    }
    return bits;
}

std::string format_bits(const std::vector<uint8_t>& bits) {
    std::string s(bits.size(), '0');
    for (size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) s[i] = '1';
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polarlab: polar codes from large binary kernels on the erasure channel"};
    app.require_subcommand(1);

    // kernel sample | check
    auto* kernel_cmd = app.add_subcommand("kernel", "sample and inspect kernels");
    kernel_cmd->require_subcommand(1);
    {
        auto* sample = kernel_cmd->add_subcommand("sample", "draw a uniform nonsingular kernel");
        auto l = std::make_shared<int>(8);
        auto seed = std::make_shared<uint64_t>(0);
        auto stream = std::make_shared<uint64_t>(0);
        auto out = std::make_shared<std::string>();
        sample->add_option("--l", *l, "kernel size")->required()->check(CLI::Range(1, 64));
        sample->add_option("--seed", *seed, "seed value");
        sample->add_option("--stream", *stream, "seed stream index");
        sample->add_option("--out", *out, "output kernel file (default stdout)");
        sample->callback([=] {
            BitMatrix m = sample_nonsingular(*l, Seed{*seed, *stream});
            std::ostringstream ss;
            write_kernel(ss, m);
            emit(*out, ss.str());
            if (!out->empty())
                std::cout << "kernel " << Kernel(m).digest() << " -> " << *out << "\n";
        });
    }
    {
        auto* check = kernel_cmd->add_subcommand("check", "report nonsingularity and polarization");
        auto src = std::make_shared<KernelSource>();
        src->attach(check);
        check->callback([=] {
            BitMatrix m = src->matrix();
            bool nonsingular = rank(m) == m.rows() && m.rows() == m.cols();
            bool pol = nonsingular && is_polarizing(m);
            std::cout << "nonsingular=" << (nonsingular ? "true" : "false")
                      << " polarizing=" << (pol ? "true" : "false") << "\n";
        });
    }

    // behavior exact | mc
    auto* behavior_cmd = app.add_subcommand("behavior", "polarization behavior counts");
    behavior_cmd->require_subcommand(1);
    {
        auto* exact = behavior_cmd->add_subcommand("exact", "exhaustive pattern enumeration");
        auto src = std::make_shared<KernelSource>();
        auto out = std::make_shared<std::string>();
        src->attach(exact);
        exact->add_option("--out", *out, "output CSV (default stdout)");
        exact->callback([=] { emit(*out, behavior_csv(exact_behavior(src->kernel()))); });
    }
    {
        auto* mc = behavior_cmd->add_subcommand("mc", "stratified Monte Carlo estimate");
        auto src = std::make_shared<KernelSource>();
        auto samples = std::make_shared<uint64_t>(10000);
        auto seed = std::make_shared<uint64_t>(0);
        auto stream = std::make_shared<uint64_t>(0);
        auto out = std::make_shared<std::string>();
        src->attach(mc);
        mc->add_option("--samples", *samples, "patterns per weight")->check(CLI::PositiveNumber);
        mc->add_option("--seed", *seed, "seed value");
        mc->add_option("--stream", *stream, "seed stream index");
        mc->add_option("--out", *out, "output CSV (default stdout)");
        mc->callback(
            [=] { emit(*out, behavior_csv(mc_behavior(src->kernel(), *samples, Seed{*seed, *stream}))); });
    }

    // avg table | eval
    auto* avg_cmd = app.add_subcommand("avg", "behavior averaged over all nonsingular kernels");
    avg_cmd->require_subcommand(1);
    {
        auto* table = avg_cmd->add_subcommand("table", "p(i|s) table as CSV");
        auto l = std::make_shared<int>(8);
        auto out = std::make_shared<std::string>();
        table->add_option("--l", *l, "kernel size")->required()->check(CLI::Range(1, 64));
        table->add_option("--out", *out, "output CSV (default stdout)");
        table->callback([=] {
            std::vector<std::vector<double>> t = p_given_s_table(*l);
            std::ostringstream ss;
            ss << "i,s,p\n";
            char buf[48];
            for (int i = 1; i <= *l; ++i)
                for (int s = 0; s <= *l; ++s) {
                    std::snprintf(buf, sizeof buf, "%.17g", t[i - 1][s]);
                    ss << i << "," << s << "," << buf << "\n";
                }
            emit(*out, ss.str());
        });
    }
    {
        auto* eval = avg_cmd->add_subcommand("eval", "average erasure probability and bounds");
        auto l = std::make_shared<int>(8);
        auto i = std::make_shared<int>(1);
        auto z = std::make_shared<double>(0.5);
        auto beta = std::make_shared<double>(1.0);
        auto delta = std::make_shared<double>(1.0);
        eval->add_option("--l", *l, "kernel size")->required()->check(CLI::Range(1, 64));
        eval->add_option("--i", *i, "input index, 1-based")->required();
        eval->add_option("--z", *z, "channel erasure probability")->required();
        eval->add_option("--beta", *beta, "bound exponent beta");
        eval->add_option("--delta", *delta, "bound exponent delta");
        eval->callback([=] {
            if (*i < 1 || *i > *l) throw std::domain_error("input index out of range");
            double f = avg_F(*l, *i - 1, *z);
            AvgBounds bd = bound_F(*l, *i - 1, *z, BoundSpec{*beta, *delta});
            std::cout << "F=" << f << "\n";
            std::cout << "lower_applicable=" << (bd.lower_applicable ? "true" : "false")
                      << " lower=" << bd.lower << " lower_threshold=" << bd.lower_threshold << "\n";
            std::cout << "upper_applicable=" << (bd.upper_applicable ? "true" : "false")
                      << " upper=" << bd.upper << " upper_threshold=" << bd.upper_threshold << "\n";
        });
    }

    // scaling lambda | mu | process
    auto* scaling_cmd = app.add_subcommand("scaling", "contraction and scaling-exponent tools");
    scaling_cmd->require_subcommand(1);
    {
        auto* lam = scaling_cmd->add_subcommand("lambda", "scan lambda(z) and report the supremum");
        auto bsrc = std::make_shared<BehaviorSource>();
        auto alpha = std::make_shared<double>(0.5);
        auto grid = std::make_shared<int>(4096);
        auto out = std::make_shared<std::string>();
        bsrc->attach(lam);
        lam->add_option("--alpha", *alpha, "moment exponent in (0,1)");
        lam->add_option("--grid", *grid, "interior grid points")->check(CLI::PositiveNumber);
        lam->add_option("--out", *out, "scan CSV (z,lambda)");
        lam->callback([=] {
            PolarizationBehavior b = bsrc->behavior();
            LambdaGridSpec spec;
            spec.interior_points = *grid;
            LambdaScan scan = lambda_star(b, *alpha, spec);
            if (!out->empty()) {
                std::ostringstream ss;
                ss << "z,lambda\n";
                char buf[48];
                for (auto& [zv, lv] : scan.points) {
                    std::snprintf(buf, sizeof buf, "%.17g", zv);
                    ss << buf << ",";
                    std::snprintf(buf, sizeof buf, "%.17g", lv);
                    ss << buf << "\n";
                }
                emit(*out, ss.str());
            }
            std::cout << "lambda_star=" << scan.lambda_star << " argmax=" << scan.argmax
                      << " log_l_lambda=" << std::log2(scan.lambda_star) / std::log2(double(b.ell))
                      << "\n";
        });
    }
    {
        auto* mu = scaling_cmd->add_subcommand("mu", "scaling-exponent estimates");
        auto bsrc = std::make_shared<BehaviorSource>();
        auto alpha = std::make_shared<double>(0.0625);
        auto pe = std::make_shared<double>(0.01);
        auto pgrid = std::make_shared<int>(4096);
        bsrc->attach(mu);
        mu->add_option("--alpha", *alpha, "moment exponent for the contraction bound");
        mu->add_option("--pe", *pe, "target error probability for bound constants");
        mu->add_option("--power-grid", *pgrid, "power-iteration grid size");
        mu->callback([=] {
            PolarizationBehavior b = bsrc->behavior();
            nlohmann::json j;
            auto put = [&](const char* key, const MuEstimate& est) {
                j[key] = {{"method", est.method}, {"mu", est.mu}, {"diagnostics", est.diagnostics}};
            };
            try {
                put("power_iteration", mu_power_iteration(b, *pgrid));
            } catch (const std::exception& e) {
                j["power_iteration"] = {{"error", e.what()}};
            }
            try {
                LambdaScan scan = lambda_star(b, *alpha);
                put("lambda_bound", mu_from_lambda(scan.lambda_star, *alpha, b.ell, *pe));
            } catch (const std::exception& e) {
                j["lambda_bound"] = {{"error", e.what()}};
            }
            std::cout << j.dump(2) << "\n";
        });
    }
    {
        auto* proc = scaling_cmd->add_subcommand("process", "simulate the polarization process");
        auto bsrc = std::make_shared<BehaviorSource>();
        auto z0 = std::make_shared<double>(0.5);
        auto m = std::make_shared<int>(10);
        auto trials = std::make_shared<uint64_t>(10000);
        auto alpha = std::make_shared<double>(0.5);
        auto eps = std::make_shared<double>(0.01);
        auto pseed = std::make_shared<uint64_t>(0);
        auto pstream = std::make_shared<uint64_t>(1);
        auto out = std::make_shared<std::string>();
        bsrc->attach(proc);
        proc->add_option("--z0", *z0, "initial erasure probability");
        proc->add_option("--m", *m, "number of steps")->check(CLI::PositiveNumber);
        proc->add_option("--trials", *trials, "trials")->check(CLI::PositiveNumber);
        proc->add_option("--alpha", *alpha, "moment exponent tracked by the walk");
        proc->add_option("--eps", *eps, "tail threshold");
        proc->add_option("--process-seed", *pseed, "seed for the walk");
        proc->add_option("--process-stream", *pstream, "seed stream for the walk");
        proc->add_option("--out", *out, "trajectory CSV (default stdout)");
        proc->callback([=] {
            PolarizationBehavior b = bsrc->behavior();
            std::vector<ProcessStats> traj =
                simulate_process_trajectory(b, *z0, *m, *trials, *alpha, *eps, Seed{*pseed, *pstream});
            std::ostringstream ss;
            ss << "m,mean_g,se_g,mean_z,tail_low,tail_mid,tail_high,ci\n";
            char buf[48];
            auto col = [&](double v, char tail) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                ss << buf << tail;
            };
            for (const ProcessStats& s : traj) {
                ss << s.m << ",";
                col(s.mean_g, ',');
                col(s.se_g, ',');
                col(s.mean_z, ',');
                col(s.tail_low, ',');
                col(s.tail_mid, ',');
                col(s.tail_high, ',');
                col(s.ci, '\n');
            }
            emit(*out, ss.str());
        });
    }

    // code construct | encode | decode | fer
    auto* code_cmd = app.add_subcommand("code", "polar codes on the erasure channel");
    code_cmd->require_subcommand(1);
    {
        auto* con = code_cmd->add_subcommand("construct", "choose the frozen set");
        auto src = std::make_shared<KernelSource>();
        auto m = std::make_shared<int>(3);
        auto z = std::make_shared<double>(0.5);
        auto pe = std::make_shared<double>(0.0);
        auto kinfo = std::make_shared<uint64_t>(0);
        auto out = std::make_shared<std::string>();
        src->attach(con);
        con->add_option("--m", *m, "Kronecker power")->required()->check(CLI::PositiveNumber);
        con->add_option("--z", *z, "design erasure probability")->required();
        auto* goal = con->add_option_group("construction goal");
        goal->add_option("--pe", *pe, "target block error probability (union bound)");
        goal->add_option("--k", *kinfo, "fixed number of information bits");
        goal->require_option(1);
        con->add_option("--out", *out, "output code JSON (default stdout)");
        con->callback([=] {
            Kernel k = src->kernel();
            PolarCode code = *kinfo > 0 || con->get_option_group("construction goal")
                                                   ->get_option("--k")
                                                   ->count()
                                 ? construct_code_fixed_rate(k, *m, *z, *kinfo)
                                 : construct_code(k, *m, *z, *pe);
            emit(*out, code_to_json(code) + "\n");
            if (!out->empty())
                std::cout << "n=" << code.n << " k=" << code.k_info
                          << " rate=" << double(code.k_info) / double(code.n) << " -> " << *out
                          << "\n";
        });
    }
    {
        auto* enc = code_cmd->add_subcommand("encode", "apply the polar transform");
        auto code_path = std::make_shared<std::string>();
        auto bits = std::make_shared<std::string>();
        auto bits_file = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        enc->add_option("--code", *code_path, "code JSON file")->required();
        auto* in = enc->add_option_group("input bits");
        in->add_option("--bits", *bits, "bit string (length n, or k_info message bits)");
        in->add_option("--bits-file", *bits_file, "file holding the bit string");
        in->require_option(1);
        enc->add_option("--out", *out, "output file (default stdout)");
        enc->callback([=] {
            PolarCode code = code_from_json(slurp(*code_path));
            std::vector<uint8_t> u = parse_bitstring(read_bits_arg(*bits, *bits_file));
            if (u.size() == code.k_info && code.k_info != code.n) u = expand_message(code, u);
            std::vector<uint8_t> x = encode(code, std::move(u));
            emit(*out, format_bits(x) + "\n");
        });
    }
    {
        auto* dec = code_cmd->add_subcommand("decode", "successive cancellation decoding");
        auto code_path = std::make_shared<std::string>();
        auto received = std::make_shared<std::string>();
        auto received_file = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        dec->add_option("--code", *code_path, "code JSON file")->required();
        auto* in = dec->add_option_group("received word");
        in->add_option("--received", *received, "symbols as 0/1/e string");
        in->add_option("--received-file", *received_file, "file holding the symbol string");
        in->require_option(1);
        dec->add_option("--out", *out, "output file (default stdout)");
        dec->callback([=] {
            PolarCode code = code_from_json(slurp(*code_path));
            std::vector<Symbol> y = parse_symbols(read_bits_arg(*received, *received_file));
            DecodeResult res = sc_decode(code, y);
            std::ostringstream ss;
            ss << format_bits(res.u) << "\n"
               << "erased_info=" << res.erased_info << "\n";
            emit(*out, ss.str());
        });
    }
    {
        auto* fer = code_cmd->add_subcommand("fer", "Monte Carlo frame error rate");
        auto code_path = std::make_shared<std::string>();
        auto z = std::make_shared<double>(0.5);
        auto trials = std::make_shared<uint64_t>(10000);
        auto seed = std::make_shared<uint64_t>(0);
        auto stream = std::make_shared<uint64_t>(0);
        auto honest = std::make_shared<bool>(false);
        fer->add_option("--code", *code_path, "code JSON file")->required();
        fer->add_option("--z", *z, "channel erasure probability")->required();
        fer->add_option("--trials", *trials, "trials")->check(CLI::PositiveNumber);
        fer->add_option("--seed", *seed, "seed value");
        fer->add_option("--stream", *stream, "seed stream index");
        fer->add_flag("--honest", *honest, "decode without genie continuation");
        fer->callback([=] {
            PolarCode code = code_from_json(slurp(*code_path));
            FerStats st = simulate_fer(code, *z, *trials, Seed{*seed, *stream}, !*honest);
            nlohmann::json j{{"trials", st.trials},
                             {"failures", st.failures},
                             {"fer", st.fer},
                             {"never_wrong", st.never_wrong},
                             {"z", *z},
                             {"seed", *seed},
                             {"stream", *stream}};
            std::cout << j.dump(2) << "\n";
        });
    }

    // exp concentration | scaling-fit
    auto* exp_cmd = app.add_subcommand("exp", "batch experiments with CSV artifacts");
    exp_cmd->require_subcommand(1);
    {
        auto* conc = exp_cmd->add_subcommand("concentration", "lambda* concentration campaign");
        auto cfg = std::make_shared<ExperimentConfig>();
        cfg->name = "concentration";
        cfg->out_dir = default_out_dir();
        auto seed = std::make_shared<uint64_t>(0);
        auto stream = std::make_shared<uint64_t>(0);
        conc->add_option("--l", cfg->ells, "kernel sizes (repeatable)")
            ->check(CLI::Range(1, 64));
        conc->add_option("--kernels", cfg->kernels_per_ell, "kernels per size");
        conc->add_flag("--exhaustive", cfg->exhaustive_small,
                       "enumerate all nonsingular kernels when l <= 4");
        conc->add_option("--alpha", cfg->alpha, "moment exponent");
        conc->add_option("--samples", cfg->mc_samples, "Monte Carlo patterns per weight");
        conc->add_option("--exact-max", cfg->exact_max, "largest l enumerated exactly");
        conc->add_option("--grid", cfg->grid.interior_points, "lambda scan grid");
        conc->add_option("--seed", *seed, "seed value");
        conc->add_option("--stream", *stream, "seed stream index");
        conc->add_option("--name", cfg->name, "artifact name prefix");
        conc->add_option("--out", cfg->out_dir, "output directory (default $POLARLAB_OUT or .)");
        conc->callback([=] {
            cfg->seed = Seed{*seed, *stream};
            ConcentrationResult res = run_concentration(*cfg);
            for (const std::string& p : res.artifacts) std::cout << p << "\n";
        });
    }
    {
        auto* fit = exp_cmd->add_subcommand("scaling-fit", "rate/gap table and mu estimates");
        auto src = std::make_shared<KernelSource>();
        auto cfg = std::make_shared<ExperimentConfig>();
        cfg->name = "scaling";
        cfg->out_dir = default_out_dir();
        auto seed = std::make_shared<uint64_t>(0);
        auto stream = std::make_shared<uint64_t>(0);
        src->attach(fit);
        fit->add_option("--z0", cfg->z0, "channel erasure probability");
        fit->add_option("--pe", cfg->target_pe, "per-channel threshold for the rate count");
        fit->add_option("--m-min", cfg->m_min, "first Kronecker power");
        fit->add_option("--m-max", cfg->m_max, "last Kronecker power");
        fit->add_option("--alpha", cfg->alpha, "moment exponent for the contraction bound");
        fit->add_option("--power-grid", cfg->power_grid, "power-iteration grid size");
        fit->add_option("--grid", cfg->grid.interior_points, "lambda scan grid");
        fit->add_option("--seed", *seed, "seed value");
        fit->add_option("--stream", *stream, "seed stream index");
        fit->add_option("--name", cfg->name, "artifact name prefix");
        fit->add_option("--out", cfg->out_dir, "output directory (default $POLARLAB_OUT or .)");
        fit->callback([=] {
            cfg->seed = Seed{*seed, *stream};
            ScalingFitResult res = run_scaling_fit(*cfg, src->kernel());
            for (const std::string& p : res.artifacts) std::cout << p << "\n";
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
