#include "polarlab/codec.hpp"

#include "polarlab/scaling.hpp"

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace polarlab {

namespace {

uint64_t pow_u64(int base, int exp) {
    uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > (uint64_t(1) << 62) / uint64_t(base)) throw std::length_error("l^m overflows");
        r *= uint64_t(base);
    }
    return r;
}

// Solves one kernel application for input d of the tuple jp: outputs observed
// through y (child-major layout, y[c * lc + jp]), inputs a < d already
// decided in vhat. Returns the input's value when the constraints pin it
// down, Erased otherwise.
Symbol solve_input(const Kernel& kern, const std::vector<Symbol>& y, const std::vector<uint8_t>& vhat,
                   int d, uint64_t jp, uint64_t lc) {
    const int l = kern.ell();
    uint64_t piv[64];
    uint64_t rhs = 0, occupied = 0;
    auto add = [&](uint64_t vec, int r) {
        while (vec) {
            int t = 63 - std::countl_zero(vec);
            if (occupied & (uint64_t(1) << t)) {
                vec ^= piv[t];
                r ^= int(rhs >> t) & 1;
            } else {
                piv[t] = vec;
                occupied |= uint64_t(1) << t;
                if (r) rhs |= uint64_t(1) << t;
                return;
            }
        }
    };
    for (int c = 0; c < l; ++c) {
        Symbol s = y[uint64_t(c) * lc + jp];
        if (s != Symbol::Erased) add(kern.column(c), s == Symbol::One);
    }
    for (int a = 0; a < d; ++a) add(uint64_t(1) << a, vhat[uint64_t(a) * lc + jp]);
    uint64_t vec = uint64_t(1) << d;
    int r = 0;
    while (vec) {
        int t = 63 - std::countl_zero(vec);
        if (!(occupied & (uint64_t(1) << t))) return Symbol::Erased;
        vec ^= piv[t];
        r ^= int(rhs >> t) & 1;
    }
    return r ? Symbol::One : Symbol::Zero;
}

struct ScCtx {
    const Kernel& kern;
    const PolarCode& code;
    const std::vector<uint8_t>* true_u;
    DecodeResult& res;

    void node(int k, uint64_t ubase, std::vector<Symbol>& y) {
        if (k == 0) {
            if (code.frozen[ubase]) {
                res.u[ubase] = 0;
                return;
            }
            if (y[0] != Symbol::Erased) {
                res.u[ubase] = (y[0] == Symbol::One);
                return;
            }
            res.erased[ubase] = 1;
            ++res.erased_info;
            res.u[ubase] = true_u ? (*true_u)[ubase] : 0;
            return;
        }
        const int l = kern.ell();
        const uint64_t lc = y.size() / l;
        std::vector<Symbol> child(lc);
        std::vector<uint8_t> vhat(y.size());
        for (int d = 0; d < l; ++d) {
            for (uint64_t jp = 0; jp < lc; ++jp)
                child[jp] = solve_input(kern, y, vhat, d, jp, lc);
            node(k - 1, ubase + uint64_t(d) * lc, child);
            std::vector<uint8_t> block(res.u.begin() + ubase + uint64_t(d) * lc,
                                       res.u.begin() + ubase + uint64_t(d + 1) * lc);
            block = encode(kern, k - 1, std::move(block));
            std::copy(block.begin(), block.end(), vhat.begin() + uint64_t(d) * lc);
        }
    }
};

std::vector<double> design_erasures(const Kernel& k, int m, double design_z, uint64_t cap) {
    PolarizationBehavior b = exact_behavior(k);
    return exact_bitchannel_erasures(b, design_z, m, cap);
}

PolarCode base_code(const Kernel& k, int m, double design_z, uint64_t cap) {
    if (m < 1) throw std::domain_error("construct_code: need m >= 1");
    PolarCode code{k, m, pow_u64(k.ell(), m), design_z, 0.0, {}, 0, {}};
    code.channel_p = design_erasures(k, m, design_z, cap);
    code.frozen.assign(code.n, 1);
    return code;
}

} // namespace

std::vector<Symbol> parse_symbols(const std::string& s) {
    std::vector<Symbol> v;
    v.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '0': v.push_back(Symbol::Zero); break;
        case '1': v.push_back(Symbol::One); break;
        case 'e':
        case 'E':
        case '?': v.push_back(Symbol::Erased); break;
        default: throw std::invalid_argument("symbol string: expected 0, 1 or e");
        }
    }
    return v;
}

std::string format_symbols(const std::vector<Symbol>& v) {
    std::string s;
    s.reserve(v.size());
    for (Symbol x : v) s.push_back(x == Symbol::Erased ? 'e' : (x == Symbol::One ? '1' : '0'));
    return s;
}

std::string bits_to_hex(const std::vector<uint8_t>& bits) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve((bits.size() + 3) / 4);
    for (size_t t = 0; t * 4 < bits.size(); ++t) {
        int nib = 0;
        for (size_t b = 0; b < 4 && t * 4 + b < bits.size(); ++b)
            nib |= int(bits[t * 4 + b] & 1) << b;
        out.push_back(digits[nib]);
    }
    return out;
}

std::vector<uint8_t> hex_to_bits(const std::string& hex, uint64_t n) {
    if (hex.size() != (n + 3) / 4) throw std::invalid_argument("hex bit string: wrong length");
    std::vector<uint8_t> bits(n, 0);
    for (size_t t = 0; t < hex.size(); ++t) {
        char c = hex[t];
        int nib;
        if (c >= '0' && c <= '9')
            nib = c - '0';
        else if (c >= 'a' && c <= 'f')
            nib = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F')
            nib = c - 'A' + 10;
        else
            throw std::invalid_argument("hex bit string: bad character");
        for (size_t b = 0; b < 4; ++b) {
            uint64_t idx = t * 4 + b;
            int bit = (nib >> b) & 1;
            if (idx < n)
                bits[idx] = uint8_t(bit);
            else if (bit)
                throw std::invalid_argument("hex bit string: set bit past length");
        }
    }
    return bits;
}

PolarCode construct_code(const Kernel& k, int m, double design_z, double target_pe, uint64_t cap) {
    if (!(target_pe > 0.0 && target_pe < 1.0))
        throw std::domain_error("construct_code: target_pe must lie in (0,1)");
    PolarCode code = base_code(k, m, design_z, cap);
    code.target_pe = target_pe;
    const double budget = target_pe / double(code.n);
    for (uint64_t i = 0; i < code.n; ++i) code.frozen[i] = code.channel_p[i] > budget;
    code.k_info = uint64_t(std::count(code.frozen.begin(), code.frozen.end(), uint8_t(0)));
    return code;
}

PolarCode construct_code_fixed_rate(const Kernel& k, int m, double design_z, uint64_t k_info,
                                    uint64_t cap) {
    PolarCode code = base_code(k, m, design_z, cap);
    if (k_info > code.n) throw std::domain_error("construct_code_fixed_rate: k_info exceeds n");
    std::vector<uint64_t> idx(code.n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](uint64_t a, uint64_t b) {
        if (code.channel_p[a] != code.channel_p[b]) return code.channel_p[a] < code.channel_p[b];
        return a < b;
    });
    for (uint64_t j = 0; j < k_info; ++j) code.frozen[idx[j]] = 0;
    code.k_info = k_info;
    return code;
}

std::string code_to_json(const PolarCode& code) {
    nlohmann::json j;
    j["l"] = code.kernel.ell();
    j["m"] = code.m;
    j["n"] = code.n;
    std::vector<std::string> rows;
    const BitMatrix& mat = code.kernel.matrix();
    for (int r = 0; r < mat.rows(); ++r) {
        std::string row(mat.cols(), '0');
        for (int c = 0; c < mat.cols(); ++c)
            if (mat.get(r, c)) row[c] = '1';
        rows.push_back(row);
    }
    j["kernel_rows"] = rows;
    j["design_z"] = code.design_z;
    j["target_pe"] = code.target_pe;
    j["k_info"] = code.k_info;
    j["frozen_hex"] = bits_to_hex(code.frozen);
    return j.dump(2);
}

PolarCode code_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::vector<std::string> rows = j.at("kernel_rows").get<std::vector<std::string>>();
    Kernel k(BitMatrix::from_rows(rows));
    if (k.ell() != j.at("l").get<int>()) throw std::runtime_error("code json: l mismatch");
    PolarCode code{k, j.at("m").get<int>(), j.at("n").get<uint64_t>(),
                   j.at("design_z").get<double>(), j.at("target_pe").get<double>(), {}, 0, {}};
    if (code.n != pow_u64(k.ell(), code.m)) throw std::runtime_error("code json: n != l^m");
    code.frozen = hex_to_bits(j.at("frozen_hex").get<std::string>(), code.n);
    code.k_info = uint64_t(std::count(code.frozen.begin(), code.frozen.end(), uint8_t(0)));
    if (code.k_info != j.at("k_info").get<uint64_t>())
        throw std::runtime_error("code json: k_info does not match frozen mask");
    return code;
}

std::vector<uint8_t> encode(const Kernel& k, int m, std::vector<uint8_t> u) {
    const int l = k.ell();
    const uint64_t n = pow_u64(l, m);
    if (u.size() != n) throw std::invalid_argument("encode: input length must be l^m");
    uint64_t stride = 1;
    for (int st = 0; st < m; ++st) {
        const uint64_t blk = stride * uint64_t(l);
        for (uint64_t base = 0; base < n; base += blk) {
            for (uint64_t j = 0; j < stride; ++j) {
                uint64_t w = 0;
                for (int a = 0; a < l; ++a) w |= uint64_t(u[base + j + uint64_t(a) * stride] & 1) << a;
                for (int c = 0; c < l; ++c)
                    u[base + j + uint64_t(c) * stride] = uint8_t(std::popcount(w & k.column(c)) & 1);
            }
        }
        stride = blk;
    }
    return u;
}

std::vector<uint8_t> encode(const PolarCode& code, std::vector<uint8_t> u) {
    return encode(code.kernel, code.m, std::move(u));
}

std::vector<uint8_t> expand_message(const PolarCode& code, const std::vector<uint8_t>& msg) {
    if (msg.size() != code.k_info) throw std::invalid_argument("expand_message: need k_info bits");
    std::vector<uint8_t> u(code.n, 0);
    size_t next = 0;
    for (uint64_t i = 0; i < code.n; ++i)
        if (!code.frozen[i]) u[i] = msg[next++] & 1;
    return u;
}

std::vector<Symbol> transmit_bec(const std::vector<uint8_t>& x, double z, Seed seed) {
    if (!(z >= 0.0 && z <= 1.0)) throw std::domain_error("transmit_bec: z must lie in [0,1]");
    std::mt19937_64 rng = seed.rng();
    std::bernoulli_distribution erase(z);
    std::vector<Symbol> y(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        y[i] = erase(rng) ? Symbol::Erased : symbol_from_bit(x[i]);
    return y;
}

DecodeResult sc_decode(const PolarCode& code, const std::vector<Symbol>& received,
                       const std::vector<uint8_t>* true_u) {
    if (received.size() != code.n) throw std::invalid_argument("sc_decode: received length != n");
    if (true_u && true_u->size() != code.n)
        throw std::invalid_argument("sc_decode: true_u length != n");
    DecodeResult res;
    res.u.assign(code.n, 0);
    res.erased.assign(code.n, 0);
    ScCtx ctx{code.kernel, code, true_u, res};
    std::vector<Symbol> y = received;
    ctx.node(code.m, 0, y);
    return res;
}

FerStats simulate_fer(const PolarCode& code, double z, uint64_t trials, Seed seed, bool genie) {
    FerStats st;
    st.trials = trials;
    const std::vector<uint8_t> zero_u(code.n, 0);
    const std::vector<uint8_t> x(code.n, 0); // all-zero input encodes to itself
    for (uint64_t t = 0; t < trials; ++t) {
        std::vector<Symbol> y = transmit_bec(x, z, seed.derive(t));
        DecodeResult res = sc_decode(code, y, genie ? &zero_u : nullptr);
        if (res.erased_info > 0) ++st.failures;
        for (uint64_t i = 0; i < code.n; ++i)
            if (!code.frozen[i] && !res.erased[i] && res.u[i] != 0) st.never_wrong = false;
    }
    st.fer = trials ? double(st.failures) / double(trials) : 0.0;
    return st;
}

} // namespace polarlab
