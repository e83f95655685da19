#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qshard/algorithms.hpp"
#include "qshard/error.hpp"

namespace qshard {

namespace {

__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;

constexpr double kContractTolerance = 1e-9;

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) {
                n /= p;
            }
        }
    }
    if (n > 1) {
        out.push_back(n);
    }
    return out;
}

// Strips surplus factors from a multiple of the order.
std::uint64_t reduce_to_order(std::uint64_t y, std::uint64_t multiple, std::uint64_t g) {
    std::uint64_t r = multiple;
    for (std::uint64_t p : prime_factors(multiple)) {
        while (r % p == 0 && powmod(y, r / p, g) == 1) {
            r /= p;
        }
    }
    return r;
}

void check_params(const Cluster &cluster, const ShorParams &params) {
    if (cluster.topology().total_qubits != params.l || params.x_bits + params.f_bits != params.l) {
        throw DomainError("cluster has " + std::to_string(cluster.topology().total_qubits) +
                          " qubits, Shor parameters need " + std::to_string(params.l));
    }
    if (params.y < 2 || params.y >= params.g) {
        throw DomainError("base y=" + std::to_string(params.y) + " must satisfy 1 < y < " +
                          std::to_string(params.g));
    }
}

}  // namespace

std::uint64_t powmod(std::uint64_t base, std::uint64_t exponent, std::uint64_t modulus) {
    if (modulus == 0) {
        throw DomainError("modulus must be positive");
    }
    std::uint64_t result = 1 % modulus;
    std::uint64_t b = base % modulus;
    while (exponent > 0) {
        if (exponent & 1U) {
            result = static_cast<std::uint64_t>(u128{result} * b % modulus);
        }
        b = static_cast<std::uint64_t>(u128{b} * b % modulus);
        exponent >>= 1U;
    }
    return result;
}

std::uint64_t classical_period(std::uint64_t y, std::uint64_t g) {
    if (g < 2 || std::gcd(y, g) != 1) {
        throw DomainError("y=" + std::to_string(y) + " is not a unit mod " + std::to_string(g));
    }
    std::uint64_t value = y % g;
    std::uint64_t r = 1;
    while (value != 1) {
        value = static_cast<std::uint64_t>(u128{value} * y % g);
        ++r;
    }
    return r;
}

bool is_prime(std::uint64_t n) {
    if (n < 2) {
        return false;
    }
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            return false;
        }
    }
    return true;
}

ShorParams choose_registers(std::uint64_t g, std::optional<unsigned> l) {
    if (g < 4 || g >= pow2(31)) {
        throw DomainError("G=" + std::to_string(g) + " out of range");
    }
    if (is_power_of_two(g)) {
        throw DomainError("G=" + std::to_string(g) + " is a power of two");
    }
    if (is_prime(g)) {
        throw DomainError("G=" + std::to_string(g) + " is prime");
    }
    ShorParams params;
    params.g = g;
    params.f_bits = static_cast<unsigned>(std::bit_width(g));
    const std::uint64_t g2 = g * g;
    if (l) {
        if (*l <= params.f_bits || *l - params.f_bits >= 62 ||
            pow2(*l - params.f_bits) < g2) {
            throw DomainError(std::to_string(*l) + " qubits cannot hold G=" + std::to_string(g));
        }
        params.x_bits = *l - params.f_bits;
    } else {
        params.x_bits = static_cast<unsigned>(std::bit_width(g2 - 1));
    }
    params.l = params.x_bits + params.f_bits;
    return params;
}

QubitId shor_readout_qubit(const ShorParams &params, unsigned i) {
    return params.x_bits - 1 - i;
}

void apply_modexp_oracle(Cluster &cluster, const ShorParams &params) {
    check_params(cluster, params);
    if (std::gcd(params.y, params.g) != 1) {
        throw DomainError("y and G share a factor");
    }
    std::vector<std::uint32_t> table(pow2(params.x_bits));
    std::uint64_t value = 1;
    for (auto &entry : table) {
        entry = static_cast<std::uint32_t>(value);
        value = value * params.y % params.g;
    }
    const double amp = std::pow(2.0, -0.5 * params.x_bits);
    const Index x_mask = pow2(params.x_bits) - 1;
    cluster.spmd([&](RankContext &ctx) {
        const AddressDecoder decode(ctx.sigma, ctx.rank);
        auto amps = ctx.shard.amplitudes();
        for (Index a = 0; a < amps.size(); ++a) {
            const Index g = decode(a);
            const Index f = g >> params.x_bits;
            const double before = f == 0 ? amp : 0.0;
            if (std::abs(amps[a] - before) > kContractTolerance) {
                throw ContractError("oracle input is not the uniform x-register state (index " +
                                    std::to_string(g) + ")");
            }
            amps[a] = f == table[g & x_mask] ? amp : 0.0;
        }
    });
}

const char *shor_status_name(ShorStatus status) {
    switch (status) {
    case ShorStatus::kFactored: return "factored";
    case ShorStatus::kNotCoprime: return "not-coprime";
    case ShorStatus::kRetry: return "retry";
    case ShorStatus::kNoPeriod: return "no-period";
    }
    return "unknown";
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> factors_from_period(std::uint64_t y,
                                                                            std::uint64_t r,
                                                                            std::uint64_t g) {
    if (r % 2 != 0) {
        return std::nullopt;
    }
    const std::uint64_t h = powmod(y, r / 2, g);
    if (h == g - 1 || h == 1) {
        return std::nullopt;
    }
    for (std::uint64_t candidate : {std::gcd(h - 1, g), std::gcd(h + 1, g)}) {
        if (candidate > 1 && candidate < g) {
            const std::uint64_t other = g / candidate;
            return std::pair{std::min(candidate, other), std::max(candidate, other)};
        }
    }
    return std::nullopt;
}

PeriodResult run_shor(Cluster &cluster, const ShorParams &params, const ShorOptions &options) {
    check_params(cluster, params);
    PeriodResult result;
    const std::uint64_t common = std::gcd(params.y, params.g);
    if (common != 1) {
        result.status = ShorStatus::kNotCoprime;
        result.factors = std::pair{std::min(common, params.g / common),
                                   std::max(common, params.g / common)};
        return result;
    }

    std::vector<QubitId> x_qubits(params.x_bits);
    std::iota(x_qubits.begin(), x_qubits.end(), 0U);

    cluster.initialize(0);
    cluster.clear_expectations();
    Program hadamards(params.l);
    for (QubitId q : x_qubits) {
        hadamards.gate(GateKind::kH, {q});
    }
    cluster.execute_logical(hadamards, options.k_max);
    apply_modexp_oracle(cluster, params);

    Program transform(params.l);
    append_qft(transform, x_qubits);
    transform.measure(x_qubits);
    cluster.execute_logical(transform, options.k_max);
    result.n_ops = count_operations(hadamards) + count_operations(transform);

    for (unsigned i = 0; i < params.x_bits; ++i) {
        result.expectations.push_back(cluster.expectations().at(shor_readout_qubit(params, i)));
    }

    const Index x_mask = pow2(params.x_bits) - 1;
    for (Index sample : sample_states(cluster, options.samples, options.seed)) {
        result.samples.push_back(reverse_bits(sample & x_mask, params.x_bits));
    }

    std::uint64_t combined = 1;
    for (std::uint64_t k : result.samples) {
        const auto q = recover_order(k, params.x_bits, params.g);
        if (!q) {
            continue;
        }
        const std::uint64_t candidate = std::lcm(combined, *q);
        if (candidate >= params.g) {
            continue;
        }
        combined = candidate;
        if (powmod(params.y, combined, params.g) == 1) {
            result.r = reduce_to_order(params.y, combined, params.g);
            break;
        }
    }
    if (!result.r) {
        result.status = ShorStatus::kNoPeriod;
        return result;
    }
    result.s = pow2(params.x_bits) / *result.r;
    result.factors = factors_from_period(params.y, *result.r, params.g);
    result.status = result.factors ? ShorStatus::kFactored : ShorStatus::kRetry;
    return result;
}

double analytic_pk(std::uint64_t r, unsigned x_bits, std::uint64_t k) {
    if (x_bits == 0 || x_bits > 31 || r == 0 || r >= pow2(32)) {
        throw DomainError("analytic_pk needs 1 <= X <= 31 and 1 <= r < 2^32");
    }
    const std::uint64_t n_states = pow2(x_bits);
    if (k >= n_states) {
        throw DomainError("k out of range");
    }
    const std::uint64_t s = n_states / r;
    const std::uint64_t n = k * r % n_states;
    double ratio1 = 0.0;
    double ratio2 = 0.0;
    if (n == 0) {
        ratio1 = static_cast<double>(s) * static_cast<double>(s);
        ratio2 = static_cast<double>(2 * s + 1);
    } else {
        const double unit = std::numbers::pi / static_cast<double>(n_states);
        const double sin_theta = std::sin(unit * static_cast<double>(n));
        const double sin_s = std::sin(unit * static_cast<double>(s * n % n_states));
        const double sin_2s1 = std::sin(unit * static_cast<double>((2 * s + 1) * n % (2 * n_states)));
        ratio1 = sin_s * sin_s / (sin_theta * sin_theta);
        ratio2 = sin_2s1 / sin_theta;
    }
    const double total = static_cast<double>(n_states);
    const double rest = static_cast<double>(n_states - r * s);
    return (static_cast<double>(r) * ratio1 + rest * ratio2) / (total * total);
}

std::vector<double> analytic_expectations(std::uint64_t r, unsigned x_bits) {
    std::vector<double> out(x_bits, 0.0);
    const std::uint64_t n_states = pow2(x_bits);
    for (std::uint64_t k = 1; k < n_states; ++k) {
        const double p = analytic_pk(r, x_bits, k);
        for (std::uint64_t bits = k; bits != 0; bits &= bits - 1) {
            out[static_cast<unsigned>(std::countr_zero(bits))] += p;
        }
    }
    return out;
}

double analytic_expectation(std::uint64_t r, unsigned x_bits, unsigned i) {
    if (i >= x_bits) {
        throw DomainError("qubit index out of range");
    }
    return analytic_expectations(r, x_bits)[i];
}

std::optional<std::uint64_t> recover_order(std::uint64_t k, unsigned x_bits, std::uint64_t g) {
    if (x_bits == 0 || x_bits > 32) {
        throw DomainError("recover_order supports 1 <= X <= 32");
    }
    const std::uint64_t n_states = pow2(x_bits);
    if (k >= n_states) {
        throw DomainError("k out of range");
    }
    if (k == 0) {
        return std::nullopt;
    }
    std::uint64_t num = k;
    std::uint64_t den = n_states;
    std::uint64_t p_prev = 1, p_prev2 = 0;
    std::uint64_t q_prev = 0, q_prev2 = 1;
    while (den != 0) {
        const std::uint64_t a = num / den;
        const std::uint64_t p = a * p_prev + p_prev2;
        const std::uint64_t q = a * q_prev + q_prev2;
        if (q >= g) {
            return std::nullopt;
        }
        const i128 error = static_cast<i128>(k) * q - static_cast<i128>(p) * n_states;
        if (2 * (error < 0 ? -error : error) <= static_cast<i128>(q)) {
            return q;
        }
        p_prev2 = p_prev;
        p_prev = p;
        q_prev2 = q_prev;
        q_prev = q;
        const std::uint64_t rem = num - a * den;
        num = den;
        den = rem;
    }
    return std::nullopt;
}

}  // namespace qshard
