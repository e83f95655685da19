#pragma once

/**
 * @file
 * Circuit generators (Hadamard sweep, QFT, register adders), the Shor
 * period-finding pipeline with its closed-form oracles, and rank-parallel
 * sampling of basis states.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qshard/circuit.hpp"
#include "qshard/cluster.hpp"

namespace qshard {

// ---------------------------------------------------------------- generators

/// H on qubits 0..l-1 followed by a measurement block over all qubits.
Program gen_hadamard_sweep(unsigned l, bool measure = true);

/// Appends the QFT network on `qubits` (qubits[0] least significant).
/// The inverse network is the exact reversal with negated phases.
void append_qft(Program &program, std::span<const QubitId> qubits, bool inverse = false);

/// QFT fragment over `qubits` inside an l-qubit program.
Program gen_qft(unsigned l, std::span<const QubitId> qubits, bool inverse = false);

enum class AdderForm {
    /// One m-qubit register per value; the last register accumulates.
    kFullWidth,
    /// Accumulator plus a single source qubit that is loaded and unloaded
    /// bit by bit. Needs m+1 qubits for any register count.
    kStreamed,
};

/// QFT adder computing (sum of values) mod 2^width in the accumulator.
/// Throws DomainError for fewer than two values or a value >= 2^width.
Program gen_adder(unsigned width, std::span<const std::uint64_t> values,
                  AdderForm form = AdderForm::kFullWidth, bool measure = true);

/// Accumulator qubits of gen_adder, least significant first.
std::vector<QubitId> adder_accumulator(unsigned width, std::size_t n_values, AdderForm form);

/// Reads an integer from rounded expectations of `qubits` (LSB first).
/// Returns nullopt if any expectation is further than `tolerance` from 0 or 1.
std::optional<std::uint64_t> read_register(const Expectations &expectations,
                                           std::span<const QubitId> qubits,
                                           double tolerance = 1e-6);

// ---------------------------------------------------------------- number theory

std::uint64_t powmod(std::uint64_t base, std::uint64_t exponent, std::uint64_t modulus);

/// Smallest r > 0 with y^r = 1 mod g; requires gcd(y, g) = 1.
std::uint64_t classical_period(std::uint64_t y, std::uint64_t g);

bool is_prime(std::uint64_t n);

// ---------------------------------------------------------------- Shor

struct ShorParams {
    std::uint64_t g = 0;
    std::uint64_t y = 0;
    unsigned x_bits = 0;
    unsigned f_bits = 0;
    unsigned l = 0;
};

/// X is the smallest width with 2^X >= g^2, F the bit length of g.
/// With `l` given, F stays fixed and X = l - F must still cover g^2.
/// Throws DomainError for primes, powers of two and g < 4.
ShorParams choose_registers(std::uint64_t g, std::optional<unsigned> l = std::nullopt);

/// x-register qubits are 0..X-1, the f-register X..L-1.
/// Requires the state to be the uniform superposition over x with f = 0
/// (ContractError otherwise) and replaces it by the modular-exponentiation
/// state.
void apply_modexp_oracle(Cluster &cluster, const ShorParams &params);

enum class ShorStatus {
    kFactored,
    /// gcd(y, g) > 1: the factor is known without simulation.
    kNotCoprime,
    /// Odd period or y^(r/2) = -1 mod g: choose another y.
    kRetry,
    /// No sample produced a verifiable period.
    kNoPeriod,
};

const char *shor_status_name(ShorStatus status);

struct PeriodResult {
    ShorStatus status = ShorStatus::kNoPeriod;
    std::optional<std::uint64_t> r;
    std::uint64_t s = 0;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> factors;
    /// <Q_i> for i < X, Q_i being bit i of the transformed x-register.
    std::vector<double> expectations;
    /// Observed k values.
    std::vector<std::uint64_t> samples;
    std::uint64_t n_ops = 0;
};

struct ShorOptions {
    unsigned k_max = 1;
    std::uint64_t seed = 0;
    std::size_t samples = 32;
};

/// Full pipeline on `cluster`, whose topology must have params.l qubits.
PeriodResult run_shor(Cluster &cluster, const ShorParams &params, const ShorOptions &options = {});

/// x-register qubit that carries bit i of k after the transform.
QubitId shor_readout_qubit(const ShorParams &params, unsigned i);

/// Probability of observing k on the x-register for period r. X <= 31.
double analytic_pk(std::uint64_t r, unsigned x_bits, std::uint64_t k);

/// <Q_i> for all i < X.
std::vector<double> analytic_expectations(std::uint64_t r, unsigned x_bits);
double analytic_expectation(std::uint64_t r, unsigned x_bits, unsigned i);

/// Denominator of the first continued-fraction convergent p/q of k/2^X
/// with q < g and |k/2^X - p/q| <= 2^-(X+1); nullopt for k = 0.
std::optional<std::uint64_t> recover_order(std::uint64_t k, unsigned x_bits, std::uint64_t g);

/// Factor pair from an even period, or nullopt when r is odd or
/// y^(r/2) = -1 mod g.
std::optional<std::pair<std::uint64_t, std::uint64_t>> factors_from_period(std::uint64_t y,
                                                                            std::uint64_t r,
                                                                            std::uint64_t g);

// ---------------------------------------------------------------- sampling

/// Draws `count` logical basis indices with probability |amplitude|^2.
/// Throws StateError if the total probability deviates from 1 by > 1e-6.
std::vector<Index> sample_states(Cluster &cluster, std::size_t count, std::uint64_t seed);

}  // namespace qshard
