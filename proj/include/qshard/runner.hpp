#pragma once

/**
 * @file
 * End-to-end jobs behind the command-line tool: run a program, run the Shor
 * pipeline, run a benchmark suite.
 */

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qshard/algorithms.hpp"
#include "qshard/circuit.hpp"
#include "qshard/report.hpp"

namespace qshard {

struct RunOptions {
    /// Falls back to the program's MPIPROCESSES line, then to 1.
    std::optional<std::uint64_t> n_ranks;
    unsigned k_max = 1;
    unsigned chunk_count = 4;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    /// Time only the instructions before the first measurement block.
    bool gates_only = false;
    std::chrono::milliseconds timeout{30000};
};

/// Compiles `program` if it has no SWAP commands, otherwise checks its
/// locality, then executes it. Throws StateError if the final norm deviates
/// from 1 by more than 1e-10.
RunReport run_program(const Program &program, const RunOptions &options = {});

struct ShorJob {
    ShorParams params;
    PeriodResult result;
    /// Expectations are keyed by the bit index i of k, not by qubit id.
    RunReport report;
};

/// options.samples == 0 selects the ShorOptions default sample count.
ShorJob run_shor_job(std::uint64_t g, std::uint64_t y, const RunOptions &options,
                     std::optional<unsigned> l = std::nullopt);

struct BenchOptions {
    /// Width of the hadamard and qft suites.
    unsigned qubits = 20;
    unsigned k_max = 1;
    unsigned chunk_count = 4;
    bool gates_only = false;
};

struct BenchRow {
    std::string suite;
    RunReport report;
    std::optional<std::uint64_t> result;
    std::optional<std::uint64_t> expected;

    /// N t_E / t_CPU
    double efficiency() const;
    /// t_CPU / (N N_O)
    double cpu_per_op() const;
};

const std::vector<std::string> &bench_suites();

/// Logical program of a suite; adders use the streamed form.
Program bench_program(const std::string &suite, const BenchOptions &options);

std::vector<BenchRow> run_bench(const std::string &suite, std::span<const std::uint64_t> ranks,
                                const BenchOptions &options = {});

std::string format_bench(std::span<const BenchRow> rows);

}  // namespace qshard
