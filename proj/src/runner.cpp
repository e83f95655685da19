#include "qshard/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "qshard/error.hpp"

namespace qshard {

namespace {

constexpr double kFinalNormTolerance = 1e-10;

struct AdderSuite {
    const char *name;
    unsigned width;
    std::vector<std::uint64_t> values;
};

const std::vector<AdderSuite> &adder_suites() {
    static const std::vector<AdderSuite> suites = {
        {"adder-3x11", 11, {292, 585, 1170}},
        {"adder-2x17", 17, {26214, 104857}},
        {"adder-5x7", 7, {7, 9, 19, 35, 65}},
        {"adder-3x12", 12, {781, 1054, 3296}},
    };
    return suites;
}

const AdderSuite *find_adder(const std::string &name) {
    for (const AdderSuite &suite : adder_suites()) {
        if (name == suite.name) {
            return &suite;
        }
    }
    return nullptr;
}

Program slice(const Program &program, std::size_t begin, std::size_t end) {
    Program out(program.qubits);
    out.initial_state = program.initial_state;
    out.declared_ranks = program.declared_ranks;
    for (std::size_t i = begin; i < end; ++i) {
        out.append(program.body[i], program.line_of(i));
    }
    return out;
}

std::uint64_t count_swaps(const Program &program) {
    return static_cast<std::uint64_t>(
        std::count_if(program.body.begin(), program.body.end(),
                      [](const Instruction &i) { return std::holds_alternative<SwapOp>(i); }));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double total_cpu(const std::vector<RankRecord> &records) {
    double sum = 0.0;
    for (const RankRecord &r : records) {
        sum += r.cpu_seconds;
    }
    return sum;
}

RunReport base_report(const RankTopology &topology, const RunOptions &options) {
    RunReport report;
    report.l = topology.total_qubits;
    report.n_ranks = topology.n_ranks();
    report.k_max = options.k_max;
    report.chunk_count = options.chunk_count;
    report.seed = options.seed;
    return report;
}

void check_final_norm(double norm) {
    if (!(std::abs(norm - 1.0) <= kFinalNormTolerance)) {
        throw StateError("final state norm " + std::to_string(norm) + " deviates from 1");
    }
}

}  // namespace

RunReport run_program(const Program &program, const RunOptions &options) {
    const std::uint64_t n_ranks = options.n_ranks.value_or(program.declared_ranks.value_or(1));
    const RankTopology topology = RankTopology::for_ranks(program.qubits, n_ranks);
    check_structure(program);

    Program executable = program;
    if (program.has_swaps()) {
        if (const auto diag = validate_locality(program, topology.local_qubits)) {
            throw LocalityError((diag->line > 0 ? "line " + std::to_string(diag->line) + ": "
                                                : std::string()) +
                                diag->message);
        }
    } else {
        executable = insert_swaps(program, topology.local_qubits, options.k_max);
    }

    const auto first_measure = std::find_if(
        executable.body.begin(), executable.body.end(),
        [](const Instruction &i) { return std::holds_alternative<BeginMeasurement>(i); });
    const auto split = static_cast<std::size_t>(first_measure - executable.body.begin());
    const Program gates = slice(executable, 0, split);
    const Program tail = slice(executable, split, executable.body.size());

    Cluster cluster(topology, {options.chunk_count, options.timeout});
    cluster.initialize(program.initial_state);

    RunReport report = base_report(topology, options);
    auto start = std::chrono::steady_clock::now();
    cluster.execute(gates);
    const double gate_wall = seconds_since(start);
    const std::vector<RankRecord> gate_records = cluster.records();

    start = std::chrono::steady_clock::now();
    cluster.execute(tail);
    const double tail_wall = seconds_since(start);

    report.norm = cluster.global_norm();
    check_final_norm(report.norm);

    report.ranks = cluster.records();
    if (options.gates_only) {
        for (std::size_t r = 0; r < report.ranks.size(); ++r) {
            report.ranks[r].cpu_seconds = gate_records[r].cpu_seconds;
        }
        report.wall_seconds = gate_wall;
    } else {
        report.wall_seconds = gate_wall + tail_wall;
    }
    report.cpu_seconds = total_cpu(report.ranks);
    report.n_ops = count_operations(executable);
    report.n_swaps = count_swaps(executable);
    for (const auto &[qubit, value] : cluster.expectations()) {
        report.expectations[qubit] = std::clamp(value, 0.0, 1.0);
    }
    report.samples = sample_states(cluster, options.samples, options.seed);
    return report;
}

ShorJob run_shor_job(std::uint64_t g, std::uint64_t y, const RunOptions &options,
                     std::optional<unsigned> l) {
    ShorJob job;
    job.params = choose_registers(g, l);
    job.params.y = y;
    const std::uint64_t n_ranks = options.n_ranks.value_or(1);
    const RankTopology topology = RankTopology::for_ranks(job.params.l, n_ranks);
    job.report = base_report(topology, options);
    if (y < 2 || y >= g) {
        throw DomainError("base y=" + std::to_string(y) + " must satisfy 1 < y < " +
                          std::to_string(g));
    }
    if (std::gcd(y, g) != 1) {
        job.result.status = ShorStatus::kNotCoprime;
        const std::uint64_t d = std::gcd(y, g);
        job.result.factors = std::pair{std::min(d, g / d), std::max(d, g / d)};
        job.report.norm = 1.0;
        return job;
    }

    Cluster cluster(topology, {options.chunk_count, options.timeout});
    ShorOptions shor_options;
    shor_options.k_max = options.k_max;
    shor_options.seed = options.seed;
    if (options.samples > 0) {
        shor_options.samples = options.samples;
    }
    const auto start = std::chrono::steady_clock::now();
    job.result = run_shor(cluster, job.params, shor_options);
    job.report.wall_seconds = seconds_since(start);
    job.report.norm = cluster.global_norm();
    check_final_norm(job.report.norm);
    job.report.ranks = cluster.records();
    job.report.cpu_seconds = total_cpu(job.report.ranks);
    job.report.n_ops = job.result.n_ops;
    for (unsigned i = 0; i < job.params.x_bits; ++i) {
        job.report.expectations[i] = std::clamp(job.result.expectations[i], 0.0, 1.0);
    }
    job.report.samples = job.result.samples;
    return job;
}

double BenchRow::efficiency() const {
    return report.cpu_seconds > 0.0
               ? static_cast<double>(report.n_ranks) * report.wall_seconds / report.cpu_seconds
               : 0.0;
}

double BenchRow::cpu_per_op() const {
    const double denominator = static_cast<double>(report.n_ranks) * static_cast<double>(report.n_ops);
    return denominator > 0.0 ? report.cpu_seconds / denominator : 0.0;
}

const std::vector<std::string> &bench_suites() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out = {"hadamard", "qft"};
        for (const AdderSuite &suite : adder_suites()) {
            out.emplace_back(suite.name);
        }
        return out;
    }();
    return names;
}

Program bench_program(const std::string &suite, const BenchOptions &options) {
    if (suite == "hadamard") {
        return gen_hadamard_sweep(options.qubits);
    }
    if (suite == "qft") {
        std::vector<QubitId> qubits(options.qubits);
        std::iota(qubits.begin(), qubits.end(), 0U);
        Program program = gen_qft(options.qubits, qubits);
        program.measure(qubits);
        return program;
    }
    if (const AdderSuite *adder = find_adder(suite)) {
        return gen_adder(adder->width, adder->values, AdderForm::kStreamed);
    }
    throw DomainError("unknown bench suite '" + suite + "'");
}

std::vector<BenchRow> run_bench(const std::string &suite, std::span<const std::uint64_t> ranks,
                                const BenchOptions &options) {
    const Program program = bench_program(suite, options);
    const AdderSuite *adder = find_adder(suite);
    std::vector<BenchRow> rows;
    for (std::uint64_t n : ranks) {
        RunOptions run;
        run.n_ranks = n;
        run.k_max = options.k_max;
        run.chunk_count = options.chunk_count;
        run.gates_only = options.gates_only;
        BenchRow row{suite, run_program(program, run), std::nullopt, std::nullopt};
        if (adder != nullptr) {
            const auto acc = adder_accumulator(adder->width, adder->values.size(), AdderForm::kStreamed);
            row.result = read_register(row.report.expectations, acc);
            row.expected = std::accumulate(adder->values.begin(), adder->values.end(),
                                           std::uint64_t{0}) %
                           pow2(adder->width);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_bench(std::span<const BenchRow> rows) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %4s %6s %6s %10s %10s %12s %14s  %s\n", "suite", "L",
                  "N", "N_O", "t_E[s]", "t_CPU[s]", "N*t_E/t_CPU", "t_CPU/(N*N_O)", "result");
    out << line;
    for (const BenchRow &row : rows) {
        std::string result = "-";
        if (row.expected) {
            result = (row.result ? std::to_string(*row.result) : std::string("unreadable")) +
                     " (expected " + std::to_string(*row.expected) + ")";
        }
        std::snprintf(line, sizeof line, "%-12s %4u %6llu %6llu %10.4f %10.4f %12.3f %14.3e  %s\n",
                      row.suite.c_str(), row.report.l,
                      static_cast<unsigned long long>(row.report.n_ranks),
                      static_cast<unsigned long long>(row.report.n_ops), row.report.wall_seconds,
                      row.report.cpu_seconds, row.efficiency(), row.cpu_per_op(), result.c_str());
        out << line;
    }
    return out.str();
}

}  // namespace qshard
