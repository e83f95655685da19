// qshard: command-line front end for the distributed state-vector simulator.
//
// Exit codes: 0 ok, 1 Shor found no factors, 2 usage or I/O, 3 parse,
// 4 compile/capacity, 5 locality, 6 domain, 7 state/contract,
// 8 protocol/timeout, 9 resource.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qshard/algorithms.hpp"
#include "qshard/circuit.hpp"
#include "qshard/error.hpp"
#include "qshard/report.hpp"
#include "qshard/runner.hpp"

namespace {

using namespace qshard;

constexpr int kExitNoFactors = 1;
constexpr int kExitUsage = 2;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code(ErrorCategory category) {
    switch (category) {
    case ErrorCategory::kParse: return 3;
    case ErrorCategory::kCompile:
    case ErrorCategory::kCapacity: return 4;
    case ErrorCategory::kLocality: return 5;
    case ErrorCategory::kDomain: return 6;
    case ErrorCategory::kState:
    case ErrorCategory::kContract: return 7;
    case ErrorCategory::kProtocol:
    case ErrorCategory::kTimeout: return 8;
    case ErrorCategory::kResource: return 9;
    }
    return kExitUsage;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_output(const std::string &path, const std::string &text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out || !(out << text)) {
        throw IoError("cannot write '" + path + "'");
    }
}

struct Source {
    std::string path;
    Program program;
};

Source load_program(const std::string &path) {
    return {path, parse_program(read_file(path))};
}

unsigned local_qubits_for(const Program &program, std::optional<unsigned> local,
                          std::optional<std::uint64_t> ranks) {
    if (local) {
        if (*local > program.qubits) {
            throw DomainError("local qubit count exceeds the program's " +
                              std::to_string(program.qubits) + " qubits");
        }
        return *local;
    }
    const std::uint64_t n = ranks.value_or(program.declared_ranks.value_or(1));
    return RankTopology::for_ranks(program.qubits, n).local_qubits;
}

std::vector<std::uint64_t> parse_list(const std::string &text) {
    std::vector<std::uint64_t> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(item, &used);
        if (used != item.size()) {
            throw DomainError("malformed list entry '" + item + "'");
        }
        out.push_back(value);
    }
    if (out.empty()) {
        throw DomainError("empty list");
    }
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Distributed state-vector quantum computer simulator"};
    app.require_subcommand(1);

    RunOptions run_options;
    std::string input;
    std::string report_path;
    std::string output;
    std::optional<unsigned> local_qubits;
    std::optional<std::uint64_t> ranks;

    auto add_run_flags = [&](CLI::App *cmd) {
        cmd->add_option("--kmax", run_options.k_max, "Maximum pairs per SWAP")
            ->check(CLI::Range(1U, 31U));
        cmd->add_option("--chunks", run_options.chunk_count, "Messages per partner exchange")
            ->check(CLI::Range(1U, 1U << 20U));
        cmd->add_option("--seed", run_options.seed, "Sampling seed");
        cmd->add_option("--report", report_path, "Write a JSON report to this path");
    };

    auto *run = app.add_subcommand("run", "Execute a .qc program");
    run->add_option("file", input, "Program file")->required();
    run->add_option("--ranks", ranks, "Number of ranks (power of two)");
    run->add_option("--samples", run_options.samples, "Basis states to sample");
    run->add_flag("--gates-only", run_options.gates_only, "Exclude measurement from timings");
    add_run_flags(run);

    std::uint64_t shor_g = 0;
    std::uint64_t shor_y = 0;
    std::optional<unsigned> shor_l;
    std::size_t shor_samples = 32;
    auto *shor = app.add_subcommand("shor", "Run Shor period finding for G with base y");
    shor->add_option("G", shor_g, "Number to factor")->required();
    shor->add_option("y", shor_y, "Base, 1 < y < G")->required();
    shor->add_option("--ranks", ranks, "Number of ranks (power of two)");
    shor->add_option("--samples", shor_samples, "Basis states to sample");
    shor->add_option("--qubits", shor_l, "Total qubits (default from G)");
    add_run_flags(shor);

    std::string suite;
    std::string rank_list = "1,2,4";
    BenchOptions bench_options;
    auto *bench = app.add_subcommand("bench", "Time a benchmark suite over rank counts");
    bench->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(bench_suites()));
    bench->add_option("--ranks", rank_list, "Comma-separated rank counts");
    bench->add_option("--qubits", bench_options.qubits, "Width of hadamard and qft suites")
        ->check(CLI::Range(1U, 40U));
    bench->add_option("--kmax", bench_options.k_max, "Maximum pairs per SWAP")
        ->check(CLI::Range(1U, 31U));
    bench->add_option("--chunks", bench_options.chunk_count, "Messages per partner exchange")
        ->check(CLI::Range(1U, 1U << 20U));
    bench->add_flag("--gates-only", bench_options.gates_only, "Exclude measurement from timings");
    bench->add_option("--report", report_path, "Write a JSON array of reports to this path");

    unsigned k_max = 1;
    auto *compile = app.add_subcommand("compile", "Insert SWAP commands into a logical program");
    compile->add_option("file", input, "Program file")->required();
    compile->add_option("--local-qubits,-m", local_qubits, "Local qubits per rank");
    compile->add_option("--ranks", ranks, "Number of ranks (alternative to -m)");
    compile->add_option("--kmax", k_max, "Maximum pairs per SWAP")->check(CLI::Range(1U, 31U));
    compile->add_option("-o,--output", output, "Output path (default stdout)");

    auto *validate = app.add_subcommand("validate", "Check a program's locality symbolically");
    validate->add_option("file", input, "Program file")->required();
    validate->add_option("--local-qubits,-m", local_qubits, "Local qubits per rank");
    validate->add_option("--ranks", ranks, "Number of ranks (alternative to -m)");

    auto *gen = app.add_subcommand("gen", "Emit a generated program");
    gen->require_subcommand(1);
    gen->add_option("-o,--output", output, "Output path (default stdout)");
    unsigned gen_qubits = 0;
    auto *gen_h = gen->add_subcommand("hadamard", "H on every qubit, then measure");
    gen_h->fallthrough();
    gen_h->add_option("qubits", gen_qubits)->required()->check(CLI::Range(1U, 62U));
    auto *gen_qft = gen->add_subcommand("qft", "QFT on every qubit, then measure");
    gen_qft->fallthrough();
    gen_qft->add_option("qubits", gen_qubits)->required()->check(CLI::Range(1U, 62U));
    unsigned adder_width = 0;
    std::string adder_values;
    bool streamed = false;
    auto *gen_add = gen->add_subcommand("adder", "QFT register adder");
    gen_add->fallthrough();
    gen_add->add_option("--width", adder_width, "Register width")->required();
    gen_add->add_option("--values", adder_values, "Comma-separated register values")->required();
    gen_add->add_flag("--streamed", streamed, "Accumulator plus one reusable source qubit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (run->parsed()) {
            const Source source = load_program(input);
            run_options.n_ranks = ranks;
            const RunReport report = run_program(source.program, run_options);
            std::cout << format_report(report);
            if (!report_path.empty()) {
                write_output(report_path, report_json(report).dump(2) + "\n");
            }
        } else if (shor->parsed()) {
            run_options.n_ranks = ranks;
            run_options.samples = shor_samples;
            const ShorJob job = run_shor_job(shor_g, shor_y, run_options, shor_l);
            const PeriodResult &result = job.result;
            std::cout << "G " << job.params.g << "  y " << job.params.y << "  X "
                      << job.params.x_bits << "  F " << job.params.f_bits << "  L "
                      << job.params.l << '\n';
            std::cout << "status " << shor_status_name(result.status) << '\n';
            if (result.status == ShorStatus::kNotCoprime) {
                std::cout << "gcd(y, G) = " << result.factors->first << '\n';
            } else {
                std::cout << format_report(job.report);
            }
            if (result.r) {
                std::cout << "r " << *result.r << "  s " << result.s << '\n';
            }
            if (result.factors) {
                std::cout << "factors " << result.factors->first << " " << result.factors->second
                          << '\n';
            }
            if (!report_path.empty()) {
                nlohmann::json doc = report_json(job.report);
                doc["shor"] = {{"g", job.params.g},
                               {"y", job.params.y},
                               {"x_bits", job.params.x_bits},
                               {"f_bits", job.params.f_bits},
                               {"status", shor_status_name(result.status)},
                               {"r", result.r ? nlohmann::json(*result.r) : nlohmann::json()},
                               {"s", result.s},
                               {"q_expectations", result.expectations},
                               {"factors", result.factors
                                               ? nlohmann::json::array({result.factors->first,
                                                                        result.factors->second})
                                               : nlohmann::json()}};
                write_output(report_path, doc.dump(2) + "\n");
            }
            if (!result.factors) {
                return kExitNoFactors;
            }
        } else if (bench->parsed()) {
            const std::vector<std::uint64_t> counts = parse_list(rank_list);
            const std::vector<BenchRow> rows = run_bench(suite, counts, bench_options);
            std::cout << format_bench(rows);
            if (!report_path.empty()) {
                nlohmann::json doc = nlohmann::json::array();
                for (const BenchRow &row : rows) {
                    nlohmann::json entry = report_json(row.report);
                    entry["suite"] = row.suite;
                    entry["efficiency"] = row.efficiency();
                    entry["cpu_per_op"] = row.cpu_per_op();
                    doc.push_back(std::move(entry));
                }
                write_output(report_path, doc.dump(2) + "\n");
            }
            for (const BenchRow &row : rows) {
                if (row.expected && row.result != row.expected) {
                    std::cerr << "qshard: state error: " << row.suite << " produced a wrong sum\n";
                    return exit_code(ErrorCategory::kState);
                }
            }
        } else if (compile->parsed()) {
            const Source source = load_program(input);
            const unsigned m = local_qubits_for(source.program, local_qubits, ranks);
            const Program compiled = insert_swaps(source.program, m, k_max);
            write_output(output, serialize_program(compiled) + "\n");
        } else if (validate->parsed()) {
            const Source source = load_program(input);
            const unsigned m = local_qubits_for(source.program, local_qubits, ranks);
            if (const auto diag = validate_locality(source.program, m)) {
                std::cerr << source.path << ":" << diag->line << ":1: locality error: "
                          << diag->message << '\n';
                return exit_code(ErrorCategory::kLocality);
            }
            std::cout << "ok: " << source.path << " is locality-valid for m=" << m << '\n';
        } else if (gen->parsed()) {
            Program program;
            if (gen_h->parsed()) {
                program = gen_hadamard_sweep(gen_qubits);
            } else if (gen_qft->parsed()) {
                BenchOptions options;
                options.qubits = gen_qubits;
                program = bench_program("qft", options);
            } else {
                const std::vector<std::uint64_t> values = parse_list(adder_values);
                program = gen_adder(adder_width, values,
                                    streamed ? AdderForm::kStreamed : AdderForm::kFullWidth);
            }
            write_output(output, serialize_program(program) + "\n");
        }
    } catch (const ParseError &e) {
        std::cerr << input << ":" << e.line() << ":" << e.column() << ": parse error: " << e.message()
                  << '\n';
        return exit_code(e.category());
    } catch (const Error &e) {
        std::cerr << "qshard: " << category_name(e.category()) << " error: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const IoError &e) {
        std::cerr << "qshard: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument &e) {
        std::cerr << "qshard: malformed number: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::out_of_range &e) {
        std::cerr << "qshard: number out of range: " << e.what() << '\n';
        return kExitUsage;
    }
    return 0;
}
