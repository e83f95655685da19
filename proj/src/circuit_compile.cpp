#include <algorithm>
#include <string>

#include "qshard/circuit.hpp"
#include "qshard/error.hpp"

namespace qshard {

namespace {

std::string where(const Program &program, std::size_t index) {
    const int line = program.line_of(index);
    return line > 0 ? "line " + std::to_string(line) : "instruction " + std::to_string(index + 1);
}

class SwapInserter {
  public:
    SwapInserter(const Program &logical, const QubitPermutation &start, unsigned k_max,
                 const EvictionPolicy &policy)
        : logical_(logical), sigma_(start), policy_(policy), out_(logical.qubits) {
        out_.initial_state = logical.initial_state;
        out_.declared_ranks = logical.declared_ranks;
        capacity_ = std::min(start.local_qubits(), start.nonlocal_qubits());
        batch_ = std::max(1U, std::min(k_max, capacity_));
    }

    CompiledProgram run() {
        for (std::size_t i = 0; i < logical_.body.size(); ++i) {
            index_ = i;
            const Instruction &instruction = logical_.body[i];
            if (const auto *gate = std::get_if<GateOp>(&instruction)) {
                localize_gate(*gate);
                emit(instruction);
            } else if (const auto *measure = std::get_if<DoMeasurement>(&instruction)) {
                localize_measurement(*measure);
            } else if (std::holds_alternative<SwapOp>(instruction)) {
                throw CompileError(where(logical_, i) +
                                   ": logical program already contains SWAP commands");
            } else {
                emit(instruction);
            }
        }
        return {std::move(out_), std::move(sigma_)};
    }

  private:
    void emit(Instruction instruction) { out_.append(std::move(instruction), logical_.line_of(index_)); }

    std::vector<QubitId> nonlocal_of(const std::vector<QubitId> &qubits) const {
        std::vector<QubitId> remote;
        for (QubitId q : qubits) {
            if (!sigma_.is_local(q)) {
                remote.push_back(q);
            }
        }
        std::sort(remote.begin(), remote.end());
        return remote;
    }

    void relocalize(std::span<const QubitId> needed, std::span<const QubitId> pinned) {
        try {
            PlannedExchange planned = plan_exchange(sigma_, needed, policy_, pinned);
            SwapOp swap;
            swap.pairs = planned.qubit_pairs;
            emit(std::move(swap));
            sigma_ = std::move(planned.sigma);
        } catch (const CapacityError &e) {
            throw CompileError(where(logical_, index_) + ": " + e.what());
        }
    }

    void localize_gate(const GateOp &gate) {
        if (gate.qubits.size() > sigma_.local_qubits()) {
            throw CompileError(where(logical_, index_) + ": " + gate_mnemonic(gate.kind) +
                               " needs " + std::to_string(gate.qubits.size()) +
                               " local qubits but only " +
                               std::to_string(sigma_.local_qubits()) + " exist");
        }
        const std::vector<QubitId> remote = nonlocal_of(gate.qubits);
        if (remote.size() > capacity_) {
            throw CompileError(where(logical_, index_) + ": " + std::to_string(remote.size()) +
                               " relocalizations exceed min(m, L-m) = " +
                               std::to_string(capacity_));
        }
        for (std::size_t start = 0; start < remote.size(); start += batch_) {
            const std::size_t count = std::min<std::size_t>(batch_, remote.size() - start);
            relocalize(std::span(remote).subspan(start, count), gate.qubits);
        }
    }

    void localize_measurement(const DoMeasurement &measure) {
        std::vector<QubitId> local;
        for (QubitId q : measure.qubits) {
            if (sigma_.is_local(q)) {
                local.push_back(q);
            }
        }
        if (!local.empty()) {
            emit(DoMeasurement{local});
        }
        std::vector<QubitId> remote;
        for (QubitId q : measure.qubits) {
            if (!sigma_.is_local(q)) {
                remote.push_back(q);
            }
        }
        for (std::size_t start = 0; start < remote.size(); start += batch_) {
            const std::size_t count = std::min<std::size_t>(batch_, remote.size() - start);
            const auto group = std::span(remote).subspan(start, count);
            relocalize(group, group);
            emit(DoMeasurement{{group.begin(), group.end()}});
        }
    }

    const Program &logical_;
    QubitPermutation sigma_;
    const EvictionPolicy &policy_;
    Program out_;
    unsigned capacity_ = 0;
    unsigned batch_ = 1;
    std::size_t index_ = 0;
};

}  // namespace

CompiledProgram compile_from(const Program &logical, const QubitPermutation &start,
                             unsigned k_max, const EvictionPolicy &policy) {
    if (k_max == 0) {
        throw DomainError("k_max must be at least 1");
    }
    if (start.total_qubits() != logical.qubits) {
        throw DomainError("permutation covers " + std::to_string(start.total_qubits()) +
                          " qubits, program has " + std::to_string(logical.qubits));
    }
    check_structure(logical);
    return SwapInserter(logical, start, k_max, policy).run();
}

Program insert_swaps(const Program &logical, unsigned local_qubits, unsigned k_max,
                     const EvictionPolicy &policy) {
    return compile_from(logical, QubitPermutation::identity(logical.qubits, local_qubits), k_max,
                        policy)
        .program;
}

std::optional<LocalityDiagnostic> validate_locality(const Program &program,
                                                    unsigned local_qubits) {
    if (local_qubits > program.qubits) {
        return LocalityDiagnostic{0, 0, "local qubit count exceeds program size"};
    }
    return validate_locality(program, QubitPermutation::identity(program.qubits, local_qubits));
}

std::optional<LocalityDiagnostic> validate_locality(const Program &program,
                                                    const QubitPermutation &start) {
    QubitPermutation sigma = start;
    auto diagnose = [&](std::size_t i, const std::string &message) {
        return LocalityDiagnostic{i, program.line_of(i), message};
    };
    for (std::size_t i = 0; i < program.body.size(); ++i) {
        const Instruction &instruction = program.body[i];
        auto first_remote = [&](const std::vector<QubitId> &qubits) -> std::optional<QubitId> {
            for (QubitId q : qubits) {
                if (q >= sigma.total_qubits() || !sigma.is_local(q)) {
                    return q;
                }
            }
            return std::nullopt;
        };
        if (const auto *gate = std::get_if<GateOp>(&instruction)) {
            if (const auto q = first_remote(gate->qubits)) {
                return diagnose(i, std::string(gate_mnemonic(gate->kind)) + " acts on nonlocal qubit " +
                                       std::to_string(*q));
            }
        } else if (const auto *measure = std::get_if<DoMeasurement>(&instruction)) {
            if (const auto q = first_remote(measure->qubits)) {
                return diagnose(i, "measurement of nonlocal qubit " + std::to_string(*q));
            }
        } else if (const auto *swap = std::get_if<SwapOp>(&instruction)) {
            try {
                const ExchangePlan plan = plan_from_pairs(sigma, swap->pairs);
                sigma = apply_plan(std::move(sigma), plan);
            } catch (const Error &e) {
                return diagnose(i, std::string("invalid SWAP: ") + e.what());
            }
        }
    }
    return std::nullopt;
}

std::uint64_t count_operations(const Program &program) {
    return static_cast<std::uint64_t>(
        std::count_if(program.body.begin(), program.body.end(),
                      [](const Instruction &i) { return std::holds_alternative<GateOp>(i); }));
}

}  // namespace qshard
