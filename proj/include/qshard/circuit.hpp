#pragma once

/**
 * @file
 * Circuit IR, the line-oriented `.qc` text format, and the swap-inserting
 * compiler that makes a logical circuit executable on 2^(L-m) ranks.
 *
 * Text format, one command per line, keywords case-insensitive:
 *
 *     QUBITS L
 *     INITIAL STATE index
 *     MPIPROCESSES n
 *     H q | X q | Y q | XDAG q | YDAG q
 *     R k q | CNOT c t | CPHASE k c t | CV k c t | TOFFOLI c1 c2 t
 *     SWAP K a1 .. aK b1 .. bK          pairs (a_i, b_i)
 *     BEGIN MEASUREMENT
 *     DO MEASUREMENT q1 q2 ...
 *     END MEASUREMENT
 *
 * Phase-type gates take k with phi = 2 pi / 2^|k|, negative k meaning -phi.
 * Lines whose first non-blank character is '!' or '#' are comments, and an
 * inline '!' starts a trailing comment.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qshard/layout.hpp"

namespace qshard {

enum class GateKind { kH, kX, kY, kXdag, kYdag, kR, kCnot, kCphase, kCv, kToffoli };

unsigned gate_arity(GateKind kind);
bool gate_has_phase(GateKind kind);
const char *gate_mnemonic(GateKind kind);

struct GateOp {
    GateKind kind;
    std::vector<QubitId> qubits;
    int k = 0;

    bool operator==(const GateOp &) const = default;
};

/// Relocalization command: pairs (a_i, b_i) exchange bit positions.
struct SwapOp {
    std::vector<std::pair<QubitId, QubitId>> pairs;
    bool operator==(const SwapOp &) const = default;
};

struct BeginMeasurement {
    bool operator==(const BeginMeasurement &) const = default;
};

/// Non-collapsing expectation <Q_i> of each listed qubit.
struct DoMeasurement {
    std::vector<QubitId> qubits;
    bool operator==(const DoMeasurement &) const = default;
};

struct EndMeasurement {
    bool operator==(const EndMeasurement &) const = default;
};

using Instruction = std::variant<GateOp, SwapOp, BeginMeasurement, DoMeasurement, EndMeasurement>;

struct Program {
    unsigned qubits = 0;
    Index initial_state = 0;
    std::optional<std::uint64_t> declared_ranks;
    std::vector<Instruction> body;
    /// Source line of each body instruction, 0 when generated. Ignored by ==.
    std::vector<int> source_lines;

    explicit Program(unsigned l = 0) : qubits(l) {}

    void append(Instruction instruction, int line = 0);
    void gate(GateKind kind, std::vector<QubitId> operands, int k = 0);
    void measure(std::vector<QubitId> operands);

    int line_of(std::size_t index) const {
        return index < source_lines.size() ? source_lines[index] : 0;
    }
    bool has_swaps() const;

    bool operator==(const Program &other) const {
        return qubits == other.qubits && initial_state == other.initial_state &&
               declared_ranks == other.declared_ranks && body == other.body;
    }
};

/// Throws ParseError (with line:column) on any malformed line.
Program parse_program(std::string_view text);

/// Lines joined by '\n', no trailing newline.
std::string serialize_program(const Program &program);

std::string format_instruction(const Instruction &instruction);

/// Throws DomainError for out-of-range qubits, repeated operands or an
/// improperly nested measurement block.
void check_structure(const Program &program);

struct CompiledProgram {
    Program program;
    QubitPermutation final_sigma;
};

/// Inserts SWAP commands so every gate and measurement acts on local
/// qubits, starting from `start`. Each SWAP moves at most k_max pairs.
CompiledProgram compile_from(const Program &logical, const QubitPermutation &start,
                             unsigned k_max, const EvictionPolicy &policy = default_eviction());

Program insert_swaps(const Program &logical, unsigned local_qubits, unsigned k_max,
                     const EvictionPolicy &policy = default_eviction());

struct LocalityDiagnostic {
    std::size_t instruction_index;
    int line;
    std::string message;
};

/// Tracks the permutation symbolically; returns the first violation.
std::optional<LocalityDiagnostic> validate_locality(const Program &program, unsigned local_qubits);
std::optional<LocalityDiagnostic> validate_locality(const Program &program,
                                                    const QubitPermutation &start);

/// Quantum operations N_O: gates only, no swaps or measurements.
std::uint64_t count_operations(const Program &program);

}  // namespace qshard
