#include <cmath>
#include <numeric>
#include <string>

#include "qshard/algorithms.hpp"
#include "qshard/error.hpp"

namespace qshard {

namespace {

std::vector<QubitId> range_qubits(QubitId first, unsigned count) {
    std::vector<QubitId> out(count);
    std::iota(out.begin(), out.end(), first);
    return out;
}

// Register loading cycles through the four doubled single-qubit gates,
// each of which maps |0> to |1> up to a phase.
class Loader {
  public:
    void load(Program &program, QubitId qubit) {
        const GateKind kind = kPattern[counter_++ % 4];
        program.gate(kind, {qubit});
        program.gate(kind, {qubit});
    }

    /// Undoes the most recent load on `qubit`.
    void unload(Program &program, QubitId qubit) const {
        const GateKind inverse = inverse_of(kPattern[(counter_ - 1) % 4]);
        program.gate(inverse, {qubit});
        program.gate(inverse, {qubit});
    }

  private:
    static GateKind inverse_of(GateKind kind) {
        switch (kind) {
        case GateKind::kX: return GateKind::kXdag;
        case GateKind::kY: return GateKind::kYdag;
        case GateKind::kXdag: return GateKind::kX;
        default: return GateKind::kY;
        }
    }

    static constexpr GateKind kPattern[4] = {GateKind::kX, GateKind::kY, GateKind::kXdag,
                                             GateKind::kYdag};
    std::size_t counter_ = 0;
};

void check_adder_inputs(unsigned width, std::span<const std::uint64_t> values) {
    if (values.size() < 2) {
        throw DomainError("adder needs at least two registers");
    }
    if (width == 0 || width > 62) {
        throw DomainError("register width " + std::to_string(width) + " out of range");
    }
    for (std::uint64_t v : values) {
        if (v >= pow2(width)) {
            throw DomainError("value " + std::to_string(v) + " does not fit in " +
                              std::to_string(width) + " qubits");
        }
    }
}

void measure_all(Program &program) {
    program.measure(range_qubits(0, program.qubits));
}

}  // namespace

Program gen_hadamard_sweep(unsigned l, bool measure) {
    if (l == 0) {
        throw DomainError("hadamard sweep needs at least one qubit");
    }
    Program program(l);
    for (QubitId q = 0; q < l; ++q) {
        program.gate(GateKind::kH, {q});
    }
    if (measure) {
        measure_all(program);
    }
    return program;
}

void append_qft(Program &program, std::span<const QubitId> qubits, bool inverse) {
    std::vector<GateOp> ops;
    const auto n = static_cast<int>(qubits.size());
    for (int j = n - 1; j >= 0; --j) {
        ops.push_back({GateKind::kH, {qubits[j]}, 0});
        for (int i = j - 1; i >= 0; --i) {
            ops.push_back({GateKind::kCphase, {qubits[i], qubits[j]}, j - i + 1});
        }
    }
    if (inverse) {
        for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
            GateOp op = *it;
            op.k = -op.k;
            program.append(std::move(op));
        }
    } else {
        for (GateOp &op : ops) {
            program.append(std::move(op));
        }
    }
}

Program gen_qft(unsigned l, std::span<const QubitId> qubits, bool inverse) {
    if (qubits.empty()) {
        throw DomainError("QFT needs at least one qubit");
    }
    Program program(l);
    append_qft(program, qubits, inverse);
    check_structure(program);
    return program;
}

std::vector<QubitId> adder_accumulator(unsigned width, std::size_t n_values, AdderForm form) {
    if (form == AdderForm::kStreamed) {
        return range_qubits(0, width);
    }
    return range_qubits(static_cast<QubitId>((n_values - 1) * width), width);
}

Program gen_adder(unsigned width, std::span<const std::uint64_t> values, AdderForm form,
                  bool measure) {
    check_adder_inputs(width, values);
    const std::size_t n = values.size();
    const std::vector<QubitId> acc = adder_accumulator(width, n, form);
    Loader loader;

    if (form == AdderForm::kFullWidth) {
        Program program(static_cast<unsigned>(n * width));
        for (std::size_t r = 0; r < n; ++r) {
            for (unsigned i = 0; i < width; ++i) {
                if (bit_of(values[r], i)) {
                    loader.load(program, static_cast<QubitId>(r * width + i));
                }
            }
        }
        append_qft(program, acc);
        for (std::size_t r = 0; r + 1 < n; ++r) {
            for (unsigned j = 0; j < width; ++j) {
                for (unsigned i = 0; i <= j; ++i) {
                    program.gate(GateKind::kCphase,
                                 {static_cast<QubitId>(r * width + i), acc[j]},
                                 static_cast<int>(j - i + 1));
                }
            }
        }
        append_qft(program, acc, true);
        if (measure) {
            measure_all(program);
        }
        return program;
    }

    Program program(width + 1);
    const QubitId source = width;
    for (unsigned i = 0; i < width; ++i) {
        if (bit_of(values[n - 1], i)) {
            loader.load(program, acc[i]);
        }
    }
    append_qft(program, acc);
    for (std::size_t r = 0; r + 1 < n; ++r) {
        for (unsigned i = 0; i < width; ++i) {
            const bool set = bit_of(values[r], i);
            if (set) {
                loader.load(program, source);
            }
            for (unsigned j = i; j < width; ++j) {
                program.gate(GateKind::kCphase, {source, acc[j]}, static_cast<int>(j - i + 1));
            }
            if (set) {
                loader.unload(program, source);
            }
        }
    }
    append_qft(program, acc, true);
    if (measure) {
        measure_all(program);
    }
    return program;
}

std::optional<std::uint64_t> read_register(const Expectations &expectations,
                                           std::span<const QubitId> qubits, double tolerance) {
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        const auto it = expectations.find(qubits[i]);
        if (it == expectations.end()) {
            return std::nullopt;
        }
        const double e = it->second;
        if (std::abs(e - 1.0) <= tolerance) {
            value |= std::uint64_t{1} << i;
        } else if (std::abs(e) > tolerance) {
            return std::nullopt;
        }
    }
    return value;
}

}  // namespace qshard
