#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "qshard/circuit.hpp"
#include "qshard/error.hpp"

namespace qshard {

namespace {

constexpr unsigned kMaxQubits = 62;

struct Token {
    std::string_view text;
    int column;
};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i >= line.size()) {
            break;
        }
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return tokens;
}

class LineParser {
  public:
    LineParser(int line_number, std::vector<Token> tokens)
        : line_(line_number), tokens_(std::move(tokens)) {}

    [[noreturn]] void fail(int column, const std::string &message) const {
        throw ParseError(line_, column, message);
    }

    [[noreturn]] void fail_at(std::size_t token, const std::string &message) const {
        fail(token < tokens_.size() ? tokens_[token].column : end_column(), message);
    }

    int end_column() const {
        if (tokens_.empty()) {
            return 1;
        }
        return tokens_.back().column + static_cast<int>(tokens_.back().text.size());
    }

    std::size_t size() const { return tokens_.size(); }
    std::string word(std::size_t i) const { return upper(tokens_[i].text); }

    void expect_word(std::size_t i, const char *word) const {
        if (i >= tokens_.size() || upper(tokens_[i].text) != word) {
            fail_at(i, std::string("expected '") + word + "'");
        }
    }

    void expect_count(std::size_t count, const std::string &what) const {
        if (tokens_.size() != count) {
            fail_at(std::min(count, tokens_.size()),
                    what + " expects " + std::to_string(count - 1) + " argument token(s), got " +
                        std::to_string(tokens_.size() - 1));
        }
    }

    std::int64_t integer(std::size_t i) const {
        if (i >= tokens_.size()) {
            fail_at(i, "missing integer");
        }
        const std::string_view text = tokens_[i].text;
        std::int64_t value = 0;
        const char *first = text.data();
        if (!text.empty() && text.front() == '+') {
            ++first;
        }
        const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || first == ptr) {
            fail_at(i, "malformed integer '" + std::string(text) + "'");
        }
        return value;
    }

    std::uint64_t unsigned_integer(std::size_t i) const {
        const std::int64_t value = integer(i);
        if (value < 0) {
            fail_at(i, "expected a non-negative integer");
        }
        return static_cast<std::uint64_t>(value);
    }

    QubitId qubit(std::size_t i, unsigned l) const {
        const std::uint64_t value = unsigned_integer(i);
        if (value >= l) {
            fail_at(i, "qubit " + std::to_string(value) + " out of range for " +
                           std::to_string(l) + " qubits");
        }
        return static_cast<QubitId>(value);
    }

  private:
    int line_;
    std::vector<Token> tokens_;
};

std::optional<GateKind> gate_from_word(const std::string &word) {
    static const std::pair<const char *, GateKind> kTable[] = {
        {"H", GateKind::kH},           {"X", GateKind::kX},         {"Y", GateKind::kY},
        {"XDAG", GateKind::kXdag},     {"YDAG", GateKind::kYdag},   {"R", GateKind::kR},
        {"CNOT", GateKind::kCnot},     {"CPHASE", GateKind::kCphase}, {"CV", GateKind::kCv},
        {"TOFFOLI", GateKind::kToffoli},
    };
    for (const auto &[name, kind] : kTable) {
        if (word == name) {
            return kind;
        }
    }
    return std::nullopt;
}

template <class Container>
bool has_duplicates(const Container &values) {
    std::vector<QubitId> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

}  // namespace

unsigned gate_arity(GateKind kind) {
    switch (kind) {
    case GateKind::kCnot:
    case GateKind::kCphase:
    case GateKind::kCv: return 2;
    case GateKind::kToffoli: return 3;
    default: return 1;
    }
}

bool gate_has_phase(GateKind kind) {
    return kind == GateKind::kR || kind == GateKind::kCphase || kind == GateKind::kCv;
}

const char *gate_mnemonic(GateKind kind) {
    switch (kind) {
    case GateKind::kH: return "H";
    case GateKind::kX: return "X";
    case GateKind::kY: return "Y";
    case GateKind::kXdag: return "XDAG";
    case GateKind::kYdag: return "YDAG";
    case GateKind::kR: return "R";
    case GateKind::kCnot: return "CNOT";
    case GateKind::kCphase: return "CPHASE";
    case GateKind::kCv: return "CV";
    case GateKind::kToffoli: return "TOFFOLI";
    }
    return "?";
}

void Program::append(Instruction instruction, int line) {
    body.push_back(std::move(instruction));
    source_lines.resize(body.size() - 1, 0);
    source_lines.push_back(line);
}

void Program::gate(GateKind kind, std::vector<QubitId> operands, int k) {
    append(GateOp{kind, std::move(operands), k});
}

void Program::measure(std::vector<QubitId> operands) {
    append(BeginMeasurement{});
    append(DoMeasurement{std::move(operands)});
    append(EndMeasurement{});
}

bool Program::has_swaps() const {
    return std::any_of(body.begin(), body.end(),
                       [](const Instruction &i) { return std::holds_alternative<SwapOp>(i); });
}

Program parse_program(std::string_view text) {
    Program program;
    bool have_qubits = false;
    bool have_initial = false;
    bool have_ranks = false;
    bool in_block = false;
    int block_line = 0;
    int line_number = 0;

    std::size_t cursor = 0;
    while (cursor <= text.size()) {
        std::size_t end = text.find('\n', cursor);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(cursor, end - cursor);
        cursor = end + 1;
        ++line_number;

        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (const auto bang = line.find('!'); bang != std::string_view::npos) {
            line = line.substr(0, bang);
        }
        auto tokens = tokenize(line);
        if (tokens.empty() || tokens.front().text.front() == '#') {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        LineParser p(line_number, std::move(tokens));
        const std::string keyword = p.word(0);

        if (keyword == "QUBITS") {
            if (have_qubits) {
                p.fail_at(0, "duplicate QUBITS command");
            }
            p.expect_count(2, "QUBITS");
            const std::uint64_t l = p.unsigned_integer(1);
            if (l < 1 || l > kMaxQubits) {
                p.fail_at(1, "qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
            }
            program.qubits = static_cast<unsigned>(l);
            have_qubits = true;
        } else if (!have_qubits) {
            p.fail_at(0, "QUBITS must be the first command");
        } else if (keyword == "INITIAL") {
            p.expect_word(1, "STATE");
            p.expect_count(3, "INITIAL STATE");
            if (have_initial || !program.body.empty()) {
                p.fail_at(0, "INITIAL STATE must appear once, before any operation");
            }
            const std::uint64_t index = p.unsigned_integer(2);
            if (index >= pow2(program.qubits)) {
                p.fail_at(2, "initial state index out of range");
            }
            program.initial_state = index;
            have_initial = true;
        } else if (keyword == "MPIPROCESSES") {
            p.expect_count(2, "MPIPROCESSES");
            if (have_ranks) {
                p.fail_at(0, "duplicate MPIPROCESSES command");
            }
            const std::uint64_t n = p.unsigned_integer(1);
            if (n == 0) {
                p.fail_at(1, "process count must be positive");
            }
            program.declared_ranks = n;
            have_ranks = true;
        } else if (const auto kind = gate_from_word(keyword)) {
            const unsigned arity = gate_arity(*kind);
            const std::size_t first_qubit = gate_has_phase(*kind) ? 2 : 1;
            p.expect_count(first_qubit + arity, keyword);
            GateOp op{*kind, {}, 0};
            if (gate_has_phase(*kind)) {
                const std::int64_t k = p.integer(1);
                if (std::abs(k) > static_cast<std::int64_t>(kMaxQubits)) {
                    p.fail_at(1, "phase exponent k out of range");
                }
                op.k = static_cast<int>(k);
            }
            for (unsigned i = 0; i < arity; ++i) {
                op.qubits.push_back(p.qubit(first_qubit + i, program.qubits));
            }
            if (has_duplicates(op.qubits)) {
                p.fail_at(first_qubit, "gate operands must be distinct");
            }
            program.append(std::move(op), line_number);
        } else if (keyword == "SWAP") {
            if (p.size() < 2) {
                p.fail_at(1, "SWAP expects a pair count");
            }
            const std::uint64_t k = p.unsigned_integer(1);
            if (k == 0 || k > program.qubits / 2) {
                p.fail_at(1, "SWAP pair count out of range");
            }
            p.expect_count(2 + 2 * k, "SWAP " + std::to_string(k));
            SwapOp op;
            std::vector<QubitId> all;
            for (std::size_t i = 0; i < k; ++i) {
                const QubitId a = p.qubit(2 + i, program.qubits);
                const QubitId b = p.qubit(2 + k + i, program.qubits);
                op.pairs.emplace_back(a, b);
                all.push_back(a);
                all.push_back(b);
            }
            if (has_duplicates(all)) {
                p.fail_at(2, "SWAP qubits must be distinct");
            }
            program.append(std::move(op), line_number);
        } else if (keyword == "BEGIN") {
            p.expect_word(1, "MEASUREMENT");
            p.expect_count(2, "BEGIN MEASUREMENT");
            if (in_block) {
                p.fail_at(0, "nested BEGIN MEASUREMENT");
            }
            in_block = true;
            block_line = line_number;
            program.append(BeginMeasurement{}, line_number);
        } else if (keyword == "DO") {
            p.expect_word(1, "MEASUREMENT");
            if (p.size() < 3) {
                p.fail_at(2, "DO MEASUREMENT needs at least one qubit");
            }
            if (!in_block) {
                p.fail_at(0, "DO MEASUREMENT outside a measurement block");
            }
            DoMeasurement op;
            for (std::size_t i = 2; i < p.size(); ++i) {
                op.qubits.push_back(p.qubit(i, program.qubits));
            }
            if (has_duplicates(op.qubits)) {
                p.fail_at(2, "measured qubits must be distinct");
            }
            program.append(std::move(op), line_number);
        } else if (keyword == "END") {
            p.expect_word(1, "MEASUREMENT");
            p.expect_count(2, "END MEASUREMENT");
            if (!in_block) {
                p.fail_at(0, "END MEASUREMENT without BEGIN MEASUREMENT");
            }
            in_block = false;
            program.append(EndMeasurement{}, line_number);
        } else {
            p.fail_at(0, "unknown keyword '" + keyword + "'");
        }
        if (end == text.size()) {
            break;
        }
    }
    if (!have_qubits) {
        throw ParseError(line_number, 1, "missing QUBITS command");
    }
    if (in_block) {
        throw ParseError(block_line, 1, "measurement block is never closed");
    }
    return program;
}

std::string format_instruction(const Instruction &instruction) {
    std::ostringstream out;
    std::visit(
        [&](const auto &op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, GateOp>) {
                out << gate_mnemonic(op.kind);
                if (gate_has_phase(op.kind)) {
                    out << ' ' << op.k;
                }
                for (QubitId q : op.qubits) {
                    out << ' ' << q;
                }
            } else if constexpr (std::is_same_v<T, SwapOp>) {
                out << "SWAP " << op.pairs.size();
                for (const auto &pair : op.pairs) {
                    out << ' ' << pair.first;
                }
                for (const auto &pair : op.pairs) {
                    out << ' ' << pair.second;
                }
            } else if constexpr (std::is_same_v<T, BeginMeasurement>) {
                out << "BEGIN MEASUREMENT";
            } else if constexpr (std::is_same_v<T, DoMeasurement>) {
                out << "DO MEASUREMENT";
                for (QubitId q : op.qubits) {
                    out << ' ' << q;
                }
            } else {
                out << "END MEASUREMENT";
            }
        },
        instruction);
    return out.str();
}

std::string serialize_program(const Program &program) {
    std::string out = "QUBITS " + std::to_string(program.qubits) + "\nINITIAL STATE " +
                      std::to_string(program.initial_state);
    if (program.declared_ranks) {
        out += "\nMPIPROCESSES " + std::to_string(*program.declared_ranks);
    }
    for (const Instruction &instruction : program.body) {
        out += '\n';
        out += format_instruction(instruction);
    }
    return out;
}

void check_structure(const Program &program) {
    const unsigned l = program.qubits;
    if (l < 1 || l > kMaxQubits) {
        throw DomainError("program qubit count out of range");
    }
    if (program.initial_state >= pow2(l)) {
        throw DomainError("initial state out of range");
    }
    auto check_qubits = [&](const std::vector<QubitId> &qubits, const char *what) {
        for (QubitId q : qubits) {
            if (q >= l) {
                throw DomainError(std::string(what) + " qubit " + std::to_string(q) +
                                  " out of range");
            }
        }
        if (has_duplicates(qubits)) {
            throw DomainError(std::string(what) + " qubits must be distinct");
        }
    };
    bool in_block = false;
    for (const Instruction &instruction : program.body) {
        if (const auto *g = std::get_if<GateOp>(&instruction)) {
            if (g->qubits.size() != gate_arity(g->kind)) {
                throw DomainError(std::string("gate ") + gate_mnemonic(g->kind) +
                                  " has wrong arity");
            }
            check_qubits(g->qubits, "gate");
        } else if (const auto *s = std::get_if<SwapOp>(&instruction)) {
            std::vector<QubitId> all;
            for (const auto &[a, b] : s->pairs) {
                all.push_back(a);
                all.push_back(b);
            }
            if (s->pairs.empty()) {
                throw DomainError("empty SWAP");
            }
            check_qubits(all, "swap");
        } else if (std::holds_alternative<BeginMeasurement>(instruction)) {
            if (in_block) {
                throw DomainError("nested measurement block");
            }
            in_block = true;
        } else if (const auto *d = std::get_if<DoMeasurement>(&instruction)) {
            if (!in_block) {
                throw DomainError("measurement outside a measurement block");
            }
            check_qubits(d->qubits, "measured");
        } else {
            if (!in_block) {
                throw DomainError("END MEASUREMENT without BEGIN");
            }
            in_block = false;
        }
    }
    if (in_block) {
        throw DomainError("unterminated measurement block");
    }
}

}  // namespace qshard
