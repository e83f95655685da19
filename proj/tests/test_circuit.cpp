#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qshard/algorithms.hpp"
#include "qshard/circuit.hpp"
#include "qshard/error.hpp"

using namespace qshard;

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Program hadamard32() { return parse_program(read_file(QSHARD_TEST_DATA "/hadamard32_m27.qc")); }

template <class T>
std::size_t count_of(const Program &p) {
    return static_cast<std::size_t>(std::count_if(p.body.begin(), p.body.end(), [](const Instruction &i) {
        return std::holds_alternative<T>(i);
    }));
}

int parse_error_line(const std::string &text) {
    try {
        parse_program(text);
    } catch (const ParseError &e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST(Parse, Hadamard32Listing) {
    const Program p = hadamard32();
    EXPECT_EQ(p.qubits, 32u);
    EXPECT_EQ(p.initial_state, 0u);
    EXPECT_EQ(p.declared_ranks, std::optional<std::uint64_t>(32));
    EXPECT_EQ(count_operations(p), 32u);
    EXPECT_EQ(count_of<GateOp>(p), 32u);
    EXPECT_EQ(count_of<SwapOp>(p), 6u);
    EXPECT_EQ(count_of<BeginMeasurement>(p), 1u);
    EXPECT_EQ(count_of<DoMeasurement>(p), 2u);
    EXPECT_EQ(count_of<EndMeasurement>(p), 1u);
    for (const Instruction &i : p.body) {
        if (const auto *g = std::get_if<GateOp>(&i)) {
            EXPECT_EQ(g->kind, GateKind::kH);
        }
    }
}

TEST(Parse, FivePairSwap) {
    const Program p = parse_program("QUBITS 32\nSWAP 5 31 1 2 3 4 0 27 28 29 30");
    ASSERT_EQ(p.body.size(), 1u);
    const SwapOp want{{{31, 0}, {1, 27}, {2, 28}, {3, 29}, {4, 30}}};
    EXPECT_EQ(std::get<SwapOp>(p.body[0]), want);
}

TEST(Parse, CommentsAndCase) {
    EXPECT_TRUE(parse_program("QUBITS 2\n! only a comment").body.empty());
    EXPECT_TRUE(parse_program("# header\nqubits 2\n\n   ! x\n").body.empty());
    const Program p = parse_program("QUBITS 3\ncphase -2 0 2 ! inverse phase\nbegin measurement\nDo Measurement 1\nEnd Measurement");
    ASSERT_EQ(p.body.size(), 4u);
    EXPECT_EQ(std::get<GateOp>(p.body[0]), (GateOp{GateKind::kCphase, {0, 2}, -2}));
    EXPECT_EQ(p.line_of(0), 2);
}

TEST(Parse, EveryGateMnemonic) {
    const Program p = parse_program(
        "QUBITS 4\nH 0\nX 1\nY 2\nXDAG 3\nYDAG 0\nR 3 1\nCNOT 0 1\nCPHASE 2 1 2\n"
        "CV 1 2 3\nTOFFOLI 0 1 3");
    ASSERT_EQ(p.body.size(), 10u);
    EXPECT_EQ(std::get<GateOp>(p.body[5]), (GateOp{GateKind::kR, {1}, 3}));
    EXPECT_EQ(std::get<GateOp>(p.body[8]), (GateOp{GateKind::kCv, {2, 3}, 1}));
    EXPECT_EQ(std::get<GateOp>(p.body[9]), (GateOp{GateKind::kToffoli, {0, 1, 3}}));
}

TEST(Parse, ErrorsCarryLineNumbers) {
    EXPECT_EQ(parse_error_line("QUBITS 4\nH 0\nFOO 1"), 3);
    EXPECT_EQ(parse_error_line("QUBITS 4\nCNOT 1"), 2);
    EXPECT_EQ(parse_error_line("QUBITS 4\nH 0\nH 4"), 3);
    EXPECT_EQ(parse_error_line("QUBITS 4\nH x1"), 2);
    EXPECT_EQ(parse_error_line("QUBITS 4\nH 1 2"), 2);
    EXPECT_EQ(parse_error_line("QUBITS 4\n\nSWAP 2 0 2 1"), 3);
    EXPECT_EQ(parse_error_line("H 0"), 1);
    EXPECT_EQ(parse_error_line("QUBITS 4\nBEGIN MEASUREMENT\nDO MEASUREMENT 0"), 2);
    try {
        parse_program("QUBITS 4\nCNOT 1 9");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 8);
        EXPECT_EQ(std::string(e.what()).rfind("2:8: ", 0), 0u);
    }
}

TEST(Serialize, Examples) {
    EXPECT_EQ(serialize_program(Program(4)), "QUBITS 4\nINITIAL STATE 0");
    Program p(4);
    p.gate(GateKind::kToffoli, {0, 1, 3});
    const std::string text = serialize_program(p);
    EXPECT_NE(text.find("\nTOFFOLI 0 1 3"), std::string::npos);
    EXPECT_EQ(text.find("TOFFOLI"), text.rfind("TOFFOLI"));
}

TEST(Serialize, RoundTripHadamard32) {
    const Program p = hadamard32();
    const Program q = parse_program(serialize_program(p));
    EXPECT_EQ(p, q);
    EXPECT_EQ(serialize_program(q), serialize_program(p));
}

TEST(Serialize, RoundTripRandom) {
    std::mt19937_64 rng(4);
    const GateKind kinds[] = {GateKind::kH,    GateKind::kX,      GateKind::kY,  GateKind::kXdag,
                              GateKind::kYdag, GateKind::kR,      GateKind::kCnot,
                              GateKind::kCphase, GateKind::kCv, GateKind::kToffoli};
    for (int t = 0; t < 50; ++t) {
        Program p(6);
        p.initial_state = rng() % 64;
        p.declared_ranks = 4;
        for (int g = 0; g < 30; ++g) {
            const GateKind kind = kinds[rng() % 10];
            std::vector<QubitId> qs = {0, 1, 2, 3, 4, 5};
            std::shuffle(qs.begin(), qs.end(), rng);
            qs.resize(gate_arity(kind));
            p.gate(kind, qs, gate_has_phase(kind) ? static_cast<int>(rng() % 9) - 4 : 0);
        }
        p.append(SwapOp{{{0, 5}, {1, 4}}});
        p.measure({5, 0, 3});
        ASSERT_EQ(parse_program(serialize_program(p)), p);
    }
}

TEST(Structure, Checks) {
    Program p(3);
    p.gate(GateKind::kCnot, {1, 1});
    EXPECT_THROW(check_structure(p), DomainError);
    Program q(3);
    q.append(EndMeasurement{});
    EXPECT_THROW(check_structure(q), DomainError);
}

TEST(Validate, Hadamard32At27) {
    EXPECT_FALSE(validate_locality(hadamard32(), 27).has_value());
}

TEST(Validate, NonlocalGateReportsLine) {
    const Program p = parse_program("QUBITS 32\nH 0\nH 31");
    const auto d = validate_locality(p, 27);
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(d->line, 3);
    EXPECT_EQ(d->instruction_index, 1u);
}

TEST(Validate, SwapOfTwoLocalsIsViolation) {
    const Program p = parse_program("QUBITS 4\nSWAP 1 0 1");
    const auto d = validate_locality(p, 2);
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(d->line, 2);
}

TEST(Validate, MeasurementOfNonlocal) {
    const Program p = parse_program("QUBITS 4\nBEGIN MEASUREMENT\nDO MEASUREMENT 3\nEND MEASUREMENT");
    ASSERT_TRUE(validate_locality(p, 2).has_value());
    EXPECT_FALSE(validate_locality(p, 4).has_value());
}

TEST(Compile, RegeneratesListingSwaps) {
    const Program logical = gen_hadamard_sweep(32);
    const Program compiled = insert_swaps(logical, 27, 5);
    const Program listing = hadamard32();
    std::vector<Instruction> want;
    for (const Instruction &i : listing.body) {
        want.push_back(i);
    }
    EXPECT_EQ(compiled.body, want);
    EXPECT_FALSE(validate_locality(compiled, 27).has_value());
}

TEST(Compile, LocalProgramUnchanged) {
    const Program p = parse_program("QUBITS 6\nH 0\nCNOT 0 2\nTOFFOLI 0 1 2\nBEGIN MEASUREMENT\nDO MEASUREMENT 0 1\nEND MEASUREMENT");
    EXPECT_EQ(insert_swaps(p, 3, 1), p);
}

TEST(Compile, KmaxBatchesSwaps) {
    const Program p = parse_program("QUBITS 8\nTOFFOLI 5 6 7");
    const Program k1 = insert_swaps(p, 4, 1);
    const Program k3 = insert_swaps(p, 4, 3);
    EXPECT_EQ(count_of<SwapOp>(k1), 3u);
    EXPECT_EQ(count_of<SwapOp>(k3), 1u);
    EXPECT_EQ(std::get<SwapOp>(k3.body[0]).pairs.size(), 3u);
    EXPECT_FALSE(validate_locality(k1, 4).has_value());
    EXPECT_FALSE(validate_locality(k3, 4).has_value());
}

TEST(Compile, TooManyRelocalizationsIsCompileError) {
    const Program p = parse_program("QUBITS 4\nTOFFOLI 1 2 3");
    EXPECT_THROW(insert_swaps(p, 1, 1), CompileError);
    const Program q = parse_program("QUBITS 5\nTOFFOLI 0 3 4");
    EXPECT_THROW(insert_swaps(q, 2, 1), CompileError);
    EXPECT_THROW(insert_swaps(parse_program("QUBITS 4\nSWAP 1 0 2"), 2, 1), CompileError);
}

TEST(CountOperations, Examples) {
    EXPECT_EQ(count_operations(Program(3)), 0u);
    EXPECT_EQ(count_operations(gen_hadamard_sweep(27)), 27u);
    EXPECT_EQ(count_operations(insert_swaps(gen_hadamard_sweep(10), 6, 1)), 10u);
}
