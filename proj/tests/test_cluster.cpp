#include <random>

#include <gtest/gtest.h>

#include "dense_reference.hpp"
#include "qshard/cluster.hpp"
#include "qshard/error.hpp"

using namespace qshard;

namespace {

Program random_circuit(unsigned l, int gates, std::mt19937_64 &rng) {
    const GateKind kinds[] = {GateKind::kH,      GateKind::kX,    GateKind::kY,
                              GateKind::kXdag,   GateKind::kYdag, GateKind::kR,
                              GateKind::kCnot,   GateKind::kCphase, GateKind::kCv,
                              GateKind::kToffoli};
    Program p(l);
    for (int g = 0; g < gates; ++g) {
        GateKind kind = kinds[rng() % 10];
        if (gate_arity(kind) > l) {
            kind = GateKind::kH;
        }
        std::vector<QubitId> qs(l);
        for (unsigned i = 0; i < l; ++i) qs[i] = i;
        std::shuffle(qs.begin(), qs.end(), rng);
        qs.resize(gate_arity(kind));
        int k = 0;
        if (gate_has_phase(kind)) {
            k = static_cast<int>(rng() % 6) + 1;
            if (rng() % 2) k = -k;
        }
        p.gate(kind, qs, k);
    }
    return p;
}

}  // namespace

TEST(InitBasisState, LayoutExamples) {
    Cluster c(RankTopology::for_ranks(4, 4));
    c.initialize(0);
    EXPECT_EQ(c.shard(0)[0], Amplitude(1.0));
    EXPECT_EQ(c.global_norm(), 1.0);
    c.initialize(0b0110);
    EXPECT_EQ(c.shard(0b01)[0b10], Amplitude(1.0));
    EXPECT_THROW(c.initialize(16), DomainError);

    std::vector<StateShard> shards;
    for (Rank r = 0; r < 4; ++r) shards.emplace_back(2, r);
    const auto sigma2 = QubitPermutation::from_positions({2, 1, 0, 3}, 2);
    init_basis_state(shards, sigma2, 0b0110);
    EXPECT_EQ(shards[0][0b11], Amplitude(1.0));
}

TEST(Cluster, SingleRankNeverExchanges) {
    Cluster c(RankTopology::for_ranks(6, 1));
    c.initialize(0);
    Program p(6);
    for (QubitId q = 0; q < 6; ++q) p.gate(GateKind::kH, {q});
    c.execute_logical(p, 1);
    EXPECT_EQ(c.total_stats(), (ExchangeStats{0, 0}));
    EXPECT_NEAR(c.global_norm(), 1.0, 1e-14);
}

TEST(Cluster, NonlocalInstructionIsLocalityError) {
    Cluster c(RankTopology::for_ranks(4, 4));
    c.initialize(0);
    Program p(4);
    p.gate(GateKind::kH, {3});
    EXPECT_THROW(c.execute(p), LocalityError);
}

TEST(Cluster, MeasurementAcrossRanks) {
    // Bell pair across the rank bit, then <Q0> = <Q3> = 0.5.
    Cluster c(RankTopology::for_ranks(4, 2));
    c.initialize(0);
    Program p(4);
    p.gate(GateKind::kH, {0});
    p.gate(GateKind::kCnot, {0, 3});
    p.measure({0, 3, 1});
    c.execute_logical(p, 1);
    EXPECT_NEAR(c.expectations().at(0), 0.5, 1e-15);
    EXPECT_NEAR(c.expectations().at(3), 0.5, 1e-15);
    EXPECT_NEAR(c.expectations().at(1), 0.0, 1e-15);
}

TEST(Cluster, DistributedMatchesDense) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 60; ++t) {
        const unsigned l = 5 + static_cast<unsigned>(rng() % 4);
        const Program p = random_circuit(l, 40, rng);
        const Index start = rng() % pow2(l);
        dense::State ref(l, start);
        ref.run(p);
        for (std::uint64_t n : {1u, 2u, 4u}) {
            for (unsigned k : {1u, 2u}) {
                Cluster c(RankTopology::for_ranks(l, n), {3, std::chrono::seconds(10)});
                c.initialize(start);
                c.execute_logical(p, k);
                ASSERT_LT(dense::max_abs_diff(c.gather(), ref.amplitudes()), 1e-12)
                    << "L=" << l << " N=" << n << " k=" << k;
            }
        }
    }
}

TEST(Cluster, ExchangeVolumeLaw) {
    // One K-pair swap from the identity: every rank sends (2^K-1) 2^(m-K).
    for (unsigned l = 4; l <= 8; ++l) {
        for (unsigned m = 1; m < l; ++m) {
            for (unsigned k = 1; k <= std::min(m, l - m); ++k) {
                Cluster c(RankTopology::for_ranks(l, pow2(l - m)), {2, std::chrono::seconds(10)});
                c.initialize(1);
                SwapOp swap;
                for (unsigned i = 0; i < k; ++i) swap.pairs.push_back({i, m + i});
                Program p(l);
                p.append(swap);
                c.execute(p);
                const auto records = c.records();
                const Index per_rank = (pow2(k) - 1) * pow2(m - k);
                for (const RankRecord &r : records) {
                    ASSERT_EQ(r.stats.amplitudes_sent, per_rank);
                    const Index per_partner = pow2(m - k);
                    ASSERT_EQ(r.stats.messages_sent, (pow2(k) - 1) * std::min<Index>(2, per_partner));
                }
                EXPECT_NEAR(c.global_norm(), 1.0, 1e-15);
            }
        }
    }
}

TEST(Cluster, FailedRankPropagates) {
    Cluster c(RankTopology::for_ranks(4, 4), {4, std::chrono::seconds(5)});
    c.initialize(0);
    EXPECT_THROW(c.spmd([](RankContext &ctx) {
        if (ctx.rank == 2) {
            throw StateError("boom");
        }
        ctx.comm.barrier();
    }),
                 StateError);
}
