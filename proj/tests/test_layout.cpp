#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "qshard/error.hpp"
#include "qshard/layout.hpp"

using namespace qshard;

namespace {

QubitPermutation perm(std::vector<QubitId> p, unsigned m) {
    return QubitPermutation::from_positions(std::move(p), m);
}

QubitPermutation random_perm(unsigned l, unsigned m, std::mt19937_64 &rng) {
    std::vector<QubitId> p(l);
    for (unsigned i = 0; i < l; ++i) {
        p[i] = i;
    }
    std::shuffle(p.begin(), p.end(), rng);
    return perm(p, m);
}

}  // namespace

TEST(Permutation, IdentityAndInverse) {
    const auto s = QubitPermutation::identity(5, 3);
    EXPECT_EQ(s.total_qubits(), 5u);
    EXPECT_EQ(s.nonlocal_qubits(), 2u);
    EXPECT_TRUE(s.is_local(2));
    EXPECT_FALSE(s.is_local(3));
    const auto t = perm({3, 0, 4, 1, 2}, 2);
    for (QubitId q = 0; q < 5; ++q) {
        EXPECT_EQ(t.qubit_at(t.position_of(q)), q);
    }
}

TEST(Permutation, RejectsNonBijection) {
    EXPECT_THROW(perm({0, 1, 1}, 1), DomainError);
    EXPECT_THROW(perm({0, 1, 3}, 1), DomainError);
    EXPECT_THROW(QubitPermutation::identity(3, 4), DomainError);
}

// L=4, M=2 amplitude distribution.
TEST(Locate, SingleQubitLayout) {
    const auto s1 = QubitPermutation::identity(4, 2);
    EXPECT_EQ(locate(s1, 0b0110), (Location{0b01, 0b10}));
    const auto s2 = perm({2, 1, 0, 3}, 2);
    EXPECT_EQ(locate(s2, 0b0110), (Location{0b00, 0b11}));
    EXPECT_EQ(locate(s2, 0), (Location{0, 0}));
    // Every (rank, address) slot is covered exactly once.
    for (const auto &s : {s1, s2, perm({3, 1, 0, 2}, 2)}) {
        std::set<std::pair<Rank, Index>> seen;
        for (Index g = 0; g < 16; ++g) {
            const Location loc = locate(s, g);
            EXPECT_LT(loc.rank, 4u);
            EXPECT_LT(loc.address, 4u);
            seen.insert({loc.rank, loc.address});
            EXPECT_EQ(global_index(s, loc.rank, loc.address), g);
        }
        EXPECT_EQ(seen.size(), 16u);
    }
}

TEST(Locate, DecoderMatchesGlobalIndex) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const auto s = random_perm(12, 9, rng);
        for (Rank r = 0; r < 8; ++r) {
            AddressDecoder decode(s, r);
            for (Index a = 0; a < 512; a += 7) {
                ASSERT_EQ(decode(a), global_index(s, r, a));
            }
        }
    }
}

TEST(PlanExchange, SingleQubitSequence) {
    const auto s1 = QubitPermutation::identity(4, 2);
    const QubitId two[] = {2};
    const auto p2 = plan_exchange(s1, two);
    EXPECT_EQ(p2.plan.k, 1u);
    EXPECT_EQ(p2.sigma, perm({2, 1, 0, 3}, 2));
    ASSERT_EQ(p2.qubit_pairs.size(), 1u);
    EXPECT_EQ(p2.qubit_pairs[0], (std::pair<QubitId, QubitId>{0, 2}));

    const QubitId three[] = {3};
    const auto p3 = plan_exchange(p2.sigma, three);
    EXPECT_EQ(p3.qubit_pairs[0], (std::pair<QubitId, QubitId>{2, 3}));
    EXPECT_EQ(p3.sigma, perm({3, 1, 0, 2}, 2));
}

TEST(PlanExchange, TwoQubitExchange) {
    const auto s1 = QubitPermutation::identity(4, 2);
    const QubitId need[] = {2, 3};
    const auto p = plan_exchange(s1, need);
    EXPECT_EQ(p.plan.k, 2u);
    EXPECT_EQ(p.sigma, perm({2, 3, 0, 1}, 2));
}

TEST(PlanExchange, PinnedQubitsAreNotEvicted) {
    const auto s = QubitPermutation::identity(6, 3);
    const QubitId need[] = {4};
    const QubitId pinned[] = {0, 1};
    const auto p = plan_exchange(s, need, default_eviction(), pinned);
    EXPECT_EQ(p.qubit_pairs[0].first, 2u);
}

TEST(PlanExchange, Errors) {
    const auto s = QubitPermutation::identity(4, 2);
    const QubitId local[] = {1};
    EXPECT_THROW(plan_exchange(s, local), DomainError);
    const auto wide = QubitPermutation::identity(5, 3);
    const QubitId too_many[] = {3, 4};
    const QubitId pin[] = {0, 1};
    EXPECT_THROW(plan_exchange(wide, too_many, default_eviction(), pin), CapacityError);
}

TEST(PlanFromPairs, AcceptsEitherOrderAndRejectsLocalPairs) {
    const auto s = QubitPermutation::identity(4, 2);
    const std::pair<QubitId, QubitId> a[] = {{0, 2}};
    const std::pair<QubitId, QubitId> b[] = {{2, 0}};
    EXPECT_EQ(apply_plan(s, plan_from_pairs(s, a)), apply_plan(s, plan_from_pairs(s, b)));
    const std::pair<QubitId, QubitId> both_local[] = {{0, 1}};
    EXPECT_THROW(plan_from_pairs(s, both_local), LocalityError);
}

// Slot lists agree with moving every amplitude by its logical index.
TEST(ExchangeSlots, MatchPermutationOracle) {
    std::mt19937_64 rng(9);
    for (unsigned l = 2; l <= 9; ++l) {
        for (unsigned m = 1; m < l; ++m) {
            for (unsigned k = 1; k <= std::min(m, l - m); ++k) {
                const auto sigma = random_perm(l, m, rng);
                std::vector<unsigned> local(m), remote(l - m);
                for (unsigned i = 0; i < m; ++i) local[i] = i;
                for (unsigned i = 0; i < l - m; ++i) remote[i] = m + i;
                std::shuffle(local.begin(), local.end(), rng);
                std::shuffle(remote.begin(), remote.end(), rng);
                ExchangePlan plan{k, m, {local.begin(), local.begin() + k},
                                  {remote.begin(), remote.begin() + k}, 4};
                plan.validate(l);
                const auto next = apply_plan(sigma, plan);
                const Rank n = pow2(l - m);
                std::vector<std::vector<PartnerSlots>> all(n);
                for (Rank r = 0; r < n; ++r) {
                    all[r] = exchange_slots(plan, r);
                }
                for (Rank r = 0; r < n; ++r) {
                    ASSERT_EQ(all[r].size(), pow2(k) - 1);
                    Index sent = 0;
                    for (std::size_t i = 0; i < all[r].size(); ++i) {
                        const PartnerSlots &ps = all[r][i];
                        if (i > 0) {
                            ASSERT_LT(all[r][i - 1].partner_rank, ps.partner_rank);
                        }
                        ASSERT_EQ(ps.send_addresses.size(), pow2(m - k));
                        ASSERT_EQ(ps.recv_addresses.size(), ps.send_addresses.size());
                        ASSERT_TRUE(std::is_sorted(ps.send_addresses.begin(), ps.send_addresses.end()));
                        const auto &back = all[ps.partner_rank];
                        const auto it = std::find_if(back.begin(), back.end(), [&](const auto &x) {
                            return x.partner_rank == r;
                        });
                        ASSERT_NE(it, back.end());
                        for (std::size_t j = 0; j < ps.send_addresses.size(); ++j) {
                            const Index g = global_index(sigma, r, ps.send_addresses[j]);
                            ASSERT_EQ(locate(next, g), (Location{ps.partner_rank, it->recv_addresses[j]}));
                        }
                        sent += ps.send_addresses.size();
                    }
                    ASSERT_EQ(sent, plan.sent_per_rank());
                    ASSERT_EQ(sent, (pow2(k) - 1) * pow2(m - k));
                    const auto kept = retained_slots(plan, r);
                    ASSERT_EQ(kept.size(), pow2(m - k));
                    for (Index a : kept) {
                        ASSERT_EQ(locate(next, global_index(sigma, r, a)), (Location{r, a}));
                    }
                }
            }
        }
    }
}

TEST(ExchangeSlots, MatchingPatternsStay) {
    // K=1, m=1, L=2: rank 0 keeps address 0, rank 1 keeps address 1; the
    // vacated slot receives the partner's data.
    ExchangePlan plan{1, 1, {0}, {1}, 4};
    EXPECT_EQ(retained_slots(plan, 0), std::vector<Index>{0});
    EXPECT_EQ(retained_slots(plan, 1), std::vector<Index>{1});
    const auto slots = exchange_slots(plan, 0);
    ASSERT_EQ(slots.size(), 1u);
    EXPECT_EQ(slots[0].partner_rank, 1u);
    EXPECT_EQ(slots[0].send_addresses, std::vector<Index>{1});
    EXPECT_EQ(slots[0].recv_addresses, std::vector<Index>{1});
}

TEST(ExchangePlanValidate, Capacity) {
    ExchangePlan plan{3, 2, {0, 1, 1}, {2, 3, 4}, 4};
    EXPECT_THROW(plan.validate(5), CapacityError);
    ExchangePlan dup{2, 2, {0, 0}, {2, 3}, 4};
    EXPECT_THROW(dup.validate(4), DomainError);
}

TEST(ExchangePlan, VolumeAtTwentyTwo) {
    ExchangePlan plan{1, 22, {0}, {22}, 4};
    EXPECT_EQ(plan.sent_per_rank(), pow2(21));
}
