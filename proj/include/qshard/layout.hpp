#pragma once

/**
 * @file
 * Qubit permutation and local/nonlocal exchange planning.
 *
 * The global amplitude index has L bit positions. The permutation maps each
 * position to the logical qubit whose value it carries. Positions [0, m)
 * form the local memory address inside a shard and positions [m, L) form
 * the rank id. Relocalizing a qubit never moves data "back": the permutation
 * simply records where every qubit currently lives.
 */

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qshard/bits.hpp"

namespace qshard {

using QubitId = unsigned;
using Rank = std::uint64_t;

class QubitPermutation {
  public:
    static QubitPermutation identity(unsigned total_qubits, unsigned local_qubits);

    /// `pos_to_qubit[i]` is the qubit stored at bit position i. Throws
    /// DomainError unless it is a bijection on [0, L).
    static QubitPermutation from_positions(std::vector<QubitId> pos_to_qubit,
                                           unsigned local_qubits);

    unsigned total_qubits() const noexcept { return static_cast<unsigned>(pos_to_qubit_.size()); }
    unsigned local_qubits() const noexcept { return m_; }
    unsigned nonlocal_qubits() const noexcept { return total_qubits() - m_; }

    QubitId qubit_at(unsigned position) const { return pos_to_qubit_.at(position); }
    unsigned position_of(QubitId qubit) const { return qubit_to_pos_.at(qubit); }
    bool is_local(QubitId qubit) const { return position_of(qubit) < m_; }

    std::span<const QubitId> pos_to_qubit() const noexcept { return pos_to_qubit_; }
    std::span<const unsigned> qubit_to_pos() const noexcept { return qubit_to_pos_; }

    /// Exchanges the qubits held at two bit positions.
    void transpose(unsigned position_a, unsigned position_b);

    bool operator==(const QubitPermutation &) const = default;

  private:
    QubitPermutation(std::vector<QubitId> pos_to_qubit, unsigned local_qubits);

    std::vector<QubitId> pos_to_qubit_;
    std::vector<unsigned> qubit_to_pos_;
    unsigned m_;
};

struct Location {
    Rank rank;
    Index address;
    bool operator==(const Location &) const = default;
};

/// Where the amplitude with logical bit pattern `global_bits` is stored.
Location locate(const QubitPermutation &sigma, Index global_bits);

/// Inverse of locate.
Index global_index(const QubitPermutation &sigma, Rank rank, Index address);

/// Table-driven address -> logical index decoding for one rank.
class AddressDecoder {
  public:
    AddressDecoder(const QubitPermutation &sigma, Rank rank);
    Index operator()(Index address) const;

  private:
    static constexpr unsigned kChunkBits = 8;
    Index rank_part_ = 0;
    std::vector<std::array<Index, 256>> tables_;
};

/// K simultaneous (local position, rank position) transpositions.
struct ExchangePlan {
    unsigned k = 0;
    unsigned local_qubits = 0;
    std::vector<unsigned> local_positions;
    std::vector<unsigned> rank_positions;
    unsigned chunk_count = 4;

    /// Throws CapacityError/DomainError when the pairs are malformed.
    void validate(unsigned total_qubits) const;

    Index slots_per_partner() const { return pow2(local_qubits - k); }
    Index sent_per_rank() const { return (pow2(k) - 1) * slots_per_partner(); }
};

/// Chooses which local positions give up their qubit.
class EvictionPolicy {
  public:
    virtual ~EvictionPolicy() = default;
    /// Returns `count` distinct local positions, none holding a pinned qubit.
    virtual std::vector<unsigned> choose(const QubitPermutation &sigma, unsigned count,
                                         std::span<const QubitId> pinned) const = 0;
};

/// Evicts positions 0, 1, 2, ... skipping pinned qubits.
class LowestPositionEviction final : public EvictionPolicy {
  public:
    std::vector<unsigned> choose(const QubitPermutation &sigma, unsigned count,
                                 std::span<const QubitId> pinned) const override;
};

const EvictionPolicy &default_eviction();

struct PlannedExchange {
    ExchangePlan plan;
    QubitPermutation sigma;
    /// (evicted local qubit, incoming nonlocal qubit), in plan order.
    std::vector<std::pair<QubitId, QubitId>> qubit_pairs;
};

/// Pairs the i-th needed qubit with the i-th evicted position. Every needed
/// qubit must currently be nonlocal.
PlannedExchange plan_exchange(const QubitPermutation &sigma, std::span<const QubitId> qubits_needed,
                              const EvictionPolicy &policy = default_eviction(),
                              std::span<const QubitId> pinned = {}, unsigned chunk_count = 4);

/// Plan for an explicit list of qubit pairs; each pair must hold exactly one
/// local and one nonlocal qubit (LocalityError otherwise).
ExchangePlan plan_from_pairs(const QubitPermutation &sigma,
                             std::span<const std::pair<QubitId, QubitId>> qubit_pairs,
                             unsigned chunk_count = 4);

/// Permutation after the plan's transpositions.
QubitPermutation apply_plan(QubitPermutation sigma, const ExchangePlan &plan);

/// Local address whose plan bits spell `pattern` and whose remaining bits,
/// read in ascending position order, spell `ordinal`.
Index pattern_address(const ExchangePlan &plan, Index pattern, Index ordinal);

/// The plan bits of `rank` (bit i = rank bit at rank_positions[i]).
Index rank_pattern(const ExchangePlan &plan, Rank rank);

Rank partner_for_pattern(const ExchangePlan &plan, Rank rank, Index pattern);

struct PartnerSlots {
    Rank partner_rank;
    std::vector<Index> send_addresses;
    std::vector<Index> recv_addresses;
};

/// Partners of `my_rank` in ascending rank order with their slot lists.
std::vector<PartnerSlots> exchange_slots(const ExchangePlan &plan, Rank my_rank);

/// Addresses that stay in place on `my_rank`.
std::vector<Index> retained_slots(const ExchangePlan &plan, Rank my_rank);

}  // namespace qshard
