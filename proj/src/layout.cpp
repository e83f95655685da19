#include "qshard/layout.hpp"

#include <algorithm>
#include <string>

#include "qshard/error.hpp"

namespace qshard {

QubitPermutation::QubitPermutation(std::vector<QubitId> pos_to_qubit, unsigned local_qubits)
    : pos_to_qubit_(std::move(pos_to_qubit)), qubit_to_pos_(pos_to_qubit_.size()),
      m_(local_qubits) {
    for (unsigned pos = 0; pos < pos_to_qubit_.size(); ++pos) {
        qubit_to_pos_[pos_to_qubit_[pos]] = pos;
    }
}

QubitPermutation QubitPermutation::identity(unsigned total_qubits, unsigned local_qubits) {
    if (local_qubits > total_qubits) {
        throw DomainError("local qubit count " + std::to_string(local_qubits) +
                          " exceeds total " + std::to_string(total_qubits));
    }
    std::vector<QubitId> positions(total_qubits);
    for (unsigned i = 0; i < total_qubits; ++i) {
        positions[i] = i;
    }
    return QubitPermutation(std::move(positions), local_qubits);
}

QubitPermutation QubitPermutation::from_positions(std::vector<QubitId> pos_to_qubit,
                                                  unsigned local_qubits) {
    const auto l = pos_to_qubit.size();
    if (local_qubits > l) {
        throw DomainError("local qubit count exceeds total qubit count");
    }
    std::vector<bool> seen(l, false);
    for (QubitId q : pos_to_qubit) {
        if (q >= l || seen[q]) {
            throw DomainError("qubit permutation is not a bijection");
        }
        seen[q] = true;
    }
    return QubitPermutation(std::move(pos_to_qubit), local_qubits);
}

void QubitPermutation::transpose(unsigned position_a, unsigned position_b) {
    std::swap(pos_to_qubit_.at(position_a), pos_to_qubit_.at(position_b));
    qubit_to_pos_[pos_to_qubit_[position_a]] = position_a;
    qubit_to_pos_[pos_to_qubit_[position_b]] = position_b;
}

Location locate(const QubitPermutation &sigma, Index global_bits) {
    Location loc{0, 0};
    const unsigned m = sigma.local_qubits();
    for (unsigned pos = 0; pos < sigma.total_qubits(); ++pos) {
        const Index bit = bit_of(global_bits, sigma.qubit_at(pos));
        if (pos < m) {
            loc.address |= bit << pos;
        } else {
            loc.rank |= bit << (pos - m);
        }
    }
    return loc;
}

Index global_index(const QubitPermutation &sigma, Rank rank, Index address) {
    Index g = 0;
    const unsigned m = sigma.local_qubits();
    for (unsigned pos = 0; pos < sigma.total_qubits(); ++pos) {
        const Index bit = pos < m ? bit_of(address, pos) : bit_of(rank, pos - m);
        g |= bit << sigma.qubit_at(pos);
    }
    return g;
}

AddressDecoder::AddressDecoder(const QubitPermutation &sigma, Rank rank) {
    const unsigned m = sigma.local_qubits();
    rank_part_ = global_index(sigma, rank, 0);
    const unsigned chunks = (m + kChunkBits - 1) / kChunkBits;
    tables_.resize(chunks);
    for (unsigned c = 0; c < chunks; ++c) {
        for (unsigned byte = 0; byte < 256; ++byte) {
            Index value = 0;
            for (unsigned b = 0; b < kChunkBits; ++b) {
                const unsigned pos = c * kChunkBits + b;
                if (pos < m && bit_of(byte, b)) {
                    value |= pow2(sigma.qubit_at(pos));
                }
            }
            tables_[c][byte] = value;
        }
    }
}

Index AddressDecoder::operator()(Index address) const {
    Index g = rank_part_;
    for (const auto &table : tables_) {
        g |= table[address & 0xFF];
        address >>= kChunkBits;
    }
    return g;
}

void ExchangePlan::validate(unsigned total_qubits) const {
    const unsigned nonlocal = total_qubits - local_qubits;
    if (local_positions.size() != k || rank_positions.size() != k) {
        throw DomainError("exchange plan position lists do not match k");
    }
    if (k > std::min(local_qubits, nonlocal)) {
        throw CapacityError("exchange of " + std::to_string(k) + " pairs exceeds min(m, L-m) = " +
                            std::to_string(std::min(local_qubits, nonlocal)));
    }
    if (chunk_count == 0) {
        throw DomainError("chunk count must be positive");
    }
    std::vector<bool> used(total_qubits, false);
    for (unsigned i = 0; i < k; ++i) {
        const unsigned lp = local_positions[i];
        const unsigned rp = rank_positions[i];
        if (lp >= local_qubits || rp < local_qubits || rp >= total_qubits) {
            throw DomainError("exchange plan pairs must be (local, nonlocal) positions");
        }
        if (used[lp] || used[rp]) {
            throw DomainError("exchange plan positions must be distinct");
        }
        used[lp] = used[rp] = true;
    }
}

std::vector<unsigned> LowestPositionEviction::choose(const QubitPermutation &sigma,
                                                     unsigned count,
                                                     std::span<const QubitId> pinned) const {
    std::vector<unsigned> chosen;
    for (unsigned pos = 0; pos < sigma.local_qubits() && chosen.size() < count; ++pos) {
        if (std::find(pinned.begin(), pinned.end(), sigma.qubit_at(pos)) == pinned.end()) {
            chosen.push_back(pos);
        }
    }
    if (chosen.size() < count) {
        throw CapacityError("only " + std::to_string(chosen.size()) +
                            " local positions can be evicted, " + std::to_string(count) +
                            " needed");
    }
    return chosen;
}

const EvictionPolicy &default_eviction() {
    static const LowestPositionEviction policy;
    return policy;
}

PlannedExchange plan_exchange(const QubitPermutation &sigma, std::span<const QubitId> qubits_needed,
                              const EvictionPolicy &policy, std::span<const QubitId> pinned,
                              unsigned chunk_count) {
    const unsigned k = static_cast<unsigned>(qubits_needed.size());
    const unsigned capacity = std::min(sigma.local_qubits(), sigma.nonlocal_qubits());
    if (k > capacity) {
        throw CapacityError("cannot relocalize " + std::to_string(k) +
                            " qubits at once; at most min(m, L-m) = " + std::to_string(capacity));
    }
    for (QubitId q : qubits_needed) {
        if (q >= sigma.total_qubits()) {
            throw DomainError("qubit " + std::to_string(q) + " out of range");
        }
        if (sigma.is_local(q)) {
            throw DomainError("qubit " + std::to_string(q) + " is already local");
        }
    }
    std::vector<QubitId> keep(pinned.begin(), pinned.end());
    const std::vector<unsigned> evicted = policy.choose(sigma, k, keep);

    PlannedExchange out{ExchangePlan{}, sigma, {}};
    out.plan.k = k;
    out.plan.local_qubits = sigma.local_qubits();
    out.plan.chunk_count = chunk_count;
    for (unsigned i = 0; i < k; ++i) {
        out.plan.local_positions.push_back(evicted[i]);
        out.plan.rank_positions.push_back(sigma.position_of(qubits_needed[i]));
        out.qubit_pairs.emplace_back(sigma.qubit_at(evicted[i]), qubits_needed[i]);
    }
    out.plan.validate(sigma.total_qubits());
    out.sigma = apply_plan(sigma, out.plan);
    return out;
}

ExchangePlan plan_from_pairs(const QubitPermutation &sigma,
                             std::span<const std::pair<QubitId, QubitId>> qubit_pairs,
                             unsigned chunk_count) {
    ExchangePlan plan;
    plan.k = static_cast<unsigned>(qubit_pairs.size());
    plan.local_qubits = sigma.local_qubits();
    plan.chunk_count = chunk_count;
    for (const auto &[a, b] : qubit_pairs) {
        if (a >= sigma.total_qubits() || b >= sigma.total_qubits()) {
            throw DomainError("swap qubit out of range");
        }
        const bool a_local = sigma.is_local(a);
        const bool b_local = sigma.is_local(b);
        if (a_local == b_local) {
            throw LocalityError("swap pair (" + std::to_string(a) + ", " + std::to_string(b) +
                                ") must pair one local with one nonlocal qubit");
        }
        const QubitId local = a_local ? a : b;
        const QubitId remote = a_local ? b : a;
        plan.local_positions.push_back(sigma.position_of(local));
        plan.rank_positions.push_back(sigma.position_of(remote));
    }
    plan.validate(sigma.total_qubits());
    return plan;
}

QubitPermutation apply_plan(QubitPermutation sigma, const ExchangePlan &plan) {
    for (unsigned i = 0; i < plan.k; ++i) {
        sigma.transpose(plan.local_positions[i], plan.rank_positions[i]);
    }
    return sigma;
}

Index pattern_address(const ExchangePlan &plan, Index pattern, Index ordinal) {
    std::vector<unsigned> sorted = plan.local_positions;
    std::sort(sorted.begin(), sorted.end());
    Index address = ordinal;
    for (unsigned pos : sorted) {
        address = insert_zero_bit(address, pos);
    }
    for (unsigned i = 0; i < plan.k; ++i) {
        address |= Index{bit_of(pattern, i)} << plan.local_positions[i];
    }
    return address;
}

Index rank_pattern(const ExchangePlan &plan, Rank rank) {
    Index pattern = 0;
    for (unsigned i = 0; i < plan.k; ++i) {
        pattern |= Index{bit_of(rank, plan.rank_positions[i] - plan.local_qubits)} << i;
    }
    return pattern;
}

Rank partner_for_pattern(const ExchangePlan &plan, Rank rank, Index pattern) {
    Rank partner = rank;
    for (unsigned i = 0; i < plan.k; ++i) {
        const unsigned bit = plan.rank_positions[i] - plan.local_qubits;
        partner = (partner & ~pow2(bit)) | (Index{bit_of(pattern, i)} << bit);
    }
    return partner;
}

namespace {

std::vector<Index> addresses_for_pattern(const ExchangePlan &plan, Index pattern) {
    const Index count = plan.slots_per_partner();
    std::vector<Index> out;
    out.reserve(count);
    for (Index j = 0; j < count; ++j) {
        out.push_back(pattern_address(plan, pattern, j));
    }
    return out;
}

}  // namespace

std::vector<PartnerSlots> exchange_slots(const ExchangePlan &plan, Rank my_rank) {
    const Index mine = rank_pattern(plan, my_rank);
    std::vector<PartnerSlots> out;
    for (Index pattern = 0; pattern < pow2(plan.k); ++pattern) {
        if (pattern == mine) {
            continue;
        }
        PartnerSlots slots{partner_for_pattern(plan, my_rank, pattern), {}, {}};
        slots.send_addresses = addresses_for_pattern(plan, pattern);
        slots.recv_addresses = slots.send_addresses;
        out.push_back(std::move(slots));
    }
    std::sort(out.begin(), out.end(), [](const PartnerSlots &a, const PartnerSlots &b) {
        return a.partner_rank < b.partner_rank;
    });
    return out;
}

std::vector<Index> retained_slots(const ExchangePlan &plan, Rank my_rank) {
    return addresses_for_pattern(plan, rank_pattern(plan, my_rank));
}

}  // namespace qshard
