#include "qshard/cluster.hpp"

#include <ctime>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "qshard/error.hpp"

namespace qshard {

double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

void init_basis_state(std::span<StateShard> shards, const QubitPermutation &sigma, Index index) {
    if (index >= pow2(sigma.total_qubits())) {
        throw DomainError("basis state " + std::to_string(index) + " out of range for " +
                          std::to_string(sigma.total_qubits()) + " qubits");
    }
    const Location loc = locate(sigma, index);
    for (StateShard &shard : shards) {
        shard.fill_zero();
        if (shard.rank() == loc.rank) {
            shard[loc.address] = 1.0;
        }
    }
}

void run_exchange(RankContext &ctx, const ExchangePlan &plan) {
    const Index mine = rank_pattern(plan, ctx.rank);
    const Index per_partner = plan.slots_per_partner();
    std::vector<std::pair<Rank, Index>> partners;
    for (Index pattern = 0; pattern < pow2(plan.k); ++pattern) {
        if (pattern != mine) {
            partners.emplace_back(partner_for_pattern(plan, ctx.rank, pattern), pattern);
        }
    }
    std::sort(partners.begin(), partners.end());

    std::vector<unsigned> sorted = plan.local_positions;
    std::sort(sorted.begin(), sorted.end());
    auto spread = [&](Index ordinal) {
        for (unsigned pos : sorted) {
            ordinal = insert_zero_bit(ordinal, pos);
        }
        return ordinal;
    };

    const std::vector<std::size_t> pieces = chunk_sizes(per_partner, plan.chunk_count);
    const std::size_t largest = pieces.empty() ? 0 : pieces.front();
    if (ctx.staging.size() < 2 * largest) {
        ctx.staging.resize(2 * largest);
    }
    const std::span<Amplitude> out(ctx.staging.data(), largest);
    const std::span<Amplitude> in(ctx.staging.data() + largest, largest);
    auto amps = ctx.shard.amplitudes();
    for (const auto &[partner, pattern] : partners) {
        const Index offset = pattern_address(plan, pattern, 0);
        Index ordinal = 0;
        for (std::size_t piece : pieces) {
            for (std::size_t j = 0; j < piece; ++j) {
                out[j] = amps[spread(ordinal + j) | offset];
            }
            ctx.comm.exchange(partner, out.first(piece), in.first(piece), 1);
            for (std::size_t j = 0; j < piece; ++j) {
                amps[spread(ordinal + j) | offset] = in[j];
            }
            ordinal += piece;
        }
    }
    ctx.sigma = apply_plan(std::move(ctx.sigma), plan);
}

namespace {

unsigned local_position(const RankContext &ctx, QubitId qubit) {
    const unsigned pos = ctx.sigma.position_of(qubit);
    if (pos >= ctx.sigma.local_qubits()) {
        throw LocalityError("qubit " + std::to_string(qubit) + " is nonlocal (bit position " +
                            std::to_string(pos) + ")");
    }
    return pos;
}

void apply_gate(RankContext &ctx, const GateOp &gate) {
    std::vector<unsigned> bits;
    for (QubitId q : gate.qubits) {
        bits.push_back(local_position(ctx, q));
    }
    StateShard &shard = ctx.shard;
    switch (gate.kind) {
    case GateKind::kH: apply_single_qubit(shard, bits[0], Gate2x2::hadamard()); break;
    case GateKind::kX: apply_single_qubit(shard, bits[0], Gate2x2::x_rotation()); break;
    case GateKind::kY: apply_single_qubit(shard, bits[0], Gate2x2::y_rotation()); break;
    case GateKind::kXdag: apply_single_qubit(shard, bits[0], Gate2x2::x_rotation().adjoint()); break;
    case GateKind::kYdag: apply_single_qubit(shard, bits[0], Gate2x2::y_rotation().adjoint()); break;
    case GateKind::kR: apply_phase_shift(shard, bits[0], phase_from_k(gate.k)); break;
    case GateKind::kCnot: apply_cnot(shard, bits[0], bits[1]); break;
    case GateKind::kCphase:
        apply_controlled_phase(shard, bits[0], bits[1], phase_from_k(gate.k));
        break;
    case GateKind::kCv: apply_controlled_v(shard, bits[0], bits[1], phase_from_k(gate.k)); break;
    case GateKind::kToffoli: apply_toffoli(shard, bits[0], bits[1], bits[2]); break;
    }
}

}  // namespace

void execute_instruction(RankContext &ctx, const Instruction &instruction) {
    if (const auto *gate = std::get_if<GateOp>(&instruction)) {
        apply_gate(ctx, *gate);
    } else if (const auto *swap = std::get_if<SwapOp>(&instruction)) {
        run_exchange(ctx, plan_from_pairs(ctx.sigma, swap->pairs, ctx.config.chunk_count));
    } else if (const auto *measure = std::get_if<DoMeasurement>(&instruction)) {
        for (QubitId q : measure->qubits) {
            const double local = partial_expectation(ctx.shard, local_position(ctx, q));
            ctx.expectations[q] = ctx.comm.all_reduce_sum(local);
        }
    } else if (std::holds_alternative<EndMeasurement>(instruction)) {
        const double norm = ctx.comm.all_reduce_sum(norm_squared(ctx.shard));
        if (!(std::abs(norm - 1.0) <= ctx.config.norm_tolerance)) {
            throw StateError("state norm " + std::to_string(norm) + " deviates from 1");
        }
    }
}

Cluster::Cluster(RankTopology topology, ClusterConfig config)
    : topology_(topology), config_(config) {
    if (topology.local_qubits > topology.total_qubits) {
        throw DomainError("invalid topology");
    }
    const QubitPermutation identity =
        QubitPermutation::identity(topology.total_qubits, topology.local_qubits);
    const std::uint64_t n = topology.n_ranks();
    ranks_.reserve(n);
    for (Rank r = 0; r < n; ++r) {
        ranks_.push_back(RankState{StateShard(topology.local_qubits, r), identity, {}, {}, {}});
        ranks_.back().record.rank = r;
    }
    initialize(0);
}

void Cluster::initialize(Index index) {
    const QubitPermutation identity =
        QubitPermutation::identity(topology_.total_qubits, topology_.local_qubits);
    if (index >= pow2(topology_.total_qubits)) {
        throw DomainError("basis state " + std::to_string(index) + " out of range");
    }
    const Location loc = locate(identity, index);
    for (RankState &state : ranks_) {
        state.sigma = identity;
        state.shard.fill_zero();
        if (state.shard.rank() == loc.rank) {
            state.shard[loc.address] = 1.0;
        }
    }
}

void Cluster::spmd(const std::function<void(RankContext &)> &fn) {
    const std::uint64_t n = n_ranks();
    Fabric fabric(n, config_.timeout);
    std::vector<Communicator> comms;
    comms.reserve(n);
    for (Rank r = 0; r < n; ++r) {
        comms.emplace_back(fabric, r);
    }

    auto body = [&](Rank r) {
        RankState &state = ranks_[r];
        RankContext ctx{r, state.shard, state.sigma, comms[r], config_, state.expectations,
                        state.staging};
        fn(ctx);
    };

    std::exception_ptr failure;
    if (n == 1) {
        body(0);
    } else {
        std::mutex failure_mutex;
        std::vector<std::thread> threads;
        threads.reserve(n);
        for (Rank r = 0; r < n; ++r) {
            threads.emplace_back([&, r] {
                try {
                    body(r);
                } catch (...) {
                    {
                        std::lock_guard lock(failure_mutex);
                        if (!failure || !fabric.aborted()) {
                            failure = std::current_exception();
                        }
                    }
                    fabric.abort();
                }
            });
        }
        for (auto &t : threads) {
            t.join();
        }
    }
    for (Rank r = 0; r < n; ++r) {
        ExchangeStats &total = ranks_[r].record.stats;
        total.amplitudes_sent += comms[r].stats().amplitudes_sent;
        total.messages_sent += comms[r].stats().messages_sent;
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

void Cluster::execute(const Program &program) {
    if (program.qubits != topology_.total_qubits) {
        throw DomainError("program has " + std::to_string(program.qubits) +
                          " qubits, cluster simulates " + std::to_string(topology_.total_qubits));
    }
    if (const auto diag = validate_locality(program, permutation())) {
        throw LocalityError((diag->line > 0 ? "line " + std::to_string(diag->line)
                                            : "instruction " +
                                                  std::to_string(diag->instruction_index + 1)) +
                            ": " + diag->message);
    }
    spmd([&](RankContext &ctx) {
        RankRecord &record = ranks_[ctx.rank].record;
        for (const Instruction &instruction : program.body) {
            const double start = thread_cpu_seconds();
            execute_instruction(ctx, instruction);
            record.cpu_seconds += thread_cpu_seconds() - start;
            ++record.instructions;
        }
    });
}

void Cluster::execute_logical(const Program &logical, unsigned k_max,
                              const EvictionPolicy &policy) {
    execute(compile_from(logical, permutation(), k_max, policy).program);
}

std::vector<Amplitude> Cluster::gather() const {
    std::vector<Amplitude> dense(pow2(topology_.total_qubits));
    for (const RankState &state : ranks_) {
        const AddressDecoder decode(state.sigma, state.shard.rank());
        const auto amps = state.shard.amplitudes();
        for (Index a = 0; a < amps.size(); ++a) {
            dense[decode(a)] = amps[a];
        }
    }
    return dense;
}

double Cluster::global_norm() const {
    double sum = 0.0;
    for (const RankState &state : ranks_) {
        sum += norm_squared(state.shard);
    }
    return sum;
}

void Cluster::clear_expectations() {
    for (RankState &state : ranks_) {
        state.expectations.clear();
    }
}

std::vector<RankRecord> Cluster::records() const {
    std::vector<RankRecord> out;
    for (const RankState &state : ranks_) {
        out.push_back(state.record);
    }
    return out;
}

ExchangeStats Cluster::total_stats() const {
    ExchangeStats total;
    for (const RankState &state : ranks_) {
        total.amplitudes_sent += state.record.stats.amplitudes_sent;
        total.messages_sent += state.record.stats.messages_sent;
    }
    return total;
}

void Cluster::reset_records() {
    for (RankState &state : ranks_) {
        const Rank r = state.record.rank;
        state.record = {};
        state.record.rank = r;
    }
}

}  // namespace qshard
