#pragma once

/**
 * @file
 * SPMD rank engine: N shards, one thread per rank while a phase runs.
 *
 * A Cluster keeps every rank's shard and permutation between phases, so a
 * pipeline can interleave compiled programs with custom rank-parallel steps
 * (oracles, sampling). Each phase spawns the rank threads, joins them, and
 * rethrows the first rank failure. After a failed phase the state is
 * unspecified.
 */

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "qshard/circuit.hpp"
#include "qshard/layout.hpp"
#include "qshard/statevec.hpp"
#include "qshard/transport.hpp"

namespace qshard {

struct ClusterConfig {
    unsigned chunk_count = 4;
    std::chrono::milliseconds timeout{30000};
    /// Maximum |norm - 1| tolerated at the end of a measurement block.
    double norm_tolerance = 1e-10;
};

using Expectations = std::map<QubitId, double>;

struct RankRecord {
    Rank rank = 0;
    double cpu_seconds = 0.0;
    std::uint64_t instructions = 0;
    ExchangeStats stats;
};

struct RankContext {
    Rank rank;
    StateShard &shard;
    QubitPermutation &sigma;
    Communicator &comm;
    const ClusterConfig &config;
    Expectations &expectations;
    /// Reused send/receive staging for exchanges, one chunk long.
    std::vector<Amplitude> &staging;
};

class Cluster {
  public:
    explicit Cluster(RankTopology topology, ClusterConfig config = {});

    const RankTopology &topology() const noexcept { return topology_; }
    std::uint64_t n_ranks() const noexcept { return topology_.n_ranks(); }
    const ClusterConfig &config() const noexcept { return config_; }

    /// Current permutation (identical on every rank).
    const QubitPermutation &permutation() const { return ranks_.front().sigma; }

    /// Resets σ to the identity and loads basis state `index`.
    void initialize(Index index);

    /// Runs a locality-valid program body; throws LocalityError otherwise.
    void execute(const Program &program);

    /// Compiles `logical` from the current σ and executes it.
    void execute_logical(const Program &logical, unsigned k_max,
                         const EvictionPolicy &policy = default_eviction());

    /// Runs `fn` once per rank concurrently.
    void spmd(const std::function<void(RankContext &)> &fn);

    /// Dense state in logical index order (test and small-L use).
    std::vector<Amplitude> gather() const;

    double global_norm() const;

    const Expectations &expectations() const { return ranks_.front().expectations; }
    void clear_expectations();

    std::vector<RankRecord> records() const;
    ExchangeStats total_stats() const;
    void reset_records();

    const StateShard &shard(Rank rank) const { return ranks_.at(rank).shard; }
    StateShard &shard(Rank rank) { return ranks_.at(rank).shard; }

  private:
    struct RankState {
        StateShard shard;
        QubitPermutation sigma;
        Expectations expectations;
        RankRecord record;
        std::vector<Amplitude> staging;
    };

    RankTopology topology_;
    ClusterConfig config_;
    std::vector<RankState> ranks_;
};

/// Executes one program instruction on one rank.
void execute_instruction(RankContext &ctx, const Instruction &instruction);

/// Performs the K-pair exchange on this rank and updates its σ.
void run_exchange(RankContext &ctx, const ExchangePlan &plan);

/// Writes basis state `index` into every shard according to σ.
void init_basis_state(std::span<StateShard> shards, const QubitPermutation &sigma, Index index);

/// Thread CPU time of the calling thread.
double thread_cpu_seconds();

}  // namespace qshard
