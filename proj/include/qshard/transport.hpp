#pragma once

/**
 * @file
 * In-process message passing between SPMD ranks.
 *
 * Each rank runs in its own thread and talks to the others only through a
 * Communicator: synchronous pairwise buffer exchange and fixed-order
 * collectives. A directed (source, destination) channel holds at most one
 * chunk in flight. Every blocking wait is bounded by the fabric timeout and
 * is released early if any rank aborts.
 */

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "qshard/layout.hpp"
#include "qshard/statevec.hpp"

namespace qshard {

struct RankTopology {
    unsigned total_qubits = 0;
    unsigned local_qubits = 0;

    /// Builds the topology for `n_ranks` ranks; n_ranks must be a power of two
    /// no larger than 2^L.
    static RankTopology for_ranks(unsigned total_qubits, std::uint64_t n_ranks);

    std::uint64_t n_ranks() const { return pow2(total_qubits - local_qubits); }
};

struct ExchangeStats {
    std::uint64_t amplitudes_sent = 0;
    std::uint64_t messages_sent = 0;

    bool operator==(const ExchangeStats &) const = default;
};

/// Sizes of the pieces a buffer of `length` is split into.
std::vector<std::size_t> chunk_sizes(std::size_t length, unsigned chunk_count);

class Fabric {
  public:
    Fabric(std::uint64_t n_ranks, std::chrono::milliseconds timeout);
    Fabric(const Fabric &) = delete;
    Fabric &operator=(const Fabric &) = delete;

    std::uint64_t n_ranks() const noexcept { return n_ranks_; }
    std::chrono::milliseconds timeout() const noexcept { return timeout_; }

    /// Wakes every blocked rank; their pending calls throw.
    void abort();
    bool aborted() const noexcept { return aborted_.load(); }

  private:
    friend class Communicator;

    /// Borrowed view of the sender's buffer, valid until consumed.
    struct Message {
        std::uint64_t total_length;
        std::span<const Amplitude> data;
    };

    struct Inbox {
        std::mutex mutex;
        std::condition_variable cv;
        std::vector<std::optional<Message>> from;
    };

    void post(Rank source, Rank destination, Message message);
    /// Copies the message from `source` into `in` and releases the sender.
    void take_into(Rank destination, Rank source, std::uint64_t total_length,
                   std::span<Amplitude> in);
    /// Blocks until `destination` has consumed the message posted by `source`.
    void await_consumed(Rank source, Rank destination);

    /// Blocks until every rank arrives; throws TimeoutError on a straggler.
    void barrier(Rank rank);

    std::uint64_t n_ranks_;
    std::chrono::milliseconds timeout_;
    std::atomic<bool> aborted_{false};
    std::vector<std::unique_ptr<Inbox>> inboxes_;

    std::mutex barrier_mutex_;
    std::condition_variable barrier_cv_;
    std::uint64_t barrier_waiting_ = 0;
    std::uint64_t barrier_generation_ = 0;

    std::vector<double> value_slots_;
    std::vector<std::vector<std::uint64_t>> index_slots_;
};

/// One rank's view of the fabric.
class Communicator {
  public:
    Communicator(Fabric &fabric, Rank rank) : fabric_(&fabric), rank_(rank) {}

    Rank rank() const noexcept { return rank_; }
    std::uint64_t n_ranks() const noexcept { return fabric_->n_ranks(); }

    /// Trades `out` for the partner's equally long buffer, written to `in`.
    /// Both sides must call with mirrored ranks and equal lengths.
    void exchange(Rank partner, std::span<const Amplitude> out, std::span<Amplitude> in,
                  unsigned chunk_count);

    std::vector<Amplitude> exchange(Rank partner, std::span<const Amplitude> out,
                                    unsigned chunk_count);

    /// Sum over ranks, accumulated in rank order 0..N-1 on every rank.
    double all_reduce_sum(double value);

    std::vector<double> all_gather(double value);
    std::vector<std::vector<std::uint64_t>> all_gather(std::vector<std::uint64_t> values);

    void barrier() { fabric_->barrier(rank_); }

    const ExchangeStats &stats() const noexcept { return stats_; }
    void reset_stats() { stats_ = {}; }

  private:
    Fabric *fabric_;
    Rank rank_;
    ExchangeStats stats_;
};

}  // namespace qshard
