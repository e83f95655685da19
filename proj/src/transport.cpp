#include "qshard/transport.hpp"

#include <algorithm>
#include <string>

#include "qshard/error.hpp"

namespace qshard {

namespace {

[[noreturn]] void throw_aborted() { throw ProtocolError("fabric aborted by another rank"); }

}  // namespace

RankTopology RankTopology::for_ranks(unsigned total_qubits, std::uint64_t n_ranks) {
    if (n_ranks == 0 || !is_power_of_two(n_ranks)) {
        throw DomainError("rank count " + std::to_string(n_ranks) + " is not a power of two");
    }
    const unsigned rank_bits = log2_exact(n_ranks);
    if (rank_bits > total_qubits) {
        throw DomainError("rank count " + std::to_string(n_ranks) + " exceeds 2^" +
                          std::to_string(total_qubits) + " amplitudes");
    }
    return {total_qubits, total_qubits - rank_bits};
}

std::vector<std::size_t> chunk_sizes(std::size_t length, unsigned chunk_count) {
    if (chunk_count == 0) {
        throw DomainError("chunk count must be positive");
    }
    std::vector<std::size_t> sizes;
    const std::size_t pieces = std::min<std::size_t>(chunk_count, length);
    for (std::size_t i = 0; i < pieces; ++i) {
        sizes.push_back(length / pieces + (i < length % pieces ? 1 : 0));
    }
    return sizes;
}

Fabric::Fabric(std::uint64_t n_ranks, std::chrono::milliseconds timeout)
    : n_ranks_(n_ranks), timeout_(timeout), value_slots_(n_ranks), index_slots_(n_ranks) {
    if (n_ranks == 0) {
        throw DomainError("fabric needs at least one rank");
    }
    inboxes_.reserve(n_ranks);
    for (std::uint64_t r = 0; r < n_ranks; ++r) {
        inboxes_.push_back(std::make_unique<Inbox>());
        inboxes_.back()->from.resize(n_ranks);
    }
}

void Fabric::abort() {
    aborted_.store(true);
    for (auto &inbox : inboxes_) {
        std::lock_guard lock(inbox->mutex);
        inbox->cv.notify_all();
    }
    std::lock_guard lock(barrier_mutex_);
    barrier_cv_.notify_all();
}

void Fabric::post(Rank source, Rank destination, Message message) {
    Inbox &inbox = *inboxes_[destination];
    std::unique_lock lock(inbox.mutex);
    const bool ready = inbox.cv.wait_for(lock, timeout_, [&] {
        return aborted() || !inbox.from[source].has_value();
    });
    if (aborted()) {
        throw_aborted();
    }
    if (!ready) {
        throw TimeoutError("rank " + std::to_string(source) + " timed out sending to rank " +
                           std::to_string(destination));
    }
    inbox.from[source] = std::move(message);
    inbox.cv.notify_all();
}

void Fabric::take_into(Rank destination, Rank source, std::uint64_t total_length,
                       std::span<Amplitude> in) {
    Inbox &inbox = *inboxes_[destination];
    std::unique_lock lock(inbox.mutex);
    const bool ready = inbox.cv.wait_for(lock, timeout_, [&] {
        return aborted() || inbox.from[source].has_value();
    });
    if (aborted()) {
        throw_aborted();
    }
    if (!ready) {
        throw TimeoutError("rank " + std::to_string(destination) +
                           " timed out waiting for rank " + std::to_string(source));
    }
    const Message &message = *inbox.from[source];
    if (message.total_length != total_length || message.data.size() != in.size()) {
        const std::uint64_t theirs = message.total_length;
        lock.unlock();
        abort();
        throw ProtocolError("rank " + std::to_string(destination) + " and rank " +
                            std::to_string(source) + " disagree on exchange length (" +
                            std::to_string(total_length) + " vs " + std::to_string(theirs) + ")");
    }
    std::copy(message.data.begin(), message.data.end(), in.begin());
    inbox.from[source].reset();
    inbox.cv.notify_all();
}

void Fabric::await_consumed(Rank source, Rank destination) {
    Inbox &inbox = *inboxes_[destination];
    std::unique_lock lock(inbox.mutex);
    const bool done = inbox.cv.wait_for(lock, timeout_, [&] {
        return aborted() || !inbox.from[source].has_value();
    });
    if (aborted()) {
        throw_aborted();
    }
    if (!done) {
        throw TimeoutError("rank " + std::to_string(destination) + " never consumed data from rank " +
                           std::to_string(source));
    }
}

void Fabric::barrier(Rank rank) {
    std::unique_lock lock(barrier_mutex_);
    const std::uint64_t generation = barrier_generation_;
    if (++barrier_waiting_ == n_ranks_) {
        barrier_waiting_ = 0;
        ++barrier_generation_;
        barrier_cv_.notify_all();
        return;
    }
    const bool released = barrier_cv_.wait_for(lock, timeout_, [&] {
        return aborted() || barrier_generation_ != generation;
    });
    if (aborted()) {
        throw_aborted();
    }
    if (!released) {
        throw TimeoutError("rank " + std::to_string(rank) + " timed out in a collective");
    }
}

void Communicator::exchange(Rank partner, std::span<const Amplitude> out, std::span<Amplitude> in,
                            unsigned chunk_count) {
    if (partner == rank_ || partner >= n_ranks()) {
        throw ProtocolError("rank " + std::to_string(rank_) + " cannot exchange with rank " +
                            std::to_string(partner));
    }
    if (out.size() != in.size()) {
        throw ProtocolError("send and receive buffers differ in length");
    }
    std::size_t offset = 0;
    for (std::size_t piece : chunk_sizes(out.size(), chunk_count)) {
        fabric_->post(rank_, partner, {out.size(), out.subspan(offset, piece)});
        ++stats_.messages_sent;
        stats_.amplitudes_sent += piece;
        fabric_->take_into(rank_, partner, out.size(), in.subspan(offset, piece));
        fabric_->await_consumed(rank_, partner);
        offset += piece;
    }
}

std::vector<Amplitude> Communicator::exchange(Rank partner, std::span<const Amplitude> out,
                                              unsigned chunk_count) {
    std::vector<Amplitude> in(out.size());
    exchange(partner, out, in, chunk_count);
    return in;
}

std::vector<double> Communicator::all_gather(double value) {
    fabric_->value_slots_[rank_] = value;
    barrier();
    std::vector<double> values = fabric_->value_slots_;
    barrier();
    return values;
}

double Communicator::all_reduce_sum(double value) {
    double sum = 0.0;
    for (double v : all_gather(value)) {
        sum += v;
    }
    return sum;
}

std::vector<std::vector<std::uint64_t>> Communicator::all_gather(
    std::vector<std::uint64_t> values) {
    fabric_->index_slots_[rank_] = std::move(values);
    barrier();
    auto gathered = fabric_->index_slots_;
    barrier();
    return gathered;
}

}  // namespace qshard
