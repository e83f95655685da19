#pragma once

/**
 * @file
 * Amplitude shards and the in-place gate kernels that act on local bits.
 *
 * Every kernel walks the shard pair-strided: the partner of index i for a
 * kernel on bit b is i ^ (1 << b). Kernels never allocate a second
 * amplitude array and never inspect amplitudes for NaN; norm checks are the
 * caller's job.
 */

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qshard/bits.hpp"

namespace qshard {

using Amplitude = std::complex<double>;

/// Phase angle 2*pi / 2^|k|, negated for k < 0.
double phase_from_k(int k);

/// Row-major 2x2 complex matrix acting on (a0, a1).
struct Gate2x2 {
    Amplitude u00, u01, u10, u11;

    static Gate2x2 hadamard();
    /// Rotation by pi/2 about x: (a0 + i a1, a1 + i a0) / sqrt(2).
    static Gate2x2 x_rotation();
    /// Rotation by pi/2 about y: (a0 + a1, a1 - a0) / sqrt(2).
    static Gate2x2 y_rotation();

    Gate2x2 adjoint() const;
    Gate2x2 operator*(const Gate2x2 &rhs) const;

    /// Largest entrywise deviation of U^dagger U from the identity.
    double unitarity_error() const;
};

/// One rank's slice of the distributed state: 2^m amplitudes.
class StateShard {
  public:
    /// Allocates a zeroed shard; throws ResourceError when 2^m does not fit.
    StateShard(unsigned local_qubits, std::uint64_t rank);

    unsigned local_qubits() const noexcept { return m_; }
    std::uint64_t rank() const noexcept { return rank_; }
    Index size() const noexcept { return amps_.size(); }

    std::span<Amplitude> amplitudes() noexcept { return amps_; }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }

    Amplitude &operator[](Index address) { return amps_[address]; }
    const Amplitude &operator[](Index address) const { return amps_[address]; }

    void fill_zero();

  private:
    unsigned m_;
    std::uint64_t rank_;
    std::vector<Amplitude> amps_;
};

void apply_single_qubit(StateShard &shard, unsigned local_bit, const Gate2x2 &u);
void apply_phase_shift(StateShard &shard, unsigned local_bit, double phi);
void apply_cnot(StateShard &shard, unsigned control_bit, unsigned target_bit);
void apply_controlled_phase(StateShard &shard, unsigned control_bit, unsigned target_bit,
                            double phi);
void apply_controlled_v(StateShard &shard, unsigned control_bit, unsigned target_bit, double phi);
void apply_toffoli(StateShard &shard, unsigned control1, unsigned control2, unsigned target_bit);

/// This shard's contribution to P(bit = 1); callers reduce across ranks.
double partial_expectation(const StateShard &shard, unsigned local_bit);

double norm_squared(const StateShard &shard);

}  // namespace qshard
