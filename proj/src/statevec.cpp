#include "qshard/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <new>
#include <numbers>
#include <string>

#include "qshard/error.hpp"

namespace qshard {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const Amplitude kI{0.0, 1.0};

// Plain complex product; std::complex operator* takes a slow NaN-recovery path.
inline Amplitude mul(const Amplitude &a, const Amplitude &b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

void require_local(const StateShard &shard, unsigned bit, const char *what) {
    if (bit >= shard.local_qubits()) {
        throw LocalityError(std::string(what) + ": bit " + std::to_string(bit) +
                            " is not local (shard has " + std::to_string(shard.local_qubits()) +
                            " local qubits)");
    }
}

void require_distinct(unsigned a, unsigned b, const char *what) {
    if (a == b) {
        throw DomainError(std::string(what) + ": control and target must differ (both " +
                          std::to_string(a) + ")");
    }
}

}  // namespace

double phase_from_k(int k) {
    const unsigned magnitude = static_cast<unsigned>(k < 0 ? -static_cast<long>(k) : k);
    const double phi = 2.0 * std::numbers::pi / std::ldexp(1.0, static_cast<int>(magnitude));
    return k < 0 ? -phi : phi;
}

Gate2x2 Gate2x2::hadamard() {
    return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
}

Gate2x2 Gate2x2::x_rotation() {
    return {kInvSqrt2, kI * kInvSqrt2, kI * kInvSqrt2, kInvSqrt2};
}

Gate2x2 Gate2x2::y_rotation() {
    return {kInvSqrt2, kInvSqrt2, -kInvSqrt2, kInvSqrt2};
}

Gate2x2 Gate2x2::adjoint() const {
    return {std::conj(u00), std::conj(u10), std::conj(u01), std::conj(u11)};
}

Gate2x2 Gate2x2::operator*(const Gate2x2 &rhs) const {
    return {u00 * rhs.u00 + u01 * rhs.u10, u00 * rhs.u01 + u01 * rhs.u11,
            u10 * rhs.u00 + u11 * rhs.u10, u10 * rhs.u01 + u11 * rhs.u11};
}

double Gate2x2::unitarity_error() const {
    const Gate2x2 p = adjoint() * *this;
    return std::max({std::abs(p.u00 - 1.0), std::abs(p.u01), std::abs(p.u10),
                     std::abs(p.u11 - 1.0)});
}

StateShard::StateShard(unsigned local_qubits, std::uint64_t rank) : m_(local_qubits), rank_(rank) {
    if (local_qubits >= 60) {
        throw ResourceError("shard of 2^" + std::to_string(local_qubits) +
                            " amplitudes is not addressable");
    }
    try {
        amps_.assign(pow2(local_qubits), Amplitude{});
    } catch (const std::bad_alloc &) {
        throw ResourceError("cannot allocate shard of 2^" + std::to_string(local_qubits) +
                            " amplitudes on rank " + std::to_string(rank));
    }
}

void StateShard::fill_zero() { std::fill(amps_.begin(), amps_.end(), Amplitude{}); }

void apply_single_qubit(StateShard &shard, unsigned local_bit, const Gate2x2 &u) {
    require_local(shard, local_bit, "single-qubit gate");
    auto amps = shard.amplitudes();
    const Index stride = pow2(local_bit);
    const Index size = amps.size();
    for (Index base = 0; base < size; base += 2 * stride) {
        for (Index i = base; i < base + stride; ++i) {
            const Amplitude a0 = amps[i];
            const Amplitude a1 = amps[i + stride];
            amps[i] = mul(u.u00, a0) + mul(u.u01, a1);
            amps[i + stride] = mul(u.u10, a0) + mul(u.u11, a1);
        }
    }
}

void apply_phase_shift(StateShard &shard, unsigned local_bit, double phi) {
    require_local(shard, local_bit, "phase shift");
    auto amps = shard.amplitudes();
    const Amplitude factor = std::polar(1.0, phi);
    const Index stride = pow2(local_bit);
    const Index size = amps.size();
    for (Index base = stride; base < size; base += 2 * stride) {
        for (Index i = base; i < base + stride; ++i) {
            amps[i] = mul(amps[i], factor);
        }
    }
}

void apply_cnot(StateShard &shard, unsigned control_bit, unsigned target_bit) {
    require_local(shard, control_bit, "CNOT control");
    require_local(shard, target_bit, "CNOT target");
    require_distinct(control_bit, target_bit, "CNOT");
    auto amps = shard.amplitudes();
    const unsigned lo = std::min(control_bit, target_bit);
    const unsigned hi = std::max(control_bit, target_bit);
    const Index control = pow2(control_bit);
    const Index target = pow2(target_bit);
    const Index quarter = amps.size() / 4;
    for (Index j = 0; j < quarter; ++j) {
        const Index i0 = insert_two_zero_bits(j, lo, hi) | control;
        std::swap(amps[i0], amps[i0 | target]);
    }
}

void apply_controlled_phase(StateShard &shard, unsigned control_bit, unsigned target_bit,
                            double phi) {
    require_local(shard, control_bit, "controlled phase control");
    require_local(shard, target_bit, "controlled phase target");
    require_distinct(control_bit, target_bit, "controlled phase");
    auto amps = shard.amplitudes();
    const Amplitude factor = std::polar(1.0, phi);
    const unsigned lo = std::min(control_bit, target_bit);
    const unsigned hi = std::max(control_bit, target_bit);
    const Index both = pow2(control_bit) | pow2(target_bit);
    const Index quarter = amps.size() / 4;
    for (Index j = 0; j < quarter; ++j) {
        Amplitude &a = amps[insert_two_zero_bits(j, lo, hi) | both];
        a = mul(a, factor);
    }
}

void apply_controlled_v(StateShard &shard, unsigned control_bit, unsigned target_bit, double phi) {
    require_local(shard, control_bit, "controlled-V control");
    require_local(shard, target_bit, "controlled-V target");
    require_distinct(control_bit, target_bit, "controlled-V");
    auto amps = shard.amplitudes();
    const Amplitude e = std::polar(1.0, phi);
    const Amplitude plus = 0.5 * (1.0 + e);
    const Amplitude minus = 0.5 * (1.0 - e);
    const unsigned lo = std::min(control_bit, target_bit);
    const unsigned hi = std::max(control_bit, target_bit);
    const Index control = pow2(control_bit);
    const Index target = pow2(target_bit);
    const Index quarter = amps.size() / 4;
    for (Index j = 0; j < quarter; ++j) {
        const Index i0 = insert_two_zero_bits(j, lo, hi) | control;
        const Index i1 = i0 | target;
        const Amplitude b0 = amps[i0];
        const Amplitude b1 = amps[i1];
        amps[i0] = mul(plus, b0) + mul(minus, b1);
        amps[i1] = mul(minus, b0) + mul(plus, b1);
    }
}

void apply_toffoli(StateShard &shard, unsigned control1, unsigned control2, unsigned target_bit) {
    require_local(shard, control1, "Toffoli control");
    require_local(shard, control2, "Toffoli control");
    require_local(shard, target_bit, "Toffoli target");
    if (control1 == control2 || control1 == target_bit || control2 == target_bit) {
        throw DomainError("Toffoli: bits must be distinct");
    }
    auto amps = shard.amplitudes();
    unsigned sorted[3] = {control1, control2, target_bit};
    std::sort(std::begin(sorted), std::end(sorted));
    const Index controls = pow2(control1) | pow2(control2);
    const Index target = pow2(target_bit);
    const Index eighth = amps.size() / 8;
    for (Index j = 0; j < eighth; ++j) {
        Index i0 = insert_zero_bit(j, sorted[0]);
        i0 = insert_zero_bit(i0, sorted[1]);
        i0 = insert_zero_bit(i0, sorted[2]) | controls;
        std::swap(amps[i0], amps[i0 | target]);
    }
}

double partial_expectation(const StateShard &shard, unsigned local_bit) {
    require_local(shard, local_bit, "expectation");
    const auto amps = shard.amplitudes();
    const Index stride = pow2(local_bit);
    double sum = 0.0;
    for (Index base = stride; base < amps.size(); base += 2 * stride) {
        for (Index i = base; i < base + stride; ++i) {
            sum += std::norm(amps[i]);
        }
    }
    return sum;
}

double norm_squared(const StateShard &shard) {
    double sum = 0.0;
    for (const Amplitude &a : shard.amplitudes()) {
        sum += std::norm(a);
    }
    return sum;
}

}  // namespace qshard
