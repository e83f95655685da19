#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qshard/algorithms.hpp"
#include "qshard/error.hpp"

namespace qshard {

namespace {

constexpr double kSamplingNormTolerance = 1e-6;

std::vector<double> draw_uniforms(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(count);
    for (double &u : out) {
        u = static_cast<double>(rng() >> 11U) * 0x1p-53;
    }
    return out;
}

// Index of the bucket whose cumulative range contains `target`; zero-mass
// buckets are never selected.
std::size_t bucket_of(const std::vector<double> &upper, double target) {
    auto it = std::upper_bound(upper.begin(), upper.end(), target);
    if (it == upper.end()) {
        it = std::lower_bound(upper.begin(), upper.end(), upper.back());
    }
    return static_cast<std::size_t>(it - upper.begin());
}

}  // namespace

std::vector<Index> sample_states(Cluster &cluster, std::size_t count, std::uint64_t seed) {
    if (count == 0) {
        return {};
    }
    const std::vector<double> uniforms = draw_uniforms(count, seed);
    std::vector<Index> samples(count);

    cluster.spmd([&](RankContext &ctx) {
        const std::vector<double> masses = ctx.comm.all_gather(norm_squared(ctx.shard));
        std::vector<double> upper(masses.size());
        double total = 0.0;
        for (std::size_t r = 0; r < masses.size(); ++r) {
            total += masses[r];
            upper[r] = total;
        }
        if (!(std::abs(total - 1.0) <= kSamplingNormTolerance)) {
            throw StateError("cannot sample: total probability " + std::to_string(total));
        }

        std::vector<std::pair<double, std::size_t>> mine;
        for (std::size_t j = 0; j < count; ++j) {
            const double target = uniforms[j] * total;
            const std::size_t r = bucket_of(upper, target);
            if (r == ctx.rank) {
                mine.emplace_back(target - (r == 0 ? 0.0 : upper[r - 1]), j);
            }
        }
        std::sort(mine.begin(), mine.end());

        std::vector<std::uint64_t> resolved;
        resolved.reserve(2 * mine.size());
        const AddressDecoder decode(ctx.sigma, ctx.rank);
        const auto amps = ctx.shard.amplitudes();
        double running = 0.0;
        Index address = 0;
        Index last_nonzero = 0;
        for (const auto &[local_target, j] : mine) {
            while (address < amps.size()) {
                const double p = std::norm(amps[address]);
                if (p > 0.0) {
                    last_nonzero = address;
                }
                if (running + p > local_target) {
                    break;
                }
                running += p;
                ++address;
            }
            const Index hit = address < amps.size() ? address : last_nonzero;
            resolved.push_back(j);
            resolved.push_back(decode(hit));
        }

        const auto gathered = ctx.comm.all_gather(std::move(resolved));
        if (ctx.rank == 0) {
            for (const auto &part : gathered) {
                for (std::size_t i = 0; i + 1 < part.size(); i += 2) {
                    samples[part[i]] = part[i + 1];
                }
            }
        }
    });
    return samples;
}

}  // namespace qshard
