#pragma once

/**
 * @file
 * Run reports: human-readable text and a JSON document.
 *
 * JSON layout (all keys always present, "samples" may be empty):
 *
 *     {
 *       "program":      {"qubits": L, "ops": N_O, "swaps": S},
 *       "config":       {"ranks": N, "kmax": K, "chunks": C, "seed": s},
 *       "expectations": [{"qubit": q, "value": <Q_q>}, ...],
 *       "samples":      [index, ...],
 *       "exchange":     {"amplitudes_sent": [per rank], "messages_sent": [per rank]},
 *       "norm":         n,
 *       "timing":       {"wall_seconds": t_E, "cpu_seconds": t_CPU,
 *                        "rank_cpu_seconds": [per rank]}
 *     }
 *
 * Everything outside "timing" is a deterministic function of the inputs.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qshard/cluster.hpp"

namespace qshard {

struct RunReport {
    unsigned l = 0;
    std::uint64_t n_ranks = 1;
    unsigned k_max = 1;
    unsigned chunk_count = 4;
    std::uint64_t seed = 0;
    std::uint64_t n_ops = 0;
    std::uint64_t n_swaps = 0;
    double wall_seconds = 0.0;
    double cpu_seconds = 0.0;
    Expectations expectations;
    std::vector<Index> samples;
    std::vector<RankRecord> ranks;
    double norm = 0.0;

    ExchangeStats total_exchange() const;
};

std::string format_report(const RunReport &report);

nlohmann::json report_json(const RunReport &report);

/// Copy of `document` without its "timing" member.
nlohmann::json without_timing(nlohmann::json document);

}  // namespace qshard
