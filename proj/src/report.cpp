#include "qshard/report.hpp"

#include <cstdio>
#include <sstream>

namespace qshard {

ExchangeStats RunReport::total_exchange() const {
    ExchangeStats total;
    for (const RankRecord &rank : ranks) {
        total.amplitudes_sent += rank.stats.amplitudes_sent;
        total.messages_sent += rank.stats.messages_sent;
    }
    return total;
}

namespace {

std::string fixed(double value, int digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
    return buffer;
}

}  // namespace

std::string format_report(const RunReport &report) {
    std::ostringstream out;
    out << "qubits " << report.l << "  ranks " << report.n_ranks << "  kmax " << report.k_max
        << "  chunks " << report.chunk_count << "  ops " << report.n_ops << "  swaps "
        << report.n_swaps << '\n';
    for (const auto &[qubit, value] : report.expectations) {
        out << "<Q" << qubit << "> = " << fixed(value, 10) << '\n';
    }
    if (!report.samples.empty()) {
        out << "samples:";
        for (Index s : report.samples) {
            out << ' ' << s;
        }
        out << '\n';
    }
    const ExchangeStats total = report.total_exchange();
    out << "exchanged amplitudes " << total.amplitudes_sent << "  messages "
        << total.messages_sent << '\n';
    out << "norm " << fixed(report.norm, 12) << '\n';
    out << "t_E " << fixed(report.wall_seconds, 4) << " s  t_CPU " << fixed(report.cpu_seconds, 4)
        << " s\n";
    return out.str();
}

nlohmann::json report_json(const RunReport &report) {
    using nlohmann::json;
    json expectations = json::array();
    for (const auto &[qubit, value] : report.expectations) {
        expectations.push_back({{"qubit", qubit}, {"value", value}});
    }
    json sent = json::array();
    json messages = json::array();
    json cpu = json::array();
    for (const RankRecord &rank : report.ranks) {
        sent.push_back(rank.stats.amplitudes_sent);
        messages.push_back(rank.stats.messages_sent);
        cpu.push_back(rank.cpu_seconds);
    }
    return {
        {"program", {{"qubits", report.l}, {"ops", report.n_ops}, {"swaps", report.n_swaps}}},
        {"config",
         {{"ranks", report.n_ranks},
          {"kmax", report.k_max},
          {"chunks", report.chunk_count},
          {"seed", report.seed}}},
        {"expectations", expectations},
        {"samples", report.samples},
        {"exchange", {{"amplitudes_sent", sent}, {"messages_sent", messages}}},
        {"norm", report.norm},
        {"timing",
         {{"wall_seconds", report.wall_seconds},
          {"cpu_seconds", report.cpu_seconds},
          {"rank_cpu_seconds", cpu}}},
    };
}

nlohmann::json without_timing(nlohmann::json document) {
    document.erase("timing");
    return document;
}

}  // namespace qshard
