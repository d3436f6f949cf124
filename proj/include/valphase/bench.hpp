#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "valphase/pipeline.hpp"
#include "valphase/workload.hpp"

namespace valphase {

// One figure-style sweep: every (workers, block_size) cell is run `reps`
// times on fresh stores with a deterministic transaction stream.
struct ExperimentSpec {
    PipelineMode mode = PipelineMode::Baseline;
    BackendKind backend = BackendKind::FastEmbedded;
    std::vector<uint32_t> workers{16};
    std::vector<uint32_t> block_sizes{50};
    uint32_t reps = 20;
    LatencyModel latency;
    WorkloadConfig workload;
    bool cache_enabled = true;
    CacheClearPolicy cache_policy = CacheClearPolicy::OnUpgrade;
    uint32_t verification_cost_us = 0;
    uint32_t ledger_retry_limit = 3;
    std::string out = "experiment";  // rows go to <out>.csv, stats to <out>.summary.csv
};

// Flat `key = value` text; '#' starts a comment. Unknown keys and malformed
// values report the offending line number.
ExperimentSpec parse_config_text(const std::string& text);
ExperimentSpec parse_config_file(const std::filesystem::path& path);

inline constexpr const char* kCsvHeader =
    "mode,backend,workers,block_size,rep,block_num,num_txs,num_valid,vscc_us,statedb_read_us,"
    "mvcc_us,ledger_write_us,statedb_write_us,others_us,vscc_statedb_read_us,"
    "ledger_statedb_write_us,total_us";

struct CellKey {
    std::string mode;
    std::string backend;
    uint32_t workers = 0;
    uint32_t block_size = 0;

    auto operator<=>(const CellKey&) const = default;
};

struct MetricStat {
    double mean = 0;
    double stddev = 0;  // sample stddev (n-1), 0 when n < 2
};

// Latency metrics are pooled over every block row of the cell; throughput_tps
// is aggregated over the per-repetition stream throughputs. A failed cell
// carries a single `cell_error` metric instead.
struct Summary {
    std::map<CellKey, std::map<std::string, MetricStat>> cells;
};

Summary run_experiment(const ExperimentSpec& spec);

void write_summary(const Summary& summary, const std::filesystem::path& path);
Summary load_summary(const std::filesystem::path& path);

// Per-cell throughput and latency-component ratios, b over a, matched on
// (workers, block_size). Throws when the cell sets differ.
std::string compare_summaries(const Summary& a, const Summary& b);

// Output path with the VALPHASE_OUT_DIR override applied to the directory.
std::filesystem::path resolve_out_path(const std::string& out);

const std::vector<std::string>& latency_metric_names();

}  // namespace valphase
