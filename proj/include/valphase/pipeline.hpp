#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "valphase/committer.hpp"
#include "valphase/ledger.hpp"
#include "valphase/mvcc.hpp"
#include "valphase/statedb.hpp"
#include "valphase/thread_pool.hpp"
#include "valphase/types.hpp"
#include "valphase/vscc.hpp"

namespace valphase {

enum class PipelineMode : uint8_t { Baseline, Optimized };

const char* to_string(PipelineMode mode);

struct PipelineConfig {
    PipelineMode mode = PipelineMode::Baseline;
    BackendKind backend = BackendKind::FastEmbedded;
    VsccConfig vscc;
    uint32_t ledger_retry_limit = 3;
    uint32_t retry_backoff_ms = 10;
    uint32_t block_size_hint = 0;  // informational
};

// Per-block stage timings in microseconds. Baseline rows satisfy
//   vscc + statedb_read + mvcc + ledger_write + statedb_write + others == total
// and optimized rows
//   vscc_statedb_read + mvcc + ledger_statedb_write + others == total;
// others is the residual in both. Columns that do not apply to a mode hold 0.
struct LatencyBreakdown {
    uint64_t vscc_us = 0;
    uint64_t statedb_read_us = 0;
    uint64_t mvcc_us = 0;
    uint64_t ledger_write_us = 0;
    uint64_t statedb_write_us = 0;
    uint64_t others_us = 0;
    uint64_t vscc_statedb_read_us = 0;
    uint64_t ledger_statedb_write_us = 0;
    uint64_t total_us = 0;
    uint32_t num_txs = 0;
    uint32_t num_valid = 0;
};

struct StreamResult {
    std::vector<LatencyBreakdown> blocks;
    uint64_t total_wall_us = 0;
    double throughput_tps = 0.0;  // committed txs (valid and invalid) per second
    uint64_t total_txs = 0;
    uint64_t total_valid = 0;
};

// Drives one block at a time through structural check, syntactic + vscc
// validation, mvcc and commit, in the configured architecture. Owns the
// worker pools and the chaincode cache for the stream it processes.
class Pipeline {
public:
    Pipeline(const PipelineConfig& cfg, BlockLedger& ledger, StateDb& statedb, HistoryDb& history);

    LatencyBreakdown validate_and_commit(Block block);

    StreamResult run_stream(const std::vector<Block>& blocks);

    ChaincodeCache& cache() { return cache_; }
    uint64_t next_block_number() const { return next_number_; }

private:
    LatencyBreakdown run_baseline(Block& block);
    LatencyBreakdown run_optimized(Block& block);
    void structural_check(const Block& block) const;
    void finish_block(const Block& block);

    PipelineConfig cfg_;
    CommitPlan plan_;
    BlockLedger& ledger_;
    StateDb& statedb_;
    HistoryDb& history_;
    ChaincodeCache cache_;
    WorkerPool vscc_pool_;
    WorkerPool aux_pool_;  // bulk read during validation, ledger side during commit
    uint64_t next_number_ = 0;
    Digest prev_hash_{};
    std::atomic<bool> in_flight_{false};
};

}  // namespace valphase
