#pragma once

#include <cstdint>

#include "valphase/ledger.hpp"
#include "valphase/statedb.hpp"
#include "valphase/thread_pool.hpp"
#include "valphase/types.hpp"

namespace valphase {

enum class CommitMode : uint8_t { Baseline, Optimized };

// With a fast state database the history write follows the state write; with
// a slow one it rides along the ledger write instead.
enum class HistoryPlacement : uint8_t { AfterStateDb, WithLedger };

HistoryPlacement history_placement_for(BackendKind backend);

struct CommitPlan {
    CommitMode mode = CommitMode::Baseline;
    BackendKind backend = BackendKind::FastEmbedded;
    HistoryPlacement history_placement = HistoryPlacement::AfterStateDb;
    uint32_t ledger_retry_limit = 3;
    uint32_t retry_backoff_ms = 10;

    static CommitPlan make(CommitMode mode, BackendKind backend, uint32_t retry_limit = 3,
                           uint32_t backoff_ms = 10);
};

struct CommitTimings {
    uint64_t ledger_task_us = 0;   // ledger append (+ history when WithLedger)
    uint64_t statedb_task_us = 0;  // state batch (+ history when AfterStateDb)
    uint64_t history_us = 0;       // baseline only: the trailing history write
};

// Strictly sequential: ledger, then state database, then history, each
// durable before the next starts. A StorageError aborts with the failing
// step named; recovery is reconstruct().
CommitTimings commit_baseline(const Block& block, BlockLedger& ledger, StateDb& statedb,
                              HistoryDb& history);

// Two concurrent tasks: the ledger side and the state-database side, history
// placed per the plan. The ledger append is retried up to the plan's limit;
// if it never lands while the databases did, the stores are ahead of the
// ledger and LedgerBehindError says so.
CommitTimings commit_optimized(const Block& block, const CommitPlan& plan, BlockLedger& ledger,
                               StateDb& statedb, HistoryDb& history, WorkerPool* aux = nullptr);

// Replays valid transactions of blocks savepoint+1 .. ledger height into the
// state and history databases. The opposite direction (stores ahead of the
// ledger) needs blocks we do not have and raises UnrepairableError.
void reconstruct(BlockLedger& ledger, StateDb& statedb, HistoryDb& history);

// Write sets of the block's valid transactions, in order.
std::vector<TxWrites> collect_valid_writes(const Block& block);

}  // namespace valphase
