#include "valphase/committer.hpp"

#include <chrono>
#include <exception>
#include <thread>

#include "valphase/errors.hpp"

namespace valphase {

namespace {

using clock = std::chrono::steady_clock;

uint64_t us_since(clock::time_point t0) {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t0).count());
}

}  // namespace

HistoryPlacement history_placement_for(BackendKind backend) {
    return backend == BackendKind::FastEmbedded ? HistoryPlacement::AfterStateDb
                                                : HistoryPlacement::WithLedger;
}

CommitPlan CommitPlan::make(CommitMode mode, BackendKind backend, uint32_t retry_limit,
                            uint32_t backoff_ms) {
    CommitPlan plan;
    plan.mode = mode;
    plan.backend = backend;
    plan.history_placement = history_placement_for(backend);
    plan.ledger_retry_limit = retry_limit;
    plan.retry_backoff_ms = backoff_ms;
    return plan;
}

std::vector<TxWrites> collect_valid_writes(const Block& block) {
    std::vector<TxWrites> writes;
    for (uint32_t i = 0; i < block.transactions.size(); ++i) {
        const auto& tx = block.transactions[i];
        if (tx.validation_code != ValidationCode::Valid) continue;
        if (tx.write_set.entries.empty()) continue;
        writes.push_back({i, tx.write_set});
    }
    return writes;
}

CommitTimings commit_baseline(const Block& block, BlockLedger& ledger, StateDb& statedb,
                              HistoryDb& history) {
    CommitTimings t;
    auto t0 = clock::now();
    try {
        ledger.append_block(block);
    } catch (const StorageError& e) {
        throw StorageError(std::string("commit aborted at ledger write: ") + e.what());
    }
    t.ledger_task_us = us_since(t0);

    t0 = clock::now();
    try {
        statedb.apply_write_batch(block.number, collect_valid_writes(block));
    } catch (const StorageError& e) {
        throw StorageError(std::string("commit aborted at statedb write: ") + e.what());
    }
    t.statedb_task_us = us_since(t0);

    t0 = clock::now();
    try {
        history.append_history(block);
    } catch (const StorageError& e) {
        throw StorageError(std::string("commit aborted at history write: ") + e.what());
    }
    t.history_us = us_since(t0);
    return t;
}

CommitTimings commit_optimized(const Block& block, const CommitPlan& plan, BlockLedger& ledger,
                               StateDb& statedb, HistoryDb& history, WorkerPool* aux) {
    CommitTimings t;
    bool ledger_exhausted = false;
    std::exception_ptr ledger_side_error;
    std::exception_ptr statedb_side_error;

    auto ledger_task = [&] {
        auto t0 = clock::now();
        try {
            uint32_t attempts = 0;
            for (;;) {
                try {
                    ledger.append_block(block);
                    break;
                } catch (const StorageError&) {
                    if (++attempts >= plan.ledger_retry_limit) {
                        ledger_exhausted = true;
                        throw;
                    }
                    std::this_thread::sleep_for(std::chrono::milliseconds(plan.retry_backoff_ms));
                }
            }
            if (plan.history_placement == HistoryPlacement::WithLedger)
                history.append_history(block);
        } catch (...) {
            ledger_side_error = std::current_exception();
        }
        t.ledger_task_us = us_since(t0);
    };

    auto statedb_task = [&] {
        auto t0 = clock::now();
        try {
            statedb.apply_write_batch(block.number, collect_valid_writes(block));
            if (plan.history_placement == HistoryPlacement::AfterStateDb)
                history.append_history(block);
        } catch (...) {
            statedb_side_error = std::current_exception();
        }
        t.statedb_task_us = us_since(t0);
    };

    if (aux) {
        auto fut = aux->submit(ledger_task);
        statedb_task();
        fut.get();
    } else {
        std::thread lt(ledger_task);
        statedb_task();
        lt.join();
    }

    // A failed database side takes priority: that is the existing
    // panic-and-reconstruct path. Only a pure ledger failure, with the
    // databases already ahead, reports LedgerBehindError.
    if (statedb_side_error) std::rethrow_exception(statedb_side_error);
    if (ledger_side_error) {
        if (ledger_exhausted && !statedb_side_error)
            throw LedgerBehindError("ledger append failed after " +
                                    std::to_string(plan.ledger_retry_limit) +
                                    " attempts; databases are ahead of the ledger");
        std::rethrow_exception(ledger_side_error);
    }
    return t;
}

void reconstruct(BlockLedger& ledger, StateDb& statedb, HistoryDb& history) {
    auto height = ledger.height();
    auto state_sp = statedb.get_savepoint();
    auto history_sp = history.savepoint();

    auto behind = [&](const std::optional<uint64_t>& sp) {
        return !height ? sp.has_value() : (sp && *sp > *height);
    };
    if (behind(state_sp) || behind(history_sp))
        throw UnrepairableError("databases are ahead of the ledger; blocks must come from peers");
    if (!height) return;

    uint64_t state_from = state_sp ? *state_sp + 1 : 0;
    uint64_t history_from = history_sp ? *history_sp + 1 : 0;
    uint64_t from = std::min(state_from, history_from);
    for (uint64_t n = from; n <= *height; ++n) {
        Block block = ledger.get_block(n);
        if (n >= state_from) statedb.apply_write_batch(n, collect_valid_writes(block));
        if (n >= history_from) history.append_history(block);
    }
}

}  // namespace valphase
