#include "valphase/pipeline.hpp"

#include <chrono>
#include <stdexcept>

#include "valphase/errors.hpp"

namespace valphase {

namespace {

using clock = std::chrono::steady_clock;

uint64_t ns_between(clock::time_point a, clock::time_point b) {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count());
}

std::vector<const Transaction*> candidates_of(const Block& block) {
    std::vector<const Transaction*> out;
    for (const auto& tx : block.transactions)
        if (tx.validation_code == ValidationCode::NotValidated) out.push_back(&tx);
    return out;
}

}  // namespace

const char* to_string(PipelineMode mode) {
    return mode == PipelineMode::Baseline ? "baseline" : "optimized";
}

Pipeline::Pipeline(const PipelineConfig& cfg, BlockLedger& ledger, StateDb& statedb,
                   HistoryDb& history)
    : cfg_(cfg),
      plan_(CommitPlan::make(cfg.mode == PipelineMode::Baseline ? CommitMode::Baseline
                                                                : CommitMode::Optimized,
                             cfg.backend, cfg.ledger_retry_limit, cfg.retry_backoff_ms)),
      ledger_(ledger),
      statedb_(statedb),
      history_(history),
      vscc_pool_(cfg.vscc.workers),
      aux_pool_(1) {
    if (auto h = ledger_.height()) {
        next_number_ = *h + 1;
        prev_hash_ = block_hash(ledger_.get_block(*h));
    }
}

void Pipeline::structural_check(const Block& block) const {
    if (block.number != next_number_)
        throw ProtocolError("block " + std::to_string(block.number) + " arrived, expected " +
                            std::to_string(next_number_));
    if (block.transactions.empty()) throw ProtocolError("empty block");
    if (block.prev_hash != prev_hash_)
        throw ProtocolError("prev_hash mismatch at block " + std::to_string(block.number));
    if (compute_data_hash(block.transactions) != block.data_hash)
        throw ProtocolError("data_hash mismatch at block " + std::to_string(block.number));
}

void Pipeline::finish_block(const Block& block) {
    // A committed upgrade of a chaincode drops its cache entry so the next
    // lookup refetches the new record.
    for (const auto& tx : block.transactions) {
        if (tx.validation_code != ValidationCode::Valid) continue;
        for (const auto& w : tx.write_set.entries)
            if (w.key.ns == kSystemNamespace) cache_.invalidate(w.key.name);
    }
    next_number_ = block.number + 1;
    prev_hash_ = block_hash(block);
}

LatencyBreakdown Pipeline::validate_and_commit(Block block) {
    if (in_flight_.exchange(true)) throw std::logic_error("another block is already in flight");
    struct Clear {
        std::atomic<bool>& flag;
        ~Clear() { flag.store(false); }
    } clear{in_flight_};

    structural_check(block);
    LatencyBreakdown out = cfg_.mode == PipelineMode::Baseline ? run_baseline(block)
                                                               : run_optimized(block);
    finish_block(block);
    out.num_txs = static_cast<uint32_t>(block.transactions.size());
    for (const auto& tx : block.transactions)
        if (tx.validation_code == ValidationCode::Valid) ++out.num_valid;
    return out;
}

LatencyBreakdown Pipeline::run_baseline(Block& block) {
    LatencyBreakdown bd;
    auto t_start = clock::now();

    auto t0 = clock::now();
    syntactic_validate(block);
    vscc_validate(block, cfg_.vscc, cache_, statedb_, vscc_pool_);
    uint64_t vscc_ns = ns_between(t0, clock::now());

    ReadSnapshot snapshot;
    bool use_snapshot = cfg_.backend == BackendKind::SlowRemote;
    uint64_t read_ns = 0;
    if (use_snapshot) {
        t0 = clock::now();
        snapshot = build_snapshot_bulk(statedb_, candidates_of(block));
        read_ns = ns_between(t0, clock::now());
    }

    t0 = clock::now();
    mvcc_validate(block, use_snapshot ? &snapshot : nullptr, statedb_);
    uint64_t mvcc_ns = ns_between(t0, clock::now());

    CommitTimings ct = commit_baseline(block, ledger_, statedb_, history_);

    uint64_t total_ns = ns_between(t_start, clock::now());
    bd.vscc_us = vscc_ns / 1000;
    bd.statedb_read_us = read_ns / 1000;
    bd.mvcc_us = mvcc_ns / 1000;
    bd.ledger_write_us = ct.ledger_task_us;
    bd.statedb_write_us = ct.statedb_task_us;
    bd.total_us = total_ns / 1000;
    // History write and miscellany land in the residual.
    bd.others_us = bd.total_us - bd.vscc_us - bd.statedb_read_us - bd.mvcc_us -
                   bd.ledger_write_us - bd.statedb_write_us;
    return bd;
}

LatencyBreakdown Pipeline::run_optimized(Block& block) {
    LatencyBreakdown bd;
    auto t_start = clock::now();

    // Step 1: syntactic validation, sequential.
    syntactic_validate(block);

    // Step 2: vscc and the state database bulk read run concurrently. The
    // bulk read covers the syntactically valid transactions, a superset of
    // what vscc will let through; mvcc ignores the extra read sets. The
    // candidate list is fixed before either task starts; vscc only touches
    // validation codes, the bulk read only touches read sets.
    auto candidates = candidates_of(block);
    ReadSnapshot snapshot;
    bool use_snapshot = cfg_.backend == BackendKind::SlowRemote;
    uint64_t read_ns = 0;
    std::future<void> bulk_done;
    if (use_snapshot) {
        bulk_done = aux_pool_.submit([&] {
            auto t0 = clock::now();
            snapshot = build_snapshot_bulk(statedb_, candidates);
            read_ns = ns_between(t0, clock::now());
        });
    }
    auto t0 = clock::now();
    vscc_validate(block, cfg_.vscc, cache_, statedb_, vscc_pool_);
    auto t_vscc_end = clock::now();
    if (bulk_done.valid()) bulk_done.get();
    auto t_parallel_end = clock::now();

    uint64_t vscc_ns = ns_between(t_start, t_vscc_end);          // syntactic + vscc
    uint64_t combined_read_ns = ns_between(t_start, t_parallel_end);

    // Step 3: mvcc over the vscc survivors only.
    t0 = clock::now();
    mvcc_validate(block, use_snapshot ? &snapshot : nullptr, statedb_);
    uint64_t mvcc_ns = ns_between(t0, clock::now());

    // Step 4: ledger side and state-database side commit in parallel.
    t0 = clock::now();
    CommitTimings ct = commit_optimized(block, plan_, ledger_, statedb_, history_, &aux_pool_);
    uint64_t commit_ns = ns_between(t0, clock::now());

    uint64_t total_ns = ns_between(t_start, clock::now());
    bd.vscc_us = vscc_ns / 1000;
    bd.statedb_read_us = read_ns / 1000;
    bd.mvcc_us = mvcc_ns / 1000;
    bd.vscc_statedb_read_us = combined_read_ns / 1000;
    bd.ledger_statedb_write_us = commit_ns / 1000;
    bd.ledger_write_us = ct.ledger_task_us;
    bd.statedb_write_us = ct.statedb_task_us;
    bd.total_us = total_ns / 1000;
    bd.others_us =
        bd.total_us - bd.vscc_statedb_read_us - bd.mvcc_us - bd.ledger_statedb_write_us;
    return bd;
}

StreamResult Pipeline::run_stream(const std::vector<Block>& blocks) {
    StreamResult res;
    res.blocks.reserve(blocks.size());
    auto t0 = clock::now();
    for (const auto& block : blocks) {
        LatencyBreakdown bd = validate_and_commit(block);
        res.total_txs += bd.num_txs;
        res.total_valid += bd.num_valid;
        res.blocks.push_back(bd);
    }
    res.total_wall_us = ns_between(t0, clock::now()) / 1000;
    if (res.total_wall_us > 0)
        res.throughput_tps = static_cast<double>(res.total_txs) * 1e6 /
                             static_cast<double>(res.total_wall_us);
    return res;
}

}  // namespace valphase
