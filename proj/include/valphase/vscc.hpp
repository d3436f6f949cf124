#pragma once

#include <atomic>
#include <cstdint>
#include <future>
#include <mutex>
#include <string>
#include <unordered_map>

#include "valphase/statedb.hpp"
#include "valphase/thread_pool.hpp"
#include "valphase/types.hpp"

namespace valphase {

enum class CacheClearPolicy : uint8_t {
    OnUpgrade,  // entries evicted only when their chaincode is upgraded
    PerBlock,   // cache emptied at the start of every block's vscc stage
};

// Chaincode id -> ChaincodeInfo, shared by all vscc workers. A miss fetches
// from the state database once per id: concurrent lookups of the same id
// wait on the in-flight fetch instead of issuing duplicate reads, which keeps
// the read count deterministic under any worker count.
class ChaincodeCache {
public:
    // Miss path does exactly one system-namespace get; hit path none.
    // Throws UnknownChaincodeError when the record exists nowhere.
    ChaincodeInfo lookup(StateDb& db, const std::string& chaincode_id);

    void invalidate(const std::string& chaincode_id);
    void clear();

    uint64_t hits() const { return hits_.load(); }
    uint64_t misses() const { return misses_.load(); }

private:
    std::mutex mu_;
    std::unordered_map<std::string, std::shared_future<ChaincodeInfo>> entries_;
    std::atomic<uint64_t> hits_{0};
    std::atomic<uint64_t> misses_{0};
};

struct VsccConfig {
    uint32_t workers = 1;
    uint32_t verification_cost_us = 0;
    bool cache_enabled = true;
    CacheClearPolicy clear_policy = CacheClearPolicy::OnUpgrade;
};

// Fetch through the cache, or straight from the state database when the
// cache is disabled.
ChaincodeInfo lookup_chaincode(ChaincodeCache* cache, StateDb& db, const std::string& chaincode_id);

// Marks ill-formed transactions BadSyntax: empty tx_id or chaincode_id,
// duplicate tx_id within the block (first occurrence wins), duplicate keys
// within a read or write set, endorsements missing entirely.
void syntactic_validate(Block& block);

// Endorsement validation per transaction across the worker pool: verify tags,
// evaluate the chaincode's policy over the verified orgs. Transactions that
// already carry a code are skipped. Survivors stay NotValidated for mvcc.
void vscc_validate(Block& block, const VsccConfig& cfg, ChaincodeCache& cache, StateDb& db,
                   WorkerPool& pool);

}  // namespace valphase
