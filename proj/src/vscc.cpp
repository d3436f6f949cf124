#include "valphase/vscc.hpp"

#include <set>
#include <unordered_set>

#include "valphase/codec.hpp"
#include "valphase/errors.hpp"

namespace valphase {

namespace {

ChaincodeInfo fetch_chaincode(StateDb& db, const std::string& chaincode_id) {
    auto rec = db.get(Key{kSystemNamespace, chaincode_id});
    if (!rec) throw UnknownChaincodeError(chaincode_id);
    return deserialize_chaincode_info(rec->value);
}

}  // namespace

ChaincodeInfo ChaincodeCache::lookup(StateDb& db, const std::string& chaincode_id) {
    std::shared_future<ChaincodeInfo> fut;
    std::promise<ChaincodeInfo> mine;
    bool fetcher = false;
    {
        std::lock_guard lock(mu_);
        auto it = entries_.find(chaincode_id);
        if (it != entries_.end()) {
            fut = it->second;
            bool ready =
                fut.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
            (ready ? hits_ : misses_).fetch_add(1, std::memory_order_relaxed);
        } else {
            fut = mine.get_future().share();
            entries_.emplace(chaincode_id, fut);
            fetcher = true;
            misses_.fetch_add(1, std::memory_order_relaxed);
        }
    }
    if (fetcher) {
        try {
            mine.set_value(fetch_chaincode(db, chaincode_id));
        } catch (...) {
            {
                std::lock_guard lock(mu_);
                entries_.erase(chaincode_id);
            }
            mine.set_exception(std::current_exception());
        }
    }
    return fut.get();
}

void ChaincodeCache::invalidate(const std::string& chaincode_id) {
    std::lock_guard lock(mu_);
    entries_.erase(chaincode_id);
}

void ChaincodeCache::clear() {
    std::lock_guard lock(mu_);
    entries_.clear();
}

ChaincodeInfo lookup_chaincode(ChaincodeCache* cache, StateDb& db,
                               const std::string& chaincode_id) {
    if (cache) return cache->lookup(db, chaincode_id);
    return fetch_chaincode(db, chaincode_id);
}

namespace {

bool well_formed(const Transaction& tx) {
    if (tx.tx_id.empty() || tx.chaincode_id.empty()) return false;
    if (tx.endorsements.empty()) return false;
    std::set<Key> seen;
    for (const auto& r : tx.read_set.entries)
        if (!seen.insert(r.key).second) return false;
    seen.clear();
    for (const auto& w : tx.write_set.entries)
        if (!seen.insert(w.key).second) return false;
    return true;
}

}  // namespace

void syntactic_validate(Block& block) {
    std::unordered_set<std::string> ids;
    for (auto& tx : block.transactions) {
        if (tx.validation_code != ValidationCode::NotValidated) continue;
        if (!well_formed(tx) || !ids.insert(tx.tx_id).second)
            tx.validation_code = ValidationCode::BadSyntax;
    }
}

void vscc_validate(Block& block, const VsccConfig& cfg, ChaincodeCache& cache, StateDb& db,
                   WorkerPool& pool) {
    if (cfg.clear_policy == CacheClearPolicy::PerBlock) cache.clear();
    ChaincodeCache* cc = cfg.cache_enabled ? &cache : nullptr;

    auto validate_one = [&](Transaction& tx) {
        ChaincodeInfo info;
        try {
            info = lookup_chaincode(cc, db, tx.chaincode_id);
        } catch (const UnknownChaincodeError&) {
            tx.validation_code = ValidationCode::UnknownChaincode;
            return;
        }
        Digest digest = payload_digest(tx.payload);
        std::set<std::string> verified;
        for (const auto& e : tx.endorsements) {
            if (verify_endorsement(e, digest, cfg.verification_cost_us)) verified.insert(e.org_id);
        }
        if (!eval_policy(info.policy, verified))
            tx.validation_code = ValidationCode::PolicyFailure;
        // otherwise the tx stays NotValidated: a candidate for mvcc
    };

    uint32_t workers = std::min<uint32_t>(std::max<uint32_t>(cfg.workers, 1),
                                          static_cast<uint32_t>(block.transactions.size()));
    if (workers <= 1) {
        for (auto& tx : block.transactions)
            if (tx.validation_code == ValidationCode::NotValidated) validate_one(tx);
        return;
    }
    // Transactions are partitioned by index modulo workers; results do not
    // depend on scheduling because each tx is independent here.
    std::vector<std::function<void()>> jobs;
    jobs.reserve(workers);
    for (uint32_t w = 0; w < workers; ++w) {
        jobs.push_back([&, w] {
            for (size_t i = w; i < block.transactions.size(); i += workers) {
                auto& tx = block.transactions[i];
                if (tx.validation_code == ValidationCode::NotValidated) validate_one(tx);
            }
        });
    }
    pool.run_all(std::move(jobs));
}

}  // namespace valphase
