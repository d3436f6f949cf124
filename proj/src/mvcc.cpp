#include "valphase/mvcc.hpp"

#include <set>
#include <stdexcept>

namespace valphase {

ReadSnapshot build_snapshot_bulk(StateDb& db, const std::vector<const Transaction*>& candidates) {
    std::vector<Key> keys;
    std::set<Key> seen;
    for (const Transaction* tx : candidates) {
        for (const auto& r : tx->read_set.entries) {
            if (seen.insert(r.key).second) keys.push_back(r.key);
        }
    }
    ReadSnapshot snap;
    if (keys.empty()) return snap;
    auto values = db.bulk_get(keys);
    for (size_t i = 0; i < keys.size(); ++i) {
        snap.emplace(keys[i],
                     values[i] ? std::optional<Version>(values[i]->version) : std::nullopt);
    }
    return snap;
}

void mvcc_validate(Block& block, const ReadSnapshot* snapshot, StateDb& db) {
    std::set<Key> written_by_valid;
    for (auto& tx : block.transactions) {
        if (tx.validation_code != ValidationCode::NotValidated) continue;
        bool conflict = false;
        for (const auto& r : tx.read_set.entries) {
            std::optional<Version> committed;
            if (snapshot) {
                auto it = snapshot->find(r.key);
                if (it == snapshot->end())
                    throw std::logic_error("read key missing from snapshot");
                committed = it->second;
            } else {
                auto vv = db.get(r.key);
                if (vv) committed = vv->version;
            }
            if (committed != r.version || written_by_valid.contains(r.key)) {
                conflict = true;
                break;
            }
        }
        if (conflict) {
            tx.validation_code = ValidationCode::MvccConflict;
            continue;
        }
        tx.validation_code = ValidationCode::Valid;
        for (const auto& w : tx.write_set.entries) written_by_valid.insert(w.key);
    }
}

}  // namespace valphase
