#pragma once

#include <map>
#include <optional>
#include <vector>

#include "valphase/statedb.hpp"
#include "valphase/types.hpp"

namespace valphase {

// Committed version per key at the time the snapshot was taken; an entry
// with no version means the key is absent from state.
using ReadSnapshot = std::map<Key, std::optional<Version>>;

// One bulk read over the deduplicated union of the candidates' read-set
// keys. Slow-backend path only; the fast backend reads during mvcc instead.
ReadSnapshot build_snapshot_bulk(StateDb& db, const std::vector<const Transaction*>& candidates);

// Final validity pass. Candidates are the transactions still NotValidated;
// everything else keeps its code and its read set is ignored. A candidate
// conflicts when a read version differs from the committed one, or when the
// key was written by an earlier valid transaction in this block. Reads come
// from the snapshot when given, else straight from the state database.
void mvcc_validate(Block& block, const ReadSnapshot* snapshot, StateDb& db);

}  // namespace valphase
