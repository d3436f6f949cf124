#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "valphase/kvfile.hpp"
#include "valphase/types.hpp"

namespace valphase {

// Namespace holding ChaincodeInfo records, keyed by chaincode id.
inline const std::string kSystemNamespace = "lscc";

struct VersionedValue {
    Bytes value;
    Version version;

    bool operator==(const VersionedValue&) const = default;
};

enum class BackendKind : uint8_t {
    FastEmbedded,  // in-process store, reads integrated with mvcc
    SlowRemote,    // client-server model, pays the latency model, supports bulk read
};

const char* to_string(BackendKind kind);

// Cost model for the remote backend, microseconds per operation. Bulk reads
// amortize: bulk_base >= read_base and bulk_per_key <= read_per_key.
struct LatencyModel {
    uint32_t read_base_us = 300;
    uint32_t read_per_key_us = 20;
    uint32_t write_base_us = 500;
    uint32_t write_per_key_us = 30;
    uint32_t bulk_base_us = 400;
    uint32_t bulk_per_key_us = 5;
};

struct StateDbStats {
    uint64_t gets = 0;
    uint64_t system_gets = 0;  // gets against the system namespace
    uint64_t bulk_gets = 0;
    uint64_t bulk_keys = 0;
    uint64_t batches = 0;
};

struct TxWrites {
    uint32_t tx_index = 0;
    WriteSet writes;
};

class StateDb {
public:
    virtual ~StateDb() = default;

    virtual BackendKind kind() const = 0;

    // Latest committed value, never an uncommitted write.
    virtual std::optional<VersionedValue> get(const Key& key) = 0;

    // Element i answers keys[i], all against one committed snapshot.
    virtual std::vector<std::optional<VersionedValue>> bulk_get(const std::vector<Key>& keys) = 0;

    // Atomic. Entries apply in order, so the later tx_index wins on a key
    // written twice. Advances the savepoint to block_height.
    virtual void apply_write_batch(uint64_t block_height, const std::vector<TxWrites>& writes) = 0;

    virtual std::optional<uint64_t> get_savepoint() = 0;

    virtual StateDbStats stats() const = 0;

    virtual void fail_next_batches(uint32_t n) = 0;

    // Raw engine contents; test and reconstruction-check access only.
    virtual std::map<std::string, std::string> dump() const = 0;
};

std::unique_ptr<StateDb> open_fast_embedded(const std::filesystem::path& dir,
                                            KvFileOptions opts = {});
std::unique_ptr<StateDb> open_slow_remote(const std::filesystem::path& dir,
                                          const LatencyModel& model, KvFileOptions opts = {});

// Engine-level key for a state entry: length-prefixed namespace then name.
std::string encode_state_key(const Key& key);
std::string encode_versioned_value(const VersionedValue& vv);
VersionedValue decode_versioned_value(std::string_view data);

}  // namespace valphase
