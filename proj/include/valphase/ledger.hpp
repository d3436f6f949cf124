#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "valphase/kvfile.hpp"
#include "valphase/types.hpp"

namespace valphase {

struct LedgerOptions {
    bool sync = true;  // fdatasync the block file on every append
};

// Append-only block store: length+crc framed serialized blocks in a single
// file, with an offset index kept alongside. The data file is the source of
// truth; the index is rebuilt from it when stale or damaged.
class BlockLedger {
public:
    explicit BlockLedger(const std::filesystem::path& dir, LedgerOptions opts = {});
    ~BlockLedger();

    BlockLedger(const BlockLedger&) = delete;
    BlockLedger& operator=(const BlockLedger&) = delete;

    // Requires block.number == height()+1, or 0 for the first block.
    void append_block(const Block& block);

    Block get_block(uint64_t number) const;

    std::optional<uint64_t> height() const;

    void fail_next_appends(uint32_t n) { fail_appends_ = n; }

    // Raw block-file bytes; equivalence tests compare these.
    std::string file_bytes() const;

private:
    void load();
    void rewrite_index();

    std::filesystem::path dir_;
    std::filesystem::path log_path_;
    std::filesystem::path index_path_;
    LedgerOptions opts_;
    std::vector<uint64_t> offsets_;
    int fd_ = -1;
    int index_fd_ = -1;
    uint32_t fail_appends_ = 0;
};

// Index of (key -> blocks/transactions that modified it), stored as composite
// keys: state key bytes, then big-endian height and tx index so an ordered
// prefix scan yields ascending history.
class HistoryDb {
public:
    explicit HistoryDb(const std::filesystem::path& dir, KvFileOptions opts = {});

    // One entry per (valid tx, written key), deletions included. Idempotent
    // per block.
    void append_history(const Block& block);

    std::vector<std::pair<uint64_t, uint32_t>> history_of(const Key& key) const;

    std::optional<uint64_t> savepoint() const { return kv_.savepoint(); }

    void fail_next_batches(uint32_t n) { kv_.fail_next_batches(n); }

    std::map<std::string, std::string> dump() const { return kv_.dump(); }

private:
    KvFile kv_;
};

std::string encode_history_key(const Key& key, uint64_t height, uint32_t tx_index);

}  // namespace valphase
