#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace valphase {

// Reserved engine key holding the highest applied block height (LE u64).
inline constexpr const char* kSavepointKey = "\x00savepoint";

struct KvFileOptions {
    // fdatasync after every batch. Stores that are rebuildable from the
    // ledger leave this off; the ledger itself keeps it on.
    bool sync = false;
};

// Ordered in-memory map persisted through an append-only batch log.
// Batches are framed with a length + crc32 header; a torn tail record is
// ignored on open, so a batch is either fully visible or not at all.
class KvFile {
public:
    KvFile(const std::filesystem::path& dir, KvFileOptions opts = {});
    ~KvFile();

    KvFile(const KvFile&) = delete;
    KvFile& operator=(const KvFile&) = delete;

    std::optional<std::string> get(const std::string& key) const;

    struct Put {
        std::string key;
        std::optional<std::string> value;  // nullopt deletes
    };

    // Atomic: appends one framed log record, then applies to the map.
    // `savepoint` (if set) is stored under kSavepointKey in the same record.
    void apply_batch(const std::vector<Put>& puts, std::optional<uint64_t> savepoint);

    std::optional<uint64_t> savepoint() const;

    // Ordered scan of keys beginning with `prefix`.
    std::vector<std::pair<std::string, std::string>> scan_prefix(const std::string& prefix) const;

    // Full contents, savepoint entry included. Used by equivalence tests.
    std::map<std::string, std::string> dump() const;

    size_t size() const { return map_.size(); }

    // Next `n` batches throw StorageError before touching disk or memory.
    void fail_next_batches(uint32_t n) { fail_batches_ = n; }

    void flush();

private:
    void replay_log();
    void append_record(const std::string& payload);

    std::filesystem::path dir_;
    std::filesystem::path log_path_;
    KvFileOptions opts_;
    std::map<std::string, std::string> map_;
    int fd_ = -1;
    uint32_t fail_batches_ = 0;
};

}  // namespace valphase
