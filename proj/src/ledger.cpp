#include "valphase/ledger.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "valphase/codec.hpp"
#include "valphase/errors.hpp"
#include "valphase/statedb.hpp"

namespace valphase {

namespace {

uint32_t crc_of(std::string_view payload) {
    return static_cast<uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(payload.data()),
                static_cast<uInt>(payload.size())));
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return {};
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_all(int fd, std::string_view data, const std::filesystem::path& p) {
    size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw StorageError("write failed on " + p.string() + ": " + std::strerror(errno));
        }
        off += static_cast<size_t>(n);
    }
}

}  // namespace

BlockLedger::BlockLedger(const std::filesystem::path& dir, LedgerOptions opts)
    : dir_(dir),
      log_path_(dir / "blocks.log"),
      index_path_(dir / "blocks.idx"),
      opts_(opts) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw StorageError("cannot create " + dir_.string() + ": " + ec.message());
    load();
    fd_ = ::open(log_path_.c_str(), O_CREAT | O_WRONLY | O_APPEND, 0644);
    index_fd_ = ::open(index_path_.c_str(), O_CREAT | O_WRONLY | O_APPEND, 0644);
    if (fd_ < 0 || index_fd_ < 0)
        throw StorageError("cannot open ledger files in " + dir_.string());
}

BlockLedger::~BlockLedger() {
    if (fd_ >= 0) ::close(fd_);
    if (index_fd_ >= 0) ::close(index_fd_);
}

void BlockLedger::load() {
    std::string content = read_file(log_path_);
    std::vector<uint64_t> scanned;
    size_t pos = 0;
    while (content.size() - pos >= 8) {
        Decoder hdr(std::string_view(content).substr(pos, 8));
        uint32_t len = hdr.get_u32();
        uint32_t crc = hdr.get_u32();
        if (content.size() - pos - 8 < len) break;
        std::string_view payload = std::string_view(content).substr(pos + 8, len);
        if (crc_of(payload) != crc) break;
        scanned.push_back(pos);
        pos += 8 + len;
    }
    offsets_ = std::move(scanned);

    // Keep the index file in sync with what the scan established.
    std::string idx = read_file(index_path_);
    bool idx_ok = idx.size() == offsets_.size() * 8;
    if (idx_ok) {
        Decoder dec(idx);
        for (uint64_t off : offsets_) {
            if (dec.get_u64() != off) {
                idx_ok = false;
                break;
            }
        }
    }
    if (!idx_ok) rewrite_index();
}

void BlockLedger::rewrite_index() {
    Encoder enc;
    for (uint64_t off : offsets_) enc.put_u64(off);
    std::ofstream out(index_path_, std::ios::binary | std::ios::trunc);
    out.write(enc.data().data(), static_cast<std::streamsize>(enc.data().size()));
}

std::optional<uint64_t> BlockLedger::height() const {
    if (offsets_.empty()) return std::nullopt;
    return offsets_.size() - 1;
}

void BlockLedger::append_block(const Block& block) {
    uint64_t expected = offsets_.empty() ? 0 : offsets_.size();
    if (block.number != expected)
        throw ProtocolError("append of block " + std::to_string(block.number) +
                            " when next expected is " + std::to_string(expected));
    if (fail_appends_ > 0) {
        --fail_appends_;
        throw StorageError("injected ledger append failure");
    }
    std::string payload = serialize_block(block);
    Encoder hdr;
    hdr.put_u32(static_cast<uint32_t>(payload.size()));
    hdr.put_u32(crc_of(payload));
    uint64_t offset = 0;
    {
        off_t cur = ::lseek(fd_, 0, SEEK_END);
        if (cur < 0) throw StorageError("lseek failed on " + log_path_.string());
        offset = static_cast<uint64_t>(cur);
    }
    write_all(fd_, hdr.data() + payload, log_path_);
    if (opts_.sync && ::fdatasync(fd_) != 0)
        throw StorageError("fdatasync failed on " + log_path_.string());
    Encoder ie;
    ie.put_u64(offset);
    write_all(index_fd_, ie.data(), index_path_);
    offsets_.push_back(offset);
}

Block BlockLedger::get_block(uint64_t number) const {
    if (number >= offsets_.size())
        throw NotFoundError("block " + std::to_string(number) + " not in ledger");
    int rfd = ::open(log_path_.c_str(), O_RDONLY);
    if (rfd < 0) throw StorageError("cannot open " + log_path_.string());
    char hdr[8];
    ssize_t n = ::pread(rfd, hdr, 8, static_cast<off_t>(offsets_[number]));
    if (n != 8) {
        ::close(rfd);
        throw StorageError("short header read in " + log_path_.string());
    }
    Decoder hd(std::string_view(hdr, 8));
    uint32_t len = hd.get_u32();
    uint32_t crc = hd.get_u32();
    std::string payload(len, '\0');
    n = ::pread(rfd, payload.data(), len, static_cast<off_t>(offsets_[number] + 8));
    ::close(rfd);
    if (n != static_cast<ssize_t>(len))
        throw StorageError("short block read in " + log_path_.string());
    if (crc_of(payload) != crc)
        throw StorageError("crc mismatch for block " + std::to_string(number));
    return deserialize_block(payload);
}

std::string BlockLedger::file_bytes() const { return read_file(log_path_); }

HistoryDb::HistoryDb(const std::filesystem::path& dir, KvFileOptions opts) : kv_(dir, opts) {}

std::string encode_history_key(const Key& key, uint64_t height, uint32_t tx_index) {
    std::string out = encode_state_key(key);
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<char>((height >> (8 * i)) & 0xff));
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<char>((tx_index >> (8 * i)) & 0xff));
    return out;
}

void HistoryDb::append_history(const Block& block) {
    std::vector<KvFile::Put> puts;
    for (uint32_t i = 0; i < block.transactions.size(); ++i) {
        const auto& tx = block.transactions[i];
        if (tx.validation_code != ValidationCode::Valid) continue;
        for (const auto& w : tx.write_set.entries) {
            puts.push_back({encode_history_key(w.key, block.number, i), std::string()});
        }
    }
    auto sp = kv_.savepoint();
    uint64_t next = sp ? std::max(*sp, block.number) : block.number;
    kv_.apply_batch(puts, next);
}

std::vector<std::pair<uint64_t, uint32_t>> HistoryDb::history_of(const Key& key) const {
    std::string prefix = encode_state_key(key);
    std::vector<std::pair<uint64_t, uint32_t>> out;
    for (const auto& [k, v] : kv_.scan_prefix(prefix)) {
        if (k.size() != prefix.size() + 12) continue;
        uint64_t height = 0;
        uint32_t tx = 0;
        size_t p = prefix.size();
        for (int i = 0; i < 8; ++i)
            height = (height << 8) | static_cast<uint8_t>(k[p + static_cast<size_t>(i)]);
        for (int i = 0; i < 4; ++i)
            tx = (tx << 8) | static_cast<uint8_t>(k[p + 8 + static_cast<size_t>(i)]);
        out.emplace_back(height, tx);
    }
    return out;
}

}  // namespace valphase
