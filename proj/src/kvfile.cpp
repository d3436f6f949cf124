#include "valphase/kvfile.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "valphase/codec.hpp"
#include "valphase/errors.hpp"

namespace valphase {

namespace {

uint32_t crc_of(std::string_view payload) {
    return static_cast<uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(payload.data()),
                static_cast<uInt>(payload.size())));
}

}  // namespace

KvFile::KvFile(const std::filesystem::path& dir, KvFileOptions opts)
    : dir_(dir), log_path_(dir / "store.log"), opts_(opts) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw StorageError("cannot create " + dir_.string() + ": " + ec.message());
    replay_log();
    fd_ = ::open(log_path_.c_str(), O_CREAT | O_WRONLY | O_APPEND, 0644);
    if (fd_ < 0) throw StorageError("cannot open " + log_path_.string() + ": " + std::strerror(errno));
}

KvFile::~KvFile() {
    if (fd_ >= 0) ::close(fd_);
}

void KvFile::replay_log() {
    std::ifstream in(log_path_, std::ios::binary);
    if (!in) return;
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    size_t pos = 0;
    while (content.size() - pos >= 8) {
        Decoder hdr(std::string_view(content).substr(pos, 8));
        uint32_t len = hdr.get_u32();
        uint32_t crc = hdr.get_u32();
        if (content.size() - pos - 8 < len) break;  // torn tail
        std::string_view payload = std::string_view(content).substr(pos + 8, len);
        if (crc_of(payload) != crc) break;
        Decoder dec(payload);
        uint32_t n = dec.get_u32();
        for (uint32_t i = 0; i < n; ++i) {
            std::string key = dec.get_bytes();
            if (dec.get_u8() != 0) {
                map_[std::move(key)] = dec.get_bytes();
            } else {
                map_.erase(key);
            }
        }
        pos += 8 + len;
    }
}

void KvFile::append_record(const std::string& payload) {
    Encoder hdr;
    hdr.put_u32(static_cast<uint32_t>(payload.size()));
    hdr.put_u32(crc_of(payload));
    std::string rec = hdr.take() + payload;
    size_t off = 0;
    while (off < rec.size()) {
        ssize_t n = ::write(fd_, rec.data() + off, rec.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw StorageError("write failed on " + log_path_.string() + ": " + std::strerror(errno));
        }
        off += static_cast<size_t>(n);
    }
    if (opts_.sync && ::fdatasync(fd_) != 0)
        throw StorageError("fdatasync failed on " + log_path_.string());
}

void KvFile::apply_batch(const std::vector<Put>& puts, std::optional<uint64_t> savepoint) {
    if (fail_batches_ > 0) {
        --fail_batches_;
        throw StorageError("injected batch failure on " + dir_.string());
    }
    Encoder enc;
    enc.put_u32(static_cast<uint32_t>(puts.size() + (savepoint ? 1 : 0)));
    for (const auto& p : puts) {
        enc.put_bytes(p.key);
        enc.put_u8(p.value.has_value() ? 1 : 0);
        if (p.value) enc.put_bytes(*p.value);
    }
    if (savepoint) {
        Encoder v;
        v.put_u64(*savepoint);
        enc.put_bytes(kSavepointKey);
        enc.put_u8(1);
        enc.put_bytes(v.data());
    }
    append_record(enc.data());
    for (const auto& p : puts) {
        if (p.value) {
            map_[p.key] = *p.value;
        } else {
            map_.erase(p.key);
        }
    }
    if (savepoint) {
        Encoder v;
        v.put_u64(*savepoint);
        map_[kSavepointKey] = v.take();
    }
}

std::optional<std::string> KvFile::get(const std::string& key) const {
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

std::optional<uint64_t> KvFile::savepoint() const {
    auto v = get(kSavepointKey);
    if (!v) return std::nullopt;
    Decoder dec(*v);
    return dec.get_u64();
}

std::vector<std::pair<std::string, std::string>> KvFile::scan_prefix(
    const std::string& prefix) const {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto it = map_.lower_bound(prefix); it != map_.end(); ++it) {
        if (it->first.compare(0, prefix.size(), prefix) != 0) break;
        out.emplace_back(it->first, it->second);
    }
    return out;
}

std::map<std::string, std::string> KvFile::dump() const { return map_; }

void KvFile::flush() {
    if (fd_ >= 0 && ::fdatasync(fd_) != 0)
        throw StorageError("fdatasync failed on " + log_path_.string());
}

}  // namespace valphase
