#include "valphase/statedb.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <shared_mutex>
#include <thread>

#include "valphase/codec.hpp"
#include "valphase/errors.hpp"

namespace valphase {

const char* to_string(BackendKind kind) {
    return kind == BackendKind::FastEmbedded ? "fast_embedded" : "slow_remote";
}

std::string encode_state_key(const Key& key) {
    Encoder enc;
    enc.put_bytes(key.ns);
    enc.put_bytes(key.name);
    return enc.take();
}

std::string encode_versioned_value(const VersionedValue& vv) {
    Encoder enc;
    enc.put_bytes(vv.value);
    enc.put_version(vv.version);
    return enc.take();
}

VersionedValue decode_versioned_value(std::string_view data) {
    Decoder dec(data);
    VersionedValue vv;
    vv.value = dec.get_bytes();
    vv.version = dec.get_version();
    return vv;
}

namespace {

// Shared store logic for both backends: a KvFile with versioned values and
// the savepoint rule. Readers share, batches are exclusive.
class EmbeddedCore {
public:
    EmbeddedCore(const std::filesystem::path& dir, KvFileOptions opts) : kv_(dir, opts) {}

    std::optional<VersionedValue> get(const Key& key) const {
        std::shared_lock lock(mu_);
        auto raw = kv_.get(encode_state_key(key));
        if (!raw) return std::nullopt;
        return decode_versioned_value(*raw);
    }

    void apply_write_batch(uint64_t block_height, const std::vector<TxWrites>& writes) {
        std::unique_lock lock(mu_);
        auto sp = kv_.savepoint();
        if (sp && block_height <= *sp)
            throw ProtocolError("write batch for height " + std::to_string(block_height) +
                                " does not advance savepoint " + std::to_string(*sp));
        std::vector<KvFile::Put> puts;
        for (const auto& tw : writes) {
            for (const auto& w : tw.writes.entries) {
                KvFile::Put p;
                p.key = encode_state_key(w.key);
                if (w.value) {
                    p.value = encode_versioned_value(
                        {*w.value, Version{block_height, tw.tx_index}});
                }
                puts.push_back(std::move(p));
            }
        }
        kv_.apply_batch(puts, block_height);
    }

    std::optional<uint64_t> savepoint() const {
        std::shared_lock lock(mu_);
        return kv_.savepoint();
    }

    std::map<std::string, std::string> dump() const {
        std::shared_lock lock(mu_);
        return kv_.dump();
    }

    void fail_next_batches(uint32_t n) {
        std::unique_lock lock(mu_);
        kv_.fail_next_batches(n);
    }

private:
    mutable std::shared_mutex mu_;
    KvFile kv_;
};

class StatsMixin {
public:
    StateDbStats snapshot() const {
        StateDbStats s;
        s.gets = gets_.load();
        s.system_gets = system_gets_.load();
        s.bulk_gets = bulk_gets_.load();
        s.bulk_keys = bulk_keys_.load();
        s.batches = batches_.load();
        return s;
    }

protected:
    void count_get(const Key& key) {
        gets_.fetch_add(1, std::memory_order_relaxed);
        if (key.ns == kSystemNamespace) system_gets_.fetch_add(1, std::memory_order_relaxed);
    }
    void count_bulk(size_t keys) {
        bulk_gets_.fetch_add(1, std::memory_order_relaxed);
        bulk_keys_.fetch_add(keys, std::memory_order_relaxed);
    }
    void count_batch() { batches_.fetch_add(1, std::memory_order_relaxed); }

private:
    std::atomic<uint64_t> gets_{0}, system_gets_{0}, bulk_gets_{0}, bulk_keys_{0}, batches_{0};
};

class FastEmbeddedDb final : public StateDb, StatsMixin {
public:
    FastEmbeddedDb(const std::filesystem::path& dir, KvFileOptions opts) : core_(dir, opts) {}

    BackendKind kind() const override { return BackendKind::FastEmbedded; }

    std::optional<VersionedValue> get(const Key& key) override {
        count_get(key);
        return core_.get(key);
    }

    std::vector<std::optional<VersionedValue>> bulk_get(const std::vector<Key>& keys) override {
        count_bulk(keys.size());
        std::vector<std::optional<VersionedValue>> out;
        out.reserve(keys.size());
        for (const auto& k : keys) out.push_back(core_.get(k));
        return out;
    }

    void apply_write_batch(uint64_t block_height, const std::vector<TxWrites>& writes) override {
        count_batch();
        core_.apply_write_batch(block_height, writes);
    }

    std::optional<uint64_t> get_savepoint() override { return core_.savepoint(); }

    StateDbStats stats() const override { return snapshot(); }

    void fail_next_batches(uint32_t n) override { core_.fail_next_batches(n); }

    std::map<std::string, std::string> dump() const override { return core_.dump(); }

private:
    EmbeddedCore core_;
};

// Client-server emulation: every operation is shipped to a single service
// thread which first burns the modeled round-trip latency, then executes
// against the embedded core. Callers block on their request, so concurrent
// requests queue the way a single remote endpoint would serialize them.
class SlowRemoteDb final : public StateDb, StatsMixin {
public:
    SlowRemoteDb(const std::filesystem::path& dir, const LatencyModel& model, KvFileOptions opts)
        : core_(dir, opts), model_(model), server_([this] { serve(); }) {}

    ~SlowRemoteDb() override {
        {
            std::lock_guard lock(mu_);
            stop_ = true;
        }
        cv_.notify_all();
        server_.join();
    }

    BackendKind kind() const override { return BackendKind::SlowRemote; }

    std::optional<VersionedValue> get(const Key& key) override {
        count_get(key);
        std::optional<VersionedValue> out;
        call(model_.read_base_us + model_.read_per_key_us, [&] { out = core_.get(key); });
        return out;
    }

    std::vector<std::optional<VersionedValue>> bulk_get(const std::vector<Key>& keys) override {
        count_bulk(keys.size());
        std::vector<std::optional<VersionedValue>> out;
        uint64_t cost = model_.bulk_base_us +
                        static_cast<uint64_t>(keys.size()) * model_.bulk_per_key_us;
        call(cost, [&] {
            out.reserve(keys.size());
            for (const auto& k : keys) out.push_back(core_.get(k));
        });
        return out;
    }

    void apply_write_batch(uint64_t block_height, const std::vector<TxWrites>& writes) override {
        count_batch();
        size_t nkeys = 0;
        for (const auto& tw : writes) nkeys += tw.writes.entries.size();
        uint64_t cost = model_.write_base_us + nkeys * model_.write_per_key_us;
        call(cost, [&] { core_.apply_write_batch(block_height, writes); });
    }

    std::optional<uint64_t> get_savepoint() override {
        std::optional<uint64_t> out;
        call(model_.read_base_us + model_.read_per_key_us, [&] { out = core_.savepoint(); });
        return out;
    }

    StateDbStats stats() const override { return snapshot(); }

    void fail_next_batches(uint32_t n) override { core_.fail_next_batches(n); }

    std::map<std::string, std::string> dump() const override { return core_.dump(); }

private:
    struct Request {
        uint64_t latency_us;
        std::function<void()> work;
        std::promise<void> done;
    };

    void call(uint64_t latency_us, std::function<void()> work) {
        Request req;
        req.latency_us = latency_us;
        req.work = std::move(work);
        auto fut = req.done.get_future();
        {
            std::lock_guard lock(mu_);
            queue_.push_back(&req);
        }
        cv_.notify_one();
        fut.get();  // rethrows StorageError from the service thread
    }

    void serve() {
        for (;;) {
            Request* req = nullptr;
            {
                std::unique_lock lock(mu_);
                cv_.wait(lock, [this] { return stop_ || !queue_.empty(); });
                if (queue_.empty()) return;
                req = queue_.front();
                queue_.pop_front();
            }
            std::this_thread::sleep_for(std::chrono::microseconds(req->latency_us));
            try {
                req->work();
                req->done.set_value();
            } catch (...) {
                req->done.set_exception(std::current_exception());
            }
        }
    }

    EmbeddedCore core_;
    LatencyModel model_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Request*> queue_;
    bool stop_ = false;
    std::thread server_;
};

}  // namespace

std::unique_ptr<StateDb> open_fast_embedded(const std::filesystem::path& dir, KvFileOptions opts) {
    return std::make_unique<FastEmbeddedDb>(dir, opts);
}

std::unique_ptr<StateDb> open_slow_remote(const std::filesystem::path& dir,
                                          const LatencyModel& model, KvFileOptions opts) {
    return std::make_unique<SlowRemoteDb>(dir, model, opts);
}

}  // namespace valphase
