#include "valphase/workload.hpp"

#include <algorithm>
#include <cassert>

#include "valphase/codec.hpp"
#include "valphase/committer.hpp"
#include "valphase/errors.hpp"

namespace valphase {

namespace {

constexpr int64_t kMaxAmount = 100;

std::string balance_bytes(int64_t balance) { return std::to_string(balance); }

}  // namespace

Key savings_key(const std::string& chaincode_id, const std::string& account) {
    return Key{chaincode_id, "savings:" + account};
}

Key checking_key(const std::string& chaincode_id, const std::string& account) {
    return Key{chaincode_id, "checking:" + account};
}

Block make_genesis_block(const std::vector<ChaincodeInfo>& chaincodes,
                         const std::vector<std::string>& accounts,
                         const std::string& chaincode_id, int64_t initial_balance) {
    Block genesis;
    genesis.number = 0;
    for (size_t i = 0; i < accounts.size(); ++i) {
        Transaction tx;
        tx.tx_id = "genesis-acct-" + std::to_string(i);
        tx.chaincode_id = chaincode_id;
        tx.payload = "create|" + accounts[i];
        tx.write_set.entries.push_back(
            {savings_key(chaincode_id, accounts[i]), balance_bytes(initial_balance)});
        tx.write_set.entries.push_back(
            {checking_key(chaincode_id, accounts[i]), balance_bytes(initial_balance)});
        tx.validation_code = ValidationCode::Valid;
        genesis.transactions.push_back(std::move(tx));
    }
    Transaction deploy;
    deploy.tx_id = "genesis-lscc";
    deploy.chaincode_id = kSystemNamespace;
    deploy.payload = "deploy";
    for (const auto& cc : chaincodes) {
        deploy.write_set.entries.push_back(
            {Key{kSystemNamespace, cc.chaincode_id}, serialize_chaincode_info(cc)});
    }
    deploy.validation_code = ValidationCode::Valid;
    genesis.transactions.push_back(std::move(deploy));
    genesis.data_hash = compute_data_hash(genesis.transactions);
    return genesis;
}

void seed_genesis(StateDb& statedb, BlockLedger& ledger, HistoryDb& history,
                  const Block& genesis) {
    if (ledger.height() || statedb.get_savepoint() || history.savepoint())
        throw ProtocolError("stores already seeded");
    ledger.append_block(genesis);
    statedb.apply_write_batch(genesis.number, collect_valid_writes(genesis));
    history.append_history(genesis);
}

std::vector<Block> make_blocks(std::vector<Transaction> txs, uint32_t block_size,
                               uint64_t first_number, const Digest& prev_hash) {
    if (block_size == 0) throw ConfigError("block_size must be >= 1");
    std::vector<Block> blocks;
    Digest prev = prev_hash;
    uint64_t number = first_number;
    for (size_t pos = 0; pos < txs.size(); pos += block_size) {
        Block b;
        b.number = number++;
        b.prev_hash = prev;
        size_t end = std::min(txs.size(), pos + block_size);
        b.transactions.assign(std::make_move_iterator(txs.begin() + static_cast<long>(pos)),
                              std::make_move_iterator(txs.begin() + static_cast<long>(end)));
        b.data_hash = compute_data_hash(b.transactions);
        prev = block_hash(b);
        blocks.push_back(std::move(b));
    }
    return blocks;
}

WorkloadGenerator::WorkloadGenerator(WorkloadConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
    if (cfg_.block_size == 0) throw ConfigError("block_size must be >= 1");
    if (cfg_.num_accounts == 0) throw ConfigError("num_accounts must be >= 1");
    if (cfg_.endorsing_orgs.empty()) throw ConfigError("need at least one endorsing org");
    double mix_total = 0;
    for (double w : cfg_.op_mix) {
        if (w < 0) throw ConfigError("op mix weights must be non-negative");
        mix_total += w;
    }
    if (mix_total <= 0) throw ConfigError("op mix must have positive total weight");
    accounts_total_ = cfg_.num_accounts;
    for (uint32_t i = 0; i < cfg_.num_accounts; ++i) {
        MirrorEntry e{cfg_.initial_balance, Version{0, i}};
        mirror_[savings_key(cfg_.chaincode_id, account_name(i))] = e;
        mirror_[checking_key(cfg_.chaincode_id, account_name(i))] = e;
    }
}

std::string WorkloadGenerator::account_name(uint32_t index) const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "acct%06u", index);
    return buf;
}

std::vector<std::string> WorkloadGenerator::initial_accounts() const {
    std::vector<std::string> out;
    out.reserve(cfg_.num_accounts);
    for (uint32_t i = 0; i < cfg_.num_accounts; ++i) out.push_back(account_name(i));
    return out;
}

std::vector<ChaincodeInfo> WorkloadGenerator::chaincodes() const {
    std::vector<EndorsementPolicy> leaves;
    leaves.reserve(cfg_.endorsing_orgs.size());
    for (const auto& org : cfg_.endorsing_orgs) leaves.push_back(EndorsementPolicy::org(org));
    // One signature from each organization, the paper's channel policy.
    ChaincodeInfo info;
    info.chaincode_id = cfg_.chaincode_id;
    info.version = "1.0";
    info.policy = leaves.size() == 1 ? leaves[0] : EndorsementPolicy::all_of(std::move(leaves));
    return {info};
}

Block WorkloadGenerator::genesis_block() const {
    return make_genesis_block(chaincodes(), initial_accounts(), cfg_.chaincode_id,
                              cfg_.initial_balance);
}

double WorkloadGenerator::next_unit() {
    return static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0);
}

SmallbankOp WorkloadGenerator::pick_op() {
    double total = 0;
    for (double w : cfg_.op_mix) total += w;
    double r = next_unit() * total;
    for (size_t i = 0; i < cfg_.op_mix.size(); ++i) {
        if (r < cfg_.op_mix[i]) return static_cast<SmallbankOp>(i);
        r -= cfg_.op_mix[i];
    }
    return SmallbankOp::QueryBalance;
}

std::optional<std::string> WorkloadGenerator::pick_untouched_account() {
    for (int attempt = 0; attempt < 200; ++attempt) {
        uint32_t idx = static_cast<uint32_t>(rng_() % accounts_in_pool_);
        std::string name = account_name(idx);
        if (!touched_accounts_.contains(name)) return name;
    }
    return std::nullopt;
}

Transaction WorkloadGenerator::endorse(SmallbankOp op, const std::string& payload_body,
                                       const ReadSet& reads, const WriteSet& writes,
                                       uint64_t seq) {
    Transaction tx;
    tx.tx_id = "tx-" + std::to_string(seq);
    tx.chaincode_id = cfg_.chaincode_id;
    tx.payload = std::to_string(static_cast<int>(op)) + "|" + payload_body;
    tx.read_set = reads;
    tx.write_set = writes;
    for (const auto& org : cfg_.endorsing_orgs)
        tx.endorsements.push_back(make_endorsement(tx.payload, org, org + ".peer0"));
    return tx;
}

// One endorsement attempt. Application-level failures (no disjoint account
// available, insufficient funds) emit nothing and the caller retries; the
// touched set is only updated when a transaction is actually produced.
std::optional<WorkloadGenerator::PendingTx> WorkloadGenerator::try_make_tx(uint64_t seq) {
    SmallbankOp op = pick_op();
    auto read_of = [&](const Key& k) {
        auto it = mirror_.find(k);
        return ReadEntry{k, it == mirror_.end() ? std::optional<Version>() : it->second.version};
    };
    auto balance_of = [&](const Key& k) -> int64_t {
        auto it = mirror_.find(k);
        return it == mirror_.end() ? 0 : it->second.balance;
    };
    int64_t amount = 1 + static_cast<int64_t>(rng_() % kMaxAmount);

    PendingTx p;
    p.expect_valid = true;
    ReadSet reads;
    WriteSet writes;

    switch (op) {
        case SmallbankOp::CreateAccount: {
            std::string name = account_name(accounts_total_);
            Key sk = savings_key(cfg_.chaincode_id, name);
            Key ck = checking_key(cfg_.chaincode_id, name);
            reads.entries = {read_of(sk), read_of(ck)};  // nil-version reads
            writes.entries = {{sk, balance_bytes(cfg_.initial_balance)},
                              {ck, balance_bytes(cfg_.initial_balance)}};
            p.tx = endorse(op, name, reads, writes, seq);
            p.mirror_updates = {{sk, {cfg_.initial_balance, {}}}, {ck, {cfg_.initial_balance, {}}}};
            ++accounts_total_;
            touched_accounts_.insert(name);
            return p;
        }
        case SmallbankOp::TransferMoney: {
            auto a = pick_untouched_account();
            if (!a) return std::nullopt;
            touched_accounts_.insert(*a);
            auto b = pick_untouched_account();
            if (!b || balance_of(savings_key(cfg_.chaincode_id, *a)) < amount) {
                touched_accounts_.erase(*a);
                return std::nullopt;
            }
            touched_accounts_.insert(*b);
            Key sa = savings_key(cfg_.chaincode_id, *a);
            Key sb = savings_key(cfg_.chaincode_id, *b);
            reads.entries = {read_of(sa), read_of(sb)};
            writes.entries = {{sa, balance_bytes(balance_of(sa) - amount)},
                              {sb, balance_bytes(balance_of(sb) + amount)}};
            p.tx = endorse(op, *a + "|" + *b + "|" + std::to_string(amount), reads, writes, seq);
            p.mirror_updates = {{sa, {balance_of(sa) - amount, {}}},
                                {sb, {balance_of(sb) + amount, {}}}};
            return p;
        }
        case SmallbankOp::DepositCash: {
            auto a = pick_untouched_account();
            if (!a) return std::nullopt;
            touched_accounts_.insert(*a);
            Key ck = checking_key(cfg_.chaincode_id, *a);
            reads.entries = {read_of(ck)};
            writes.entries = {{ck, balance_bytes(balance_of(ck) + amount)}};
            p.tx = endorse(op, *a + "|" + std::to_string(amount), reads, writes, seq);
            p.mirror_updates = {{ck, {balance_of(ck) + amount, {}}}};
            return p;
        }
        case SmallbankOp::WriteCheck: {
            auto a = pick_untouched_account();
            if (!a) return std::nullopt;
            Key sk = savings_key(cfg_.chaincode_id, *a);
            Key ck = checking_key(cfg_.chaincode_id, *a);
            if (balance_of(ck) < amount) return std::nullopt;
            touched_accounts_.insert(*a);
            reads.entries = {read_of(sk), read_of(ck)};
            writes.entries = {{ck, balance_bytes(balance_of(ck) - amount)}};
            p.tx = endorse(op, *a + "|" + std::to_string(amount), reads, writes, seq);
            p.mirror_updates = {{ck, {balance_of(ck) - amount, {}}}};
            return p;
        }
        case SmallbankOp::Amalgamate: {
            auto a = pick_untouched_account();
            if (!a) return std::nullopt;
            touched_accounts_.insert(*a);
            auto b = pick_untouched_account();
            if (!b) {
                touched_accounts_.erase(*a);
                return std::nullopt;
            }
            touched_accounts_.insert(*b);
            Key sa = savings_key(cfg_.chaincode_id, *a);
            Key ca = checking_key(cfg_.chaincode_id, *a);
            Key cb = checking_key(cfg_.chaincode_id, *b);
            int64_t moved = balance_of(sa) + balance_of(ca);
            reads.entries = {read_of(sa), read_of(ca), read_of(cb)};
            writes.entries = {{sa, balance_bytes(0)},
                              {ca, balance_bytes(0)},
                              {cb, balance_bytes(balance_of(cb) + moved)}};
            p.tx = endorse(op, *a + "|" + *b, reads, writes, seq);
            p.mirror_updates = {{sa, {0, {}}}, {ca, {0, {}}}, {cb, {balance_of(cb) + moved, {}}}};
            return p;
        }
        case SmallbankOp::QueryBalance: {
            auto a = pick_untouched_account();
            if (!a) return std::nullopt;
            touched_accounts_.insert(*a);
            reads.entries = {read_of(savings_key(cfg_.chaincode_id, *a)),
                             read_of(checking_key(cfg_.chaincode_id, *a))};
            p.tx = endorse(op, *a, reads, writes, seq);
            return p;
        }
    }
    return std::nullopt;
}

WorkloadGenerator::PendingTx WorkloadGenerator::make_conflict_tx(uint64_t seq) {
    // Deposit endorsed against a snapshot one block stale, aimed at a key the
    // previous block rewrote, so the version check is guaranteed to fail.
    size_t idx = static_cast<size_t>(rng_() % prev_block_writes_.size());
    auto it = prev_block_writes_.begin();
    std::advance(it, static_cast<long>(idx));
    const Key& key = it->first;
    const auto& stale = it->second.first;

    int64_t amount = 1 + static_cast<int64_t>(rng_() % kMaxAmount);
    int64_t stale_balance = stale ? stale->balance : 0;
    PendingTx p;
    p.expect_valid = false;
    ReadSet reads;
    reads.entries = {{key, stale ? std::optional<Version>(stale->version) : std::nullopt}};
    WriteSet writes;
    writes.entries = {{key, balance_bytes(stale_balance + amount)}};
    p.tx = endorse(SmallbankOp::DepositCash, "stale|" + std::to_string(amount), reads, writes,
                   seq);
    ++injected_conflicts_;
    return p;
}

std::vector<Block> WorkloadGenerator::make_stream() {
    if (streamed_) throw std::logic_error("make_stream may only run once per generator");
    streamed_ = true;

    auto retry_make = [&](uint64_t seq) {
        uint32_t guard = 0;
        auto made = try_make_tx(seq);
        while (!made) {
            if (++guard > 1000)
                throw ConfigError("cannot assemble block: num_accounts too small for block_size");
            made = try_make_tx(seq);
        }
        return std::move(*made);
    };

    std::vector<Transaction> txs;
    txs.reserve(cfg_.total_txs);
    uint64_t seq = 0;
    uint64_t block_number = 1;
    while (txs.size() < cfg_.total_txs) {
        touched_accounts_.clear();
        accounts_in_pool_ = accounts_total_;
        uint32_t count = static_cast<uint32_t>(
            std::min<uint64_t>(cfg_.block_size, cfg_.total_txs - txs.size()));
        std::vector<PendingTx> pending;
        pending.reserve(count);
        for (uint32_t slot = 0; slot < count; ++slot) {
            double r = next_unit();
            PendingTx p;
            if (r < cfg_.bad_syntax_prob) {
                p = retry_make(seq);
                p.tx.tx_id.clear();  // BadSyntax downstream
                p.expect_valid = false;
                p.mirror_updates.clear();
            } else if (r < cfg_.bad_syntax_prob + cfg_.unknown_cc_prob) {
                p = retry_make(seq);
                p.tx.chaincode_id = cfg_.chaincode_id + "-missing";
                p.expect_valid = false;
                p.mirror_updates.clear();
            } else if (r < cfg_.bad_syntax_prob + cfg_.unknown_cc_prob + cfg_.policy_fail_prob) {
                p = retry_make(seq);
                for (auto& e : p.tx.endorsements) e.tag[0] ^= 0xff;  // tags no longer verify
                p.expect_valid = false;
                p.mirror_updates.clear();
            } else if (r < cfg_.bad_syntax_prob + cfg_.unknown_cc_prob + cfg_.policy_fail_prob +
                               cfg_.conflict_prob &&
                       !prev_block_writes_.empty()) {
                p = make_conflict_tx(seq);
            } else {
                p = retry_make(seq);
            }
            for (auto& [key, entry] : p.mirror_updates)
                entry.version = Version{block_number, slot};
            txs.push_back(p.tx);
            pending.push_back(std::move(p));
            ++seq;
        }
        std::map<Key, std::pair<std::optional<MirrorEntry>, MirrorEntry>> block_writes;
        for (const auto& p : pending) {
            if (!p.expect_valid) continue;
            for (const auto& [key, entry] : p.mirror_updates) {
                auto it = mirror_.find(key);
                block_writes[key] = {
                    it == mirror_.end() ? std::optional<MirrorEntry>() : it->second, entry};
                mirror_[key] = entry;
            }
        }
        prev_block_writes_ = std::move(block_writes);
        ++block_number;
    }
    return make_blocks(std::move(txs), cfg_.block_size, 1, block_hash(genesis_block()));
}

}  // namespace valphase
