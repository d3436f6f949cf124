#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "valphase/ledger.hpp"
#include "valphase/statedb.hpp"
#include "valphase/types.hpp"

namespace valphase {

enum class SmallbankOp : uint8_t {
    CreateAccount = 0,
    TransferMoney = 1,  // savings to savings between two users
    DepositCash = 2,    // checking
    WriteCheck = 3,
    Amalgamate = 4,
    QueryBalance = 5,
};

inline constexpr size_t kSmallbankOpCount = 6;

struct WorkloadConfig {
    uint64_t total_txs = 30000;
    uint32_t block_size = 50;
    uint32_t num_accounts = 1000;
    std::array<double, kSmallbankOpCount> op_mix{1, 1, 1, 1, 1, 1};
    uint64_t seed = 1;
    std::vector<std::string> endorsing_orgs{"Org1", "Org2"};
    std::string chaincode_id = "smallbank";
    int64_t initial_balance = 1'000'000;

    // Fault knobs: probability that a generated transaction is endorsed
    // against a one-block-stale snapshot (guaranteed MvccConflict), carries
    // endorsements that cannot satisfy the policy, names an uninstantiated
    // chaincode, or is structurally broken.
    double conflict_prob = 0.02;
    double policy_fail_prob = 0.0;
    double unknown_cc_prob = 0.0;
    double bad_syntax_prob = 0.0;
};

Key savings_key(const std::string& chaincode_id, const std::string& account);
Key checking_key(const std::string& chaincode_id, const std::string& account);

// Deterministic genesis block: transaction i creates account i's keys (so
// they sit at version (0, i)), then one trailing transaction installs the
// ChaincodeInfo records in the system namespace.
Block make_genesis_block(const std::vector<ChaincodeInfo>& chaincodes,
                         const std::vector<std::string>& accounts,
                         const std::string& chaincode_id, int64_t initial_balance);

// Applies a pre-validated genesis block to empty stores. Errors if anything
// was seeded before.
void seed_genesis(StateDb& statedb, BlockLedger& ledger, HistoryDb& history,
                  const Block& genesis);

// Splits transactions into consecutively numbered, hash-chained blocks.
std::vector<Block> make_blocks(std::vector<Transaction> txs, uint32_t block_size,
                               uint64_t first_number, const Digest& prev_hash);

// Plays client, endorsers and orderer: endorses smallbank operations against
// a mirror of committed state and assembles the hash-chained block stream.
// Identical configs yield byte-identical streams.
class WorkloadGenerator {
public:
    explicit WorkloadGenerator(WorkloadConfig cfg);

    const WorkloadConfig& config() const { return cfg_; }
    std::vector<std::string> initial_accounts() const;
    std::vector<ChaincodeInfo> chaincodes() const;
    Block genesis_block() const;

    // Blocks 1..N chained after the genesis block.
    std::vector<Block> make_stream();

    // Transactions the generator endorsed expecting MvccConflict.
    uint64_t injected_conflicts() const { return injected_conflicts_; }

private:
    struct MirrorEntry {
        int64_t balance = 0;
        Version version;
    };

    struct PendingTx {
        Transaction tx;
        bool expect_valid = false;
        std::vector<std::pair<Key, MirrorEntry>> mirror_updates;
    };

    std::string account_name(uint32_t index) const;
    std::optional<PendingTx> try_make_tx(uint64_t seq);
    PendingTx make_conflict_tx(uint64_t seq);
    Transaction endorse(SmallbankOp op, const std::string& payload_body, const ReadSet& reads,
                        const WriteSet& writes, uint64_t seq);

    SmallbankOp pick_op();
    std::optional<std::string> pick_untouched_account();
    double next_unit();

    WorkloadConfig cfg_;
    std::mt19937_64 rng_;
    std::map<Key, MirrorEntry> mirror_;  // committed state as of the last assembled block
    uint32_t accounts_in_pool_ = 0;      // usable this block (created ones join next block)
    uint32_t accounts_total_ = 0;
    std::set<std::string> touched_accounts_;  // this block
    // Keys written by the previous block with their pre-write versions; the
    // raw material for conflict injection.
    std::map<Key, std::pair<std::optional<MirrorEntry>, MirrorEntry>> prev_block_writes_;
    uint64_t injected_conflicts_ = 0;
    bool streamed_ = false;
};

}  // namespace valphase
