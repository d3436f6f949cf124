#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "valphase/digest.hpp"

namespace valphase {

using Bytes = std::string;

// (block, tx) provenance of a committed value. Total order is lexicographic.
struct Version {
    uint64_t block_height = 0;
    uint32_t tx_index = 0;

    auto operator<=>(const Version&) const = default;
};

struct Key {
    std::string ns;  // chaincode id, or the reserved system namespace
    Bytes name;

    auto operator<=>(const Key&) const = default;
};

// A read taken at endorsement time. No version means the key was absent.
struct ReadEntry {
    Key key;
    std::optional<Version> version;

    bool operator==(const ReadEntry&) const = default;
};

struct ReadSet {
    std::vector<ReadEntry> entries;

    bool operator==(const ReadSet&) const = default;
};

// No value means deletion.
struct WriteEntry {
    Key key;
    std::optional<Bytes> value;

    bool operator==(const WriteEntry&) const = default;
};

struct WriteSet {
    std::vector<WriteEntry> entries;

    bool operator==(const WriteSet&) const = default;
};

struct Endorsement {
    std::string org_id;
    std::string signer_id;
    Digest tag{};

    bool operator==(const Endorsement&) const = default;
};

enum class ValidationCode : uint8_t {
    NotValidated = 0,
    Valid = 1,
    BadSyntax = 2,
    PolicyFailure = 3,
    UnknownChaincode = 4,
    MvccConflict = 5,
};

const char* to_string(ValidationCode code);

struct Transaction {
    std::string tx_id;
    std::string chaincode_id;
    Bytes payload;
    ReadSet read_set;
    WriteSet write_set;
    std::vector<Endorsement> endorsements;
    // The only field a pipeline stage may mutate, and only one stage at a time.
    ValidationCode validation_code = ValidationCode::NotValidated;

    bool operator==(const Transaction&) const = default;
};

struct Block {
    uint64_t number = 0;
    Digest prev_hash{};
    Digest data_hash{};
    std::vector<Transaction> transactions;

    bool operator==(const Block&) const = default;
};

// Boolean expression over organizations: leaf org, AND, OR, OUTOF(m).
class EndorsementPolicy {
public:
    enum class Kind : uint8_t { Org = 0, And = 1, Or = 2, OutOf = 3 };

    EndorsementPolicy() = default;

    static EndorsementPolicy org(std::string org_id);
    static EndorsementPolicy all_of(std::vector<EndorsementPolicy> children);
    static EndorsementPolicy any_of(std::vector<EndorsementPolicy> children);
    static EndorsementPolicy out_of(uint32_t m, std::vector<EndorsementPolicy> children);

    Kind kind() const { return kind_; }
    const std::string& org_id() const { return org_id_; }
    uint32_t threshold() const { return m_; }
    const std::vector<EndorsementPolicy>& children() const { return children_; }

    bool operator==(const EndorsementPolicy&) const = default;

private:
    Kind kind_ = Kind::Org;
    std::string org_id_;
    uint32_t m_ = 0;
    std::vector<EndorsementPolicy> children_;
};

// True iff the policy is satisfied by the given set of organizations.
bool eval_policy(const EndorsementPolicy& policy, const std::set<std::string>& satisfied_orgs);

struct ChaincodeInfo {
    std::string chaincode_id;
    std::string version;
    EndorsementPolicy policy;

    bool operator==(const ChaincodeInfo&) const = default;
};

// Hash over the canonical serialization of the transaction bodies (validation
// codes excluded, they change between arrival and commit).
Digest compute_data_hash(const std::vector<Transaction>& transactions);

// Identity of a block for prev_hash chaining: number || prev_hash || data_hash.
Digest block_hash(const Block& b);

Digest payload_digest(const Bytes& payload);

Endorsement make_endorsement(const Bytes& payload, const std::string& org_id,
                             const std::string& signer_id);

// True iff the tag recomputes over (payload_digest, signer_id). Optionally
// burns `verification_cost_us` of CPU first to model signature checking.
bool verify_endorsement(const Endorsement& e, const Digest& payload_digest,
                        uint32_t verification_cost_us = 0);

}  // namespace valphase
