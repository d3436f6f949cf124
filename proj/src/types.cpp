#include "valphase/types.hpp"

#include <stdexcept>
#include <utility>

#include "valphase/codec.hpp"

namespace valphase {

const char* to_string(ValidationCode code) {
    switch (code) {
        case ValidationCode::NotValidated: return "NOT_VALIDATED";
        case ValidationCode::Valid: return "VALID";
        case ValidationCode::BadSyntax: return "BAD_SYNTAX";
        case ValidationCode::PolicyFailure: return "POLICY_FAILURE";
        case ValidationCode::UnknownChaincode: return "UNKNOWN_CHAINCODE";
        case ValidationCode::MvccConflict: return "MVCC_CONFLICT";
    }
    return "?";
}

EndorsementPolicy EndorsementPolicy::org(std::string org_id) {
    EndorsementPolicy p;
    p.kind_ = Kind::Org;
    p.org_id_ = std::move(org_id);
    return p;
}

EndorsementPolicy EndorsementPolicy::all_of(std::vector<EndorsementPolicy> children) {
    if (children.empty()) throw std::invalid_argument("AND needs at least one child");
    EndorsementPolicy p;
    p.kind_ = Kind::And;
    p.children_ = std::move(children);
    return p;
}

EndorsementPolicy EndorsementPolicy::any_of(std::vector<EndorsementPolicy> children) {
    if (children.empty()) throw std::invalid_argument("OR needs at least one child");
    EndorsementPolicy p;
    p.kind_ = Kind::Or;
    p.children_ = std::move(children);
    return p;
}

EndorsementPolicy EndorsementPolicy::out_of(uint32_t m, std::vector<EndorsementPolicy> children) {
    if (children.empty()) throw std::invalid_argument("OUTOF needs at least one child");
    if (m > children.size()) throw std::invalid_argument("OUTOF threshold exceeds child count");
    EndorsementPolicy p;
    p.kind_ = Kind::OutOf;
    p.m_ = m;
    p.children_ = std::move(children);
    return p;
}

bool eval_policy(const EndorsementPolicy& policy, const std::set<std::string>& satisfied_orgs) {
    switch (policy.kind()) {
        case EndorsementPolicy::Kind::Org:
            return satisfied_orgs.contains(policy.org_id());
        case EndorsementPolicy::Kind::And:
            for (const auto& c : policy.children())
                if (!eval_policy(c, satisfied_orgs)) return false;
            return true;
        case EndorsementPolicy::Kind::Or:
            for (const auto& c : policy.children())
                if (eval_policy(c, satisfied_orgs)) return true;
            return false;
        case EndorsementPolicy::Kind::OutOf: {
            uint32_t hits = 0;
            for (const auto& c : policy.children())
                if (eval_policy(c, satisfied_orgs)) ++hits;
            return hits >= policy.threshold();
        }
    }
    return false;
}

Digest compute_data_hash(const std::vector<Transaction>& transactions) {
    Encoder enc;
    enc.put_u32(static_cast<uint32_t>(transactions.size()));
    for (const auto& tx : transactions) encode_tx_body(enc, tx);
    return sha256(enc.data());
}

Digest block_hash(const Block& b) {
    Encoder enc;
    enc.put_u64(b.number);
    enc.put_digest(b.prev_hash);
    enc.put_digest(b.data_hash);
    return sha256(enc.data());
}

Digest payload_digest(const Bytes& payload) { return sha256(payload); }

Endorsement make_endorsement(const Bytes& payload, const std::string& org_id,
                             const std::string& signer_id) {
    Endorsement e;
    e.org_id = org_id;
    e.signer_id = signer_id;
    e.tag = make_endorsement_tag(payload_digest(payload), signer_id);
    return e;
}

bool verify_endorsement(const Endorsement& e, const Digest& digest,
                        uint32_t verification_cost_us) {
    burn_cpu_us(verification_cost_us);
    return e.tag == make_endorsement_tag(digest, e.signer_id);
}

}  // namespace valphase
