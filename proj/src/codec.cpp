#include "valphase/codec.hpp"

#include <cstring>

#include "valphase/errors.hpp"

namespace valphase {

void Encoder::put_u32(uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    buf_.append(b, 4);
}

void Encoder::put_u64(uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    buf_.append(b, 8);
}

void Encoder::put_bytes(std::string_view v) {
    put_u32(static_cast<uint32_t>(v.size()));
    buf_.append(v.data(), v.size());
}

void Encoder::put_digest(const Digest& d) {
    buf_.append(reinterpret_cast<const char*>(d.data()), d.size());
}

void Encoder::put_version(const Version& v) {
    put_u64(v.block_height);
    put_u32(v.tx_index);
}

void Encoder::put_opt_version(const std::optional<Version>& v) {
    put_u8(v.has_value() ? 1 : 0);
    if (v) put_version(*v);
}

std::string_view Decoder::need(size_t n) {
    if (data_.size() - pos_ < n) throw CodecError("truncated input");
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
}

uint8_t Decoder::get_u8() { return static_cast<uint8_t>(need(1)[0]); }

uint32_t Decoder::get_u32() {
    auto b = need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(b[i])) << (8 * i);
    return v;
}

uint64_t Decoder::get_u64() {
    auto b = need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(b[i])) << (8 * i);
    return v;
}

std::string Decoder::get_bytes() {
    uint32_t n = get_u32();
    return std::string(need(n));
}

Digest Decoder::get_digest() {
    auto b = need(32);
    Digest d;
    std::memcpy(d.data(), b.data(), 32);
    return d;
}

Version Decoder::get_version() {
    Version v;
    v.block_height = get_u64();
    v.tx_index = get_u32();
    return v;
}

std::optional<Version> Decoder::get_opt_version() {
    if (get_u8() == 0) return std::nullopt;
    return get_version();
}

namespace {

void encode_key(Encoder& enc, const Key& k) {
    enc.put_bytes(k.ns);
    enc.put_bytes(k.name);
}

Key decode_key(Decoder& dec) {
    Key k;
    k.ns = dec.get_bytes();
    k.name = dec.get_bytes();
    return k;
}

}  // namespace

void encode_tx_body(Encoder& enc, const Transaction& tx) {
    enc.put_bytes(tx.tx_id);
    enc.put_bytes(tx.chaincode_id);
    enc.put_bytes(tx.payload);
    enc.put_u32(static_cast<uint32_t>(tx.read_set.entries.size()));
    for (const auto& r : tx.read_set.entries) {
        encode_key(enc, r.key);
        enc.put_opt_version(r.version);
    }
    enc.put_u32(static_cast<uint32_t>(tx.write_set.entries.size()));
    for (const auto& w : tx.write_set.entries) {
        encode_key(enc, w.key);
        enc.put_u8(w.value.has_value() ? 1 : 0);
        if (w.value) enc.put_bytes(*w.value);
    }
    enc.put_u32(static_cast<uint32_t>(tx.endorsements.size()));
    for (const auto& e : tx.endorsements) {
        enc.put_bytes(e.org_id);
        enc.put_bytes(e.signer_id);
        enc.put_digest(e.tag);
    }
}

std::string serialize_transaction(const Transaction& tx) {
    Encoder enc;
    encode_tx_body(enc, tx);
    enc.put_u8(static_cast<uint8_t>(tx.validation_code));
    return enc.take();
}

Transaction decode_transaction(Decoder& dec) {
    Transaction tx;
    tx.tx_id = dec.get_bytes();
    tx.chaincode_id = dec.get_bytes();
    tx.payload = dec.get_bytes();
    uint32_t nr = dec.get_u32();
    tx.read_set.entries.reserve(nr);
    for (uint32_t i = 0; i < nr; ++i) {
        ReadEntry r;
        r.key = decode_key(dec);
        r.version = dec.get_opt_version();
        tx.read_set.entries.push_back(std::move(r));
    }
    uint32_t nw = dec.get_u32();
    tx.write_set.entries.reserve(nw);
    for (uint32_t i = 0; i < nw; ++i) {
        WriteEntry w;
        w.key = decode_key(dec);
        if (dec.get_u8() != 0) w.value = dec.get_bytes();
        tx.write_set.entries.push_back(std::move(w));
    }
    uint32_t ne = dec.get_u32();
    tx.endorsements.reserve(ne);
    for (uint32_t i = 0; i < ne; ++i) {
        Endorsement e;
        e.org_id = dec.get_bytes();
        e.signer_id = dec.get_bytes();
        e.tag = dec.get_digest();
        tx.endorsements.push_back(std::move(e));
    }
    uint8_t code = dec.get_u8();
    if (code > static_cast<uint8_t>(ValidationCode::MvccConflict))
        throw CodecError("bad validation code");
    tx.validation_code = static_cast<ValidationCode>(code);
    return tx;
}

std::string serialize_block(const Block& b) {
    Encoder enc;
    enc.put_u64(b.number);
    enc.put_digest(b.prev_hash);
    enc.put_digest(b.data_hash);
    enc.put_u32(static_cast<uint32_t>(b.transactions.size()));
    for (const auto& tx : b.transactions) {
        encode_tx_body(enc, tx);
        enc.put_u8(static_cast<uint8_t>(tx.validation_code));
    }
    return enc.take();
}

Block deserialize_block(std::string_view data) {
    Decoder dec(data);
    Block b;
    b.number = dec.get_u64();
    b.prev_hash = dec.get_digest();
    b.data_hash = dec.get_digest();
    uint32_t n = dec.get_u32();
    b.transactions.reserve(n);
    for (uint32_t i = 0; i < n; ++i) b.transactions.push_back(decode_transaction(dec));
    if (!dec.empty()) throw CodecError("trailing bytes after block");
    return b;
}

void encode_policy(Encoder& enc, const EndorsementPolicy& p) {
    enc.put_u8(static_cast<uint8_t>(p.kind()));
    switch (p.kind()) {
        case EndorsementPolicy::Kind::Org:
            enc.put_bytes(p.org_id());
            return;
        case EndorsementPolicy::Kind::OutOf:
            enc.put_u32(p.threshold());
            break;
        default:
            break;
    }
    enc.put_u32(static_cast<uint32_t>(p.children().size()));
    for (const auto& c : p.children()) encode_policy(enc, c);
}

EndorsementPolicy decode_policy(Decoder& dec) {
    auto kind = static_cast<EndorsementPolicy::Kind>(dec.get_u8());
    if (kind == EndorsementPolicy::Kind::Org) return EndorsementPolicy::org(dec.get_bytes());
    uint32_t m = 0;
    if (kind == EndorsementPolicy::Kind::OutOf) m = dec.get_u32();
    uint32_t n = dec.get_u32();
    std::vector<EndorsementPolicy> children;
    children.reserve(n);
    for (uint32_t i = 0; i < n; ++i) children.push_back(decode_policy(dec));
    switch (kind) {
        case EndorsementPolicy::Kind::And: return EndorsementPolicy::all_of(std::move(children));
        case EndorsementPolicy::Kind::Or: return EndorsementPolicy::any_of(std::move(children));
        case EndorsementPolicy::Kind::OutOf:
            return EndorsementPolicy::out_of(m, std::move(children));
        default: throw CodecError("bad policy node kind");
    }
}

std::string serialize_chaincode_info(const ChaincodeInfo& info) {
    Encoder enc;
    enc.put_bytes(info.chaincode_id);
    enc.put_bytes(info.version);
    encode_policy(enc, info.policy);
    return enc.take();
}

ChaincodeInfo deserialize_chaincode_info(std::string_view data) {
    Decoder dec(data);
    ChaincodeInfo info;
    info.chaincode_id = dec.get_bytes();
    info.version = dec.get_bytes();
    info.policy = decode_policy(dec);
    if (!dec.empty()) throw CodecError("trailing bytes after chaincode info");
    return info;
}

}  // namespace valphase
