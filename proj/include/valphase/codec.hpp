#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "valphase/types.hpp"

namespace valphase {

// Canonical wire format, used for the block file, state database values and
// the data hash: little-endian fixed-width integers, byte strings prefixed
// with a u32 length, optionals prefixed with a u8 presence flag, lists
// prefixed with a u32 count. Fields appear in declaration order.
class Encoder {
public:
    void put_u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void put_u32(uint32_t v);
    void put_u64(uint64_t v);
    void put_bytes(std::string_view v);          // u32 length + raw bytes
    void put_digest(const Digest& d);            // raw 32 bytes
    void put_version(const Version& v);
    void put_opt_version(const std::optional<Version>& v);

    const std::string& data() const& { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class Decoder {
public:
    explicit Decoder(std::string_view data) : data_(data) {}

    uint8_t get_u8();
    uint32_t get_u32();
    uint64_t get_u64();
    std::string get_bytes();
    Digest get_digest();
    Version get_version();
    std::optional<Version> get_opt_version();

    bool empty() const { return pos_ == data_.size(); }
    size_t remaining() const { return data_.size() - pos_; }

private:
    std::string_view need(size_t n);

    std::string_view data_;
    size_t pos_ = 0;
};

// Transaction body: every field except the validation code.
void encode_tx_body(Encoder& enc, const Transaction& tx);

std::string serialize_transaction(const Transaction& tx);  // body + u8 code
Transaction decode_transaction(Decoder& dec);

std::string serialize_block(const Block& b);
Block deserialize_block(std::string_view data);

void encode_policy(Encoder& enc, const EndorsementPolicy& p);
EndorsementPolicy decode_policy(Decoder& dec);

std::string serialize_chaincode_info(const ChaincodeInfo& info);
ChaincodeInfo deserialize_chaincode_info(std::string_view data);

}  // namespace valphase
