#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace valphase {

using Digest = std::array<uint8_t, 32>;

Digest sha256(std::string_view data);

std::string to_hex(const Digest& d);

// Endorsement "signature": a deterministic tag over the payload digest and
// the signer identity. Stands in for PKI; only determinism and tamper
// detection matter here.
Digest make_endorsement_tag(const Digest& payload_digest, std::string_view signer_id);

// Burns roughly `us` microseconds of CPU. Models per-signature crypto cost;
// calibrated once per process.
void burn_cpu_us(uint32_t us);

}  // namespace valphase
