#include "valphase/digest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <stdexcept>

namespace valphase {

Digest sha256(std::string_view data) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw std::runtime_error("sha256 failed");
    }
    return out;
}

std::string to_hex(const Digest& d) {
    static const char* hex = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (uint8_t b : d) {
        s.push_back(hex[b >> 4]);
        s.push_back(hex[b & 0xf]);
    }
    return s;
}

Digest make_endorsement_tag(const Digest& payload_digest, std::string_view signer_id) {
    std::string buf;
    buf.reserve(4 + signer_id.size() + payload_digest.size());
    uint32_t n = static_cast<uint32_t>(signer_id.size());
    buf.append(reinterpret_cast<const char*>(&n), 4);
    buf.append(signer_id);
    buf.append(reinterpret_cast<const char*>(payload_digest.data()), payload_digest.size());
    return sha256(buf);
}

namespace {

// Iterations of the mix loop per microsecond, measured once.
uint64_t calibrate_iters_per_us() {
    using clock = std::chrono::steady_clock;
    volatile uint64_t x = 0x9e3779b97f4a7c15ull;
    const uint64_t probe = 2'000'000;
    auto t0 = clock::now();
    for (uint64_t i = 0; i < probe; ++i) x = x * 6364136223846793005ull + 1442695040888963407ull;
    auto dt = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0).count();
    if (dt <= 0) dt = 1;
    uint64_t per_us = probe * 1000 / static_cast<uint64_t>(dt);
    return per_us == 0 ? 1 : per_us;
}

}  // namespace

void burn_cpu_us(uint32_t us) {
    if (us == 0) return;
    static const uint64_t iters_per_us = calibrate_iters_per_us();
    volatile uint64_t x = us;
    for (uint64_t i = 0, n = iters_per_us * us; i < n; ++i) {
        x = x * 6364136223846793005ull + 1442695040888963407ull;
    }
}

}  // namespace valphase
