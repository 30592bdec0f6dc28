// SPDX-License-Identifier: Apache-2.0
#include "touchauth/commitment.hpp"

#include <openssl/evp.h>

#include <memory>

#include "touchauth/error.hpp"

namespace touchauth {
namespace {

void check_nonce(std::span<const std::uint8_t> nonce, std::size_t nonce_bits) {
    if (nonce_bits == 0 || nonce_bits % 8 != 0) {
        throw InvalidArgument("nonce bits must be a positive multiple of 8");
    }
    if (nonce.size() * 8 != nonce_bits) throw InvalidArgument("nonce length mismatch");
}

}  // namespace

Commitment commit(std::span<const std::uint8_t> payload, std::span<const std::uint8_t> nonce,
                  std::size_t nonce_bits) {
    check_nonce(nonce, nonce_bits);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    Commitment c;
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), payload.data(), payload.size()) != 1 ||
        EVP_DigestUpdate(ctx.get(), nonce.data(), nonce.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), c.digest.data(), &len) != 1 || len != kDigestBytes) {
        throw Error("SHA-256 failed");
    }
    return c;
}

bool verify_commit(const Commitment& c, std::span<const std::uint8_t> payload,
                   std::span<const std::uint8_t> nonce, std::size_t nonce_bits) {
    return commit(payload, nonce, nonce_bits) == c;
}

std::vector<std::uint8_t> make_nonce(Rng& rng, std::size_t nonce_bits) {
    if (nonce_bits == 0 || nonce_bits % 8 != 0) {
        throw InvalidArgument("nonce bits must be a positive multiple of 8");
    }
    std::vector<std::uint8_t> n(nonce_bits / 8);
    for (auto& b : n) b = static_cast<std::uint8_t>(rng() & 0xFF);
    return n;
}

}  // namespace touchauth
