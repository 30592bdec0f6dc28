// SPDX-License-Identifier: Apache-2.0
//
// Hash commitment: digest = SHA-256(payload || nonce), nonce revealed later.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "touchauth/rng.hpp"

namespace touchauth {

inline constexpr std::size_t kDefaultNonceBits = 256;
inline constexpr std::size_t kDigestBytes = 32;

struct Commitment {
    std::array<std::uint8_t, kDigestBytes> digest{};
    bool operator==(const Commitment&) const = default;
};

/// Throws InvalidArgument unless nonce.size() * 8 == nonce_bits.
Commitment commit(std::span<const std::uint8_t> payload, std::span<const std::uint8_t> nonce,
                  std::size_t nonce_bits = kDefaultNonceBits);

/// Recomputes the digest; same nonce-length precondition as commit().
bool verify_commit(const Commitment& c, std::span<const std::uint8_t> payload,
                   std::span<const std::uint8_t> nonce, std::size_t nonce_bits = kDefaultNonceBits);

/// nonce_bits must be a positive multiple of 8.
std::vector<std::uint8_t> make_nonce(Rng& rng, std::size_t nonce_bits = kDefaultNonceBits);

}  // namespace touchauth
