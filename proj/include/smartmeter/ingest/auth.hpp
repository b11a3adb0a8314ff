// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>

#include "smartmeter/ingest/ledger.hpp"

namespace smartmeter::ingest {

/// PBKDF2-HMAC-SHA256 with a per-user salt.
Digest derive_password_digest(std::string_view password, const Salt& salt, std::uint32_t iterations);
Salt random_salt();
/// Constant-time comparison against a stored digest.
bool verify_password(std::string_view password, const Salt& salt, const Digest& digest,
                     std::uint32_t iterations);

/// 256-bit random token, hex encoded.
std::string random_token();

/// In-memory bearer tokens with a fixed lifetime. Sessions do not survive a
/// restart. Not thread-safe.
class SessionStore {
public:
    explicit SessionStore(Duration ttl) : ttl_(ttl) {}

    std::string issue(const std::string& user_id, Timestamp now);
    /// Empty when the token is unknown or expired; expired tokens are dropped.
    std::string user_for(const std::string& token, Timestamp now);
    void revoke(const std::string& token) { sessions_.erase(token); }
    Duration ttl() const { return ttl_; }

private:
    struct Session {
        std::string user_id;
        Timestamp expires_at;
    };
    Duration ttl_;
    std::unordered_map<std::string, Session> sessions_;
};

} // namespace smartmeter::ingest
