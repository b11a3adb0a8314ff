// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/ingest/auth.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <stdexcept>

namespace smartmeter::ingest {

namespace {

void fill_random(std::uint8_t* out, std::size_t n) {
    if (RAND_bytes(out, static_cast<int>(n)) != 1) {
        throw std::runtime_error("system random source failed");
    }
}

} // namespace

Digest derive_password_digest(std::string_view password, const Salt& salt, std::uint32_t iterations) {
    if (iterations == 0) {
        throw std::invalid_argument("pbkdf2 iterations must be positive");
    }
    Digest out{};
    if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                          static_cast<int>(salt.size()), static_cast<int>(iterations), EVP_sha256(),
                          static_cast<int>(out.size()), out.data()) != 1) {
        throw std::runtime_error("password key derivation failed");
    }
    return out;
}

Salt random_salt() {
    Salt s{};
    fill_random(s.data(), s.size());
    return s;
}

bool verify_password(std::string_view password, const Salt& salt, const Digest& digest,
                     std::uint32_t iterations) {
    const auto candidate = derive_password_digest(password, salt, iterations);
    return CRYPTO_memcmp(candidate.data(), digest.data(), digest.size()) == 0;
}

std::string random_token() {
    std::array<std::uint8_t, 32> raw{};
    fill_random(raw.data(), raw.size());
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (auto b : raw) {
        out += digits[b >> 4];
        out += digits[b & 0xF];
    }
    return out;
}

std::string SessionStore::issue(const std::string& user_id, Timestamp now) {
    auto token = random_token();
    sessions_[token] = {user_id, now + ttl_};
    return token;
}

std::string SessionStore::user_for(const std::string& token, Timestamp now) {
    auto it = sessions_.find(token);
    if (it == sessions_.end()) {
        return {};
    }
    if (now >= it->second.expires_at) {
        sessions_.erase(it);
        return {};
    }
    return it->second.user_id;
}

} // namespace smartmeter::ingest
