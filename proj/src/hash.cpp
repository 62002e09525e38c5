#include "grf/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace grf {

Sha256 sha256(const void* data, size_t len) {
    Sha256 out{};
    unsigned int out_len = 0;
    if (EVP_Digest(data, len, out.data(), &out_len, EVP_sha256(), nullptr) != 1 ||
        out_len != out.size()) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    return out;
}

Sha256 sha256(const std::vector<uint8_t>& bytes) {
    return sha256(bytes.data(), bytes.size());
}

std::string to_hex(const Sha256& h) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (uint8_t b : h) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

} // namespace grf
