#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "grf/errors.hpp"

// Little-endian binary file helpers. Reads throw format_error on truncation.
namespace grf::binio {

inline void write_bytes(std::ofstream& out, const void* p, size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

inline void write_u32(std::ofstream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    write_bytes(out, b, 4);
}

inline void write_u64(std::ofstream& out, uint64_t v) {
    write_u32(out, static_cast<uint32_t>(v));
    write_u32(out, static_cast<uint32_t>(v >> 32));
}

inline void write_f32(std::ofstream& out, float v) {
    write_u32(out, std::bit_cast<uint32_t>(v));
}

inline void write_f32_array(std::ofstream& out, const float* p, size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        write_bytes(out, p, n * sizeof(float));
    } else {
        for (size_t i = 0; i < n; ++i) {
            write_f32(out, p[i]);
        }
    }
}

inline void write_string(std::ofstream& out, const std::string& s) {
    write_u32(out, static_cast<uint32_t>(s.size()));
    write_bytes(out, s.data(), s.size());
}

inline void read_bytes(std::ifstream& in, void* p, size_t n, const char* what) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n) {
        throw format_error(std::string("truncated file while reading ") + what);
    }
}

inline uint32_t read_u32(std::ifstream& in, const char* what) {
    unsigned char b[4];
    read_bytes(in, b, 4, what);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline uint64_t read_u64(std::ifstream& in, const char* what) {
    const uint64_t lo = read_u32(in, what);
    const uint64_t hi = read_u32(in, what);
    return lo | (hi << 32);
}

inline float read_f32(std::ifstream& in, const char* what) {
    return std::bit_cast<float>(read_u32(in, what));
}

inline void read_f32_array(std::ifstream& in, float* p, size_t n, const char* what) {
    if constexpr (std::endian::native == std::endian::little) {
        read_bytes(in, p, n * sizeof(float), what);
    } else {
        for (size_t i = 0; i < n; ++i) {
            p[i] = read_f32(in, what);
        }
    }
}

inline std::string read_string(std::ifstream& in, uint32_t max_len, const char* what) {
    const uint32_t len = read_u32(in, what);
    if (len > max_len) {
        throw format_error(std::string("unreasonable string length in ") + what);
    }
    std::string s(len, '\0');
    read_bytes(in, s.data(), len, what);
    return s;
}

inline void check_magic(std::ifstream& in, const char magic[4], const char* what) {
    char got[4];
    read_bytes(in, got, 4, what);
    if (std::memcmp(got, magic, 4) != 0) {
        throw format_error(std::string("bad magic for ") + what + ": expected '" +
                           std::string(magic, 4) + "', got '" + std::string(got, 4) + "'");
    }
}

} // namespace grf::binio
