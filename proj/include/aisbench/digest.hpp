#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace aisbench {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// 64-bit FNV-1a; used where a stable, cheap hash is enough (seeding).
constexpr unsigned long long fnv1a(std::string_view data) {
    unsigned long long h = 14695981039346656037ULL;
    for (const char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace aisbench
