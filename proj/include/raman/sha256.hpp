#pragma once
#include <cstddef>
#include <string>

namespace raman {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);

// Digest of a file's bytes; throws std::runtime_error if unreadable.
std::string sha256_file(const std::string& path);

} // namespace raman
