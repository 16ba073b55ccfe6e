// sha256.hpp
// FIPS 180-4 SHA-256, streaming interface plus string/file helpers.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace btsim {

class Sha256 {
public:
    Sha256();

    void update(const void* data, std::size_t len);
    // Lowercase hex digest; the object must not be updated afterwards.
    std::string hex_digest();

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_;
    std::array<std::uint8_t, 64> buffer_;
    std::size_t buffer_len_ = 0;
    std::uint64_t total_bits_ = 0;
};

std::string sha256_hex(const std::string& data);
// Throws io_error when the file cannot be read.
std::string sha256_file_hex(const std::string& path);

} // namespace btsim
