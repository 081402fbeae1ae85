#include "gdcan/fingerprint.hpp"

#include <array>
#include <string>

#include "gdcan/error.hpp"

namespace gdcan {

namespace {

constexpr std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int j = 0; j < 8; ++j)
            c = (c & 1u) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
        table[i] = c;
    }
    return table;
}

constexpr auto kCrcTable = make_crc_table();

} // namespace

std::size_t fingerprint_length(FingerprintAlgo algo) noexcept {
    return algo == FingerprintAlgo::Fnv64 ? 8 : 4;
}

std::string_view algo_name(FingerprintAlgo algo) noexcept {
    return algo == FingerprintAlgo::Fnv64 ? "fnv64" : "crc32";
}

FingerprintAlgo parse_algo(std::string_view name) {
    if (name == "crc32")
        return FingerprintAlgo::Crc32;
    if (name == "fnv64")
        return FingerprintAlgo::Fnv64;
    throw Error(ErrorKind::Config, "unknown fingerprint algorithm '" + std::string(name) + "'");
}

FingerprintAlgo algo_from_byte(std::uint8_t byte) {
    if (byte == static_cast<std::uint8_t>(FingerprintAlgo::Crc32) ||
        byte == static_cast<std::uint8_t>(FingerprintAlgo::Fnv64))
        return static_cast<FingerprintAlgo>(byte);
    throw Error(ErrorKind::Format, "unknown fingerprint algorithm byte " + std::to_string(byte));
}

void Fingerprint::write_bytes(std::uint8_t* out) const noexcept {
    for (std::size_t i = 0; i < length(); ++i)
        out[i] = static_cast<std::uint8_t>(value >> (8 * i));
}

Fingerprint Fingerprint::read_bytes(FingerprintAlgo algo, const std::uint8_t* in) noexcept {
    Fingerprint fp{algo, 0};
    for (std::size_t i = 0; i < fp.length(); ++i)
        fp.value |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    return fp;
}

std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept {
    std::uint32_t c = 0xFFFFFFFFu;
    for (auto b : data)
        c = kCrcTable[(c ^ b) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> data) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto b : data) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

Fingerprint fingerprint(std::span<const std::uint8_t> basis_bytes, FingerprintAlgo algo) noexcept {
    if (algo == FingerprintAlgo::Fnv64)
        return {algo, fnv1a64(basis_bytes)};
    return {algo, crc32(basis_bytes)};
}

} // namespace gdcan
