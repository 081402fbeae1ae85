#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>

namespace gdcan {

enum class FingerprintAlgo : std::uint8_t { Crc32 = 1, Fnv64 = 2 };

std::size_t fingerprint_length(FingerprintAlgo algo) noexcept;
std::string_view algo_name(FingerprintAlgo algo) noexcept;
FingerprintAlgo parse_algo(std::string_view name);
FingerprintAlgo algo_from_byte(std::uint8_t byte);

struct Fingerprint {
    FingerprintAlgo algo = FingerprintAlgo::Crc32;
    std::uint64_t value = 0;

    std::size_t length() const noexcept { return fingerprint_length(algo); }
    /// Little-endian digest bytes, length() of them.
    void write_bytes(std::uint8_t* out) const noexcept;
    static Fingerprint read_bytes(FingerprintAlgo algo, const std::uint8_t* in) noexcept;

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

/// Reflected CRC-32 (poly 0xEDB88320, init and xorout 0xFFFFFFFF).
std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept;
/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> data) noexcept;

Fingerprint fingerprint(std::span<const std::uint8_t> basis_bytes, FingerprintAlgo algo) noexcept;

} // namespace gdcan

template <>
struct std::hash<gdcan::Fingerprint> {
    std::size_t operator()(const gdcan::Fingerprint& fp) const noexcept {
        return std::hash<std::uint64_t>{}(fp.value ^ (static_cast<std::uint64_t>(fp.algo) << 60));
    }
};
