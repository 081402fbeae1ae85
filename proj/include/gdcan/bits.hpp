#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gdcan {

/// Fixed-length bit string packed MSB-first: bit 0 is the most significant
/// bit of byte 0. Unused low bits of the final byte are always zero.
class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t bit_count) : bytes_((bit_count + 7) / 8, 0), size_(bit_count) {}

    /// Takes the first bit_count bits of `bytes`; trailing bits are cleared.
    static Bits from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count);
    /// Parses a string of '0'/'1' characters (other characters are ignored).
    static Bits from_string(std::string_view text);

    std::size_t size() const noexcept { return size_; }
    std::size_t byte_size() const noexcept { return bytes_.size(); }
    std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
    std::span<std::uint8_t> mutable_bytes() noexcept { return bytes_; }

    bool get(std::size_t i) const noexcept { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u; }
    void set(std::size_t i, bool v) noexcept {
        const auto mask = static_cast<std::uint8_t>(0x80u >> (i & 7));
        if (v)
            bytes_[i >> 3] |= mask;
        else
            bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }
    void flip(std::size_t i) noexcept { bytes_[i >> 3] ^= static_cast<std::uint8_t>(0x80u >> (i & 7)); }

    /// First `count` bits as a new Bits.
    Bits prefix(std::size_t count) const;

    bool is_zero() const noexcept;
    std::string to_string() const;

    friend bool operator==(const Bits&, const Bits&) = default;

private:
    void clear_tail() noexcept;

    std::vector<std::uint8_t> bytes_;
    std::size_t size_ = 0;
};

} // namespace gdcan
