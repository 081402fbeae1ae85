#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gdcan/bits.hpp"

namespace gdcan {

/// A syndrome is an m-bit vector stored as an integer; bit i corresponds to
/// parity row i (the i-th parity position of a codeword).
using Syndrome = std::uint32_t;

enum class SyndromeClass : std::uint8_t { Zero, Retained, Removed };

struct SyndromeInfo {
    SyndromeClass cls = SyndromeClass::Zero;
    std::uint32_t position = 0; // valid only for Retained
};

/// Systematic (shortened) Hamming code H'(n - l, k - l).
///
/// Message columns are every m-bit vector of weight >= 2 sorted by numeric
/// value with the last l removed. Codeword layout is [message | parity],
/// parity position i carrying the unit column with bit i set.
class CodeParams {
public:
    static constexpr unsigned kMinParityBits = 3;
    static constexpr unsigned kMaxParityBits = 16;

    unsigned m() const noexcept { return m_; }
    std::size_t l() const noexcept { return l_; }
    std::size_t n() const noexcept { return (std::size_t{1} << m_) - 1; }
    std::size_t k() const noexcept { return n() - m_; }
    std::size_t chunk_bits() const noexcept { return n() - l_; }
    std::size_t basis_bits() const noexcept { return k() - l_; }
    std::size_t chunk_bytes() const noexcept { return (chunk_bits() + 7) / 8; }
    std::size_t basis_bytes() const noexcept { return (basis_bits() + 7) / 8; }

    const std::vector<std::uint16_t>& message_columns() const noexcept { return columns_; }
    /// Columns of the full code that shortening removed, in sorted order.
    const std::vector<std::uint16_t>& removed_columns() const noexcept { return removed_; }

    /// Parity-check column at a retained codeword position.
    Syndrome column_at(std::size_t position) const noexcept;
    /// Total map from every m-bit syndrome to its class.
    SyndromeInfo classify(Syndrome s) const noexcept { return syndrome_map_[s]; }

    /// Syndrome of a chunk_bytes()-long buffer packed MSB-first.
    Syndrome syndrome_of_bytes(const std::uint8_t* chunk) const noexcept;

    friend bool operator==(const CodeParams& a, const CodeParams& b) noexcept {
        return a.m_ == b.m_ && a.l_ == b.l_;
    }

private:
    friend CodeParams build_code(unsigned m, std::size_t l);

    unsigned m_ = 0;
    std::size_t l_ = 0;
    std::vector<std::uint16_t> columns_;
    std::vector<std::uint16_t> removed_;
    std::vector<SyndromeInfo> syndrome_map_;
    // byte_table_[byte_index * 256 + value] = XOR of the columns set by that byte.
    std::vector<std::uint16_t> byte_table_;
};

/// Throws Error(Parameter) unless m in [3, 16] and, for l > 0,
/// 2^(m-1) < 2^m - 1 - l.
CodeParams build_code(unsigned m, std::size_t l);

/// Smallest valid code whose chunk length equals chunk_bits exactly.
CodeParams choose_code(std::size_t chunk_bits);

Syndrome encode_parity(const Bits& basis, const CodeParams& code);
Syndrome syndrome(const Bits& chunk, const CodeParams& code);

/// Renders a syndrome as m characters, parity row 0 first.
std::string syndrome_to_string(Syndrome s, unsigned m);

} // namespace gdcan
