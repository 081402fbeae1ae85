#include "gdcan/hamming.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "gdcan/error.hpp"

namespace gdcan {

Syndrome CodeParams::column_at(std::size_t position) const noexcept {
    const auto message_len = basis_bits();
    if (position < message_len)
        return columns_[position];
    return Syndrome{1} << (position - message_len);
}

Syndrome CodeParams::syndrome_of_bytes(const std::uint8_t* chunk) const noexcept {
    Syndrome s = 0;
    const auto bytes = chunk_bytes();
    const std::uint16_t* table = byte_table_.data();
    for (std::size_t b = 0; b < bytes; ++b, table += 256)
        s ^= table[chunk[b]];
    return s;
}

CodeParams build_code(unsigned m, std::size_t l) {
    if (m < CodeParams::kMinParityBits || m > CodeParams::kMaxParityBits)
        throw Error(ErrorKind::Parameter, "parity bit count m=" + std::to_string(m) + " outside [3, 16]");
    const std::size_t n = (std::size_t{1} << m) - 1;
    const std::size_t k = n - m;
    if (l >= k)
        throw Error(ErrorKind::Parameter, "shortening l=" + std::to_string(l) + " leaves no message bits");
    if (l > 0 && !(n - l > (std::size_t{1} << (m - 1))))
        throw Error(ErrorKind::Parameter, "shortened length " + std::to_string(n - l) + " not above 2^(m-1) for m=" +
                                              std::to_string(m));

    CodeParams code;
    code.m_ = m;
    code.l_ = l;
    code.columns_.reserve(k - l);
    code.removed_.reserve(l);
    for (std::uint32_t v = 1; v <= n; ++v) {
        if (std::popcount(v) < 2)
            continue;
        if (code.columns_.size() < k - l)
            code.columns_.push_back(static_cast<std::uint16_t>(v));
        else
            code.removed_.push_back(static_cast<std::uint16_t>(v));
    }

    code.syndrome_map_.assign(n + 1, SyndromeInfo{});
    const auto chunk_bits = code.chunk_bits();
    for (std::size_t pos = 0; pos < chunk_bits; ++pos)
        code.syndrome_map_[code.column_at(pos)] = {SyndromeClass::Retained, static_cast<std::uint32_t>(pos)};
    for (auto col : code.removed_)
        code.syndrome_map_[col] = {SyndromeClass::Removed, 0};

    const auto bytes = code.chunk_bytes();
    code.byte_table_.assign(bytes * 256, 0);
    for (std::size_t b = 0; b < bytes; ++b) {
        for (unsigned v = 0; v < 256; ++v) {
            Syndrome s = 0;
            for (unsigned bit = 0; bit < 8; ++bit) {
                const auto pos = b * 8 + bit;
                if (pos < chunk_bits && ((v >> (7 - bit)) & 1u))
                    s ^= code.column_at(pos);
            }
            code.byte_table_[b * 256 + v] = static_cast<std::uint16_t>(s);
        }
    }
    return code;
}

CodeParams choose_code(std::size_t chunk_bits) {
    for (unsigned m = CodeParams::kMinParityBits; m <= CodeParams::kMaxParityBits; ++m) {
        const std::size_t n = (std::size_t{1} << m) - 1;
        if (chunk_bits > n)
            continue;
        const std::size_t l = n - chunk_bits;
        if (l == 0 || chunk_bits > (std::size_t{1} << (m - 1)))
            return build_code(m, l);
        break;
    }
    throw Error(ErrorKind::Parameter, "no shortened Hamming code with chunk length " + std::to_string(chunk_bits));
}

Syndrome encode_parity(const Bits& basis, const CodeParams& code) {
    if (basis.size() != code.basis_bits())
        throw Error(ErrorKind::Parameter, "basis has " + std::to_string(basis.size()) + " bits, code expects " +
                                              std::to_string(code.basis_bits()));
    // The basis bytes are a prefix of a chunk whose parity positions are zero.
    thread_local std::vector<std::uint8_t> scratch;
    scratch.assign(code.chunk_bytes(), 0);
    const auto src = basis.bytes();
    std::copy(src.begin(), src.end(), scratch.begin());
    return code.syndrome_of_bytes(scratch.data());
}

Syndrome syndrome(const Bits& chunk, const CodeParams& code) {
    if (chunk.size() != code.chunk_bits())
        throw Error(ErrorKind::Parameter, "chunk has " + std::to_string(chunk.size()) + " bits, code expects " +
                                              std::to_string(code.chunk_bits()));
    return code.syndrome_of_bytes(chunk.bytes().data());
}

std::string syndrome_to_string(Syndrome s, unsigned m) {
    std::string out(m, '0');
    for (unsigned i = 0; i < m; ++i)
        if ((s >> i) & 1u)
            out[i] = '1';
    return out;
}

} // namespace gdcan
