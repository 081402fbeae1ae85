#include "gdcan/bits.hpp"

#include <algorithm>

namespace gdcan {

Bits Bits::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
    Bits out(bit_count);
    const auto n = std::min(bytes.size(), out.bytes_.size());
    std::copy_n(bytes.begin(), n, out.bytes_.begin());
    out.clear_tail();
    return out;
}

Bits Bits::from_string(std::string_view text) {
    const auto count = static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) { return c == '0' || c == '1'; }));
    Bits out(count);
    std::size_t i = 0;
    for (char c : text) {
        if (c == '0' || c == '1')
            out.set(i++, c == '1');
    }
    return out;
}

Bits Bits::prefix(std::size_t count) const {
    return from_bytes(bytes(), std::min(count, size_));
}

bool Bits::is_zero() const noexcept {
    return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
}

std::string Bits::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
        if (get(i))
            s[i] = '1';
    return s;
}

void Bits::clear_tail() noexcept {
    if (const auto rem = size_ & 7; rem != 0)
        bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - rem));
}

} // namespace gdcan
