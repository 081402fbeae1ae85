#include "gdcan/gd_transform.hpp"

#include <string>

#include "gdcan/error.hpp"

namespace gdcan {

BasisDeviation to_basis_deviation(const Bits& chunk, const CodeParams& code) {
    const Syndrome s = syndrome(chunk, code);
    const auto info = code.classify(s);
    if (info.cls == SyndromeClass::Retained && info.position < code.basis_bits()) {
        Bits corrected = chunk;
        corrected.flip(info.position);
        return {corrected.prefix(code.basis_bits()), s};
    }
    // Zero syndrome, a flipped parity bit, or a shortened-away column: the
    // message bits are already the basis.
    return {chunk.prefix(code.basis_bits()), s};
}

Bits from_basis_deviation(const BasisDeviation& pair, const CodeParams& code) {
    if (pair.deviation >> code.m())
        throw Error(ErrorKind::Parameter, "deviation wider than " + std::to_string(code.m()) + " bits");
    Syndrome parity = encode_parity(pair.basis, code);
    const auto info = code.classify(pair.deviation);
    if (info.cls == SyndromeClass::Removed)
        parity ^= pair.deviation;

    Bits chunk = Bits::from_bytes(pair.basis.bytes(), code.chunk_bits());
    const auto offset = code.basis_bits();
    for (unsigned i = 0; i < code.m(); ++i)
        chunk.set(offset + i, (parity >> i) & 1u);
    if (info.cls == SyndromeClass::Retained)
        chunk.flip(info.position);
    return chunk;
}

} // namespace gdcan
