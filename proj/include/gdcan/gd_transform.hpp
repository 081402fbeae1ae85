#pragma once

#include "gdcan/bits.hpp"
#include "gdcan/hamming.hpp"

namespace gdcan {

/// Generalized-deduplication split of one chunk. The deviation is the chunk's
/// syndrome, so it is zero exactly when the chunk is a codeword.
struct BasisDeviation {
    Bits basis;
    Syndrome deviation = 0;

    friend bool operator==(const BasisDeviation&, const BasisDeviation&) = default;
};

// Chunks one retained bit away from a codeword share that codeword's basis.
// A syndrome matching a shortened-away column leaves the message bits as-is.
BasisDeviation to_basis_deviation(const Bits& chunk, const CodeParams& code);
Bits from_basis_deviation(const BasisDeviation& pair, const CodeParams& code);

} // namespace gdcan
