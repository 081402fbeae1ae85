#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gdcan/bits.hpp"
#include "gdcan/hamming.hpp"
#include "gdcan/record.hpp"

namespace gdcan::synthetic {

struct CanLogOptions {
    std::size_t message_types = 40; // distinct periodic frames on the bus
    double extended_fraction = 0.25; // share of 29-bit identifiers
    std::uint64_t start_ns = 1'600'000'000'000'000'000ull;
};

/// Deterministic CAN log resembling periodic ECU traffic: each message type
/// repeats a mostly constant payload with a rolling counter byte and slowly
/// drifting signal bytes.
std::vector<CanRecord> can_log(std::size_t count, std::uint64_t seed, const CanLogOptions& options = {});

struct ClusteredChunks {
    std::vector<Bits> bases;            // the distinct bases
    std::vector<Bits> chunks;
    std::vector<std::uint32_t> base_of; // base index of every chunk
};

/// Chunks drawn uniformly from `base_count` random bases. Each chunk is its
/// base's codeword with at most one retained bit flipped (uniform over the
/// chunk_bits positions plus "no flip").
ClusteredChunks clustered_chunks(std::size_t count, std::size_t base_count, const CodeParams& code,
                                 std::uint64_t seed);

} // namespace gdcan::synthetic
