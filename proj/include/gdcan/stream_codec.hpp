#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gdcan/bits.hpp"
#include "gdcan/dynamic_dict.hpp"
#include "gdcan/fingerprint.hpp"
#include "gdcan/preset_dict.hpp"
#include "gdcan/record.hpp"

namespace gdcan {

enum class Mode : std::uint8_t { RamOnly = 1, FlashOnly = 2, Hybrid = 3 };

std::string_view mode_name(Mode mode) noexcept;
Mode parse_mode(std::string_view name);

// ID space sizes. Primary: 0xxxxxxx | 10 + 14 bits | 110 + 21 bits.
// Hybrid RAM: 1110 + 12 bits | 1111 + 20 bits with 0xFF as first byte reserved.
inline constexpr std::uint32_t kPrimaryIdLimit = 128 + (1u << 14) + (1u << 21);
inline constexpr std::uint32_t kHybridRamIdLimit = 4096 + 15 * (1u << 16);

std::uint32_t id_space_limit(IdSpace space) noexcept;

/// Appends the shortest encoding of id. Throws Error(SpaceExhausted) if id
/// does not fit the space.
void encode_id(std::uint32_t id, IdSpace space, std::vector<std::uint8_t>& out);
std::vector<std::uint8_t> encode_id(std::uint32_t id, IdSpace space);
/// Returns (id, bytes consumed). Throws Error(Format) on a truncated or
/// foreign prefix.
std::pair<std::uint32_t, std::size_t> decode_id(std::span<const std::uint8_t> bytes, IdSpace space);
std::size_t encoded_id_length(std::uint32_t id, IdSpace space);

// Control tokens.
inline constexpr std::uint8_t kEscape = 0xFF;
inline constexpr std::uint8_t kReset = 0x00;
inline constexpr std::uint8_t kNewBasis = 0x01;
inline constexpr std::uint8_t kEndOfStream = 0x02;

/// Deviation bytes per token: one for m <= 8, two (little-endian) above.
inline std::size_t deviation_bytes(const CodeParams& code) noexcept { return code.m() <= 8 ? 1 : 2; }

struct StreamHeader {
    static constexpr std::array<std::uint8_t, 4> kMagic{'G', 'D', 'C', 'B'};
    static constexpr std::uint8_t kVersion = 1;
    static constexpr std::size_t kSize = 28;
    static constexpr std::uint8_t kFlagDeltaTimestamps = 0x01;

    std::uint8_t version = kVersion;
    Mode mode = Mode::RamOnly;
    ChunkingKind chunking = ChunkingKind::HalfRow;
    std::uint8_t rows = 1;
    std::uint8_t m = 0;
    std::uint8_t l_low = 0; // l modulo 256; the code is fixed by the chunking
    FingerprintAlgo algo = FingerprintAlgo::Crc32;
    std::uint64_t dict_id = 0;
    std::uint64_t record_count = 0;
    std::uint8_t flags = 0;

    std::array<std::uint8_t, kSize> serialize() const;
    static StreamHeader parse(std::span<const std::uint8_t> bytes);
    ChunkingConfig chunking_config() const;
    bool delta_timestamps() const noexcept { return flags & kFlagDeltaTimestamps; }
};

struct CodecConfig {
    Mode mode = Mode::RamOnly;
    ChunkingConfig chunking = ChunkingConfig::half_row();
    FingerprintAlgo algo = FingerprintAlgo::Crc32;
    std::size_t ram_budget = 0;
    Accounting accounting = Accounting::Uniform;
    bool verify_on_match = false;
    bool delta_timestamps = true; // recorded in the header flags
    /// Lowers the dynamic ID space limit; tests use it to force segment resets.
    std::optional<std::uint32_t> id_limit;
};

class ByteSink {
public:
    virtual ~ByteSink() = default;
    virtual void write(std::span<const std::uint8_t> bytes) = 0;
};

class VectorSink final : public ByteSink {
public:
    void write(std::span<const std::uint8_t> bytes) override { data.insert(data.end(), bytes.begin(), bytes.end()); }
    std::vector<std::uint8_t> data;
};

struct TokenCounts {
    std::uint64_t ref_primary = 0;
    std::uint64_t ref_ram = 0;
    std::uint64_t new_basis = 0;
    std::uint64_t resets = 0;
};

/// Single-pass compressor. The header is written on construction, each
/// push() emits exactly one token (plus a Reset when the dynamic ID space
/// runs out) and finish() writes EndOfStream.
class StreamCompressor {
public:
    StreamCompressor(const CodecConfig& config, const PresetDictionary* preset, std::uint64_t record_count,
                     ByteSink& sink);

    void push(const Bits& chunk);
    void finish();

    const TokenCounts& counts() const noexcept { return counts_; }
    std::uint64_t chunks_seen() const noexcept { return chunks_seen_; }
    /// Null in flash_only mode.
    const DynamicDictionary* dynamic_dictionary() const noexcept { return dynamic_ ? &*dynamic_ : nullptr; }

private:
    void emit_ref(std::uint32_t id, IdSpace space, Syndrome deviation);
    void emit_new_basis(const Bits& basis, Syndrome deviation);
    void emit_deviation(Syndrome deviation);
    std::uint32_t assign_dynamic_id(const Fingerprint& fp, const Bits& basis);
    void flush();

    CodecConfig config_;
    const PresetDictionary* preset_;
    ByteSink& sink_;
    std::optional<DynamicDictionary> dynamic_;
    IdSpace dynamic_space_ = IdSpace::Primary;
    std::uint32_t dynamic_limit_ = 0;
    std::uint64_t expected_chunks_ = 0;
    std::uint64_t chunks_seen_ = 0;
    bool finished_ = false;
    TokenCounts counts_;
    std::vector<std::uint8_t> buffer_;
};

std::vector<std::uint8_t> compress(std::span<const Bits> chunks, const CodecConfig& config,
                                   const PresetDictionary* preset, std::uint64_t record_count);

struct DecompressedStream {
    StreamHeader header;
    std::vector<Bits> chunks;
};

/// Requires the decompressor-side preset dictionary for flash_only and hybrid
/// containers.
DecompressedStream decompress(std::span<const std::uint8_t> container, const PresetDictionary* preset);

struct SizeReport {
    std::size_t total_bytes = 0;
    std::uint64_t record_count = 0;
    Mode mode = Mode::RamOnly;
    TokenCounts tokens;
    std::size_t id_bytes = 0;
    std::size_t basis_bytes = 0;
    std::size_t deviation_bytes = 0;
    std::size_t control_bytes = 0; // escapes, resets and end of stream
    std::optional<double> gain;    // absent for an empty stream
};

/// Walks the token stream without needing any dictionary.
SizeReport compressed_size_report(std::span<const std::uint8_t> container);

/// Records -> (delta timestamps) -> chunks -> container.
std::vector<std::uint8_t> compress_records(std::span<const CanRecord> records, const CodecConfig& config,
                                           const PresetDictionary* preset);
std::vector<CanRecord> decompress_records(std::span<const std::uint8_t> container, const PresetDictionary* preset);

} // namespace gdcan
