#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gdcan/bits.hpp"
#include "gdcan/hamming.hpp"

namespace gdcan {

inline constexpr std::size_t kRecordSize = 27;

/// One logger record. Serialized little-endian in declaration order:
/// timestamp(8) identifier(4) ide dlc edl brs dir channel data_length data(8).
struct CanRecord {
    std::uint64_t timestamp = 0; // ns, or a wrapped delta after delta_encode_timestamps
    std::uint32_t identifier = 0;
    std::uint8_t ide = 0;
    std::uint8_t dlc = 0;
    std::uint8_t edl = 0;
    std::uint8_t brs = 0;
    std::uint8_t dir = 0;
    std::uint8_t channel = 0;
    std::uint8_t data_length = 0;
    std::array<std::uint8_t, 8> data{};

    friend bool operator==(const CanRecord&, const CanRecord&) = default;
};

using RecordBytes = std::array<std::uint8_t, kRecordSize>;

/// Throws Error(Format) if the record breaks an identifier or payload invariant.
void validate_record(const CanRecord& rec);
RecordBytes serialize_record(const CanRecord& rec);
CanRecord parse_record(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_records(std::span<const CanRecord> records);
std::vector<CanRecord> parse_records(std::span<const std::uint8_t> bytes);

/// Raw ".gdr" logs: 27-byte records back to back.
std::vector<CanRecord> read_gdr(const std::filesystem::path& path);
void write_gdr(const std::filesystem::path& path, std::span<const CanRecord> records);

/// Record i >= 1 gets t_i - t_{i-1} modulo 2^64.
std::vector<CanRecord> delta_encode_timestamps(std::span<const CanRecord> records);
std::vector<CanRecord> delta_decode_timestamps(std::span<const CanRecord> records);

enum class ChunkingKind : std::uint8_t { HalfRow = 1, FullRow = 2, MultiRow = 3 };

/// How records map onto chunks, and the code sized for those chunks.
class ChunkingConfig {
public:
    static ChunkingConfig half_row();
    static ChunkingConfig full_row();
    static ChunkingConfig multi_row(unsigned rows);
    /// "half", "full" or "multi:N".
    static ChunkingConfig parse(std::string_view text);
    static ChunkingConfig from_header(ChunkingKind kind, unsigned rows);

    ChunkingKind kind() const noexcept { return kind_; }
    /// Records per chunk; 1 for half and full rows.
    unsigned rows() const noexcept { return rows_; }
    const CodeParams& code() const noexcept { return code_; }
    std::size_t chunk_bytes() const noexcept { return code_.chunk_bytes(); }
    std::uint64_t chunk_count(std::uint64_t record_count) const noexcept;
    std::string to_string() const;

private:
    ChunkingConfig(ChunkingKind kind, unsigned rows, CodeParams code)
        : kind_(kind), rows_(rows), code_(std::move(code)) {}

    ChunkingKind kind_;
    unsigned rows_;
    CodeParams code_;
};

std::vector<Bits> records_to_chunks(std::span<const CanRecord> records, const ChunkingConfig& config);

/// Inverse of records_to_chunks. Throws Error(Corruption) on nonzero padding
/// and Error(Format) when the chunk count disagrees with record_count.
std::vector<CanRecord> chunks_to_records(std::span<const Bits> chunks, const ChunkingConfig& config,
                                         std::uint64_t record_count);

} // namespace gdcan
