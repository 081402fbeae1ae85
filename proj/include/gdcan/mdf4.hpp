#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdcan/record.hpp"

namespace gdcan::mdf4 {

inline constexpr std::size_t kIdBlockSize = 64;
inline constexpr std::size_t kBlockHeaderSize = 24;

/// A block as laid out on disk: "##" + 2-char type, 64-bit length, links, data.
struct Block {
    std::string type; // two characters, e.g. "DG"
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    std::vector<std::uint64_t> links;
    std::vector<std::uint8_t> data;

    std::uint64_t link(std::size_t i) const noexcept { return i < links.size() ? links[i] : 0; }
};

struct Channel {
    Block block;
    std::string name;
    std::uint8_t channel_type = 0;
    std::uint8_t data_type = 0;
    std::uint32_t byte_offset = 0;
    std::uint32_t bit_count = 0;
};

struct ChannelGroup {
    Block block;
    std::uint64_t record_id = 0;
    std::uint64_t cycle_count = 0;
    std::uint16_t flags = 0;
    std::uint32_t data_bytes = 0;
    std::uint32_t inval_bytes = 0;
    std::vector<Channel> channels;
};

struct DataGroup {
    Block block;
    std::uint8_t record_id_size = 0;
    std::vector<ChannelGroup> channel_groups;
    std::optional<Block> data; // block referenced by the DG data link
};

struct File {
    std::string format_id; // e.g. "4.10"
    std::uint16_t version = 0;
    Block header;          // HD
    std::vector<DataGroup> data_groups;
    std::vector<Block> unknown_blocks; // reachable blocks of types the reader does not interpret
};

File parse(std::span<const std::uint8_t> bytes);
File open_file(const std::filesystem::path& path);

struct ExtractedRecords {
    std::vector<std::uint8_t> bytes;
    std::uint64_t count = 0;
};

/// Requires a single DG holding a single fixed-length CG of 27-byte records.
ExtractedRecords extract_records(const File& file);
std::vector<CanRecord> read_records(const std::filesystem::path& path);

struct FixtureOptions {
    /// Emit an unlinked "##ZZ" block between HD and DG, and hang an opaque
    /// "##ZZ" block off the HD file-history link.
    bool unknown_blocks = false;
};

/// Minimal ID/HD/DG/CG/CN/DT file holding `records` in one DT block.
std::vector<std::uint8_t> write_fixture(std::span<const CanRecord> records, const FixtureOptions& options = {});

} // namespace gdcan::mdf4
