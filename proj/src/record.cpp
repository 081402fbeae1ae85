#include "gdcan/record.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "byte_io.hpp"
#include "gdcan/error.hpp"

namespace gdcan {

using detail::load_le;
using detail::store_le;

void validate_record(const CanRecord& rec) {
    const std::uint32_t id_limit = rec.ide == 0 ? (1u << 11) : (1u << 29);
    if (rec.identifier >= id_limit)
        throw Error(ErrorKind::Format, "identifier " + std::to_string(rec.identifier) +
                                           (rec.ide == 0 ? " exceeds 11 bits" : " exceeds 29 bits"));
    if (rec.data_length > 8)
        throw Error(ErrorKind::Format, "data length " + std::to_string(rec.data_length) + " above 8");
    for (std::size_t i = rec.data_length; i < rec.data.size(); ++i)
        if (rec.data[i] != 0)
            throw Error(ErrorKind::Format, "data byte beyond data length is nonzero");
}

RecordBytes serialize_record(const CanRecord& rec) {
    validate_record(rec);
    RecordBytes out{};
    store_le(&out[0], rec.timestamp);
    store_le(&out[8], rec.identifier);
    out[12] = rec.ide;
    out[13] = rec.dlc;
    out[14] = rec.edl;
    out[15] = rec.brs;
    out[16] = rec.dir;
    out[17] = rec.channel;
    out[18] = rec.data_length;
    std::copy(rec.data.begin(), rec.data.end(), out.begin() + 19);
    return out;
}

CanRecord parse_record(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kRecordSize)
        throw Error(ErrorKind::Format, "record must be 27 bytes, got " + std::to_string(bytes.size()));
    CanRecord rec;
    rec.timestamp = load_le<std::uint64_t>(&bytes[0]);
    rec.identifier = load_le<std::uint32_t>(&bytes[8]);
    rec.ide = bytes[12];
    rec.dlc = bytes[13];
    rec.edl = bytes[14];
    rec.brs = bytes[15];
    rec.dir = bytes[16];
    rec.channel = bytes[17];
    rec.data_length = bytes[18];
    std::copy_n(bytes.begin() + 19, 8, rec.data.begin());
    validate_record(rec);
    return rec;
}

std::vector<std::uint8_t> serialize_records(std::span<const CanRecord> records) {
    std::vector<std::uint8_t> out;
    out.reserve(records.size() * kRecordSize);
    for (const auto& rec : records) {
        const auto bytes = serialize_record(rec);
        out.insert(out.end(), bytes.begin(), bytes.end());
    }
    return out;
}

std::vector<CanRecord> parse_records(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % kRecordSize != 0)
        throw Error(ErrorKind::Format, "record stream of " + std::to_string(bytes.size()) +
                                           " bytes is not a multiple of 27");
    std::vector<CanRecord> out;
    out.reserve(bytes.size() / kRecordSize);
    for (std::size_t off = 0; off < bytes.size(); off += kRecordSize)
        out.push_back(parse_record(bytes.subspan(off, kRecordSize)));
    return out;
}

std::vector<CanRecord> read_gdr(const std::filesystem::path& path) {
    return parse_records(detail::read_file(path));
}

void write_gdr(const std::filesystem::path& path, std::span<const CanRecord> records) {
    detail::write_file(path, serialize_records(records));
}

std::vector<CanRecord> delta_encode_timestamps(std::span<const CanRecord> records) {
    std::vector<CanRecord> out(records.begin(), records.end());
    for (std::size_t i = 1; i < records.size(); ++i)
        out[i].timestamp = records[i].timestamp - records[i - 1].timestamp;
    return out;
}

std::vector<CanRecord> delta_decode_timestamps(std::span<const CanRecord> records) {
    std::vector<CanRecord> out(records.begin(), records.end());
    for (std::size_t i = 1; i < out.size(); ++i)
        out[i].timestamp += out[i - 1].timestamp;
    return out;
}

ChunkingConfig ChunkingConfig::half_row() {
    return {ChunkingKind::HalfRow, 1, choose_code(8 * (kRecordSize + 1) / 2)};
}

ChunkingConfig ChunkingConfig::full_row() {
    return {ChunkingKind::FullRow, 1, choose_code(8 * kRecordSize)};
}

ChunkingConfig ChunkingConfig::multi_row(unsigned rows) {
    if (rows < 1 || rows > 255)
        throw Error(ErrorKind::Config, "multi-row chunking needs 1..255 records per chunk");
    try {
        return {ChunkingKind::MultiRow, rows, choose_code(8 * kRecordSize * rows)};
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, "multi:" + std::to_string(rows) + " has no usable code (" + e.what() + ")");
    }
}

ChunkingConfig ChunkingConfig::parse(std::string_view text) {
    if (text == "half")
        return half_row();
    if (text == "full")
        return full_row();
    if (text.starts_with("multi:")) {
        unsigned rows = 0;
        const auto digits = text.substr(6);
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), rows);
        if (ec == std::errc{} && ptr == digits.data() + digits.size())
            return multi_row(rows);
    }
    throw Error(ErrorKind::Config, "chunking must be half, full or multi:N, got '" + std::string(text) + "'");
}

ChunkingConfig ChunkingConfig::from_header(ChunkingKind kind, unsigned rows) {
    switch (kind) {
    case ChunkingKind::HalfRow: return half_row();
    case ChunkingKind::FullRow: return full_row();
    case ChunkingKind::MultiRow: return multi_row(rows);
    }
    throw Error(ErrorKind::Format, "unknown chunking kind " + std::to_string(static_cast<int>(kind)));
}

std::uint64_t ChunkingConfig::chunk_count(std::uint64_t record_count) const noexcept {
    switch (kind_) {
    case ChunkingKind::HalfRow: return 2 * record_count;
    case ChunkingKind::FullRow: return record_count;
    case ChunkingKind::MultiRow: return (record_count + rows_ - 1) / rows_;
    }
    return 0;
}

std::string ChunkingConfig::to_string() const {
    switch (kind_) {
    case ChunkingKind::HalfRow: return "half";
    case ChunkingKind::FullRow: return "full";
    case ChunkingKind::MultiRow: return "multi:" + std::to_string(rows_);
    }
    return "?";
}

std::vector<Bits> records_to_chunks(std::span<const CanRecord> records, const ChunkingConfig& config) {
    const auto chunk_bits = config.code().chunk_bits();
    std::vector<Bits> chunks;
    chunks.reserve(config.chunk_count(records.size()));
    if (config.kind() == ChunkingKind::HalfRow) {
        // 27 bytes + one zero pad byte, split 14 + 14.
        std::array<std::uint8_t, kRecordSize + 1> padded{};
        for (const auto& rec : records) {
            const auto bytes = serialize_record(rec);
            std::copy(bytes.begin(), bytes.end(), padded.begin());
            chunks.push_back(Bits::from_bytes({padded.data(), 14}, chunk_bits));
            chunks.push_back(Bits::from_bytes({padded.data() + 14, 14}, chunk_bits));
        }
        return chunks;
    }
    const std::size_t rows = config.rows();
    std::vector<std::uint8_t> group(rows * kRecordSize);
    for (std::size_t start = 0; start < records.size(); start += rows) {
        std::fill(group.begin(), group.end(), 0);
        const auto take = std::min(rows, records.size() - start);
        for (std::size_t i = 0; i < take; ++i) {
            const auto bytes = serialize_record(records[start + i]);
            std::copy(bytes.begin(), bytes.end(), group.begin() + static_cast<std::ptrdiff_t>(i * kRecordSize));
        }
        chunks.push_back(Bits::from_bytes(group, chunk_bits));
    }
    return chunks;
}

std::vector<CanRecord> chunks_to_records(std::span<const Bits> chunks, const ChunkingConfig& config,
                                         std::uint64_t record_count) {
    if (chunks.size() != config.chunk_count(record_count))
        throw Error(ErrorKind::Format, std::to_string(chunks.size()) + " chunks cannot hold " +
                                           std::to_string(record_count) + " records with " + config.to_string() +
                                           " chunking");
    const auto chunk_bits = config.code().chunk_bits();
    for (const auto& c : chunks)
        if (c.size() != chunk_bits)
            throw Error(ErrorKind::Parameter, "chunk length does not match the chunking");

    std::vector<CanRecord> records;
    records.reserve(record_count);
    if (config.kind() == ChunkingKind::HalfRow) {
        std::array<std::uint8_t, kRecordSize + 1> padded{};
        for (std::size_t i = 0; i < chunks.size(); i += 2) {
            std::copy_n(chunks[i].bytes().begin(), 14, padded.begin());
            std::copy_n(chunks[i + 1].bytes().begin(), 14, padded.begin() + 14);
            if (padded[kRecordSize] != 0)
                throw Error(ErrorKind::Corruption, "nonzero half-row pad byte in record " + std::to_string(i / 2));
            records.push_back(parse_record({padded.data(), kRecordSize}));
        }
        return records;
    }
    const std::size_t rows = config.rows();
    for (std::size_t c = 0; c < chunks.size(); ++c) {
        const auto bytes = chunks[c].bytes();
        const auto take = std::min<std::uint64_t>(rows, record_count - c * rows);
        for (std::size_t i = 0; i < take; ++i)
            records.push_back(parse_record(bytes.subspan(i * kRecordSize, kRecordSize)));
        if (std::any_of(bytes.begin() + static_cast<std::ptrdiff_t>(take * kRecordSize), bytes.end(),
                        [](std::uint8_t b) { return b != 0; }))
            throw Error(ErrorKind::Corruption, "nonzero padding after the last record of chunk " + std::to_string(c));
    }
    return records;
}

} // namespace gdcan
