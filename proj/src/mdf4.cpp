#include "gdcan/mdf4.hpp"

#include <algorithm>
#include <cstring>
#include <string>
#include <string_view>
#include <unordered_set>

#include "byte_io.hpp"
#include "gdcan/error.hpp"

namespace gdcan::mdf4 {

using detail::load_le;
using detail::put_le;

namespace {

// Link slots used by the reader.
constexpr std::size_t kHdDgFirst = 0;
constexpr std::size_t kHdLinks = 6;
constexpr std::size_t kDgNext = 0, kDgCgFirst = 1, kDgData = 2;
constexpr std::size_t kCgNext = 0, kCgCnFirst = 1;
constexpr std::size_t kCnNext = 0, kCnTxName = 2;

constexpr std::uint16_t kCgFlagVlsd = 0x0001;

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    Block block_at(std::uint64_t offset, const char* expected = nullptr) const {
        if (offset < kIdBlockSize || offset > bytes_.size() || bytes_.size() - offset < kBlockHeaderSize)
            throw Error(ErrorKind::Format, "block offset " + std::to_string(offset) + " outside the file");
        const auto* p = bytes_.data() + offset;
        if (p[0] != '#' || p[1] != '#')
            throw Error(ErrorKind::Format, "no block header at offset " + std::to_string(offset));
        Block b;
        b.type.assign(reinterpret_cast<const char*>(p + 2), 2);
        b.offset = offset;
        b.length = load_le<std::uint64_t>(p + 8);
        const auto link_count = load_le<std::uint64_t>(p + 16);
        if (b.length < kBlockHeaderSize || b.length > bytes_.size() - offset)
            throw Error(ErrorKind::Format, "##" + b.type + " block at " + std::to_string(offset) +
                                               " declares length " + std::to_string(b.length) + " past end of file");
        if (link_count > (b.length - kBlockHeaderSize) / 8)
            throw Error(ErrorKind::Format, "##" + b.type + " block link list exceeds its length");
        if (expected != nullptr && b.type != expected)
            throw Error(ErrorKind::Format, "expected ##" + std::string(expected) + " at offset " +
                                               std::to_string(offset) + ", found ##" + b.type);
        b.links.reserve(link_count);
        for (std::uint64_t i = 0; i < link_count; ++i) {
            const auto link = load_le<std::uint64_t>(p + kBlockHeaderSize + 8 * i);
            if (link != 0 && (link < kIdBlockSize || link >= bytes_.size()))
                throw Error(ErrorKind::Format, "##" + b.type + " link " + std::to_string(i) + " points outside the file");
            b.links.push_back(link);
        }
        const auto data_start = kBlockHeaderSize + 8 * link_count;
        b.data.assign(p + data_start, p + b.length);
        return b;
    }

    /// Structural blocks may be reached only once; a second visit means a cycle.
    Block visit(std::uint64_t offset, const char* expected) {
        if (!visited_.insert(offset).second)
            throw Error(ErrorKind::Format, "cyclic link to offset " + std::to_string(offset));
        return block_at(offset, expected);
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::unordered_set<std::uint64_t> visited_;
};

void require_data(const Block& b, std::size_t size) {
    if (b.data.size() < size)
        throw Error(ErrorKind::Format, "##" + b.type + " block data shorter than " + std::to_string(size) + " bytes");
}

std::string text_of(const Block& tx) {
    const auto end = std::find(tx.data.begin(), tx.data.end(), 0);
    return {tx.data.begin(), end};
}

Channel parse_channel(Block b, const Reader& reader) {
    require_data(b, 24);
    Channel cn;
    cn.channel_type = b.data[0];
    cn.data_type = b.data[2];
    cn.byte_offset = load_le<std::uint32_t>(&b.data[4]);
    cn.bit_count = load_le<std::uint32_t>(&b.data[8]);
    if (const auto tx = b.link(kCnTxName); tx != 0) {
        const auto name = reader.block_at(tx);
        if (name.type == "TX")
            cn.name = text_of(name);
    }
    cn.block = std::move(b);
    return cn;
}

ChannelGroup parse_channel_group(Block b, Reader& reader) {
    require_data(b, 32);
    ChannelGroup cg;
    cg.record_id = load_le<std::uint64_t>(&b.data[0]);
    cg.cycle_count = load_le<std::uint64_t>(&b.data[8]);
    cg.flags = load_le<std::uint16_t>(&b.data[16]);
    cg.data_bytes = load_le<std::uint32_t>(&b.data[24]);
    cg.inval_bytes = load_le<std::uint32_t>(&b.data[28]);
    for (auto cn = b.link(kCgCnFirst); cn != 0;) {
        auto block = reader.visit(cn, "CN");
        cn = block.link(kCnNext);
        cg.channels.push_back(parse_channel(std::move(block), reader));
    }
    cg.block = std::move(b);
    return cg;
}

DataGroup parse_data_group(Block b, Reader& reader) {
    require_data(b, 1);
    DataGroup dg;
    dg.record_id_size = b.data[0];
    for (auto cg = b.link(kDgCgFirst); cg != 0;) {
        auto block = reader.visit(cg, "CG");
        cg = block.link(kCgNext);
        dg.channel_groups.push_back(parse_channel_group(std::move(block), reader));
    }
    if (const auto data = b.link(kDgData); data != 0)
        dg.data = reader.visit(data, nullptr);
    dg.block = std::move(b);
    return dg;
}

} // namespace

File parse(std::span<const std::uint8_t> bytes) {
    static constexpr char kFileId[] = "MDF     ";
    if (bytes.size() < kIdBlockSize || std::memcmp(bytes.data(), kFileId, 8) != 0)
        throw Error(ErrorKind::NotMdf4, "missing MDF identification block");
    File file;
    file.format_id.assign(reinterpret_cast<const char*>(bytes.data() + 8), 8);
    file.format_id.erase(file.format_id.find_last_not_of(std::string_view(" \0", 2)) + 1);
    file.version = load_le<std::uint16_t>(bytes.data() + 28);
    if (file.version < 400 || file.version >= 500)
        throw Error(ErrorKind::NotMdf4, "MDF version " + std::to_string(file.version) + " is not 4.x");

    Reader reader(bytes);
    file.header = reader.visit(kIdBlockSize, "HD");
    for (auto dg = file.header.link(kHdDgFirst); dg != 0;) {
        auto block = reader.visit(dg, "DG");
        dg = block.link(kDgNext);
        file.data_groups.push_back(parse_data_group(std::move(block), reader));
    }
    // File history, channel hierarchy, attachments, events, comment: kept opaque.
    for (std::size_t i = kHdDgFirst + 1; i < kHdLinks; ++i)
        if (const auto link = file.header.link(i); link != 0)
            file.unknown_blocks.push_back(reader.block_at(link));
    return file;
}

File open_file(const std::filesystem::path& path) {
    return parse(detail::read_file(path));
}

ExtractedRecords extract_records(const File& file) {
    if (file.data_groups.size() != 1)
        throw Error(ErrorKind::UnsupportedLayout, "expected one data group, found " +
                                                      std::to_string(file.data_groups.size()));
    const auto& dg = file.data_groups.front();
    if (dg.channel_groups.size() != 1)
        throw Error(ErrorKind::UnsupportedLayout, "expected one channel group, found " +
                                                      std::to_string(dg.channel_groups.size()));
    if (dg.record_id_size != 0)
        throw Error(ErrorKind::UnsupportedLayout, "record IDs (unsorted data groups) are not supported");
    const auto& cg = dg.channel_groups.front();
    if (cg.flags & kCgFlagVlsd)
        throw Error(ErrorKind::UnsupportedLayout, "variable-length channel group");
    if (cg.data_bytes + cg.inval_bytes != kRecordSize)
        throw Error(ErrorKind::UnsupportedLayout, "record length " + std::to_string(cg.data_bytes + cg.inval_bytes) +
                                                      " is not 27");

    ExtractedRecords out;
    if (!dg.data)
        return out;
    if (dg.data->type != "DT")
        throw Error(ErrorKind::UnsupportedLayout, "data stored in ##" + dg.data->type + " rather than ##DT");
    if (dg.data->data.size() % kRecordSize != 0)
        throw Error(ErrorKind::Format, "DT payload of " + std::to_string(dg.data->data.size()) +
                                           " bytes is not a whole number of records");
    out.bytes = dg.data->data;
    out.count = out.bytes.size() / kRecordSize;
    if (cg.cycle_count != out.count)
        throw Error(ErrorKind::Format, "channel group declares " + std::to_string(cg.cycle_count) +
                                           " records, DT holds " + std::to_string(out.count));
    return out;
}

std::vector<CanRecord> read_records(const std::filesystem::path& path) {
    return parse_records(extract_records(open_file(path)).bytes);
}

namespace {

struct ChannelSpec {
    const char* name;
    std::uint8_t channel_type; // 0 fixed length, 2 master
    std::uint8_t sync_type;    // 1 time
    std::uint8_t data_type;    // 0 unsigned LE, 10 byte array
    std::uint32_t byte_offset;
    std::uint32_t bit_count;
};

constexpr ChannelSpec kChannels[] = {
    {"Timestamp", 2, 1, 0, 0, 64},         {"CAN_DataFrame.ID", 0, 0, 0, 8, 32},
    {"CAN_DataFrame.IDE", 0, 0, 0, 12, 8}, {"CAN_DataFrame.DLC", 0, 0, 0, 13, 8},
    {"CAN_DataFrame.EDL", 0, 0, 0, 14, 8}, {"CAN_DataFrame.BRS", 0, 0, 0, 15, 8},
    {"CAN_DataFrame.Dir", 0, 0, 0, 16, 8}, {"CAN_DataFrame.BusChannel", 0, 0, 0, 17, 8},
    {"CAN_DataFrame.DataLength", 0, 0, 0, 18, 8}, {"CAN_DataFrame.DataBytes", 0, 0, 10, 19, 64},
};

// Blocks are laid out in push order; links name other blocks by index.
class FixtureBuilder {
public:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    std::size_t add(const char* type, std::vector<std::size_t> links, std::vector<std::uint8_t> data) {
        blocks_.push_back({type, std::move(links), std::move(data)});
        return blocks_.size() - 1;
    }
    void set_link(std::size_t block, std::size_t slot, std::size_t target) { blocks_[block].links[slot] = target; }

    std::vector<std::uint8_t> build() const {
        std::vector<std::uint64_t> offsets;
        std::uint64_t at = kIdBlockSize;
        for (const auto& b : blocks_) {
            offsets.push_back(at);
            at += length(b);
        }
        std::vector<std::uint8_t> out;
        out.reserve(at);
        write_id_block(out);
        for (const auto& b : blocks_) {
            out.push_back('#');
            out.push_back('#');
            out.push_back(static_cast<std::uint8_t>(b.type[0]));
            out.push_back(static_cast<std::uint8_t>(b.type[1]));
            put_le(out, std::uint32_t{0});
            put_le(out, length(b));
            put_le(out, static_cast<std::uint64_t>(b.links.size()));
            for (auto link : b.links)
                put_le(out, link == kNone ? std::uint64_t{0} : offsets[link]);
            out.insert(out.end(), b.data.begin(), b.data.end());
            out.resize(out.size() + padding(b), 0);
        }
        return out;
    }

private:
    struct Pending {
        std::string type;
        std::vector<std::size_t> links;
        std::vector<std::uint8_t> data;
    };

    // Blocks other than DT start on 8-byte boundaries.
    static std::uint64_t padding(const Pending& b) {
        return b.type == "DT" ? 0 : (8 - b.data.size() % 8) % 8;
    }
    static std::uint64_t length(const Pending& b) {
        return kBlockHeaderSize + 8 * b.links.size() + b.data.size() + padding(b);
    }

    static void write_id_block(std::vector<std::uint8_t>& out) {
        const char* file_id = "MDF     4.10    gdcan   ";
        out.insert(out.end(), file_id, file_id + 24);
        out.resize(28, 0);
        put_le(out, std::uint16_t{410});
        out.resize(kIdBlockSize, 0);
    }

    std::vector<Pending> blocks_;
};

std::vector<std::uint8_t> text_data(const char* s) {
    std::vector<std::uint8_t> d(s, s + std::strlen(s));
    d.push_back(0);
    return d;
}

} // namespace

std::vector<std::uint8_t> write_fixture(std::span<const CanRecord> records, const FixtureOptions& options) {
    constexpr auto kNone = FixtureBuilder::kNone;
    FixtureBuilder fb;

    std::vector<std::uint8_t> hd_data(32, 0);
    const auto hd = fb.add("HD", std::vector<std::size_t>(kHdLinks, kNone), std::move(hd_data));
    if (options.unknown_blocks)
        fb.add("ZZ", {}, std::vector<std::uint8_t>(8, 0xAB));

    const auto dg = fb.add("DG", {kNone, kNone, kNone, kNone}, std::vector<std::uint8_t>(8, 0));
    fb.set_link(hd, kHdDgFirst, dg);

    std::vector<std::uint8_t> cg_data;
    put_le(cg_data, std::uint64_t{0});              // record id
    put_le(cg_data, std::uint64_t{records.size()}); // cycle count
    put_le(cg_data, std::uint16_t{0});              // flags
    put_le(cg_data, std::uint16_t{0});              // path separator
    put_le(cg_data, std::uint32_t{0});              // reserved
    put_le(cg_data, static_cast<std::uint32_t>(kRecordSize));
    put_le(cg_data, std::uint32_t{0}); // invalidation bytes
    const auto cg = fb.add("CG", std::vector<std::size_t>(6, kNone), std::move(cg_data));
    fb.set_link(dg, kDgCgFirst, cg);

    std::size_t prev = kNone;
    for (const auto& spec : kChannels) {
        std::vector<std::uint8_t> cn_data;
        cn_data.push_back(spec.channel_type);
        cn_data.push_back(spec.sync_type);
        cn_data.push_back(spec.data_type);
        cn_data.push_back(0); // bit offset
        put_le(cn_data, spec.byte_offset);
        put_le(cn_data, spec.bit_count);
        cn_data.resize(72, 0);
        const auto cn = fb.add("CN", std::vector<std::size_t>(8, kNone), std::move(cn_data));
        const auto tx = fb.add("TX", {}, text_data(spec.name));
        fb.set_link(cn, kCnTxName, tx);
        if (prev == kNone)
            fb.set_link(cg, kCgCnFirst, cn);
        else
            fb.set_link(prev, kCnNext, cn);
        prev = cn;
    }

    if (options.unknown_blocks) {
        const auto opaque = fb.add("ZZ", {kNone}, std::vector<std::uint8_t>(16, 0xCD));
        fb.set_link(hd, 1, opaque);
    }

    const auto dt = fb.add("DT", {}, serialize_records(records));
    fb.set_link(dg, kDgData, dt);
    return fb.build();
}

} // namespace gdcan::mdf4
