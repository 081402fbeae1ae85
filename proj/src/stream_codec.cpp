#include "gdcan/stream_codec.hpp"

#include <algorithm>
#include <string>

#include "byte_io.hpp"
#include "gdcan/error.hpp"
#include "gdcan/gd_transform.hpp"

namespace gdcan {

using detail::load_le;
using detail::store_le;

std::string_view mode_name(Mode mode) noexcept {
    switch (mode) {
    case Mode::RamOnly: return "ram_only";
    case Mode::FlashOnly: return "flash_only";
    case Mode::Hybrid: return "hybrid";
    }
    return "?";
}

Mode parse_mode(std::string_view name) {
    if (name == "ram" || name == "ram_only")
        return Mode::RamOnly;
    if (name == "flash" || name == "flash_only")
        return Mode::FlashOnly;
    if (name == "hybrid")
        return Mode::Hybrid;
    throw Error(ErrorKind::Config, "unknown mode '" + std::string(name) + "' (ram, flash or hybrid)");
}

std::uint32_t id_space_limit(IdSpace space) noexcept {
    return space == IdSpace::Primary ? kPrimaryIdLimit : kHybridRamIdLimit;
}

void encode_id(std::uint32_t id, IdSpace space, std::vector<std::uint8_t>& out) {
    if (space == IdSpace::Primary) {
        if (id < 128) {
            out.push_back(static_cast<std::uint8_t>(id));
        } else if (id < 128 + (1u << 14)) {
            const auto v = id - 128;
            out.push_back(static_cast<std::uint8_t>(0x80 | (v >> 8)));
            out.push_back(static_cast<std::uint8_t>(v));
        } else if (id < kPrimaryIdLimit) {
            const auto v = id - (128 + (1u << 14));
            out.push_back(static_cast<std::uint8_t>(0xC0 | (v >> 16)));
            out.push_back(static_cast<std::uint8_t>(v >> 8));
            out.push_back(static_cast<std::uint8_t>(v));
        } else {
            throw Error(ErrorKind::SpaceExhausted, "id " + std::to_string(id) + " beyond the primary ID space");
        }
        return;
    }
    if (id < 4096) {
        out.push_back(static_cast<std::uint8_t>(0xE0 | (id >> 8)));
        out.push_back(static_cast<std::uint8_t>(id));
    } else if (id < kHybridRamIdLimit) {
        const auto v = id - 4096;
        out.push_back(static_cast<std::uint8_t>(0xF0 | (v >> 16)));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v));
    } else {
        throw Error(ErrorKind::SpaceExhausted, "id " + std::to_string(id) + " beyond the hybrid RAM ID space");
    }
}

std::vector<std::uint8_t> encode_id(std::uint32_t id, IdSpace space) {
    std::vector<std::uint8_t> out;
    encode_id(id, space, out);
    return out;
}

std::size_t encoded_id_length(std::uint32_t id, IdSpace space) {
    if (id >= id_space_limit(space))
        throw Error(ErrorKind::SpaceExhausted, "id " + std::to_string(id) + " beyond its ID space");
    if (space == IdSpace::Primary)
        return id < 128 ? 1 : id < 128 + (1u << 14) ? 2 : 3;
    return id < 4096 ? 2 : 3;
}

std::pair<std::uint32_t, std::size_t> decode_id(std::span<const std::uint8_t> bytes, IdSpace space) {
    if (bytes.empty())
        throw Error(ErrorKind::Format, "truncated id");
    const auto b0 = bytes[0];
    auto need = [&](std::size_t n) {
        if (bytes.size() < n)
            throw Error(ErrorKind::Format, "truncated id");
    };
    if (space == IdSpace::Primary) {
        if (b0 < 0x80)
            return {b0, 1};
        if ((b0 & 0xC0) == 0x80) {
            need(2);
            return {128 + ((static_cast<std::uint32_t>(b0 & 0x3F) << 8) | bytes[1]), 2};
        }
        if ((b0 & 0xE0) == 0xC0) {
            need(3);
            return {128 + (1u << 14) +
                        ((static_cast<std::uint32_t>(b0 & 0x1F) << 16) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
                         bytes[2]),
                    3};
        }
        throw Error(ErrorKind::Format, "byte " + std::to_string(b0) + " does not start a primary id");
    }
    if ((b0 & 0xF0) == 0xE0) {
        need(2);
        return {(static_cast<std::uint32_t>(b0 & 0x0F) << 8) | bytes[1], 2};
    }
    if ((b0 & 0xF0) == 0xF0 && b0 != 0xFF) {
        need(3);
        return {4096 + ((static_cast<std::uint32_t>(b0 & 0x0F) << 16) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
                        bytes[2]),
                3};
    }
    throw Error(ErrorKind::Format, "byte " + std::to_string(b0) + " does not start a hybrid RAM id");
}

std::array<std::uint8_t, StreamHeader::kSize> StreamHeader::serialize() const {
    std::array<std::uint8_t, kSize> out{};
    std::copy(kMagic.begin(), kMagic.end(), out.begin());
    out[4] = version;
    out[5] = static_cast<std::uint8_t>(mode);
    out[6] = static_cast<std::uint8_t>(chunking);
    out[7] = rows;
    out[8] = m;
    out[9] = l_low;
    out[10] = static_cast<std::uint8_t>(algo);
    store_le(&out[11], dict_id);
    store_le(&out[19], record_count);
    out[27] = flags;
    return out;
}

StreamHeader StreamHeader::parse(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kSize)
        throw Error(ErrorKind::Format, "container shorter than its 28-byte header");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
        throw Error(ErrorKind::Format, "not a GDCB container (bad magic)");
    StreamHeader h;
    h.version = bytes[4];
    if (h.version != kVersion)
        throw Error(ErrorKind::Format, "unsupported container version " + std::to_string(h.version));
    if (bytes[5] < 1 || bytes[5] > 3)
        throw Error(ErrorKind::Format, "unknown mode byte " + std::to_string(bytes[5]));
    h.mode = static_cast<Mode>(bytes[5]);
    if (bytes[6] < 1 || bytes[6] > 3)
        throw Error(ErrorKind::Format, "unknown chunking byte " + std::to_string(bytes[6]));
    h.chunking = static_cast<ChunkingKind>(bytes[6]);
    h.rows = bytes[7];
    h.m = bytes[8];
    h.l_low = bytes[9];
    h.algo = algo_from_byte(bytes[10]);
    h.dict_id = load_le<std::uint64_t>(&bytes[11]);
    h.record_count = load_le<std::uint64_t>(&bytes[19]);
    h.flags = bytes[27];
    if (h.flags & ~kFlagDeltaTimestamps)
        throw Error(ErrorKind::Format, "unknown header flags " + std::to_string(h.flags));
    if ((h.dict_id != 0) != (h.mode != Mode::RamOnly))
        throw Error(ErrorKind::Format, "dictionary id inconsistent with mode");
    return h;
}

ChunkingConfig StreamHeader::chunking_config() const {
    if (chunking != ChunkingKind::MultiRow && rows != 1)
        throw Error(ErrorKind::Format, "row count must be 1 for half/full chunking");
    auto config = [&] {
        try {
            return ChunkingConfig::from_header(chunking, rows);
        } catch (const Error& e) {
            throw Error(ErrorKind::Format, std::string("container chunking: ") + e.what());
        }
    }();
    if (config.code().m() != m || static_cast<std::uint8_t>(config.code().l()) != l_low)
        throw Error(ErrorKind::Format, "header code does not match its chunking");
    return config;
}

namespace {

void check_preset(const PresetDictionary& preset, const CodeParams& code, FingerprintAlgo algo) {
    if (!(preset.code() == code))
        throw Error(ErrorKind::DictMismatch, "preset dictionary was trained for a different code");
    if (preset.algo() != algo)
        throw Error(ErrorKind::DictMismatch, "preset dictionary uses a different fingerprint algorithm");
}

enum class TokenKind { RefPrimary, RefRam, NewBasis, Reset, EndOfStream };

struct Token {
    explicit Token(TokenKind k, std::uint32_t i = 0) : kind(k), id(i) {}

    TokenKind kind;
    std::uint32_t id = 0;
    std::span<const std::uint8_t> basis;
    Syndrome deviation = 0;
    std::size_t id_bytes = 0;
};

/// Splits a token stream into tokens; performs no dictionary resolution.
class TokenReader {
public:
    TokenReader(std::span<const std::uint8_t> body, Mode mode, const CodeParams& code)
        : body_(body), mode_(mode), code_(code), dev_bytes_(deviation_bytes(code)) {}

    Token next() {
        const auto b0 = take(1)[0];
        if (b0 == kEscape) {
            const auto op = take(1)[0];
            switch (op) {
            case kReset: return Token(TokenKind::Reset);
            case kEndOfStream: return Token(TokenKind::EndOfStream);
            case kNewBasis: {
                Token t(TokenKind::NewBasis);
                t.basis = take(code_.basis_bytes());
                t.deviation = read_deviation();
                return t;
            }
            default: throw Error(ErrorKind::Format, "unknown control token 0xFF " + std::to_string(op));
            }
        }
        --pos_;
        const bool ram = mode_ == Mode::Hybrid && b0 >= 0xE0;
        if (!ram && b0 >= 0xE0)
            throw Error(ErrorKind::Format, "unknown token byte " + std::to_string(b0) + " at offset " +
                                               std::to_string(StreamHeader::kSize + pos_));
        const auto space = ram ? IdSpace::HybridRam : IdSpace::Primary;
        const auto [id, used] = decode_id(body_.subspan(pos_), space);
        pos_ += used;
        Token t(ram ? TokenKind::RefRam : TokenKind::RefPrimary, id);
        t.id_bytes = used;
        t.deviation = read_deviation();
        return t;
    }

    bool at_end() const noexcept { return pos_ == body_.size(); }
    std::size_t deviation_width() const noexcept { return dev_bytes_; }

private:
    std::span<const std::uint8_t> take(std::size_t n) {
        if (body_.size() - pos_ < n)
            throw Error(ErrorKind::Format, "truncated container");
        auto out = body_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    Syndrome read_deviation() {
        const auto bytes = take(dev_bytes_);
        Syndrome d = bytes[0];
        if (dev_bytes_ == 2)
            d |= static_cast<Syndrome>(bytes[1]) << 8;
        if (d >> code_.m())
            throw Error(ErrorKind::Corruption, "deviation wider than " + std::to_string(code_.m()) + " bits");
        return d;
    }

    std::span<const std::uint8_t> body_;
    Mode mode_;
    const CodeParams& code_;
    std::size_t dev_bytes_;
    std::size_t pos_ = 0;
};

Bits read_basis(std::span<const std::uint8_t> bytes, const CodeParams& code) {
    auto basis = Bits::from_bytes(bytes, code.basis_bits());
    if (!std::equal(bytes.begin(), bytes.end(), basis.bytes().begin()))
        throw Error(ErrorKind::Corruption, "nonzero padding in inline basis");
    return basis;
}

} // namespace

StreamCompressor::StreamCompressor(const CodecConfig& config, const PresetDictionary* preset,
                                   std::uint64_t record_count, ByteSink& sink)
    : config_(config), preset_(preset), sink_(sink) {
    const auto& code = config_.chunking.code();
    if (config_.mode == Mode::RamOnly && preset_ != nullptr)
        throw Error(ErrorKind::Config, "ram_only mode takes no preset dictionary");
    if (config_.mode != Mode::RamOnly) {
        if (preset_ == nullptr)
            throw Error(ErrorKind::Config, std::string(mode_name(config_.mode)) + " mode needs a preset dictionary");
        check_preset(*preset_, code, config_.algo);
    }
    if (config_.id_limit && *config_.id_limit == 0)
        throw Error(ErrorKind::Config, "id limit must be positive");

    if (config_.mode != Mode::FlashOnly) {
        dynamic_space_ = config_.mode == Mode::Hybrid ? IdSpace::HybridRam : IdSpace::Primary;
        dynamic_limit_ = std::min(config_.id_limit.value_or(UINT32_MAX), id_space_limit(dynamic_space_));
        const auto extra = config_.verify_on_match ? code.basis_bytes() : 0;
        dynamic_.emplace(capacity_for(config_.ram_budget, fingerprint_length(config_.algo), config_.accounting, extra,
                                      dynamic_space_),
                         config_.verify_on_match);
    }

    expected_chunks_ = config_.chunking.chunk_count(record_count);
    StreamHeader h;
    h.mode = config_.mode;
    h.chunking = config_.chunking.kind();
    h.rows = static_cast<std::uint8_t>(config_.chunking.rows());
    h.m = static_cast<std::uint8_t>(code.m());
    h.l_low = static_cast<std::uint8_t>(code.l());
    h.algo = config_.algo;
    h.dict_id = preset_ != nullptr ? preset_->dict_id() : 0;
    h.record_count = record_count;
    h.flags = config_.delta_timestamps ? StreamHeader::kFlagDeltaTimestamps : 0;
    const auto bytes = h.serialize();
    sink_.write(bytes);
}

void StreamCompressor::push(const Bits& chunk) {
    if (finished_)
        throw Error(ErrorKind::Parameter, "push after finish");
    if (chunks_seen_ == expected_chunks_)
        throw Error(ErrorKind::Parameter, "more chunks than the header's record count allows");
    const auto& code = config_.chunking.code();
    auto [basis, deviation] = to_basis_deviation(chunk, code);
    const auto fp = fingerprint(basis.bytes(), config_.algo);
    ++chunks_seen_;

    if (preset_ != nullptr) {
        if (const auto rank = preset_->lookup(fp)) {
            emit_ref(*rank, IdSpace::Primary, deviation);
            ++counts_.ref_primary;
            return flush();
        }
    }
    if (dynamic_) {
        if (const auto id = dynamic_->lookup_touch(fp, &basis)) {
            emit_ref(*id, dynamic_space_, deviation);
            ++(dynamic_space_ == IdSpace::Primary ? counts_.ref_primary : counts_.ref_ram);
            return flush();
        }
        assign_dynamic_id(fp, basis);
    }
    emit_new_basis(basis, deviation);
    ++counts_.new_basis;
    flush();
}

void StreamCompressor::finish() {
    if (finished_)
        return;
    if (chunks_seen_ != expected_chunks_)
        throw Error(ErrorKind::Parameter, "header promises " + std::to_string(expected_chunks_) + " chunks, got " +
                                              std::to_string(chunks_seen_));
    buffer_.push_back(kEscape);
    buffer_.push_back(kEndOfStream);
    finished_ = true;
    flush();
}

std::uint32_t StreamCompressor::assign_dynamic_id(const Fingerprint& fp, const Bits& basis) {
    if (dynamic_->next_id() >= dynamic_limit_) {
        buffer_.push_back(kEscape);
        buffer_.push_back(kReset);
        dynamic_->clear();
        ++counts_.resets;
    }
    return dynamic_->insert(fp, &basis).id;
}

void StreamCompressor::emit_ref(std::uint32_t id, IdSpace space, Syndrome deviation) {
    encode_id(id, space, buffer_);
    emit_deviation(deviation);
}

void StreamCompressor::emit_new_basis(const Bits& basis, Syndrome deviation) {
    buffer_.push_back(kEscape);
    buffer_.push_back(kNewBasis);
    const auto bytes = basis.bytes();
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
    emit_deviation(deviation);
}

void StreamCompressor::emit_deviation(Syndrome deviation) {
    buffer_.push_back(static_cast<std::uint8_t>(deviation));
    if (deviation_bytes(config_.chunking.code()) == 2)
        buffer_.push_back(static_cast<std::uint8_t>(deviation >> 8));
}

void StreamCompressor::flush() {
    if (!buffer_.empty()) {
        sink_.write(buffer_);
        buffer_.clear();
    }
}

std::vector<std::uint8_t> compress(std::span<const Bits> chunks, const CodecConfig& config,
                                   const PresetDictionary* preset, std::uint64_t record_count) {
    VectorSink sink;
    StreamCompressor compressor(config, preset, record_count, sink);
    for (const auto& chunk : chunks)
        compressor.push(chunk);
    compressor.finish();
    return std::move(sink.data);
}

DecompressedStream decompress(std::span<const std::uint8_t> container, const PresetDictionary* preset) {
    DecompressedStream out;
    out.header = StreamHeader::parse(container);
    const auto chunking = out.header.chunking_config();
    const auto& code = chunking.code();
    const auto mode = out.header.mode;

    const PresetDictionary* dict = nullptr;
    if (mode != Mode::RamOnly) {
        if (preset == nullptr || !preset->has_bases())
            throw Error(ErrorKind::Config, std::string(mode_name(mode)) +
                                               " container needs the decompressor-side preset dictionary");
        if (preset->dict_id() != out.header.dict_id)
            throw Error(ErrorKind::DictMismatch, "container was written against a different preset dictionary");
        check_preset(*preset, code, out.header.algo);
        dict = preset;
    }

    const auto expected = chunking.chunk_count(out.header.record_count);
    // Bases introduced since the last reset, indexed by dynamic ID.
    std::vector<Bits> local;
    TokenReader reader(container.subspan(StreamHeader::kSize), mode, code);
    for (;;) {
        const auto token = reader.next();
        if (token.kind == TokenKind::EndOfStream)
            break;
        if (token.kind == TokenKind::Reset) {
            local.clear();
            continue;
        }
        if (out.chunks.size() == expected)
            throw Error(ErrorKind::Corruption, "more chunks than the header's record count allows");

        if (token.kind == TokenKind::NewBasis) {
            auto basis = read_basis(token.basis, code);
            out.chunks.push_back(from_basis_deviation({basis, token.deviation}, code));
            if (mode != Mode::FlashOnly)
                local.push_back(std::move(basis));
            continue;
        }
        const Bits* basis = nullptr;
        if (token.kind == TokenKind::RefPrimary && dict != nullptr) {
            basis = &dict->basis_at(token.id);
        } else {
            if (token.id >= local.size())
                throw Error(ErrorKind::Corruption, "dynamic id " + std::to_string(token.id) + " not yet defined");
            basis = &local[token.id];
        }
        out.chunks.push_back(from_basis_deviation({*basis, token.deviation}, code));
    }
    if (!reader.at_end())
        throw Error(ErrorKind::Format, "bytes after end of stream");
    if (out.chunks.size() != expected)
        throw Error(ErrorKind::Corruption, "container holds " + std::to_string(out.chunks.size()) +
                                               " chunks, header implies " + std::to_string(expected));
    return out;
}

SizeReport compressed_size_report(std::span<const std::uint8_t> container) {
    SizeReport r;
    const auto header = StreamHeader::parse(container);
    const auto chunking = header.chunking_config();
    r.total_bytes = container.size();
    r.record_count = header.record_count;
    r.mode = header.mode;
    TokenReader reader(container.subspan(StreamHeader::kSize), header.mode, chunking.code());
    const auto dev = reader.deviation_width();
    for (;;) {
        const auto t = reader.next();
        switch (t.kind) {
        case TokenKind::EndOfStream: r.control_bytes += 2; break;
        case TokenKind::Reset:
            r.control_bytes += 2;
            ++r.tokens.resets;
            continue;
        case TokenKind::NewBasis:
            r.control_bytes += 2;
            r.basis_bytes += t.basis.size();
            r.deviation_bytes += dev;
            ++r.tokens.new_basis;
            continue;
        case TokenKind::RefPrimary:
        case TokenKind::RefRam:
            r.id_bytes += t.id_bytes;
            r.deviation_bytes += dev;
            ++(t.kind == TokenKind::RefPrimary ? r.tokens.ref_primary : r.tokens.ref_ram);
            continue;
        }
        break;
    }
    if (!reader.at_end())
        throw Error(ErrorKind::Format, "bytes after end of stream");
    if (r.record_count > 0)
        r.gain = static_cast<double>(r.record_count * kRecordSize) / static_cast<double>(r.total_bytes);
    return r;
}

std::vector<std::uint8_t> compress_records(std::span<const CanRecord> records, const CodecConfig& config,
                                           const PresetDictionary* preset) {
    std::vector<Bits> chunks;
    if (config.delta_timestamps)
        chunks = records_to_chunks(delta_encode_timestamps(records), config.chunking);
    else
        chunks = records_to_chunks(records, config.chunking);
    return compress(chunks, config, preset, records.size());
}

std::vector<CanRecord> decompress_records(std::span<const std::uint8_t> container, const PresetDictionary* preset) {
    auto stream = decompress(container, preset);
    auto records = chunks_to_records(stream.chunks, stream.header.chunking_config(), stream.header.record_count);
    if (stream.header.delta_timestamps())
        return delta_decode_timestamps(records);
    return records;
}

} // namespace gdcan
