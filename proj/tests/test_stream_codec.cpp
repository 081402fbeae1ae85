#include <gtest/gtest.h>

#include <random>

#include "gdcan/error.hpp"
#include "gdcan/preset_dict.hpp"
#include "gdcan/stream_codec.hpp"
#include "gdcan/synthetic.hpp"
#include "test_util.hpp"

namespace gdcan {
namespace {

using Bytes = std::vector<std::uint8_t>;
using test::codeword;
using test::random_bits;

Bytes concat(std::initializer_list<std::span<const std::uint8_t>> parts) {
    Bytes out;
    for (auto p : parts)
        out.insert(out.end(), p.begin(), p.end());
    return out;
}

Bytes encoded(std::uint32_t id, IdSpace space) {
    return encode_id(id, space);
}

TEST(IdEncoding, PrimaryExamples) {
    EXPECT_EQ(encoded(0, IdSpace::Primary), (Bytes{0x00}));
    EXPECT_EQ(encoded(127, IdSpace::Primary), (Bytes{0x7F}));
    EXPECT_EQ(encoded(128, IdSpace::Primary), (Bytes{0x80, 0x00}));
    EXPECT_EQ(encoded(16511, IdSpace::Primary), (Bytes{0xBF, 0xFF}));
    EXPECT_EQ(encoded(16512, IdSpace::Primary), (Bytes{0xC0, 0x00, 0x00}));
    EXPECT_EQ(encoded(2113663, IdSpace::Primary), (Bytes{0xDF, 0xFF, 0xFF}));
}

TEST(IdEncoding, HybridExamples) {
    EXPECT_EQ(encoded(0, IdSpace::HybridRam), (Bytes{0xE0, 0x00}));
    EXPECT_EQ(encoded(4095, IdSpace::HybridRam), (Bytes{0xEF, 0xFF}));
    EXPECT_EQ(encoded(4096, IdSpace::HybridRam), (Bytes{0xF0, 0x00, 0x00}));
    EXPECT_EQ(encoded(kHybridRamIdLimit - 1, IdSpace::HybridRam), (Bytes{0xFE, 0xFF, 0xFF}));
}

TEST(IdEncoding, Lengths) {
    const std::pair<std::uint32_t, std::size_t> primary[] = {
        {0, 1}, {127, 1}, {128, 2}, {16511, 2}, {16512, 3}, {2113663, 3}};
    for (auto [id, len] : primary) {
        EXPECT_EQ(encoded_id_length(id, IdSpace::Primary), len) << id;
        EXPECT_EQ(encoded(id, IdSpace::Primary).size(), len) << id;
    }
    EXPECT_EQ(encoded_id_length(4095, IdSpace::HybridRam), 2u);
    EXPECT_EQ(encoded_id_length(4096, IdSpace::HybridRam), 3u);
    EXPECT_EQ(kPrimaryIdLimit, 2113664u);
    EXPECT_EQ(kHybridRamIdLimit, 987136u);
}

TEST(IdEncoding, OutOfSpace) {
    for (auto [id, space] : {std::pair{kPrimaryIdLimit, IdSpace::Primary}, std::pair{kHybridRamIdLimit, IdSpace::HybridRam}}) {
        try {
            encode_id(id, space);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::SpaceExhausted);
        }
    }
}

TEST(IdEncoding, ExhaustiveRoundTripBelow2To17) {
    for (std::uint32_t id = 0; id < (1u << 17); ++id) {
        const auto bytes = encoded(id, IdSpace::Primary);
        const auto [back, used] = decode_id(bytes, IdSpace::Primary);
        ASSERT_EQ(back, id);
        ASSERT_EQ(used, bytes.size());
    }
    for (std::uint32_t id = 0; id < (1u << 17); ++id) {
        const auto bytes = encoded(id, IdSpace::HybridRam);
        ASSERT_NE(bytes[0], 0xFF);
        ASSERT_GE(bytes[0], 0xE0);
        const auto [back, used] = decode_id(bytes, IdSpace::HybridRam);
        ASSERT_EQ(back, id);
        ASSERT_EQ(used, bytes.size());
    }
}

TEST(IdEncoding, SampledRoundTripWholeSpace) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100000; ++i) {
        const auto p = static_cast<std::uint32_t>(rng() % kPrimaryIdLimit);
        ASSERT_EQ(decode_id(encoded(p, IdSpace::Primary), IdSpace::Primary).first, p);
        const auto h = static_cast<std::uint32_t>(rng() % kHybridRamIdLimit);
        ASSERT_EQ(decode_id(encoded(h, IdSpace::HybridRam), IdSpace::HybridRam).first, h);
    }
}

TEST(IdEncoding, DecodeErrors) {
    EXPECT_THROW(decode_id({}, IdSpace::Primary), Error);
    EXPECT_THROW(decode_id(Bytes{0x80}, IdSpace::Primary), Error);
    EXPECT_THROW(decode_id(Bytes{0xC0, 0x00}, IdSpace::Primary), Error);
    EXPECT_THROW(decode_id(Bytes{0xE0, 0x00}, IdSpace::Primary), Error);
    EXPECT_THROW(decode_id(Bytes{0x00}, IdSpace::HybridRam), Error);
    EXPECT_THROW(decode_id(Bytes{0xF0, 0x00}, IdSpace::HybridRam), Error);
    EXPECT_THROW(decode_id(Bytes{0xFF, 0x00, 0x00}, IdSpace::HybridRam), Error);
}

TEST(StreamHeader, Layout) {
    StreamHeader h;
    h.mode = Mode::Hybrid;
    h.chunking = ChunkingKind::MultiRow;
    h.rows = 4;
    h.m = 10;
    h.l_low = 159;
    h.algo = FingerprintAlgo::Fnv64;
    h.dict_id = 0x0102030405060708ull;
    h.record_count = 0x1122;
    h.flags = 1;
    const auto bytes = h.serialize();
    const Bytes want{'G', 'D', 'C', 'B', 1, 3, 3, 4, 10, 159, 2, 8, 7, 6, 5, 4, 3, 2, 1, 0x22, 0x11, 0, 0, 0, 0, 0, 0, 1};
    EXPECT_EQ(Bytes(bytes.begin(), bytes.end()), want);
    const auto back = StreamHeader::parse(bytes);
    EXPECT_EQ(back.mode, Mode::Hybrid);
    EXPECT_EQ(back.rows, 4);
    EXPECT_EQ(back.dict_id, h.dict_id);
    EXPECT_EQ(back.record_count, h.record_count);
    EXPECT_TRUE(back.delta_timestamps());
    EXPECT_EQ(back.chunking_config().code(), choose_code(864));
}

TEST(StreamHeader, ParseErrors) {
    StreamHeader h;
    h.m = 7;
    h.l_low = 15;
    const auto good = h.serialize();
    EXPECT_NO_THROW(StreamHeader::parse(good).chunking_config());
    auto mutate = [&](std::size_t at, std::uint8_t v) {
        Bytes b(good.begin(), good.end());
        b[at] = v;
        return b;
    };
    EXPECT_THROW(StreamHeader::parse(Bytes(good.begin(), good.end() - 1)), Error);
    EXPECT_THROW(StreamHeader::parse(mutate(0, 'X')), Error);
    EXPECT_THROW(StreamHeader::parse(mutate(4, 2)), Error);
    EXPECT_THROW(StreamHeader::parse(mutate(5, 0)), Error);
    EXPECT_THROW(StreamHeader::parse(mutate(6, 4)), Error);
    EXPECT_THROW(StreamHeader::parse(mutate(10, 3)), Error);
    EXPECT_THROW(StreamHeader::parse(mutate(27, 2)), Error);
    EXPECT_THROW(StreamHeader::parse(mutate(11, 1)), Error); // dict id in ram_only
    EXPECT_THROW(StreamHeader::parse(mutate(5, 2)), Error);  // flash_only without dict id
    EXPECT_THROW(StreamHeader::parse(mutate(8, 8)).chunking_config(), Error);
    EXPECT_THROW(StreamHeader::parse(mutate(7, 2)).chunking_config(), Error);
}

// Fixture: full-row code, basis b0 and b1, and chunks built from them.
struct Fig3 {
    CodeParams code = choose_code(216);
    Bits b0, b1;
    Bits c0, c1, c2;
    Syndrome d2 = 0;

    Fig3() {
        std::mt19937_64 rng(2024);
        b0 = random_bits(code.basis_bits(), rng);
        b1 = random_bits(code.basis_bits(), rng);
        c0 = codeword(b0, code);
        c1 = codeword(b1, code);
        c2 = c0;
        c2.flip(17);
        d2 = code.column_at(17);
    }
    std::vector<Bits> chunks() const { return {c0, c1, c2}; }
    PresetDictionary dict_with(std::vector<Bits> bases) const {
        std::vector<Fingerprint> fps;
        for (const auto& b : bases)
            fps.push_back(fingerprint(b.bytes(), FingerprintAlgo::Crc32));
        return PresetDictionary(code, FingerprintAlgo::Crc32, fps, bases);
    }
};

CodecConfig config_for(Mode mode, ChunkingConfig chunking, std::size_t ram = 1024) {
    CodecConfig c;
    c.mode = mode;
    c.chunking = chunking;
    c.ram_budget = ram;
    return c;
}

TEST(Compress, RamOnlyReferencesFirstBasis) {
    Fig3 f;
    const auto chunks = f.chunks();
    const auto out = compress(chunks, config_for(Mode::RamOnly, ChunkingConfig::full_row()), nullptr, 3);
    const auto d2 = static_cast<std::uint8_t>(f.d2);
    const Bytes want_tokens = concat({Bytes{0xFF, 0x01}, f.b0.bytes(), Bytes{0x00, 0xFF, 0x01}, f.b1.bytes(),
                                      Bytes{0x00, 0x00, d2, 0xFF, 0x02}});
    ASSERT_EQ(out.size(), StreamHeader::kSize + want_tokens.size());
    EXPECT_EQ(Bytes(out.begin() + StreamHeader::kSize, out.end()), want_tokens);
    const auto h = StreamHeader::parse(out);
    EXPECT_EQ(h.mode, Mode::RamOnly);
    EXPECT_EQ(h.dict_id, 0u);
    EXPECT_EQ(h.record_count, 3u);
    EXPECT_EQ(decompress(out, nullptr).chunks, chunks);
}

TEST(Compress, FlashOnlyAllHits) {
    Fig3 f;
    const auto dict = f.dict_with({f.b1, f.b0});
    const auto enc = dict.compressor_side();
    const auto chunks = f.chunks();
    const auto out = compress(chunks, config_for(Mode::FlashOnly, ChunkingConfig::full_row()), &enc, 3);
    const Bytes want_tokens{0x01, 0x00, 0x00, 0x00, 0x01, static_cast<std::uint8_t>(f.d2), 0xFF, 0x02};
    EXPECT_EQ(Bytes(out.begin() + StreamHeader::kSize, out.end()), want_tokens);
    EXPECT_EQ(StreamHeader::parse(out).dict_id, dict.dict_id());
    EXPECT_EQ(decompress(out, &dict).chunks, chunks);
    EXPECT_EQ(compressed_size_report(out).basis_bytes, 0u);
}

TEST(Compress, FlashOnlyMissesStreamRawBases) {
    Fig3 f;
    const auto dict = f.dict_with({f.b1});
    const std::vector<Bits> chunks{f.c0, f.c0};
    const auto out = compress(chunks, config_for(Mode::FlashOnly, ChunkingConfig::full_row()), &dict, 2);
    const Bytes want_tokens =
        concat({Bytes{0xFF, 0x01}, f.b0.bytes(), Bytes{0x00, 0xFF, 0x01}, f.b0.bytes(), Bytes{0x00, 0xFF, 0x02}});
    EXPECT_EQ(Bytes(out.begin() + StreamHeader::kSize, out.end()), want_tokens);
    EXPECT_EQ(decompress(out, &dict).chunks, chunks);
}

TEST(Compress, HybridPrefersFlashThenRam) {
    Fig3 f;
    const auto dict = f.dict_with({f.b0});
    const std::vector<Bits> chunks{f.c0, f.c1, f.c2, f.c1};
    const auto out = compress(chunks, config_for(Mode::Hybrid, ChunkingConfig::full_row()), &dict, 4);
    const auto d2 = static_cast<std::uint8_t>(f.d2);
    const Bytes want_tokens = concat({Bytes{0x00, 0x00, 0xFF, 0x01}, f.b1.bytes(),
                                      Bytes{0x00, 0x00, d2, 0xE0, 0x00, 0x00, 0xFF, 0x02}});
    EXPECT_EQ(Bytes(out.begin() + StreamHeader::kSize, out.end()), want_tokens);
    EXPECT_EQ(decompress(out, &dict).chunks, chunks);
    const auto report = compressed_size_report(out);
    EXPECT_EQ(report.tokens.ref_primary, 2u);
    EXPECT_EQ(report.tokens.ref_ram, 1u);
    EXPECT_EQ(report.tokens.new_basis, 1u);
}

TEST(Compress, EmptyStream) {
    for (auto mode : {Mode::RamOnly, Mode::FlashOnly, Mode::Hybrid}) {
        Fig3 f;
        const auto dict = f.dict_with({});
        const auto out =
            compress({}, config_for(mode, ChunkingConfig::full_row()), mode == Mode::RamOnly ? nullptr : &dict, 0);
        ASSERT_EQ(out.size(), StreamHeader::kSize + 2);
        EXPECT_EQ(out[28], 0xFF);
        EXPECT_EQ(out[29], 0x02);
        EXPECT_TRUE(decompress(out, mode == Mode::RamOnly ? nullptr : &dict).chunks.empty());
        EXPECT_FALSE(compressed_size_report(out).gain.has_value());
    }
}

TEST(Compress, MultiRowUsesTwoByteDeviation) {
    const auto chunking = ChunkingConfig::multi_row(4);
    const auto& code = chunking.code();
    ASSERT_EQ(code.m(), 10u);
    EXPECT_EQ(deviation_bytes(code), 2u);
    std::mt19937_64 rng(4);
    Bits c = codeword(random_bits(code.basis_bits(), rng), code);
    c.flip(700);
    const std::vector<Bits> chunks{c, c};
    const auto out = compress(chunks, config_for(Mode::RamOnly, chunking), nullptr, 8);
    const auto dev = code.column_at(700);
    const std::size_t tail = out.size();
    EXPECT_EQ(out[tail - 5], 0x00);
    EXPECT_EQ(out[tail - 4], static_cast<std::uint8_t>(dev));
    EXPECT_EQ(out[tail - 3], static_cast<std::uint8_t>(dev >> 8));
    EXPECT_EQ(decompress(out, nullptr).chunks, chunks);
}

struct Scenario {
    Mode mode;
    ChunkingConfig chunking;
    std::size_t ram;
    std::size_t flash;
};

void round_trip_clustered(const Scenario& s, std::uint64_t seed) {
    const auto& code = s.chunking.code();
    const std::size_t per_record = s.chunking.kind() == ChunkingKind::HalfRow ? 2 : 1;
    const auto data = synthetic::clustered_chunks(600 * per_record, 50, code, seed);
    const std::uint64_t records =
        s.chunking.kind() == ChunkingKind::MultiRow ? data.chunks.size() * s.chunking.rows() : data.chunks.size() / per_record;

    std::optional<PresetDictionary> dict;
    if (s.mode != Mode::RamOnly) {
        const auto ranked = count_frequencies(data.chunks, code, FingerprintAlgo::Crc32);
        dict = PresetDictionary::truncate_to_flash(ranked, s.flash, code, FingerprintAlgo::Crc32);
    }
    const auto enc = dict ? std::optional(dict->compressor_side()) : std::nullopt;
    const auto out = compress(data.chunks, config_for(s.mode, s.chunking, s.ram), enc ? &*enc : nullptr, records);
    const auto back = decompress(out, dict ? &*dict : nullptr);
    ASSERT_EQ(back.chunks, data.chunks) << mode_name(s.mode) << " " << s.chunking.to_string() << " ram=" << s.ram
                                        << " flash=" << s.flash;
    const auto report = compressed_size_report(out);
    EXPECT_EQ(report.total_bytes, StreamHeader::kSize + report.id_bytes + report.basis_bytes + report.deviation_bytes +
                                      report.control_bytes);
    EXPECT_EQ(report.tokens.ref_primary + report.tokens.ref_ram + report.tokens.new_basis, data.chunks.size());
}

TEST(RoundTrip, ClusteredChunksEveryMode) {
    std::uint64_t seed = 1;
    for (const auto& chunking : {ChunkingConfig::half_row(), ChunkingConfig::full_row(), ChunkingConfig::multi_row(4)}) {
        for (std::size_t ram : {0u, 64u, 1024u, 100000u}) {
            round_trip_clustered({Mode::RamOnly, chunking, ram, 0}, seed++);
            for (std::size_t flash : {0u, 40u, 10240u}) {
                round_trip_clustered({Mode::FlashOnly, chunking, 0, flash}, seed++);
                round_trip_clustered({Mode::Hybrid, chunking, ram, flash}, seed++);
            }
        }
    }
}

TEST(RoundTrip, RandomRecordsWithVerification) {
    std::mt19937_64 rng(77);
    std::vector<CanRecord> recs;
    for (int i = 0; i < 500; ++i)
        recs.push_back(test::random_record(rng));
    for (bool verify : {false, true}) {
        for (auto accounting : {Accounting::Paper, Accounting::Uniform}) {
            auto cfg = config_for(Mode::RamOnly, ChunkingConfig::full_row(), 2000);
            cfg.verify_on_match = verify;
            cfg.accounting = accounting;
            cfg.algo = FingerprintAlgo::Fnv64;
            EXPECT_EQ(decompress_records(compress_records(recs, cfg, nullptr), nullptr), recs);
        }
    }
}

TEST(RoundTrip, DeltaFlagHonoured) {
    const auto recs = synthetic::can_log(300, 5);
    for (bool delta : {true, false}) {
        auto cfg = config_for(Mode::RamOnly, ChunkingConfig::half_row(), 4096);
        cfg.delta_timestamps = delta;
        const auto out = compress_records(recs, cfg, nullptr);
        EXPECT_EQ(StreamHeader::parse(out).delta_timestamps(), delta);
        EXPECT_EQ(decompress_records(out, nullptr), recs);
    }
}

// Records every write; a rewind would need a seek, which this sink cannot do.
class AppendOnlySink final : public ByteSink {
public:
    void write(std::span<const std::uint8_t> bytes) override {
        data.insert(data.end(), bytes.begin(), bytes.end());
        ++writes;
    }
    Bytes data;
    std::size_t writes = 0;
};

TEST(StreamCompressor, EmitsMonotonically) {
    const auto chunking = ChunkingConfig::full_row();
    const auto data = synthetic::clustered_chunks(400, 20, chunking.code(), 9);
    AppendOnlySink sink;
    StreamCompressor comp(config_for(Mode::RamOnly, chunking, 512), nullptr, data.chunks.size(), sink);
    EXPECT_EQ(sink.data.size(), StreamHeader::kSize);
    std::vector<Bytes> snapshots;
    for (const auto& c : data.chunks) {
        const auto before = sink.data.size();
        comp.push(c);
        EXPECT_GT(sink.data.size(), before);
        snapshots.push_back(sink.data);
    }
    comp.finish();
    EXPECT_EQ(comp.chunks_seen(), data.chunks.size());
    for (const auto& snap : snapshots)
        ASSERT_TRUE(std::equal(snap.begin(), snap.end(), sink.data.begin()));
    EXPECT_EQ(sink.data, compress(data.chunks, config_for(Mode::RamOnly, chunking, 512), nullptr, data.chunks.size()));
}

TEST(StreamCompressor, FlashOnlyKeepsNoGrowingState) {
    const auto chunking = ChunkingConfig::half_row();
    const auto data = synthetic::clustered_chunks(2000, 100, chunking.code(), 10);
    const auto ranked = count_frequencies(data.chunks, chunking.code(), FingerprintAlgo::Crc32);
    const auto dict = PresetDictionary::truncate_to_flash(ranked, 200, chunking.code(), FingerprintAlgo::Crc32);
    const auto before = dict.serialize_decompressor_side();
    VectorSink sink;
    StreamCompressor comp(config_for(Mode::FlashOnly, chunking, 100000), &dict, 1000, sink);
    EXPECT_EQ(comp.dynamic_dictionary(), nullptr);
    for (const auto& c : data.chunks)
        comp.push(c);
    comp.finish();
    EXPECT_EQ(comp.dynamic_dictionary(), nullptr);
    EXPECT_EQ(dict.serialize_decompressor_side(), before);
    EXPECT_GT(comp.counts().ref_primary, 0u);
    EXPECT_GT(comp.counts().new_basis, 0u);
}

TEST(StreamCompressor, ZeroCapacityRamStreamsEveryBasis) {
    const auto chunking = ChunkingConfig::full_row();
    const auto data = synthetic::clustered_chunks(100, 3, chunking.code(), 11);
    const auto out = compress(data.chunks, config_for(Mode::RamOnly, chunking, 0), nullptr, 100);
    const auto report = compressed_size_report(out);
    EXPECT_EQ(report.tokens.new_basis, 100u);
    EXPECT_EQ(decompress(out, nullptr).chunks, data.chunks);
}

TEST(StreamCompressor, PushCountEnforced) {
    Fig3 f;
    VectorSink sink;
    StreamCompressor comp(config_for(Mode::RamOnly, ChunkingConfig::full_row()), nullptr, 1, sink);
    comp.push(f.c0);
    EXPECT_THROW(comp.push(f.c1), Error);
    VectorSink sink2;
    StreamCompressor short_comp(config_for(Mode::RamOnly, ChunkingConfig::full_row()), nullptr, 2, sink2);
    short_comp.push(f.c0);
    EXPECT_THROW(short_comp.finish(), Error);
    VectorSink sink3;
    StreamCompressor bad_len(config_for(Mode::RamOnly, ChunkingConfig::full_row()), nullptr, 1, sink3);
    EXPECT_THROW(bad_len.push(Bits(112)), Error);
}

TEST(Reset, TriggeredByIdExhaustion) {
    Fig3 f;
    std::mt19937_64 rng(5);
    const Bits c3 = codeword(random_bits(f.code.basis_bits(), rng), f.code);
    // ids: c0->0, c1->1, reset, c3->0, c3 hit, c0 miss after reset -> 1
    const std::vector<Bits> chunks{f.c0, f.c1, c3, c3, f.c0};
    auto cfg = config_for(Mode::RamOnly, ChunkingConfig::full_row(), 100000);
    cfg.id_limit = 2;
    const auto out = compress(chunks, cfg, nullptr, chunks.size());
    const auto report = compressed_size_report(out);
    EXPECT_EQ(report.tokens.resets, 1u);
    EXPECT_EQ(report.tokens.new_basis, 4u);
    EXPECT_EQ(report.tokens.ref_primary, 1u);
    const std::size_t basis_token = 2 + f.code.basis_bytes() + 1;
    const std::size_t reset_at = StreamHeader::kSize + 2 * basis_token;
    EXPECT_EQ(out[reset_at], 0xFF);
    EXPECT_EQ(out[reset_at + 1], 0x00);
    EXPECT_EQ(out[reset_at + 2 + basis_token], 0x00); // RefPrimary(0) for the second c3
    EXPECT_EQ(decompress(out, nullptr).chunks, chunks);
}

TEST(Reset, PostResetDecodingIgnoresEarlierBases) {
    const auto chunking = ChunkingConfig::full_row();
    const auto data = synthetic::clustered_chunks(300, 12, chunking.code(), 13);
    auto cfg = config_for(Mode::RamOnly, chunking, 100000);
    cfg.id_limit = 6;
    const auto out = compress(data.chunks, cfg, nullptr, data.chunks.size());
    ASSERT_GT(compressed_size_report(out).tokens.resets, 0u);

    // Decode once to find where the last reset sits and how many chunks precede it.
    const std::size_t basis_bytes = chunking.code().basis_bytes();
    std::size_t pos = StreamHeader::kSize, last_reset = 0, chunks_before = 0, count = 0;
    std::vector<std::size_t> basis_offsets;
    while (true) {
        if (out[pos] == 0xFF) {
            if (out[pos + 1] == 0x02)
                break;
            if (out[pos + 1] == 0x00) {
                last_reset = pos;
                chunks_before = count;
                pos += 2;
                continue;
            }
            basis_offsets.push_back(pos + 2);
            pos += 2 + basis_bytes + 1;
        } else {
            pos += encoded_id_length(decode_id(std::span(out).subspan(pos), IdSpace::Primary).first, IdSpace::Primary) + 1;
        }
        ++count;
    }
    ASSERT_GT(last_reset, 0u);

    auto garbled = out;
    for (auto off : basis_offsets)
        if (off < last_reset)
            for (std::size_t i = 0; i + 1 < basis_bytes; ++i)
                garbled[off + i] ^= 0xA5;
    const auto clean = decompress(out, nullptr).chunks;
    const auto dirty = decompress(garbled, nullptr).chunks;
    ASSERT_EQ(clean, data.chunks);
    ASSERT_EQ(dirty.size(), clean.size());
    for (std::size_t i = chunks_before; i < clean.size(); ++i)
        ASSERT_EQ(dirty[i], clean[i]) << i;
}

TEST(Reset, HybridRamSpace) {
    const auto chunking = ChunkingConfig::full_row();
    const auto data = synthetic::clustered_chunks(400, 40, chunking.code(), 14);
    const auto ranked = count_frequencies(data.chunks, chunking.code(), FingerprintAlgo::Crc32);
    const auto dict = PresetDictionary::truncate_to_flash(ranked, 20, chunking.code(), FingerprintAlgo::Crc32);
    auto cfg = config_for(Mode::Hybrid, chunking, 100000);
    cfg.id_limit = 5;
    const auto out = compress(data.chunks, cfg, &dict, data.chunks.size());
    EXPECT_GT(compressed_size_report(out).tokens.resets, 0u);
    EXPECT_EQ(decompress(out, &dict).chunks, data.chunks);
}

ErrorKind decompress_error(std::span<const std::uint8_t> container, const PresetDictionary* dict) {
    try {
        decompress(container, dict);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::Io;
}

TEST(Decompress, DictionaryChecks) {
    Fig3 f;
    const auto dict = f.dict_with({f.b0, f.b1});
    const auto other = f.dict_with({f.b1, f.b0});
    const auto out = compress(f.chunks(), config_for(Mode::FlashOnly, ChunkingConfig::full_row()), &dict, 3);
    EXPECT_EQ(decompress_error(out, nullptr), ErrorKind::Config);
    EXPECT_EQ(decompress_error(out, &other), ErrorKind::DictMismatch);
    const auto lean = dict.compressor_side();
    EXPECT_EQ(decompress_error(out, &lean), ErrorKind::Config);
}

TEST(Decompress, CompressorConfigChecks) {
    Fig3 f;
    const auto dict = f.dict_with({f.b0});
    auto chunks = f.chunks();
    EXPECT_THROW(compress(chunks, config_for(Mode::RamOnly, ChunkingConfig::full_row()), &dict, 3), Error);
    EXPECT_THROW(compress(chunks, config_for(Mode::Hybrid, ChunkingConfig::full_row()), nullptr, 3), Error);
    auto fnv = config_for(Mode::FlashOnly, ChunkingConfig::full_row());
    fnv.algo = FingerprintAlgo::Fnv64;
    EXPECT_THROW(compress(chunks, fnv, &dict, 3), Error);
    EXPECT_THROW(compress({}, config_for(Mode::FlashOnly, ChunkingConfig::half_row()), &dict, 0), Error);
}

TEST(Decompress, PresetIdOutOfRange) {
    Fig3 f;
    const auto dict = f.dict_with({f.b0});
    auto out = compress(std::vector<Bits>{f.c0}, config_for(Mode::FlashOnly, ChunkingConfig::full_row()), &dict, 1);
    ASSERT_EQ(out[StreamHeader::kSize], 0x00);
    out[StreamHeader::kSize] = 0x01;
    EXPECT_EQ(decompress_error(out, &dict), ErrorKind::Corruption);
}

TEST(Decompress, DynamicIdNotYetDefined) {
    Fig3 f;
    auto out = compress(std::vector<Bits>{f.c0, f.c0}, config_for(Mode::RamOnly, ChunkingConfig::full_row()), nullptr, 2);
    out[out.size() - 4] = 0x05;
    EXPECT_EQ(decompress_error(out, nullptr), ErrorKind::Corruption);
}

TEST(Decompress, MalformedStreams) {
    Fig3 f;
    const auto out = compress(f.chunks(), config_for(Mode::RamOnly, ChunkingConfig::full_row()), nullptr, 3);
    for (std::size_t cut = 0; cut < out.size(); ++cut)
        EXPECT_THROW(decompress(std::span(out).first(cut), nullptr), Error) << cut;
    auto trailing = out;
    trailing.push_back(0);
    EXPECT_THROW(decompress(trailing, nullptr), Error);
    auto unknown = out;
    unknown[StreamHeader::kSize + 1] = 0x07; // FF 07
    EXPECT_THROW(decompress(unknown, nullptr), Error);
    auto short_count = out;
    short_count[19] = 2;
    EXPECT_THROW(decompress(short_count, nullptr), Error);
    auto long_count = out;
    long_count[19] = 4;
    EXPECT_THROW(decompress(long_count, nullptr), Error);
    auto ram_token_in_ram_mode = out;
    ram_token_in_ram_mode[out.size() - 4] = 0xE0;
    EXPECT_THROW(decompress(ram_token_in_ram_mode, nullptr), Error);
}

TEST(SizeReport, Accounting) {
    Fig3 f;
    const auto out = compress(f.chunks(), config_for(Mode::RamOnly, ChunkingConfig::full_row()), nullptr, 3);
    const auto r = compressed_size_report(out);
    EXPECT_EQ(r.total_bytes, out.size());
    EXPECT_EQ(r.record_count, 3u);
    EXPECT_EQ(r.tokens.new_basis, 2u);
    EXPECT_EQ(r.tokens.ref_primary, 1u);
    EXPECT_EQ(r.basis_bytes, 2 * f.code.basis_bytes());
    EXPECT_EQ(r.id_bytes, 1u);
    EXPECT_EQ(r.deviation_bytes, 3u);
    EXPECT_EQ(r.control_bytes, 6u);
    ASSERT_TRUE(r.gain.has_value());
    EXPECT_DOUBLE_EQ(*r.gain, 81.0 / static_cast<double>(out.size()));
}

TEST(SizeReport, IdenticalChunksStoreOneBasis) {
    Fig3 f;
    const std::vector<Bits> chunks(50, f.c1);
    const auto out = compress(chunks, config_for(Mode::RamOnly, ChunkingConfig::full_row()), nullptr, 50);
    const auto r = compressed_size_report(out);
    EXPECT_EQ(r.basis_bytes, f.code.basis_bytes());
    EXPECT_EQ(r.tokens.ref_primary, 49u);
}

TEST(Modes, Names) {
    EXPECT_EQ(parse_mode("ram"), Mode::RamOnly);
    EXPECT_EQ(parse_mode("flash_only"), Mode::FlashOnly);
    EXPECT_EQ(parse_mode("hybrid"), Mode::Hybrid);
    EXPECT_THROW(parse_mode("disk"), Error);
    EXPECT_EQ(mode_name(Mode::RamOnly), "ram_only");
}

} // namespace
} // namespace gdcan
