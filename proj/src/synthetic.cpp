#include "gdcan/synthetic.hpp"

#include <array>
#include <iterator>
#include <random>

#include "gdcan/gd_transform.hpp"

namespace gdcan::synthetic {

namespace {

struct MessageType {
    std::uint32_t identifier;
    std::uint8_t ide;
    std::uint8_t length;
    std::uint8_t channel;
    std::uint64_t period_ns;
    std::array<std::uint8_t, 8> payload;
    std::uint64_t next_due;
    bool counter;
};

} // namespace

std::vector<CanRecord> can_log(std::size_t count, std::uint64_t seed, const CanLogOptions& options) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
    };
    std::bernoulli_distribution extended(options.extended_fraction);

    static constexpr std::uint64_t kPeriodsMs[] = {10, 20, 50, 100, 200, 500, 1000};
    std::vector<MessageType> types;
    types.reserve(options.message_types);
    for (std::size_t i = 0; i < options.message_types; ++i) {
        MessageType t{};
        t.ide = extended(rng) ? 1 : 0;
        t.identifier = static_cast<std::uint32_t>(t.ide ? uniform(0, (1u << 29) - 1) : uniform(0, (1u << 11) - 1));
        t.length = static_cast<std::uint8_t>(uniform(1, 8));
        t.channel = static_cast<std::uint8_t>(uniform(1, 2));
        t.period_ns = kPeriodsMs[uniform(0, std::size(kPeriodsMs) - 1)] * 1'000'000;
        for (std::size_t b = 0; b < t.length; ++b)
            t.payload[b] = static_cast<std::uint8_t>(uniform(0, 255));
        t.next_due = options.start_ns + uniform(0, t.period_ns / 1'000'000) * 1'000'000;
        t.counter = uniform(0, 2) == 0;
        types.push_back(t);
    }

    std::vector<CanRecord> out;
    out.reserve(count);
    while (out.size() < count && !types.empty()) {
        auto it = types.begin();
        for (auto jt = types.begin(); jt != types.end(); ++jt)
            if (jt->next_due < it->next_due)
                it = jt;
        auto& t = *it;

        CanRecord rec;
        rec.timestamp = t.next_due;
        rec.identifier = t.identifier;
        rec.ide = t.ide;
        rec.dlc = t.length;
        rec.channel = t.channel;
        rec.data_length = t.length;
        rec.data = t.payload;
        out.push_back(rec);

        // Some frames carry a 2-bit alive counter in byte 0; signal bytes drift now and then.
        if (t.counter)
            t.payload[0] = static_cast<std::uint8_t>((t.payload[0] & 0xFC) | ((t.payload[0] + 1) & 0x03));
        if (t.length > 1 && uniform(0, 49) == 0) {
            auto& b = t.payload[uniform(1, t.length - 1)];
            b = static_cast<std::uint8_t>(b + (uniform(0, 1) ? 1 : -1));
        }
        // Bus arbitration delays a frame by up to one 1 ms logger tick.
        t.next_due += t.period_ns + (uniform(0, 9) == 0 ? 1'000'000 : 0);
    }
    return out;
}

ClusteredChunks clustered_chunks(std::size_t count, std::size_t base_count, const CodeParams& code,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> byte(0, 255);
    ClusteredChunks out;
    std::vector<Bits> codewords;
    for (std::size_t i = 0; i < base_count; ++i) {
        Bits basis(code.basis_bits());
        for (auto& b : basis.mutable_bytes())
            b = static_cast<std::uint8_t>(byte(rng));
        basis = basis.prefix(code.basis_bits()); // clears the pad bits
        codewords.push_back(from_basis_deviation({basis, 0}, code));
        out.bases.push_back(std::move(basis));
    }
    std::uniform_int_distribution<std::size_t> pick(0, base_count - 1);
    std::uniform_int_distribution<std::size_t> flip(0, code.chunk_bits());
    out.chunks.reserve(count);
    out.base_of.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto base = pick(rng);
        Bits chunk = codewords[base];
        if (const auto pos = flip(rng); pos < code.chunk_bits())
            chunk.flip(pos);
        out.chunks.push_back(std::move(chunk));
        out.base_of.push_back(static_cast<std::uint32_t>(base));
    }
    return out;
}

} // namespace gdcan::synthetic
