#include "gdcan/preset_dict.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <string>
#include <unordered_set>

#include "byte_io.hpp"
#include "gdcan/error.hpp"
#include "gdcan/gd_transform.hpp"

namespace gdcan {

namespace {

constexpr std::array<std::uint8_t, 4> kCompressorMagic{'G', 'D', 'P', 'D'};
constexpr std::array<std::uint8_t, 4> kDecompressorMagic{'G', 'D', 'P', 'B'};
constexpr std::size_t kMaxRanks = 128 + (std::size_t{1} << 14) + (std::size_t{1} << 21);

std::vector<std::uint8_t> header_bytes(const std::array<std::uint8_t, 4>& magic, FingerprintAlgo algo,
                                       const CodeParams& code, std::size_t count) {
    std::vector<std::uint8_t> out(magic.begin(), magic.end());
    out.push_back(PresetDictionary::kFormatVersion);
    out.push_back(static_cast<std::uint8_t>(algo));
    out.push_back(static_cast<std::uint8_t>(code.m()));
    detail::put_le(out, static_cast<std::uint16_t>(code.l()));
    detail::put_le(out, static_cast<std::uint32_t>(count));
    return out;
}

} // namespace

std::vector<RankedBasis> count_frequencies(std::span<const Bits> chunks, const CodeParams& code,
                                           FingerprintAlgo algo) {
    std::vector<RankedBasis> ranked;
    std::unordered_map<Fingerprint, std::size_t> slot;
    for (const auto& chunk : chunks) {
        auto pair = to_basis_deviation(chunk, code);
        const auto fp = fingerprint(pair.basis.bytes(), algo);
        const auto [it, inserted] = slot.try_emplace(fp, ranked.size());
        if (inserted)
            ranked.push_back({fp, std::move(pair.basis), 0});
        ++ranked[it->second].count;
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedBasis& a, const RankedBasis& b) { return a.count > b.count; });
    return ranked;
}

std::vector<RankedBasis> merge_round_robin(std::span<const std::vector<RankedBasis>> per_file) {
    std::vector<RankedBasis> merged;
    std::unordered_set<Fingerprint> taken;
    std::size_t rounds = 0;
    for (const auto& list : per_file)
        rounds = std::max(rounds, list.size());
    for (std::size_t rank = 0; rank < rounds; ++rank) {
        for (const auto& list : per_file) {
            if (rank < list.size() && taken.insert(list[rank].fp).second)
                merged.push_back(list[rank]);
        }
    }
    return merged;
}

PresetDictionary::PresetDictionary(const CodeParams& code, FingerprintAlgo algo, std::vector<Fingerprint> fingerprints,
                                   std::optional<std::vector<Bits>> bases)
    : code_(code), algo_(algo), fingerprints_(std::move(fingerprints)), decoder_side_(bases.has_value()) {
    if (fingerprints_.size() > kMaxRanks)
        throw Error(ErrorKind::Parameter, "preset dictionary exceeds the 3-byte ID space");
    if (bases) {
        if (bases->size() != fingerprints_.size())
            throw Error(ErrorKind::Parameter, "preset dictionary needs one basis per fingerprint");
        for (const auto& b : *bases)
            if (b.size() != code_.basis_bits())
                throw Error(ErrorKind::Parameter, "preset basis length does not match the code");
        bases_ = std::move(*bases);
    }
    index_.reserve(fingerprints_.size());
    for (std::size_t rank = 0; rank < fingerprints_.size(); ++rank) {
        if (fingerprints_[rank].algo != algo_)
            throw Error(ErrorKind::Parameter, "fingerprint algorithm differs from the dictionary's");
        if (!index_.emplace(fingerprints_[rank], static_cast<std::uint32_t>(rank)).second)
            throw Error(ErrorKind::Format, "duplicate fingerprint at rank " + std::to_string(rank));
    }
    dict_id_ = fnv1a64(serialize_compressor_side());
}

PresetDictionary PresetDictionary::truncate_to_flash(std::span<const RankedBasis> merged, std::size_t flash_budget,
                                                     const CodeParams& code, FingerprintAlgo algo) {
    const auto keep = std::min({merged.size(), flash_budget / fingerprint_length(algo), kMaxRanks});
    std::vector<Fingerprint> fps;
    std::vector<Bits> bases;
    fps.reserve(keep);
    bases.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        fps.push_back(merged[i].fp);
        bases.push_back(merged[i].basis);
    }
    return PresetDictionary(code, algo, std::move(fps), std::move(bases));
}

std::optional<std::uint32_t> PresetDictionary::lookup(const Fingerprint& fp) const {
    const auto it = index_.find(fp);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

const Bits& PresetDictionary::basis_at(std::uint32_t rank) const {
    if (!decoder_side_)
        throw Error(ErrorKind::Config, "compressor-side preset dictionary carries no bases");
    if (rank >= bases_.size())
        throw Error(ErrorKind::Corruption, "preset id " + std::to_string(rank) + " beyond dictionary size " +
                                               std::to_string(bases_.size()));
    return bases_[rank];
}

std::vector<std::uint8_t> PresetDictionary::serialize_compressor_side() const {
    auto out = header_bytes(kCompressorMagic, algo_, code_, fingerprints_.size());
    const auto fp_len = fingerprint_length(algo_);
    const auto base = out.size();
    out.resize(base + fp_len * fingerprints_.size());
    for (std::size_t i = 0; i < fingerprints_.size(); ++i)
        fingerprints_[i].write_bytes(out.data() + base + i * fp_len);
    return out;
}

std::vector<std::uint8_t> PresetDictionary::serialize_decompressor_side() const {
    if (!decoder_side_)
        throw Error(ErrorKind::Config, "compressor-side preset dictionary carries no bases");
    auto out = header_bytes(kDecompressorMagic, algo_, code_, fingerprints_.size());
    std::array<std::uint8_t, 8> fp_bytes{};
    const auto fp_len = fingerprint_length(algo_);
    for (std::size_t i = 0; i < fingerprints_.size(); ++i) {
        fingerprints_[i].write_bytes(fp_bytes.data());
        out.insert(out.end(), fp_bytes.begin(), fp_bytes.begin() + static_cast<std::ptrdiff_t>(fp_len));
        const auto b = bases_[i].bytes();
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

PresetDictionary PresetDictionary::compressor_side() const {
    return PresetDictionary(code_, algo_, fingerprints_);
}

PresetDictionary PresetDictionary::parse(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFileHeaderSize)
        throw Error(ErrorKind::Format, "preset dictionary shorter than its header");
    const bool decoder = std::equal(kDecompressorMagic.begin(), kDecompressorMagic.end(), bytes.begin());
    if (!decoder && !std::equal(kCompressorMagic.begin(), kCompressorMagic.end(), bytes.begin()))
        throw Error(ErrorKind::Format, "not a preset dictionary (bad magic)");
    if (bytes[4] != kFormatVersion)
        throw Error(ErrorKind::Format, "unsupported preset dictionary version " + std::to_string(bytes[4]));
    const auto algo = algo_from_byte(bytes[5]);
    const auto code = [&] {
        try {
            return build_code(bytes[6], detail::load_le<std::uint16_t>(&bytes[7]));
        } catch (const Error& e) {
            throw Error(ErrorKind::Format, std::string("preset dictionary code: ") + e.what());
        }
    }();
    const auto count = detail::load_le<std::uint32_t>(&bytes[9]);

    const auto fp_len = fingerprint_length(algo);
    const auto entry = fp_len + (decoder ? code.basis_bytes() : 0);
    const auto body = bytes.size() - kFileHeaderSize;
    if (body != static_cast<std::uint64_t>(count) * entry)
        throw Error(ErrorKind::Format, "preset dictionary body is " + std::to_string(body) + " bytes, header implies " +
                                           std::to_string(static_cast<std::uint64_t>(count) * entry));

    std::vector<Fingerprint> fps;
    std::vector<Bits> bases;
    fps.reserve(count);
    const auto* p = bytes.data() + kFileHeaderSize;
    for (std::uint32_t i = 0; i < count; ++i, p += entry) {
        fps.push_back(Fingerprint::read_bytes(algo, p));
        if (decoder) {
            auto basis = Bits::from_bytes({p + fp_len, code.basis_bytes()}, code.basis_bits());
            if (std::memcmp(basis.bytes().data(), p + fp_len, code.basis_bytes()) != 0)
                throw Error(ErrorKind::Format, "nonzero padding in preset basis " + std::to_string(i));
            bases.push_back(std::move(basis));
        }
    }
    if (decoder)
        return PresetDictionary(code, algo, std::move(fps), std::move(bases));
    return PresetDictionary(code, algo, std::move(fps));
}

PresetDictionary PresetDictionary::load(const std::filesystem::path& path) {
    const auto bytes = detail::read_file(path);
    return parse(bytes);
}

} // namespace gdcan
