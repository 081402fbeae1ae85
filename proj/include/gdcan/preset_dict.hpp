#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "gdcan/bits.hpp"
#include "gdcan/fingerprint.hpp"
#include "gdcan/hamming.hpp"

namespace gdcan {

struct RankedBasis {
    Fingerprint fp;
    Bits basis;
    std::uint64_t count = 0;
};

/// Basis frequencies of one file, most repeated first; ties keep first-seen order.
std::vector<RankedBasis> count_frequencies(std::span<const Bits> chunks, const CodeParams& code,
                                           FingerprintAlgo algo);

/// Interleaves per-file rankings rank by rank, skipping fingerprints already taken.
std::vector<RankedBasis> merge_round_robin(std::span<const std::vector<RankedBasis>> per_file);

/// Flash-resident dictionary of the most repeated basis fingerprints.
/// Rank r is ID r. The compressor side holds fingerprints only; the
/// decompressor side also holds the bases.
class PresetDictionary {
public:
    static constexpr std::uint8_t kFormatVersion = 1;
    static constexpr std::size_t kFileHeaderSize = 4 + 1 + 1 + 1 + 2 + 4; // magic, version, algo, m, l, count

    PresetDictionary(const CodeParams& code, FingerprintAlgo algo, std::vector<Fingerprint> fingerprints,
                     std::optional<std::vector<Bits>> bases = std::nullopt);

    /// Keeps the longest prefix of `merged` whose fingerprints fit flash_budget.
    static PresetDictionary truncate_to_flash(std::span<const RankedBasis> merged, std::size_t flash_budget,
                                              const CodeParams& code, FingerprintAlgo algo);

    static PresetDictionary parse(std::span<const std::uint8_t> bytes);
    static PresetDictionary load(const std::filesystem::path& path);

    std::optional<std::uint32_t> lookup(const Fingerprint& fp) const;

    std::size_t size() const noexcept { return fingerprints_.size(); }
    bool has_bases() const noexcept { return decoder_side_; }
    const Bits& basis_at(std::uint32_t rank) const;
    const std::vector<Fingerprint>& fingerprints() const noexcept { return fingerprints_; }
    const CodeParams& code() const noexcept { return code_; }
    FingerprintAlgo algo() const noexcept { return algo_; }

    /// FNV-1a 64 over the compressor-side serialization.
    std::uint64_t dict_id() const noexcept { return dict_id_; }

    std::vector<std::uint8_t> serialize_compressor_side() const;
    std::vector<std::uint8_t> serialize_decompressor_side() const;
    PresetDictionary compressor_side() const;

private:
    CodeParams code_;
    FingerprintAlgo algo_;
    std::vector<Fingerprint> fingerprints_;
    std::vector<Bits> bases_;
    bool decoder_side_ = false;
    std::unordered_map<Fingerprint, std::uint32_t> index_;
    std::uint64_t dict_id_ = 0;
};

} // namespace gdcan
