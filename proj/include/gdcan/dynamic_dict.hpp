#pragma once

#include <cstddef>
#include <cstdint>
#include <list>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gdcan/bits.hpp"
#include "gdcan/fingerprint.hpp"

namespace gdcan {

enum class Accounting : std::uint8_t {
    Paper,   // tiered: entries pay fingerprint + 1, 2 or 3 ID bytes
    Uniform, // every entry pays fingerprint + 4 ID bytes
};

Accounting parse_accounting(std::string_view name);

/// Tier widths of the ID encodings a dictionary hands out.
enum class IdSpace : std::uint8_t {
    Primary,   // 1/2/3-byte IDs: 128, 2^14, 2^21 entries
    HybridRam, // 2/3-byte IDs: 2^12, 15 * 2^16 entries
};

/// Number of dictionary entries that fit in ram_budget bytes. extra_entry_bytes
/// is charged per entry on top of fingerprint and ID (e.g. a stored basis).
std::size_t capacity_for(std::size_t ram_budget, std::size_t fingerprint_len, Accounting accounting,
                         std::size_t extra_entry_bytes = 0, IdSpace space = IdSpace::Primary);

/// RAM-resident fingerprint -> ID map with recency-ordered eviction.
///
/// Entries sit in a logical queue: a hit moves the entry to the back, and an
/// insertion into a full dictionary evicts the front. IDs come from a counter
/// that only grows until clear(), so an evicted ID is never reassigned.
class DynamicDictionary {
public:
    struct Insertion {
        std::uint32_t id;
        std::optional<Fingerprint> evicted;
    };

    /// With verify_bases set, each entry keeps its basis and a fingerprint
    /// match against a different basis counts as a miss.
    explicit DynamicDictionary(std::size_t capacity, bool verify_bases = false)
        : capacity_(capacity), verify_(verify_bases) {}

    std::optional<std::uint32_t> lookup_touch(const Fingerprint& fp, const Bits* basis = nullptr);

    /// Assigns the next ID. If fp is already present (only possible after a
    /// verified collision) the old entry is replaced and reported as evicted.
    /// A zero-capacity dictionary still hands out IDs but stores nothing.
    Insertion insert(const Fingerprint& fp, const Bits* basis = nullptr);

    /// Drops all entries and restarts IDs at zero.
    void clear();

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return index_.size(); }
    std::uint32_t next_id() const noexcept { return next_id_; }
    bool verifies_bases() const noexcept { return verify_; }

    /// Fingerprints from least to most recently used.
    std::vector<Fingerprint> recency_order() const;

private:
    struct Entry {
        Fingerprint fp;
        std::uint32_t id;
        Bits basis;
    };
    using Queue = std::list<Entry>;

    std::size_t capacity_;
    bool verify_;
    std::uint32_t next_id_ = 0;
    Queue queue_;
    std::unordered_map<Fingerprint, Queue::iterator> index_;
};

} // namespace gdcan
