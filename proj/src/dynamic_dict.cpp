#include "gdcan/dynamic_dict.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <utility>

#include "gdcan/error.hpp"

namespace gdcan {

namespace {

struct Tier {
    std::size_t entries;
    std::size_t id_bytes;
};

constexpr std::array<Tier, 3> kPrimaryTiers{{{128, 1}, {std::size_t{1} << 14, 2}, {std::size_t{1} << 21, 3}}};
constexpr std::array<Tier, 2> kHybridTiers{{{4096, 2}, {15 * (std::size_t{1} << 16), 3}}};

template <std::size_t N>
std::size_t fill_tiers(const std::array<Tier, N>& tiers, std::size_t budget, std::size_t per_entry) {
    std::size_t count = 0;
    for (const auto& tier : tiers) {
        const auto cost = per_entry + tier.id_bytes;
        const auto take = std::min(tier.entries, budget / cost);
        count += take;
        budget -= take * cost;
        if (take < tier.entries)
            break;
    }
    return count;
}

} // namespace

Accounting parse_accounting(std::string_view name) {
    if (name == "paper")
        return Accounting::Paper;
    if (name == "uniform")
        return Accounting::Uniform;
    throw Error(ErrorKind::Config, "unknown accounting mode '" + std::string(name) + "'");
}

std::size_t capacity_for(std::size_t ram_budget, std::size_t fingerprint_len, Accounting accounting,
                         std::size_t extra_entry_bytes, IdSpace space) {
    const auto per_entry = fingerprint_len + extra_entry_bytes;
    if (accounting == Accounting::Uniform)
        return ram_budget / (per_entry + 4);
    return space == IdSpace::Primary ? fill_tiers(kPrimaryTiers, ram_budget, per_entry)
                                     : fill_tiers(kHybridTiers, ram_budget, per_entry);
}

std::optional<std::uint32_t> DynamicDictionary::lookup_touch(const Fingerprint& fp, const Bits* basis) {
    const auto it = index_.find(fp);
    if (it == index_.end())
        return std::nullopt;
    if (verify_ && basis != nullptr && it->second->basis != *basis)
        return std::nullopt;
    queue_.splice(queue_.end(), queue_, it->second);
    return it->second->id;
}

DynamicDictionary::Insertion DynamicDictionary::insert(const Fingerprint& fp, const Bits* basis) {
    Insertion result{next_id_++, std::nullopt};
    if (capacity_ == 0)
        return result;

    if (const auto existing = index_.find(fp); existing != index_.end()) {
        result.evicted = existing->first;
        queue_.erase(existing->second);
        index_.erase(existing);
    } else if (index_.size() >= capacity_) {
        result.evicted = queue_.front().fp;
        index_.erase(queue_.front().fp);
        queue_.pop_front();
    }

    queue_.push_back(Entry{fp, result.id, (verify_ && basis != nullptr) ? *basis : Bits{}});
    index_.emplace(fp, std::prev(queue_.end()));
    return result;
}

void DynamicDictionary::clear() {
    queue_.clear();
    index_.clear();
    next_id_ = 0;
}

std::vector<Fingerprint> DynamicDictionary::recency_order() const {
    std::vector<Fingerprint> out;
    out.reserve(queue_.size());
    for (const auto& e : queue_)
        out.push_back(e.fp);
    return out;
}

} // namespace gdcan
