#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace citegraph {

// Dense interning of string ids. Ids are stored sorted, so the u32 index
// order equals the lexicographic order of the original strings; tie-break
// rules stated as "ascending id" can compare indexes directly.
class IdInterner {
  public:
    IdInterner() = default;

    explicit IdInterner(std::vector<std::string> ids) : ids_(std::move(ids)) {
        std::sort(ids_.begin(), ids_.end());
        ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
        index_.reserve(ids_.size());
        for (uint32_t i = 0; i < ids_.size(); ++i) index_.emplace(ids_[i], i);
    }

    uint32_t size() const { return static_cast<uint32_t>(ids_.size()); }

    bool contains(const std::string& id) const { return index_.count(id) != 0; }

    // Throws if absent.
    uint32_t index(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw std::out_of_range("unknown id: " + id);
        return it->second;
    }

    // -1 sentinel if absent.
    int64_t find(const std::string& id) const {
        auto it = index_.find(id);
        return it == index_.end() ? -1 : static_cast<int64_t>(it->second);
    }

    const std::string& str(uint32_t idx) const { return ids_.at(idx); }

    const std::vector<std::string>& all() const { return ids_; }

  private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, uint32_t> index_;
};

}  // namespace citegraph
