#ifndef WDVV_MEMO_STORE_HPP_
#define WDVV_MEMO_STORE_HPP_

#include "wdvv/core_index.hpp"
#include "wdvv/rational.hpp"

#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wdvv {

/// Hash map with shared-lock reads and first-write-wins inserts.
template <class Key, class Value, class Hash>
class ConcurrentMap {
public:
    std::optional<Value> find(const Key& key) const
    {
        std::shared_lock lock(mutex_);
        auto it = map_.find(key);
        if (it == map_.end())
            return std::nullopt;
        return it->second;
    }

    /// Inserts unless present; returns the stored value either way.
    Value insert(const Key& key, Value value)
    {
        std::unique_lock lock(mutex_);
        auto [it, inserted] = map_.try_emplace(key, std::move(value));
        return it->second;
    }

    /// Overwrites. Only for loading and test hooks.
    void assign(const Key& key, Value value)
    {
        std::unique_lock lock(mutex_);
        map_.insert_or_assign(key, std::move(value));
    }

    std::size_t size() const
    {
        std::shared_lock lock(mutex_);
        return map_.size();
    }

    void clear()
    {
        std::unique_lock lock(mutex_);
        map_.clear();
    }

    std::vector<std::pair<Key, Value>> snapshot() const
    {
        std::shared_lock lock(mutex_);
        return {map_.begin(), map_.end()};
    }

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<Key, Value, Hash> map_;
};

/// Computed invariants keyed by canonical keys, shared by the open and closed
/// engines and persisted by cache_store.
struct MemoStore {
    ConcurrentMap<CanonicalKey, Rational, CanonicalKeyHash> open;
    ConcurrentMap<ClosedKey, Integer, ClosedKeyHash> closed;

    MemoStore() = default;
    MemoStore(const MemoStore& other) { *this = other; }
    MemoStore& operator=(const MemoStore& other)
    {
        if (this == &other)
            return *this;
        open.clear();
        closed.clear();
        for (auto& [k, v] : other.open.snapshot())
            open.assign(k, v);
        for (auto& [k, v] : other.closed.snapshot())
            closed.assign(k, v);
        return *this;
    }

    std::size_t size() const { return open.size() + closed.size(); }
};

}  // namespace wdvv

#endif  // WDVV_MEMO_STORE_HPP_
