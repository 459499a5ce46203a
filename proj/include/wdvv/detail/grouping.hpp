#ifndef WDVV_DETAIL_GROUPING_HPP_
#define WDVV_DETAIL_GROUPING_HPP_

// Sums over sub-multi-indices x <= v (positionwise) of a multi-index v whose
// summand depends on x only through symmetric data can be taken over
// histograms: positions carrying the same value of v are interchangeable, so
// instead of iterating over every vector x we iterate, per group of equal
// entries, over how many positions take each value, weighted by the
// multinomial count of such assignments.

#include "wdvv/core_index.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace wdvv::detail {

struct ValueGroup {
    int value = 0;
    int count = 0;
};

/// Run-length encoding of a multi-index (any order; equal entries merged).
inline std::vector<ValueGroup> run_length(MultiIndex m)
{
    std::sort(m.begin(), m.end(), std::greater<>());
    std::vector<ValueGroup> groups;
    for (int v : m) {
        if (!groups.empty() && groups.back().value == v)
            ++groups.back().count;
        else
            groups.push_back({v, 1});
    }
    return groups;
}

/// Histogram of one group: counts[i] positions take the part value lo + i.
struct GroupChoice {
    int value = 0;  // the group's entry in the target
    int lo = 0;
    std::vector<int> counts;
};

namespace impl {
template <class Visit>
void compositions(std::vector<int>& counts, std::size_t slot, int remaining, Visit& visit)
{
    if (slot + 1 == counts.size()) {
        counts[slot] = remaining;
        visit();
        return;
    }
    for (int n = remaining; n >= 0; --n) {
        counts[slot] = n;
        compositions(counts, slot + 1, remaining - n, visit);
    }
}

template <class Range, class Visit>
void groups_rec(std::span<const ValueGroup> groups, std::size_t at, Range& range, std::vector<GroupChoice>& choices,
                const Integer& weight, Visit& visit)
{
    if (at == groups.size()) {
        visit(std::as_const(choices), weight);
        return;
    }
    const auto [lo, hi] = range(at, groups[at].value);
    if (lo > hi)
        return;
    GroupChoice& choice = choices[at];
    choice.value = groups[at].value;
    choice.lo = lo;
    choice.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0);
    auto step = [&] {
        Integer w = weight * guarded_multinomial(groups[at].count, choice.counts);
        groups_rec(groups, at + 1, range, choices, w, visit);
    };
    compositions(choice.counts, 0, groups[at].count, step);
}
}  // namespace impl

/// Calls visit(choices, weight) for every combination of per-group
/// histograms. range(group_index, value) returns the inclusive [lo, hi] of
/// part values allowed for that group.
template <class Range, class Visit>
void for_each_group_choice(std::span<const ValueGroup> groups, Range&& range, Visit&& visit)
{
    std::vector<GroupChoice> choices(groups.size());
    impl::groups_rec(groups, 0, range, choices, Integer(1), visit);
}

/// Appends part values of a choice (x repeated counts times) through `map`.
template <class Map>
void append_parts(const GroupChoice& choice, MultiIndex& out, Map&& map)
{
    for (std::size_t i = 0; i < choice.counts.size(); ++i)
        out.insert(out.end(), static_cast<std::size_t>(choice.counts[i]), map(choice.value, choice.lo + static_cast<int>(i)));
}

/// Sum over positions of f(value, part).
template <class F>
long long sum_parts(std::span<const GroupChoice> choices, F&& f)
{
    long long total = 0;
    for (const auto& choice : choices)
        for (std::size_t i = 0; i < choice.counts.size(); ++i)
            total += static_cast<long long>(choice.counts[i]) * f(choice.value, choice.lo + static_cast<int>(i));
    return total;
}

/// Iterates over every vector in the box prod [lo_i, hi_i] (odometer order).
template <class Visit>
void for_each_in_box(std::span<const std::pair<int, int>> box, Visit&& visit)
{
    for (auto [lo, hi] : box)
        if (lo > hi)
            return;
    MultiIndex x(box.size());
    for (std::size_t i = 0; i < box.size(); ++i)
        x[i] = box[i].first;
    while (true) {
        visit(std::as_const(x));
        std::size_t i = 0;
        for (; i < box.size(); ++i) {
            if (x[i] < box[i].second) {
                ++x[i];
                break;
            }
            x[i] = box[i].first;
        }
        if (i == box.size())
            return;
    }
}

}  // namespace wdvv::detail

#endif  // WDVV_DETAIL_GROUPING_HPP_
