#pragma once

#include "wdvv/core_index.hpp"
#include "wdvv/detail/grouping.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace testing_keys {

// Positional keys with sorted entries 0 <= alpha_i <= d, 0 <= 2 beta_j <= d
// and every k with an integral interior-point count.
inline std::vector<wdvv::RelativeClassIndex> small_keys(int dmax, std::size_t r, std::size_t s)
{
    using namespace wdvv;
    std::vector<RelativeClassIndex> out;
    for (int d = 0; d <= dmax; ++d) {
        std::vector<std::pair<int, int>> box(r, {0, d});
        box.resize(r + s, {0, d / 2});
        wdvv::detail::for_each_in_box(box, [&](const MultiIndex& x) {
            MultiIndex a(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(r)),
                b(x.begin() + static_cast<std::ptrdiff_t>(r), x.end());
            if (!std::is_sorted(a.begin(), a.end(), std::greater<>()) ||
                !std::is_sorted(b.begin(), b.end(), std::greater<>()))
                return;
            const int mu = maslov_index(d, a, b);
            for (int k = 0; k <= mu - 1; ++k)
                if (interior_points(mu, k))
                    out.push_back({d, a, b, k});
        });
    }
    return out;
}

}  // namespace testing_keys
