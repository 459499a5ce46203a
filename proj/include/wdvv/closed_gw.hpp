#ifndef WDVV_CLOSED_GW_HPP_
#define WDVV_CLOSED_GW_HPP_

// Closed genus-0 invariants N_{(d,m)} of the plane blown up at n points:
// the number of rational curves in class dL - sum m_i E_i through
// 3d - |m| - 1 generic points.
//
// Two coefficient identities of the closed WDVV equation are used. With the
// basis t_0 (unit), t_1 (line), t_{E_i}, t_p (point), the pairing
// g^{11} = 1, g^{E_i E_i} = -1, g^{0p} = 1, and the divisor axiom
// (d_1 contributes d, d_{E_i} contributes -m_i):
//
//   degree reduction, indices (1,1,p,p), n = 3d - |m| - 1:
//     N_b = sum_{b1+b2=b} N_{b1} N_{b2} (b1.b2)
//                [d1 d2 C(n-3, n1-1) - d1^2 C(n-3, n1)]
//
//   multiplicity reduction, indices (1,1,E_q,E_q) at g = b + E_q, M = n_g - 1:
//     d^2 m_q N_b = (d^2 - (m_q-1)^2) N_g
//                   - sum_{g1+g2=g} N_{g1} N_{g2} (g1.g2) C(M, n1)
//                         (d1^2 (g2)_q^2 - d1 d2 (g1)_q (g2)_q)
//
// where both sums run over d1, d2 >= 1 and b1.b2 = d1 d2 - sum m1_i m2_i.

#include "wdvv/core_index.hpp"
#include "wdvv/detail/grouping.hpp"
#include "wdvv/errors.hpp"
#include "wdvv/memo_store.hpp"
#include "wdvv/rational.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace wdvv {

/// Key of the aggregate Ñ_{[d,alpha,beta]} = sum_c N_{(d, alpha, beta+c, beta-c)}.
struct NTildeKey {
    HalfInteger d;
    HalfMultiIndex alpha;
    HalfMultiIndex beta;
};

enum class ClosedRoute { automatic, degree_reduction, multiplicity_reduction };

/// grouped sums over histograms of equal entries; literal iterates positions.
enum class Enumeration { grouped, literal };

inline int closed_points(int d, std::span<const int> m) { return 3 * d - abs_sum(m) - 1; }

class ClosedEngine {
public:
    explicit ClosedEngine(MemoStore& store, Integer line_seed = 1) : store_(store), line_seed_(std::move(line_seed)) {}

    Integer invariant(int d, const MultiIndex& m) { return invariant(ClosedKey{d, m}); }

    Integer invariant(const AbsoluteClass& x)
    {
        MultiIndex m = x.a;
        m.insert(m.end(), x.b.begin(), x.b.end());
        m.insert(m.end(), x.c.begin(), x.c.end());
        return invariant(ClosedKey{x.d, std::move(m)});
    }

    Integer invariant(const ClosedKey& key)
    {
        std::vector<ClosedKey> path;
        return lookup(key.canonical(), path);
    }

    /// Value fixed without recursion: zero outside the support, or a seed.
    std::optional<Integer> base_value(const ClosedKey& key) const
    {
        const int d = key.d;
        if (d < 0)
            return Integer(0);
        if (d == 0) {
            const auto m = canonical_multiset(key.m);
            return Integer(m.size() == 1 && m[0] == -1 ? 1 : 0);
        }
        for (int x : key.m)
            if (x < 0 || x > d)
                return Integer(0);
        if (closed_points(d, key.m) < 0)
            return Integer(0);
        if (d == 1 && std::all_of(key.m.begin(), key.m.end(), [](int x) { return x == 0; }))
            return line_seed_;
        return std::nullopt;
    }

    /// Evaluates one identity at `key` (positional; q indexes key.m for the
    /// multiplicity route, default the last nonzero entry). Sub-invariants come
    /// from the memoized engine. Empty if the identity does not determine N.
    std::optional<Integer> evaluate_with(ClosedRoute route, const ClosedKey& key,
                                         Enumeration mode = Enumeration::grouped, std::optional<std::size_t> q = {})
    {
        std::vector<ClosedKey> path;
        return evaluate(route, key, mode, q, path);
    }

    Integer n_tilde(const NTildeKey& key, Enumeration mode = Enumeration::grouped)
    {
        if (!key.d.is_integral())
            return 0;
        MultiIndex alpha;
        for (auto a : key.alpha) {
            if (!a.is_integral())
                return 0;
            alpha.push_back(a.as_int());
        }
        MultiIndex beta_twice;
        for (auto b : key.beta)
            beta_twice.push_back(b.twice());
        if (mode == Enumeration::literal)
            return n_tilde_literal(key.d.as_int(), alpha, beta_twice);
        return n_tilde_twice(key.d.as_int(), alpha, beta_twice);
    }

    /// Ñ with integral d and alpha and beta given by twice its entries.
    Integer n_tilde_twice(int d, const MultiIndex& alpha, const MultiIndex& beta_twice)
    {
        CanonicalKey memo{d, canonical_multiset(alpha), canonical_multiset(beta_twice), 0};
        if (auto hit = n_tilde_memo_.find(memo))
            return *hit;
        Integer value = d == 0 ? n_tilde_literal(0, alpha, beta_twice) : n_tilde_grouped(memo.d, memo.alpha, memo.beta);
        return n_tilde_memo_.insert(memo, value);
    }

    MemoStore& store() { return store_; }

private:
    Integer lookup(const ClosedKey& key, std::vector<ClosedKey>& path)
    {
        if (auto base = base_value(key))
            return *base;
        if (auto hit = store_.closed.find(key))
            return *hit;
        if (std::find(path.begin(), path.end(), key) != path.end())
            throw recursion_cycle_error("closed recursion revisits " + to_string(key));
        path.push_back(key);
        const ClosedRoute route = key.m.empty() ? ClosedRoute::degree_reduction : ClosedRoute::multiplicity_reduction;
        auto value = evaluate(route, key, Enumeration::grouped, std::nullopt, path);
        path.pop_back();
        if (!value)
            throw no_relation_error("no closed identity determines " + to_string(key));
        return store_.closed.insert(key, *value);
    }

    Integer sub(int d, MultiIndex m, std::vector<ClosedKey>& path)
    {
        return lookup(ClosedKey{d, std::move(m)}.canonical(), path);
    }

    std::optional<Integer> evaluate(ClosedRoute route, const ClosedKey& key, Enumeration mode,
                                    std::optional<std::size_t> q, std::vector<ClosedKey>& path)
    {
        if (route == ClosedRoute::automatic)
            route = canonical_multiset(key.m).empty() ? ClosedRoute::degree_reduction
                                                      : ClosedRoute::multiplicity_reduction;
        if (route == ClosedRoute::degree_reduction)
            return degree_reduction(key, mode, path);
        if (!q) {
            for (std::size_t i = key.m.size(); i-- > 0;)
                if (key.m[i] != 0 && (!q || key.m[i] < key.m[*q]))
                    q = i;
            if (!q)
                return std::nullopt;
        }
        return multiplicity_reduction(key, *q, mode, path);
    }

    std::optional<Integer> degree_reduction(const ClosedKey& key, Enumeration mode, std::vector<ClosedKey>& path)
    {
        const int d = key.d;
        const int n = closed_points(d, key.m);
        if (d < 2 || n < 3 || std::any_of(key.m.begin(), key.m.end(), [&](int x) { return x < 0 || x > d; }))
            return std::nullopt;
        Integer total = 0;
        auto term = [&](int d1, const MultiIndex& m1, const MultiIndex& m2, long long cross, const Integer& weight) {
            const int d2 = d - d1;
            const int n1 = closed_points(d1, m1);
            if (n1 < 0 || n - 1 - n1 < 0)
                return;
            const Integer coef = d1 * d2 * binomial(n - 3, n1 - 1) - d1 * d1 * binomial(n - 3, n1);
            if (coef == 0)
                return;
            const Integer pairing = Integer(static_cast<long>(d1) * d2 - static_cast<long>(cross));
            if (pairing == 0)
                return;
            Integer n1v = sub(d1, m1, path);
            if (n1v == 0)
                return;
            Integer n2v = sub(d2, m2, path);
            total += weight * n1v * n2v * pairing * coef;
        };
        splits(d, key.m, std::nullopt, mode, [&](int d1, const MultiIndex& m1, const MultiIndex& m2, long long cross,
                                                 int, int, const Integer& weight) { term(d1, m1, m2, cross, weight); });
        return total;
    }

    std::optional<Integer> multiplicity_reduction(const ClosedKey& key, std::size_t q, Enumeration mode,
                                                  std::vector<ClosedKey>& path)
    {
        const int d = key.d;
        if (d < 1 || q >= key.m.size() || key.m[q] < 1 || closed_points(d, key.m) < 0 ||
            std::any_of(key.m.begin(), key.m.end(), [&](int x) { return x < 0 || x > d; }))
            return std::nullopt;
        const int mq = key.m[q];
        MultiIndex g = key.m;
        --g[q];
        const int M = closed_points(d, g) - 1;
        Integer s = 0;
        splits(d, g, q, mode,
               [&](int d1, const MultiIndex& m1, const MultiIndex& m2, long long cross, int g1q, int g2q,
                   const Integer& weight) {
                   const int d2 = d - d1;
                   const int n1 = closed_points(d1, m1);
                   if (n1 < 0 || M - n1 < 0)
                       return;
                   const long long inner = static_cast<long long>(d1) * d1 * g2q * g2q -
                                           static_cast<long long>(d1) * d2 * g1q * g2q;
                   if (inner == 0)
                       return;
                   const long long pairing = static_cast<long long>(d1) * d2 - cross;
                   if (pairing == 0)
                       return;
                   Integer n1v = sub(d1, m1, path);
                   if (n1v == 0)
                       return;
                   Integer n2v = sub(d2, m2, path);
                   s += weight * n1v * n2v * Integer(static_cast<long>(pairing)) * binomial(M, n1) *
                        Integer(static_cast<long>(inner));
               });
        const Integer numerator = sub(d, g, path) * (d * d - (mq - 1) * (mq - 1)) - s;
        const Integer denominator = d * d * mq;
        if (numerator % denominator != 0)
            throw integrality_error("multiplicity reduction not integral at " + to_string(key));
        return Integer(numerator / denominator);
    }

    // Visits every split (d1, m1) + (d2, m2) = (d, m) with d1, d2 >= 1 and
    // 0 <= m1_i <= d1, 0 <= m2_i <= d2. Callback receives the sub-multi-
    // indices, sum m1_i m2_i, the entries at the distinguished position q,
    // and the number of positional splits the visit stands for.
    template <class F>
    void splits(int d, const MultiIndex& m, std::optional<std::size_t> q, Enumeration mode, F&& visit)
    {
        for (int d1 = 1; d1 < d; ++d1) {
            const int d2 = d - d1;
            if (mode == Enumeration::literal) {
                std::vector<std::pair<int, int>> box;
                for (int x : m)
                    box.emplace_back(std::max(0, x - d2), std::min(d1, x));
                detail::for_each_in_box(box, [&](const MultiIndex& m1) {
                    MultiIndex m2(m.size());
                    long long cross = 0;
                    for (std::size_t i = 0; i < m.size(); ++i) {
                        m2[i] = m[i] - m1[i];
                        cross += static_cast<long long>(m1[i]) * m2[i];
                    }
                    const int g1q = q ? m1[*q] : 0;
                    const int g2q = q ? m2[*q] : 0;
                    visit(d1, m1, m2, cross, g1q, g2q, Integer(1));
                });
                continue;
            }
            // Grouped: the distinguished entry (if any) forms its own group 0.
            std::vector<detail::ValueGroup> groups;
            MultiIndex rest = m;
            if (q) {
                groups.push_back({m[*q], 1});
                rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(*q));
            }
            std::erase(rest, 0);
            for (auto g : detail::run_length(rest))
                groups.push_back(g);
            auto range = [&](std::size_t, int v) { return std::pair{std::max(0, v - d2), std::min(d1, v)}; };
            detail::for_each_group_choice(
                groups, range, [&](std::span<const detail::GroupChoice> choices, const Integer& weight) {
                    MultiIndex m1, m2;
                    for (const auto& c : choices) {
                        detail::append_parts(c, m1, [](int, int x) { return x; });
                        detail::append_parts(c, m2, [](int v, int x) { return v - x; });
                    }
                    const long long cross = detail::sum_parts(choices, [](int v, int x) { return x * (v - x); });
                    int g1q = 0, g2q = 0;
                    if (q) {
                        const auto& c = choices[0];
                        for (std::size_t i = 0; i < c.counts.size(); ++i)
                            if (c.counts[i]) {
                                g1q = c.lo + static_cast<int>(i);
                                g2q = c.value - g1q;
                            }
                    }
                    visit(d1, m1, m2, cross, g1q, g2q, weight);
                });
        }
    }

    // Positional sum; entries of beta +- c range over [-1, d] as in the
    // definition (negative entries only contribute at d = 0).
    Integer n_tilde_literal(int d, const MultiIndex& alpha, const MultiIndex& beta_twice)
    {
        if (d < 0)
            return 0;
        std::vector<std::pair<int, int>> box;
        for (int t : beta_twice)
            box.emplace_back(std::max(-1, t - d), std::min(d, t + 1));
        Integer total = 0;
        detail::for_each_in_box(box, [&](const MultiIndex& u) {
            MultiIndex m = alpha;
            for (std::size_t j = 0; j < u.size(); ++j) {
                const int v = beta_twice[j] - u[j];
                if (v < -1 || v > d)
                    return;
                m.push_back(u[j]);
                m.push_back(v);
            }
            total += invariant(ClosedKey{d, std::move(m)});
        });
        return total;
    }

    // d >= 1: entries must lie in [0, d], so each beta-entry t = 2 beta_j
    // splits as u + (t - u) with max(0, t - d) <= u <= min(d, t).
    Integer n_tilde_grouped(int d, const MultiIndex& alpha, const MultiIndex& beta_twice)
    {
        for (int a : alpha)
            if (a < 0 || a > d)
                return 0;
        auto groups = detail::run_length(beta_twice);
        Integer total = 0;
        if (groups.empty())
            return invariant(ClosedKey{d, alpha});
        auto range = [&](std::size_t, int t) { return std::pair{std::max(0, t - d), std::min(d, t)}; };
        detail::for_each_group_choice(groups, range,
                                      [&](std::span<const detail::GroupChoice> choices, const Integer& weight) {
                                          MultiIndex m = alpha;
                                          for (const auto& c : choices) {
                                              detail::append_parts(c, m, [](int, int u) { return u; });
                                              detail::append_parts(c, m, [](int t, int u) { return t - u; });
                                          }
                                          Integer n = invariant(ClosedKey{d, std::move(m)});
                                          if (n != 0)
                                              total += weight * n;
                                      });
        return total;
    }

    MemoStore& store_;
    Integer line_seed_;
    // beta stored as twice-values; k unused.
    ConcurrentMap<CanonicalKey, Integer, CanonicalKeyHash> n_tilde_memo_;
};

}  // namespace wdvv

#endif  // WDVV_CLOSED_GW_HPP_
