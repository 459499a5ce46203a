#ifndef WDVV_CORE_INDEX_HPP_
#define WDVV_CORE_INDEX_HPP_

// Index arithmetic for homology classes of the plane blown up at r real points
// and s conjugate pairs.
//
//   [d, alpha, beta]  = d H~ - sum alpha_i F~_i - sum beta_j E~_j   (relative, phi-invariant)
//   (d, a, b, c)      = d L  - sum a_i E_i - sum b_j E_{r+j} - sum c_j E_{r+s+j}

#include "wdvv/rational.hpp"

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wdvv {

using MultiIndex = std::vector<int>;
using HalfMultiIndex = std::vector<HalfInteger>;

inline int abs_sum(std::span<const int> q) { return std::accumulate(q.begin(), q.end(), 0); }

inline HalfInteger abs_sum(std::span<const HalfInteger> q)
{
    int twice = 0;
    for (auto h : q)
        twice += h.twice();
    return HalfInteger::from_twice(twice);
}

inline int dot(std::span<const int> x, std::span<const int> y)
{
    int total = 0;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
        total += x[i] * y[i];
    return total;
}

/// The multi-index [q]: 1 (or `value`) in entry q, zero elsewhere.
inline MultiIndex unit_index(std::size_t length, std::size_t q, int value = 1)
{
    MultiIndex m(length, 0);
    m.at(q) = value;
    return m;
}

inline MultiIndex padded(MultiIndex m, std::size_t length)
{
    if (m.size() < length)
        m.resize(length, 0);
    return m;
}

/// Nonzero entries sorted descending. Classes are symmetric in the blowup
/// points, so this is the canonical representative of a multi-index.
inline MultiIndex canonical_multiset(MultiIndex m)
{
    std::erase(m, 0);
    std::sort(m.begin(), m.end(), std::greater<>());
    return m;
}

struct RelativeClassIndex {
    int d = 0;
    MultiIndex alpha;  // length r
    MultiIndex beta;   // length s
    int k = 0;         // boundary points

    friend bool operator==(const RelativeClassIndex&, const RelativeClassIndex&) = default;
};

struct AbsoluteClass {
    int d = 0;
    MultiIndex a;  // length r
    MultiIndex b;  // length s
    MultiIndex c;  // length s

    friend bool operator==(const AbsoluteClass&, const AbsoluteClass&) = default;
};

/// Ambient-independent key of an open invariant.
struct CanonicalKey {
    int d = 0;
    MultiIndex alpha;  // canonical_multiset
    MultiIndex beta;   // canonical_multiset
    int k = 0;

    friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;
    friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
};

/// Key of a closed invariant N_{(d,m)}, m the concatenation of a, b, c.
struct ClosedKey {
    int d = 0;
    MultiIndex m;

    ClosedKey canonical() const { return {d, canonical_multiset(m)}; }

    friend bool operator==(const ClosedKey&, const ClosedKey&) = default;
    friend auto operator<=>(const ClosedKey&, const ClosedKey&) = default;
};

namespace detail {
inline std::size_t hash_mix(std::size_t seed, std::size_t v)
{
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}
inline std::size_t hash_ints(std::size_t seed, std::span<const int> xs)
{
    seed = hash_mix(seed, xs.size());
    for (int x : xs)
        seed = hash_mix(seed, static_cast<std::size_t>(static_cast<unsigned>(x)));
    return seed;
}
}  // namespace detail

struct CanonicalKeyHash {
    std::size_t operator()(const CanonicalKey& key) const
    {
        std::size_t h = detail::hash_mix(0, static_cast<std::size_t>(key.d));
        h = detail::hash_ints(h, key.alpha);
        h = detail::hash_ints(h, key.beta);
        return detail::hash_mix(h, static_cast<std::size_t>(key.k));
    }
};

struct ClosedKeyHash {
    std::size_t operator()(const ClosedKey& key) const
    {
        return detail::hash_ints(detail::hash_mix(1, static_cast<std::size_t>(key.d)), key.m);
    }
};

// ---------------------------------------------------------------------------
// Gradings

inline int maslov_index(int d, std::span<const int> alpha, std::span<const int> beta)
{
    return 3 * d - abs_sum(alpha) - 2 * abs_sum(beta);
}

/// mu([d,alpha,beta]) = 3d - |alpha| - 2|beta|.
inline int maslov_index(const RelativeClassIndex& c) { return maslov_index(c.d, c.alpha, c.beta); }

inline std::optional<int> interior_points(int mu, int k)
{
    const int twice = mu - k - 1;
    if (twice < 0 || twice % 2 != 0)
        return std::nullopt;
    return twice / 2;
}

/// l = (mu - k - 1)/2 when it is a non-negative integer; empty means the
/// invariant vanishes by grading.
inline std::optional<int> interior_points(const RelativeClassIndex& c)
{
    return interior_points(maslov_index(c), c.k);
}

inline AbsoluteClass double_class(const RelativeClassIndex& c) { return {c.d, c.alpha, c.beta, c.beta}; }

inline int chern_number(const AbsoluteClass& x) { return 3 * x.d - abs_sum(x.a) - abs_sum(x.b) - abs_sum(x.c); }

/// L.L = 1, E_i.E_i = -1, all cross terms zero.
inline int self_intersection(const AbsoluteClass& x)
{
    return x.d * x.d - dot(x.a, x.a) - dot(x.b, x.b) - dot(x.c, x.c);
}

inline CanonicalKey canonicalize(const RelativeClassIndex& c)
{
    return {c.d, canonical_multiset(c.alpha), canonical_multiset(c.beta), c.k};
}

inline CanonicalKey canonicalize(const CanonicalKey& c)
{
    return {c.d, canonical_multiset(c.alpha), canonical_multiset(c.beta), c.k};
}

/// Expands a canonical key into an ambient with r real points and s pairs.
inline RelativeClassIndex expand(const CanonicalKey& key, std::size_t r, std::size_t s)
{
    if (key.alpha.size() > r || key.beta.size() > s)
        throw std::invalid_argument("canonical key does not fit the ambient (r,s)");
    return {key.d, padded(key.alpha, r), padded(key.beta, s), key.k};
}

inline int maslov_index(const CanonicalKey& c) { return maslov_index(c.d, c.alpha, c.beta); }
inline std::optional<int> interior_points(const CanonicalKey& c) { return interior_points(maslov_index(c), c.k); }

// ---------------------------------------------------------------------------
// Partial order

namespace detail {
// -1: x < y strictly somewhere and <= everywhere; 0: equal; 1: otherwise.
inline int componentwise(const MultiIndex& x, const MultiIndex& y)
{
    const std::size_t n = std::max(x.size(), y.size());
    bool strict = false;
    for (std::size_t i = 0; i < n; ++i) {
        const int a = i < x.size() ? x[i] : 0;
        const int b = i < y.size() ? y[i] : 0;
        if (a > b)
            return 1;
        if (a < b)
            strict = true;
    }
    return strict ? -1 : 0;
}

inline MultiIndex sorted_padded(MultiIndex m, std::size_t length)
{
    m.resize(std::max(m.size(), length), 0);
    std::sort(m.begin(), m.end(), std::greater<>());
    return m;
}

inline bool order_less(int d1, int c_alpha, int c_beta, int k1, int d2, int k2)
{
    if (d1 != d2)
        return d1 < d2;
    if (c_alpha == 1 || c_beta == 1)
        return false;
    if (c_alpha == -1 || c_beta == -1)
        return true;
    return k1 < k2;
}
}  // namespace detail

/// ([d',a',b'],k') < ([d,a,b],k): d' < d; or d' = d with a' <= a and b' <= b
/// componentwise, one strictly; or the same class with k' < k. Shorter
/// multi-indices are padded with zeros.
inline bool key_less(const RelativeClassIndex& x, const RelativeClassIndex& y)
{
    return detail::order_less(x.d, detail::componentwise(x.alpha, y.alpha), detail::componentwise(x.beta, y.beta),
                              x.k, y.d, y.k);
}

/// The same order on canonical keys. Sorted dominance is equivalent to the
/// existence of a relabelling of the blowup points with positional dominance.
inline bool key_less(const CanonicalKey& x, const CanonicalKey& y)
{
    const std::size_t r = std::max(x.alpha.size(), y.alpha.size());
    const std::size_t s = std::max(x.beta.size(), y.beta.size());
    const int ca = detail::componentwise(detail::sorted_padded(x.alpha, r), detail::sorted_padded(y.alpha, r));
    const int cb = detail::componentwise(detail::sorted_padded(x.beta, s), detail::sorted_padded(y.beta, s));
    return detail::order_less(x.d, ca, cb, x.k, y.d, y.k);
}

// ---------------------------------------------------------------------------
// Combinatorics

inline Integer binomial(int n, int k)
{
    if (n < 0 || k < 0 || k > n)
        return 0;
    Integer result;
    mpz_bin_uiui(result.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return result;
}

/// n!/(p_1! ... p_t! (n - sum p)!), and zero whenever n or a part is negative
/// or the parts exceed n.
inline Integer guarded_multinomial(int n, std::span<const int> parts)
{
    if (n < 0)
        return 0;
    int rest = n;
    Integer result = 1;
    for (int p : parts) {
        if (p < 0 || p > rest)
            return 0;
        result *= binomial(rest, p);
        rest -= p;
    }
    return result;
}

inline Integer guarded_multinomial(int n, std::initializer_list<int> parts)
{
    return guarded_multinomial(n, std::span<const int>(parts.begin(), parts.size()));
}

// ---------------------------------------------------------------------------
// Notation: comma separated entries, each `v` or `v^n` (n copies of v).

inline MultiIndex parse_multi_index(std::string_view text)
{
    MultiIndex out;
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
            s.remove_suffix(1);
        return s;
    };
    auto to_int = [&](std::string_view s) {
        s = trim(s);
        int v = 0;
        const char* first = s.data();
        if (!s.empty() && s.front() == '+')
            ++first;
        auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
            throw std::invalid_argument("bad multi-index entry '" + std::string(s) + "'");
        return v;
    };
    text = trim(text);
    if (text.empty() || text == "0" || text == "()")
        return out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        std::string_view item = trim(text.substr(start, end - start));
        const std::size_t caret = item.find('^');
        if (caret == std::string_view::npos) {
            out.push_back(to_int(item));
        } else {
            const int value = to_int(item.substr(0, caret));
            const int copies = to_int(item.substr(caret + 1));
            if (copies < 0)
                throw std::invalid_argument("negative repeat count in '" + std::string(item) + "'");
            out.insert(out.end(), static_cast<std::size_t>(copies), value);
        }
        start = end + 1;
    }
    return out;
}

/// Comma separated, no repeat notation: "2,2,1".
inline std::string join_multi_index(std::span<const int> m)
{
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(m[i]);
    }
    return out;
}

/// Compact repeat notation: "3,2^4"; empty index prints as "0".
inline std::string format_multi_index(std::span<const int> m)
{
    if (m.empty())
        return "0";
    std::string out;
    for (std::size_t i = 0; i < m.size();) {
        std::size_t j = i;
        while (j < m.size() && m[j] == m[i])
            ++j;
        if (!out.empty())
            out += ',';
        out += std::to_string(m[i]);
        if (j - i > 1)
            out += "^" + std::to_string(j - i);
        i = j;
    }
    return out;
}

namespace detail {
inline std::string bracketed(std::span<const int> m) { return m.empty() ? "0" : "(" + format_multi_index(m) + ")"; }
}  // namespace detail

/// "[6,(2^8),0],k=1".
inline std::string to_string(const CanonicalKey& key)
{
    return "[" + std::to_string(key.d) + "," + detail::bracketed(key.alpha) + "," + detail::bracketed(key.beta) +
           "],k=" + std::to_string(key.k);
}

inline std::string to_string(const RelativeClassIndex& key)
{
    return "[" + std::to_string(key.d) + ",(" + join_multi_index(key.alpha) + "),(" + join_multi_index(key.beta) +
           ")],k=" + std::to_string(key.k);
}

inline std::string to_string(const ClosedKey& key)
{
    return "(" + std::to_string(key.d) + ",(" + format_multi_index(key.m) + "))";
}

}  // namespace wdvv

#endif  // WDVV_CORE_INDEX_HPP_
