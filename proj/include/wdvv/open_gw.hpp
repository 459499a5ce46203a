#ifndef WDVV_OPEN_GW_HPP_
#define WDVV_OPEN_GW_HPP_

// Open invariants Gamma_{[d,alpha,beta],k}: discs with boundary on the real
// locus through k boundary points and l = (mu - k - 1)/2 interior points.
//
// Each relation equates a multiple of the target with a sum over splittings
// into two open pieces (the "split" sum) and over closed/open pairs, where a
// conjugation-invariant sphere of degree d_F meets a disc of degree
// d_U = d - 2 d_F (the "mixed" sum). Relations 4 and 5 are the differences
// 2 - 1 and 2 + (2/alpha_i) 3a evaluated at [d+1, alpha, beta]; there the
// target reappears in a split with the line disc, and its coefficient is
// read off the resulting linear form.

#include "wdvv/closed_gw.hpp"
#include "wdvv/core_index.hpp"
#include "wdvv/detail/grouping.hpp"
#include "wdvv/errors.hpp"
#include "wdvv/memo_store.hpp"
#include "wdvv/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wdvv {

enum class RelationKind { ogw1, ogw2, ogw3a, ogw3b, ogw4, ogw5a, ogw5b };

/// A relation; `index` is the alpha (3a, 5a) or beta (3b, 5b) position.
struct RelationId {
    RelationKind kind = RelationKind::ogw1;
    std::size_t index = 0;

    friend bool operator==(const RelationId&, const RelationId&) = default;
};

inline bool is_indexed(RelationKind kind)
{
    return kind == RelationKind::ogw3a || kind == RelationKind::ogw3b || kind == RelationKind::ogw5a ||
           kind == RelationKind::ogw5b;
}

inline std::string to_string(RelationId rel)
{
    static const char* names[] = {"OGW1", "OGW2", "OGW3a", "OGW3b", "OGW4", "OGW5a", "OGW5b"};
    std::string out = names[static_cast<int>(rel.kind)];
    if (is_indexed(rel.kind))
        out += "[" + std::to_string(rel.index + 1) + "]";
    return out;
}

/// constant + unknown * Gamma_target = 0.
struct LinearForm {
    Rational constant = 0;
    Rational unknown = 0;

    LinearForm& operator+=(const LinearForm& o)
    {
        constant += o.constant;
        unknown += o.unknown;
        return *this;
    }
    LinearForm& operator-=(const LinearForm& o)
    {
        constant -= o.constant;
        unknown -= o.unknown;
        return *this;
    }
    LinearForm& operator*=(const Rational& x)
    {
        constant *= x;
        unknown *= x;
        return *this;
    }
    bool is_zero() const { return constant == 0 && unknown == 0; }
};

// epsilon is 1 for even Maslov index and sqrt(-1) for odd.

/// epsilon(d') epsilon(d'') / epsilon(d); mu(d) = mu' + mu'', so -1 iff both odd.
inline int eps_ratio_split(int mu1, int mu2) { return (mu1 & 1) && (mu2 & 1) ? -1 : 1; }

/// epsilon(d_U) / epsilon(d): mu(d) - mu(d_U) = 2 (l_F + 1) is even.
inline int eps_ratio_mixed(int mu_U, int mu)
{
    if (((mu - mu_U) & 1) != 0)
        throw consistency_error("mixed term changes the parity of mu");
    return 1;
}

// ---------------------------------------------------------------------------
// Base layer

namespace detail {
inline bool is_exceptional_disc(const CanonicalKey& key)
{
    return key.d == 0 && key.alpha == MultiIndex{-1} && key.beta.empty();
}
}  // namespace detail

inline std::optional<Rational> initial_value(const CanonicalKey& raw)
{
    const CanonicalKey key = canonicalize(raw);
    const bool a0 = key.alpha.empty();
    const bool b0 = key.beta.empty();
    if (detail::is_exceptional_disc(key) && key.k == 0)
        return Rational(2);
    if (key.d != 1)
        return std::nullopt;
    if (a0 && b0 && key.k == 2)
        return Rational(2);
    if (a0 && b0 && key.k == 0)
        return Rational(1);
    if (key.alpha == MultiIndex{1} && b0 && key.k == 1)
        return Rational(2);
    if (a0 && key.beta == MultiIndex{1} && key.k == 0)
        return Rational(2);
    return std::nullopt;
}

inline std::optional<Rational> initial_value(const RelativeClassIndex& c) { return initial_value(canonicalize(c)); }

/// Zero without recursion: grading, the support bounds 0 <= alpha_i, beta_j
/// <= d (the exceptional disc excepted), an empty moduli space when some
/// 2 beta_j > d, and the short lists of nonzero keys in degrees 0 and 1.
inline bool vanishes_a_priori(const CanonicalKey& raw)
{
    const CanonicalKey key = canonicalize(raw);
    if (!interior_points(key))
        return true;
    if (detail::is_exceptional_disc(key) && key.k == 0)
        return false;
    const int d = key.d;
    if (d <= 0)
        return true;
    auto outside = [d](int x) { return x < 0 || x > d; };
    if (std::any_of(key.alpha.begin(), key.alpha.end(), outside) ||
        std::any_of(key.beta.begin(), key.beta.end(), outside))
        return true;
    const bool a0 = key.alpha.empty();
    const bool b0 = key.beta.empty();
    const bool line_pair = d == 1 && a0 && key.beta == MultiIndex{1};
    if (!line_pair && std::any_of(key.beta.begin(), key.beta.end(), [d](int x) { return 2 * x > d; }))
        return true;
    if (d == 1) {
        const bool listed = (a0 && b0 && (key.k == 0 || key.k == 2)) ||
                            (key.alpha == MultiIndex{1} && b0 && key.k == 1) ||
                            (key.alpha == MultiIndex{1, 1} && b0 && key.k == 0) || (line_pair && key.k == 0);
        return !listed;
    }
    return false;
}

inline bool vanishes_a_priori(const RelativeClassIndex& c) { return vanishes_a_priori(canonicalize(c)); }

inline std::optional<std::size_t> first_nonzero(const MultiIndex& m)
{
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i] != 0)
            return i;
    return std::nullopt;
}

/// The relation that determines a key which neither vanishes nor is initial.
inline RelationId select_relation(const RelativeClassIndex& key)
{
    const auto l = interior_points(key);
    if (!l)
        throw no_relation_error("graded-vanishing key " + to_string(key));
    const auto fa = first_nonzero(key.alpha);
    const auto fb = first_nonzero(key.beta);
    if (*l >= 2)
        return {RelationKind::ogw1};
    if (*l == 1) {
        if (key.k >= 1)
            return {RelationKind::ogw2};
        if (fa)
            return {RelationKind::ogw3a, *fa};
        if (fb)
            return {RelationKind::ogw3b, *fb};
    } else {
        if (key.k >= 2)
            return {RelationKind::ogw4};
        if (fa)
            return {RelationKind::ogw5a, *fa};
        if (fb)
            return {RelationKind::ogw5b, *fb};
    }
    throw no_relation_error("no relation applies to " + to_string(key));
}

/// Every relation whose hypotheses hold at the key.
inline std::vector<RelationId> applicable_relations(const RelativeClassIndex& key)
{
    std::vector<RelationId> out;
    const auto l = interior_points(key);
    if (!l)
        return out;
    if (*l >= 2)
        out.push_back({RelationKind::ogw1});
    if (*l >= 1 && key.k >= 1)
        out.push_back({RelationKind::ogw2});
    for (std::size_t i = 0; i < key.alpha.size(); ++i)
        if (*l >= 1 && key.alpha[i] != 0)
            out.push_back({RelationKind::ogw3a, i});
    for (std::size_t j = 0; j < key.beta.size(); ++j)
        if (*l >= 1 && key.beta[j] != 0)
            out.push_back({RelationKind::ogw3b, j});
    if (key.k >= 2)
        out.push_back({RelationKind::ogw4});
    for (std::size_t i = 0; i < key.alpha.size(); ++i)
        if (key.alpha[i] != 0)
            out.push_back({RelationKind::ogw5a, i});
    for (std::size_t j = 0; j < key.beta.size(); ++j)
        if (key.beta[j] != 0)
            out.push_back({RelationKind::ogw5b, j});
    return out;
}

// ---------------------------------------------------------------------------
// Index sets, positional

struct OpenPiece {
    int d = 0;
    MultiIndex alpha;
    MultiIndex beta;
    int k = 0;
    int l = 0;

    RelativeClassIndex index() const { return {d, alpha, beta, k}; }
};

struct SplitTuple {
    OpenPiece left;
    OpenPiece right;
};

struct MixedTuple {
    int d_F = 0;
    MultiIndex alpha_F;
    HalfMultiIndex beta_F;
    int l_F = 0;
    OpenPiece open;
};

/// Visits the split index set of ([d,alpha,beta],k): d'+d'' = d,
/// alpha'+alpha'' = alpha, beta'+beta'' = beta with d', d'', k', k'' >= 0,
/// -1 <= alpha'_i <= d', -1 <= alpha''_i <= d'', 0 <= 2beta'_j <= d'+1,
/// 0 <= 2beta''_j <= d''+1 and both l', l'' non-negative integers. The
/// boundary counts are not tied to k; l' >= 0 bounds them.
template <class Visit>
void for_each_split(const RelativeClassIndex& t, Visit&& visit)
{
    const std::size_t r = t.alpha.size();
    const std::size_t s = t.beta.size();
    for (int d1 = 0; d1 <= t.d; ++d1) {
        const int d2 = t.d - d1;
        std::vector<std::pair<int, int>> box;
        for (int a : t.alpha)
            box.emplace_back(std::max(-1, a - d2), std::min(d1, a + 1));
        for (int b : t.beta)
            box.emplace_back(std::max(0, b - (d2 + 1) / 2), std::min((d1 + 1) / 2, b));
        detail::for_each_in_box(box, [&](const MultiIndex& x) {
            OpenPiece p1, p2;
            p1.d = d1;
            p2.d = d2;
            p1.alpha.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(r));
            p1.beta.assign(x.begin() + static_cast<std::ptrdiff_t>(r), x.end());
            p2.alpha.resize(r);
            p2.beta.resize(s);
            for (std::size_t i = 0; i < r; ++i)
                p2.alpha[i] = t.alpha[i] - p1.alpha[i];
            for (std::size_t j = 0; j < s; ++j)
                p2.beta[j] = t.beta[j] - p1.beta[j];
            const int mu1 = maslov_index(p1.d, p1.alpha, p1.beta);
            const int mu2 = maslov_index(p2.d, p2.alpha, p2.beta);
            for (int k1 = 0; k1 <= mu1 - 1; ++k1) {
                const auto l1 = interior_points(mu1, k1);
                if (!l1)
                    continue;
                for (int k2 = 0; k2 <= mu2 - 1; ++k2) {
                    const auto l2 = interior_points(mu2, k2);
                    if (!l2)
                        continue;
                    p1.k = k1;
                    p1.l = *l1;
                    p2.k = k2;
                    p2.l = *l2;
                    visit(SplitTuple{p1, p2});
                }
            }
        });
    }
}

inline std::vector<SplitTuple> enumerate_split(const RelativeClassIndex& target)
{
    std::vector<SplitTuple> out;
    for_each_split(target, [&](SplitTuple t) { out.push_back(std::move(t)); });
    return out;
}

/// Visits the mixed index set of ([d,alpha,beta],k): 2d_F + d_U = d,
/// 2alpha_F + alpha_U = alpha, 2beta_F + beta_U = beta, l_F = 3d_F -
/// |alpha_F| - 2|beta_F| - 1 >= 0 and l_U a non-negative integer. Entries are
/// bounded by the supports of the two factors: -1 <= alpha_U <= d_U,
/// 0 <= beta_U <= d_U, -1 <= alpha_F <= d_F, -1 <= beta_F <= d_F.
template <class Visit>
void for_each_mixed(const RelativeClassIndex& t, Visit&& visit)
{
    const std::size_t r = t.alpha.size();
    for (int dF = 0; 2 * dF <= t.d; ++dF) {
        const int dU = t.d - 2 * dF;
        std::vector<std::pair<int, int>> box;  // alpha_U, then beta_U
        for (std::size_t i = 0; i < r; ++i)
            box.emplace_back(-1, dU);
        for (int b : t.beta)
            box.emplace_back(std::max(0, b - 2 * dF), std::min(dU, b + 2));
        detail::for_each_in_box(box, [&](const MultiIndex& x) {
            MixedTuple m;
            m.d_F = dF;
            m.open.d = dU;
            int twice_beta_F = 0;
            for (std::size_t i = 0; i < r; ++i) {
                const int u = x[i];
                if ((t.alpha[i] - u) % 2 != 0)
                    return;
                const int f = (t.alpha[i] - u) / 2;
                if (f < -1 || f > dF)
                    return;
                m.alpha_F.push_back(f);
                m.open.alpha.push_back(u);
            }
            for (std::size_t j = 0; j < t.beta.size(); ++j) {
                const int u = x[r + j];
                const int tf = t.beta[j] - u;
                if (tf < -2 || tf > 2 * dF)
                    return;
                m.beta_F.push_back(HalfInteger::from_twice(tf));
                m.open.beta.push_back(u);
                twice_beta_F += tf;
            }
            m.l_F = 3 * dF - abs_sum(m.alpha_F) - twice_beta_F - 1;
            if (m.l_F < 0)
                return;
            m.open.k = t.k;
            const auto lU = interior_points(maslov_index(m.open.d, m.open.alpha, m.open.beta), t.k);
            if (!lU)
                return;
            m.open.l = *lU;
            visit(m);
        });
    }
}

inline std::vector<MixedTuple> enumerate_mixed(const RelativeClassIndex& target)
{
    std::vector<MixedTuple> out;
    for_each_mixed(target, [&](MixedTuple t) { out.push_back(std::move(t)); });
    return out;
}

// ---------------------------------------------------------------------------
// Engine

struct OpenOptions {
    Enumeration enumeration = Enumeration::grouped;
    /// Check that every recursive lookup strictly decreases the order.
    bool check_well_founded = false;
};

struct GammaTrace {
    Rational value;
    std::optional<RelationId> relation;  // empty for vanishing or initial keys
    int depth = 0;                       // longest chain of relation evaluations
    std::size_t evaluated = 0;           // keys newly computed by this call
};

class OpenEngine {
public:
    OpenEngine(MemoStore& store, ClosedEngine& closed, OpenOptions options = {})
        : store_(store), closed_(closed), options_(options)
    {
    }

    Rational gamma(const RelativeClassIndex& key) { return gamma(canonicalize(key)); }

    Rational gamma(const CanonicalKey& key)
    {
        Context ctx;
        return lookup(canonicalize(key), ctx, 0);
    }

    GammaTrace gamma_traced(const RelativeClassIndex& raw)
    {
        const CanonicalKey key = canonicalize(raw);
        Context ctx;
        GammaTrace out;
        out.value = lookup(key, ctx, 0);
        if (!vanishes_a_priori(key) && !initial_value(key))
            out.relation = select_relation(expand(key, key.alpha.size(), key.beta.size()));
        out.depth = ctx.max_depth;
        out.evaluated = ctx.evaluated;
        return out;
    }

    /// The relation at a positional target as a linear form in Gamma_target.
    LinearForm relation_linear_form(RelationId rel, const RelativeClassIndex& target,
                                    std::optional<Enumeration> mode = {})
    {
        Context ctx;
        const CanonicalKey unknown = canonicalize(target);
        ctx.path.push_back(unknown);
        return form(rel, target, unknown, mode.value_or(options_.enumeration), ctx);
    }

    /// Gamma_target from one relation.
    Rational eval_relation(RelationId rel, const RelativeClassIndex& target, std::optional<Enumeration> mode = {})
    {
        const LinearForm f = relation_linear_form(rel, target, mode);
        if (f.unknown == 0)
            throw zero_coefficient_error(to_string(rel) + " does not involve " + to_string(target));
        return -f.constant / f.unknown;
    }

    MemoStore& store() { return store_; }
    ClosedEngine& closed() { return closed_; }
    const OpenOptions& options() const { return options_; }

private:
    struct Context {
        std::vector<CanonicalKey> path;
        int max_depth = 0;
        std::size_t evaluated = 0;
    };

    Rational lookup(const CanonicalKey& key, Context& ctx, int depth)
    {
        if (vanishes_a_priori(key))
            return 0;
        if (auto v = initial_value(key))
            return *v;
        if (auto hit = store_.open.find(key))
            return *hit;
        if (std::find(ctx.path.begin(), ctx.path.end(), key) != ctx.path.end())
            throw recursion_cycle_error("open recursion revisits " + to_string(key));
        const RelativeClassIndex target = expand(key, key.alpha.size(), key.beta.size());
        const RelationId rel = select_relation(target);
        ctx.path.push_back(key);
        ctx.max_depth = std::max(ctx.max_depth, depth + 1);
        const LinearForm f = form(rel, target, key, options_.enumeration, ctx, depth + 1);
        ctx.path.pop_back();
        if (f.unknown == 0)
            throw zero_coefficient_error(to_string(rel) + " has zero coefficient at " + to_string(key));
        ++ctx.evaluated;
        return store_.open.insert(key, Rational(-f.constant / f.unknown));
    }

    // --- relation assembly -------------------------------------------------

    LinearForm form(RelationId rel, const RelativeClassIndex& t, const CanonicalKey& unknown, Enumeration mode,
                    Context& ctx, int depth = 1)
    {
        switch (rel.kind) {
        case RelationKind::ogw1:
        case RelationKind::ogw2:
        case RelationKind::ogw3a:
        case RelationKind::ogw3b: {
            auto [lhs, rhs] = base(rel, t, unknown, mode, ctx, depth);
            rhs.unknown -= lhs;
            return rhs;
        }
        case RelationKind::ogw4: {
            if (t.k < 2)
                throw no_relation_error("OGW4 needs k >= 2 at " + to_string(t));
            const RelativeClassIndex up{t.d + 1, t.alpha, t.beta, t.k - 1};
            auto r2 = base({RelationKind::ogw2}, up, unknown, mode, ctx, depth).second;
            auto r1 = base({RelationKind::ogw1}, up, unknown, mode, ctx, depth).second;
            r2 -= r1;
            return r2;
        }
        case RelationKind::ogw5a:
        case RelationKind::ogw5b: {
            const bool a = rel.kind == RelationKind::ogw5a;
            const int entry = a ? t.alpha.at(rel.index) : t.beta.at(rel.index);
            if (entry == 0)
                throw no_relation_error(to_string(rel) + " needs a nonzero entry at " + to_string(t));
            const RelativeClassIndex up{t.d + 1, t.alpha, t.beta, t.k + 1};
            auto rp = base({RelationKind::ogw2}, up, unknown, mode, ctx, depth).second;
            auto [l3, r3] =
                base({a ? RelationKind::ogw3a : RelationKind::ogw3b, rel.index}, up, unknown, mode, ctx, depth);
            r3 *= Rational(1) / l3;
            rp -= r3;
            return rp;
        }
        }
        throw no_relation_error("unknown relation");
    }

    // One of the four base relations at t: lhs * Gamma_t = rhs, where rhs is
    // linear in the unknown (which appears only when t is a degree bump).
    std::pair<Rational, LinearForm> base(RelationId rel, const RelativeClassIndex& t, const CanonicalKey& unknown,
                                         Enumeration mode, Context& ctx, int depth)
    {
        const auto L = interior_points(t);
        if (!L)
            throw no_relation_error("graded-vanishing target " + to_string(t));
        const bool need_l2 = rel.kind == RelationKind::ogw1;
        if ((need_l2 && *L < 2) || (!need_l2 && *L < 1) || (rel.kind == RelationKind::ogw2 && t.k < 1))
            throw no_relation_error(to_string(rel) + " does not apply at " + to_string(t));

        Setting st{rel, t.d, t.k, *L, t.alpha, t.beta, maslov_index(t)};
        LinearForm rhs;
        Rational lhs = 1;
        if (rel.kind == RelationKind::ogw3a)
            lhs = Rational(-t.alpha.at(rel.index), 2);
        if (rel.kind == RelationKind::ogw3b)
            lhs = Rational(-t.beta.at(rel.index), 2);
        lhs.canonicalize();

        auto piece_key = [](int d, const MultiIndex& alpha, const MultiIndex& beta, int k) {
            return CanonicalKey{d, canonical_multiset(alpha), canonical_multiset(beta), k};
        };

        // split sum
        auto add_split = [&](const SplitPiece& p1, const SplitPiece& p2, const Integer& weight) {
            const Rational c = split_coefficient(st, p1, p2);
            if (c == 0)
                return;
            // Screen both factors before recursing into either: a same-degree
            // piece next to a vanishing one need not be smaller than the target.
            const CanonicalKey k1 = piece_key(p1.d, p1.alpha, p1.beta, p1.k);
            const CanonicalKey k2 = piece_key(p2.d, p2.alpha, p2.beta, p2.k);
            if (vanishes_a_priori(k1) || vanishes_a_priori(k2))
                return;
            LinearForm g1 = value(k1, unknown, ctx, depth);
            if (g1.is_zero())
                return;
            LinearForm g2 = value(k2, unknown, ctx, depth);
            if (g2.is_zero())
                return;
            if (g1.unknown != 0 && g2.unknown != 0)
                throw consistency_error("unknown appears twice in one split term");
            LinearForm prod{g1.constant * g2.constant, g1.unknown * g2.constant + g1.constant * g2.unknown};
            prod *= c * eps_ratio_split(p1.mu, p2.mu) * Rational(weight);
            rhs += prod;
        };
        // mixed sum
        auto add_mixed = [&](const MixedPiece& m, const Integer& weight) {
            const Rational c = mixed_coefficient(st, m);
            if (c == 0)
                return;
            LinearForm gu = value(piece_key(m.dU, m.alphaU, m.betaU, t.k), unknown, ctx, depth);
            if (gu.is_zero())
                return;
            const Integer nt = closed_.n_tilde_twice(m.dF, m.alphaF, m.betaF2);
            if (nt == 0)
                return;
            gu *= c * eps_ratio_mixed(maslov_index(m.dU, m.alphaU, m.betaU), st.mu) * Rational(nt * weight);
            rhs += gu;
        };

        if (mode == Enumeration::literal)
            literal_terms(st, add_split, add_mixed);
        else
            grouped_terms(st, add_split, add_mixed);

        if (rel.kind == RelationKind::ogw2 && t.k == 1) {
            // (d^2/4) Ñ_{[d/2, alpha/2, beta/2]}
            const bool integral = t.d % 2 == 0 && std::all_of(t.alpha.begin(), t.alpha.end(), [](int a) {
                return a % 2 == 0;
            });
            if (integral) {
                MultiIndex half_alpha;
                for (int a : t.alpha)
                    half_alpha.push_back(a / 2);
                const Integer nt = closed_.n_tilde_twice(t.d / 2, half_alpha, t.beta);
                Rational delta(t.d * t.d, 4);
                delta.canonicalize();
                rhs.constant -= delta * Rational(nt);
            }
        }
        return {lhs, rhs};
    }

    struct Setting {
        RelationId rel;
        int D, K, L;
        const MultiIndex& A;
        const MultiIndex& B;
        int mu;
    };

    // Pieces as seen by the coefficient formulas; `dist` is the entry at the
    // relation's distinguished position (alpha for 3a, beta for 3b).
    struct SplitPiece {
        int d = 0;
        MultiIndex alpha, beta;
        int k = 0, l = 0, mu = 0;
        int dist = 0;
    };

    struct MixedPiece {
        int dF = 0;
        MultiIndex alphaF, betaF2;  // beta_F as twice-values
        int lF = 0;
        int dU = 0;
        MultiIndex alphaU, betaU;
        int lU = 0;
        long long x4 = 0;  // 4 (d_F d_U/2 - alpha_F.alpha_U/2 - beta_F.beta_U)
        int distF2 = 0;    // twice the distinguished closed entry
        int distU = 0;
    };

    static Integer mult(int n, int a, int b) { return guarded_multinomial(n, {a, b}); }

    static Rational q(const Integer& num, long den)
    {
        Rational r(num, Integer(den));
        r.canonicalize();
        return r;
    }

    static Rational split_coefficient(const Setting& st, const SplitPiece& p1, const SplitPiece& p2)
    {
        const int K = st.K, L = st.L;
        const int d1 = p1.d, d2 = p2.d;
        switch (st.rel.kind) {
        case RelationKind::ogw1: {
            // C(k;k',k''-1) d'/2 [C(l-2;l'-1,l'') d''/2 - C(l-2;l',l''-1) d'/2]
            const Integer a = mult(K, p1.k, p2.k - 1);
            if (a == 0)
                return 0;
            const Integer b = mult(L - 2, p1.l - 1, p2.l) * d2 - mult(L - 2, p1.l, p2.l - 1) * d1;
            return q(a * d1 * b, 4);
        }
        case RelationKind::ogw2: {
            // C(l-1;l',l'') d'/2 [C(k-1;k'-1,k''-1) d''/2 - C(k-1;k',k''-2) d'/2]
            const Integer a = mult(L - 1, p1.l, p2.l);
            if (a == 0)
                return 0;
            const Integer b = mult(K - 1, p1.k - 1, p2.k - 1) * d2 - mult(K - 1, p1.k, p2.k - 2) * d1;
            return q(a * d1 * b, 4);
        }
        case RelationKind::ogw3a:
        case RelationKind::ogw3b: {
            // C(k;k',k''-1) C(l-1;l',l'') d'/2 (d' x''_i - d'' x'_i)/4
            const Integer a = mult(K, p1.k, p2.k - 1) * mult(L - 1, p1.l, p2.l);
            if (a == 0)
                return 0;
            return q(a * d1 * (d1 * p2.dist - d2 * p1.dist), 8);
        }
        default:
            return 0;
        }
    }

    static Rational mixed_coefficient(const Setting& st, const MixedPiece& m)
    {
        const int L = st.L;
        const Rational x = q(Integer(static_cast<long>(m.x4)), 4);
        switch (st.rel.kind) {
        case RelationKind::ogw1: {
            // d_F x [C(l-2;l_F-1,l_U) d_U/2 - C(l-2;l_F,l_U-1) d_F]
            const Integer b = mult(L - 2, m.lF - 1, m.lU) * m.dU - 2 * mult(L - 2, m.lF, m.lU - 1) * m.dF;
            return x * q(b * m.dF, 2);
        }
        case RelationKind::ogw2:
            // -C(l-1;l_F,l_U) d_F^2 x
            return -x * Rational(mult(L - 1, m.lF, m.lU) * m.dF * m.dF);
        case RelationKind::ogw3a:
            // C(l-1;l_F,l_U) d_F ((alpha_F)_i d_U/2 - d_F (alpha_U)_i/2) (-x)
            return -x * q(mult(L - 1, m.lF, m.lU) * m.dF * (m.distF2 * m.dU - 2 * m.dF * m.distU), 4);
        case RelationKind::ogw3b:
            // C(l-1;l_F,l_U) d_F ((beta_F)_j d_U/2 - d_F (beta_U)_j/2) (-x)
            return -x * q(mult(L - 1, m.lF, m.lU) * m.dF * (m.distF2 * m.dU - 2 * m.dF * m.distU), 4);
        default:
            return 0;
        }
    }

    LinearForm value(const CanonicalKey& key, const CanonicalKey& unknown, Context& ctx, int depth)
    {
        if (key == unknown)
            return vanishes_a_priori(key) ? LinearForm{} : LinearForm{0, 1};
        if (options_.check_well_founded && !vanishes_a_priori(key) && !initial_value(key) &&
            !key_less(key, unknown))
            throw consistency_error("recursion step " + to_string(unknown) + " -> " + to_string(key) +
                                    " does not decrease the order");
        return {lookup(key, ctx, depth), 0};
    }

    // --- positional enumeration over the full index sets -------------------

    template <class AddSplit, class AddMixed>
    void literal_terms(const Setting& st, AddSplit& add_split, AddMixed& add_mixed)
    {
        const RelativeClassIndex t{st.D, st.A, st.B, st.K};
        const bool on_alpha = st.rel.kind == RelationKind::ogw3a;
        const bool on_beta = st.rel.kind == RelationKind::ogw3b;
        auto dist_of = [&](const MultiIndex& alpha, const MultiIndex& beta) {
            return on_alpha ? alpha[st.rel.index] : on_beta ? beta[st.rel.index] : 0;
        };
        const Integer one = 1;
        for_each_split(t, [&](const SplitTuple& s) {
            SplitPiece p1{s.left.d, s.left.alpha, s.left.beta, s.left.k, s.left.l,
                          maslov_index(s.left.d, s.left.alpha, s.left.beta), dist_of(s.left.alpha, s.left.beta)};
            SplitPiece p2{s.right.d, s.right.alpha, s.right.beta, s.right.k, s.right.l,
                          maslov_index(s.right.d, s.right.alpha, s.right.beta), dist_of(s.right.alpha, s.right.beta)};
            add_split(p1, p2, one);
        });
        for_each_mixed(t, [&](const MixedTuple& m) {
            MixedPiece p;
            p.dF = m.d_F;
            p.alphaF = m.alpha_F;
            for (auto b : m.beta_F)
                p.betaF2.push_back(b.twice());
            p.lF = m.l_F;
            p.dU = m.open.d;
            p.alphaU = m.open.alpha;
            p.betaU = m.open.beta;
            p.lU = m.open.l;
            p.x4 = 2LL * p.dF * p.dU - 2LL * dot(p.alphaF, p.alphaU) - 2LL * dot(p.betaF2, p.betaU);
            if (on_alpha) {
                p.distF2 = 2 * p.alphaF[st.rel.index];
                p.distU = p.alphaU[st.rel.index];
            } else if (on_beta) {
                p.distF2 = p.betaF2[st.rel.index];
                p.distU = p.betaU[st.rel.index];
            }
            add_mixed(p, one);
        });
    }

    // --- grouped enumeration ------------------------------------------------
    //
    // Positions with equal target entries are interchangeable and zero
    // entries admit only zero parts, so each sum runs over histograms per
    // group. The distinguished position of 3a/3b is a group of its own.
    // Degree-zero pieces are skipped: every coefficient carries a factor that
    // kills them (d' for the first piece, a negative multinomial index for the
    // second, d_F for the closed part). The boundary counts satisfy
    // k' + k'' = k + 1, the only case with nonzero guarded multinomials.

    struct Layout {
        std::vector<detail::ValueGroup> groups;
        std::size_t alpha_groups = 0;  // groups [0, alpha_groups) are alpha
        bool dist_alpha = false, dist_beta = false;
    };

    static Layout layout(const Setting& st)
    {
        Layout lay;
        lay.dist_alpha = st.rel.kind == RelationKind::ogw3a;
        lay.dist_beta = st.rel.kind == RelationKind::ogw3b;
        auto add = [&](const MultiIndex& m, bool distinguished) {
            MultiIndex rest = m;
            if (distinguished) {
                lay.groups.push_back({m.at(st.rel.index), 1});
                rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(st.rel.index));
            }
            std::erase(rest, 0);
            for (auto g : detail::run_length(rest))
                lay.groups.push_back(g);
        };
        add(st.A, lay.dist_alpha);
        lay.alpha_groups = lay.groups.size();
        add(st.B, lay.dist_beta);
        return lay;
    }

    static int single_part(const detail::GroupChoice& c)
    {
        for (std::size_t i = 0; i < c.counts.size(); ++i)
            if (c.counts[i])
                return c.lo + static_cast<int>(i);
        return 0;
    }

    template <class AddSplit, class AddMixed>
    void grouped_terms(const Setting& st, AddSplit& add_split, AddMixed& add_mixed)
    {
        const Layout lay = layout(st);
        const std::size_t alpha_end = lay.alpha_groups;
        const std::size_t dist_group = lay.dist_alpha ? 0 : alpha_end;
        const bool has_dist = lay.dist_alpha || lay.dist_beta;

        for (int d1 = 1; d1 < st.D; ++d1) {
            const int d2 = st.D - d1;
            auto range = [&](std::size_t g, int v) {
                if (g < alpha_end)
                    return std::pair{std::max(0, v - d2), std::min(d1, v)};
                return std::pair{std::max({0, v - d2, v - (d2 + 1) / 2}), std::min({d1, v, (d1 + 1) / 2})};
            };
            detail::for_each_group_choice(
                lay.groups, range, [&](std::span<const detail::GroupChoice> choices, const Integer& weight) {
                    SplitPiece p1, p2;
                    p1.d = d1;
                    p2.d = d2;
                    for (std::size_t g = 0; g < choices.size(); ++g) {
                        auto& a1 = g < alpha_end ? p1.alpha : p1.beta;
                        auto& a2 = g < alpha_end ? p2.alpha : p2.beta;
                        detail::append_parts(choices[g], a1, [](int, int x) { return x; });
                        detail::append_parts(choices[g], a2, [](int v, int x) { return v - x; });
                    }
                    if (has_dist) {
                        p1.dist = single_part(choices[dist_group]);
                        p2.dist = choices[dist_group].value - p1.dist;
                    }
                    p1.mu = maslov_index(d1, p1.alpha, p1.beta);
                    p2.mu = maslov_index(d2, p2.alpha, p2.beta);
                    for (int k1 = 0; k1 <= st.K + 1; ++k1) {
                        const int k2 = st.K + 1 - k1;
                        const auto l1 = interior_points(p1.mu, k1);
                        const auto l2 = interior_points(p2.mu, k2);
                        if (!l1 || !l2)
                            continue;
                        p1.k = k1;
                        p1.l = *l1;
                        p2.k = k2;
                        p2.l = *l2;
                        add_split(p1, p2, weight);
                    }
                });
        }

        for (int dF = 1; 2 * dF <= st.D; ++dF) {
            const int dU = st.D - 2 * dF;
            // alpha groups choose (alpha_F)_i = f, so (alpha_U)_i = v - 2f >= -1;
            // beta groups choose t = 2(beta_F)_j, so (beta_U)_j = v - t >= 0.
            auto range = [&](std::size_t g, int v) {
                if (g < alpha_end)
                    return std::pair{std::max(0, (v - dU + 1) / 2), std::min(dF, (v + 1) / 2)};
                return std::pair{std::max(0, v - dU), std::min(2 * dF, v)};
            };
            detail::for_each_group_choice(
                lay.groups, range, [&](std::span<const detail::GroupChoice> choices, const Integer& weight) {
                    MixedPiece m;
                    m.dF = dF;
                    m.dU = dU;
                    long long cross = 0;  // 2 alpha_F.alpha_U + 4 beta_F.beta_U
                    for (std::size_t g = 0; g < choices.size(); ++g) {
                        if (g < alpha_end) {
                            detail::append_parts(choices[g], m.alphaF, [](int, int f) { return f; });
                            detail::append_parts(choices[g], m.alphaU, [](int v, int f) { return v - 2 * f; });
                        } else {
                            detail::append_parts(choices[g], m.betaF2, [](int, int t) { return t; });
                            detail::append_parts(choices[g], m.betaU, [](int v, int t) { return v - t; });
                        }
                    }
                    cross = detail::sum_parts(choices.first(alpha_end),
                                              [](int v, int f) { return 2 * f * (v - 2 * f); }) +
                            detail::sum_parts(choices.subspan(alpha_end), [](int v, int t) { return 2 * t * (v - t); });
                    m.lF = 3 * dF - abs_sum(m.alphaF) - abs_sum(m.betaF2) - 1;
                    if (m.lF < 0)
                        return;
                    const auto lU = interior_points(maslov_index(dU, m.alphaU, m.betaU), st.K);
                    if (!lU)
                        return;
                    m.lU = *lU;
                    m.x4 = 2LL * dF * dU - cross;
                    if (has_dist) {
                        const int part = single_part(choices[dist_group]);
                        const int v = choices[dist_group].value;
                        if (lay.dist_alpha) {
                            m.distF2 = 2 * part;
                            m.distU = v - 2 * part;
                        } else {
                            m.distF2 = part;
                            m.distU = v - part;
                        }
                    }
                    add_mixed(m, weight);
                });
        }
    }

    MemoStore& store_;
    ClosedEngine& closed_;
    OpenOptions options_;
};

}  // namespace wdvv

#endif  // WDVV_OPEN_GW_HPP_
