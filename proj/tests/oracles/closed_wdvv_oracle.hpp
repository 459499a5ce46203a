#pragma once

// Brute-force closed WDVV for the plane blown up at n points, independent of
// the engine's hand-derived recursions. The potential's third derivatives
// are expanded term by term (classical triple intersections plus the
// quantum part, using only the divisor axiom) and the WDVV residual of an
// arbitrary index quadruple is evaluated as a coefficient of
// q^beta t_p^j / j!. Unknown invariants are solved one class at a time by
// exploiting that the residual is affine in the unknowns.

#include "wdvv/rational.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace oracle {

using wdvv::Integer;

inline Integer choose(int n, int k)
{
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

struct Cls {
    int d = 0;
    std::vector<int> m;
    auto operator<=>(const Cls&) const = default;
};

/// Basis: 0 unit, 1 line, 2..n+1 exceptional, n+2 point.
class ClosedWdvv {
public:
    using Lookup = std::function<Integer(const Cls&)>;

    ClosedWdvv(int points, Lookup n) : n_(points), lookup_(std::move(n)) {}

    int basis_size() const { return n_ + 3; }
    int point() const { return n_ + 2; }

    int degree(int a) const { return a == 0 ? 0 : a == point() ? 2 : 1; }

    /// c1 + 2 - sum of degrees: the only t_p power where the residual can be nonzero.
    std::optional<int> power(const std::array<int, 4>& q, const Cls& beta) const
    {
        int c1 = 3 * beta.d;
        for (int x : beta.m)
            c1 -= x;
        const int j = c1 + 2 - degree(q[0]) - degree(q[1]) - degree(q[2]) - degree(q[3]);
        if (j < 0)
            return std::nullopt;
        return j;
    }

    /// LHS - RHS of sum Phi_{ab nu} g^{nu mu} Phi_{mu ce} = sum Phi_{ac nu} g^{nu mu} Phi_{mu be}.
    Integer residual(const std::array<int, 4>& q, const Cls& beta) const
    {
        const auto j = power(q, beta);
        if (!j)
            return 0;
        return contraction(q[0], q[1], q[2], q[3], beta, *j) - contraction(q[0], q[2], q[1], q[3], beta, *j);
    }

private:
    // Coefficient of q^g t^j/j! in Phi_{abc}.
    Integer third(int a, int b, int c, const Cls& g, int j) const
    {
        const bool zero = g.d == 0 && std::all_of(g.m.begin(), g.m.end(), [](int x) { return x == 0; });
        if (zero) {
            if (j != 0)
                return 0;
            std::array<int, 3> s{a, b, c};
            std::sort(s.begin(), s.end());
            if (s[0] == 0 && s[1] == 0 && s[2] == point())
                return 1;
            if (s[0] == 0 && s[1] == 1 && s[2] == 1)
                return 1;
            if (s[0] == 0 && s[1] >= 2 && s[1] == s[2] && s[1] < point())
                return -1;
            return 0;
        }
        int points = 0;
        Integer factor = 1;
        for (int x : {a, b, c}) {
            if (x == 0)
                return 0;
            if (x == point())
                ++points;
            else if (x == 1)
                factor *= g.d;
            else
                factor *= g.m[static_cast<std::size_t>(x - 2)];  // beta . E_i = m_i
        }
        int c1 = 3 * g.d;
        for (int x : g.m)
            c1 -= x;
        const int n = c1 - 1;
        if (n < 0 || n - points != j || factor == 0)
            return 0;
        return lookup_(g) * factor;
    }

    Integer contraction(int a, int b, int c, int e, const Cls& beta, int j) const
    {
        Integer total = 0;
        // g^{nu mu}: (unit, point) both ways, (line, line) = 1, (E_i, E_i) = -1.
        std::vector<std::array<int, 3>> pairs = {{0, point(), 1}, {point(), 0, 1}, {1, 1, 1}};
        for (int i = 0; i < n_; ++i)
            pairs.push_back({2 + i, 2 + i, -1});
        // Split beta = g1 + g2 over a box containing every supported class.
        std::vector<int> lo(static_cast<std::size_t>(n_)), hi(static_cast<std::size_t>(n_));
        for (int d1 = 0; d1 <= beta.d; ++d1) {
            const int d2 = beta.d - d1;
            for (int i = 0; i < n_; ++i) {
                const int x = beta.m[static_cast<std::size_t>(i)];
                lo[static_cast<std::size_t>(i)] = std::max(-1, x - d2);
                hi[static_cast<std::size_t>(i)] = std::min(d1, x + 1);
            }
            Cls g1{d1, lo};
            bool ok = true;
            for (int i = 0; i < n_; ++i)
                ok = ok && lo[static_cast<std::size_t>(i)] <= hi[static_cast<std::size_t>(i)];
            while (ok) {
                Cls g2{d2, beta.m};
                for (int i = 0; i < n_; ++i)
                    g2.m[static_cast<std::size_t>(i)] -= g1.m[static_cast<std::size_t>(i)];
                for (int j1 = 0; j1 <= j; ++j1) {
                    for (const auto& [nu, mu, g] : pairs) {
                        const Integer x = third(a, b, nu, g1, j1);
                        if (x == 0)
                            continue;
                        const Integer y = third(mu, c, e, g2, j - j1);
                        if (y == 0)
                            continue;
                        total += choose(j, j1) * x * y * g;
                    }
                }
                int i = 0;
                for (; i < n_; ++i) {
                    auto& v = g1.m[static_cast<std::size_t>(i)];
                    if (v < hi[static_cast<std::size_t>(i)]) {
                        ++v;
                        break;
                    }
                    v = lo[static_cast<std::size_t>(i)];
                }
                if (i == n_)
                    break;
            }
        }
        return total;
    }

    int n_;
    Lookup lookup_;
};

/// Solves N degree by degree over n points, seeded only by N_line and N_E.
/// The unknowns of degree d are all classes with -1 <= m_i <= d; classes
/// outside that box are taken to vanish (non-effective), and nothing else is
/// assumed, so the values at -1 entries come out of the equations. At degree
/// d the residual of a quadruple at beta is affine in the unknowns beta and
/// beta - E_i (the only degree-d halves of a split with a nonzero degree-0
/// half), so collecting residuals over all beta with -2 <= m_i <= d gives a
/// linear system, reduced exactly until it has full rank.
class ClosedSolver {
public:
    ClosedSolver(int points, int dmax, Integer line_seed = 1) : n_(points)
    {
        ClosedWdvv w(n_, [this](const Cls& c) { return value(c); });
        for (int d = 1; d <= dmax; ++d) {
            index_.clear();
            std::vector<Cls> unknowns;
            for (const Cls& c : box(d, -1, d)) {
                if (chern(c) - 1 < 0)
                    table_[c] = 0;
                else if (d == 1 && std::all_of(c.m.begin(), c.m.end(), [](int x) { return x == 0; }))
                    table_[c] = line_seed;
                else {
                    index_[c] = unknowns.size();
                    unknowns.push_back(c);
                }
            }
            trial_.assign(unknowns.size(), 0);
            Elimination system(unknowns.size());
            // beta together with the unknowns its residuals involve
            std::vector<std::pair<Cls, std::vector<std::size_t>>> equations;
            for (const Cls& beta : box(d, -2, d)) {
                std::vector<std::size_t> involved;
                auto add = [&](const Cls& c) {
                    auto it = index_.find(c);
                    if (it != index_.end() && std::find(involved.begin(), involved.end(), it->second) == involved.end())
                        involved.push_back(it->second);
                };
                add(beta);
                for (int i = 0; i < n_; ++i) {
                    Cls g = beta;
                    ++g.m[static_cast<std::size_t>(i)];
                    add(g);
                }
                if (!involved.empty())
                    equations.emplace_back(beta, std::move(involved));
            }
            for (const auto& q : quadruples()) {
                for (const auto& [beta, involved] : equations) {
                    if (system.full())
                        break;
                    if (!w.power(q, beta))
                        continue;
                    const Integer r0 = w.residual(q, beta);
                    std::vector<wdvv::Rational> row(unknowns.size() + 1, 0);
                    row.back() = -r0;
                    bool any = false;
                    for (std::size_t u : involved) {
                        trial_[u] = 1;
                        row[u] = w.residual(q, beta) - r0;
                        trial_[u] = 0;
                        any = any || row[u] != 0;
                    }
                    if (!any && r0 != 0)
                        inconsistent_ = true;
                    if (any && !system.add(std::move(row)))
                        inconsistent_ = true;
                }
            }
            if (!system.full()) {
                for (std::size_t u = 0; u < unknowns.size(); ++u)
                    if (!system.pivot(u))
                        unsolved_.push_back(unknowns[u]);
            }
            const auto x = system.solve();
            for (std::size_t u = 0; u < unknowns.size(); ++u) {
                if (!system.pivot(u))
                    continue;
                if (x[u].get_den() != 1)
                    inconsistent_ = true;
                table_[unknowns[u]] = x[u].get_num();
            }
            index_.clear();
        }
    }

    /// Exceptional classes are 1; unsolved or outside classes are 0.
    Integer value(const Cls& c) const
    {
        if (c.d == 0) {
            int nonzero = 0, minus = 0;
            for (int x : c.m) {
                nonzero += x != 0;
                minus += x == -1;
            }
            return nonzero == 1 && minus == 1 ? 1 : 0;
        }
        if (auto it = index_.find(c); it != index_.end())
            return trial_[it->second];
        auto it = table_.find(c);
        return it == table_.end() ? Integer(0) : it->second;
    }

    const std::map<Cls, Integer>& table() const { return table_; }
    const std::vector<Cls>& unsolved() const { return unsolved_; }
    /// A contradictory equation or a non-integral solution was met.
    bool inconsistent() const { return inconsistent_; }

private:
    // Incremental row reduction over Q; rows are coefficients then the constant.
    class Elimination {
    public:
        explicit Elimination(std::size_t n) : n_(n), pivot_row_(n, npos) {}

        bool full() const { return rank_ == n_; }
        bool pivot(std::size_t u) const { return pivot_row_[u] != npos; }

        // False if the row reduces to 0 = nonzero.
        bool add(std::vector<wdvv::Rational> row)
        {
            for (std::size_t u = 0; u < n_; ++u) {
                if (row[u] == 0 || pivot_row_[u] == npos)
                    continue;
                const auto& p = rows_[pivot_row_[u]];
                const wdvv::Rational f = row[u];
                for (std::size_t v = 0; v <= n_; ++v)
                    if (p[v] != 0)
                        row[v] -= f * p[v];
            }
            std::size_t lead = npos;
            for (std::size_t u = 0; u < n_ && lead == npos; ++u)
                if (row[u] != 0)
                    lead = u;
            if (lead == npos)
                return row[n_] == 0;
            const wdvv::Rational f = row[lead];
            for (auto& x : row)
                x /= f;
            // keep the basis fully reduced
            for (auto& r : rows_) {
                if (r[lead] == 0)
                    continue;
                const wdvv::Rational g = r[lead];
                for (std::size_t v = 0; v <= n_; ++v)
                    if (row[v] != 0)
                        r[v] -= g * row[v];
            }
            pivot_row_[lead] = rows_.size();
            rows_.push_back(std::move(row));
            ++rank_;
            return true;
        }

        std::vector<wdvv::Rational> solve() const
        {
            std::vector<wdvv::Rational> x(n_, 0);
            for (std::size_t u = 0; u < n_; ++u)
                if (pivot_row_[u] != npos)
                    x[u] = rows_[pivot_row_[u]][n_];
            return x;
        }

    private:
        static constexpr std::size_t npos = static_cast<std::size_t>(-1);
        std::size_t n_;
        std::size_t rank_ = 0;
        std::vector<std::size_t> pivot_row_;
        std::vector<std::vector<wdvv::Rational>> rows_;
    };

    static int chern(const Cls& c)
    {
        int c1 = 3 * c.d;
        for (int x : c.m)
            c1 -= x;
        return c1;
    }

    std::vector<Cls> box(int d, int lo, int hi) const
    {
        std::vector<Cls> out;
        std::vector<int> m(static_cast<std::size_t>(n_), lo);
        while (true) {
            out.push_back({d, m});
            int i = 0;
            for (; i < n_; ++i) {
                if (m[static_cast<std::size_t>(i)] < hi) {
                    ++m[static_cast<std::size_t>(i)];
                    break;
                }
                m[static_cast<std::size_t>(i)] = lo;
            }
            if (i == n_)
                return out;
        }
    }

    std::vector<std::array<int, 4>> quadruples() const
    {
        const int p = n_ + 2;
        std::vector<std::array<int, 4>> out = {{1, 1, p, p}};
        for (int i = 0; i < n_; ++i)
            out.push_back({1, 1, 2 + i, 2 + i});
        for (int a = 1; a <= p; ++a)
            for (int b = 1; b <= p; ++b)
                for (int c = 1; c <= p; ++c)
                    for (int e = 1; e <= p; ++e)
                        out.push_back({a, b, c, e});
        return out;
    }

    int n_;
    std::map<Cls, Integer> table_;
    std::map<Cls, std::size_t> index_;
    std::vector<Integer> trial_;
    std::vector<Cls> unsolved_;
    bool inconsistent_ = false;
};

}  // namespace oracle
