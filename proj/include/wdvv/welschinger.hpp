#ifndef WDVV_WELSCHINGER_HPP_
#define WDVV_WELSCHINGER_HPP_

// Gamma_{theta,k} = (-1)^{s_p(theta)} 2^{1-l} W_{theta~,l}.
//
// H_1(L; Z/2) is generated by dH and dF_1..dF_r with the diagonal pairing
// (each generator squares to 1) and w_1 = 1 on every generator. The
// quadratic function t_p takes the value 1 on each generator and satisfies
// t(x+y) = t(x) + t(y) + x.y + w_1(x) w_1(y).

#include "wdvv/core_index.hpp"
#include "wdvv/errors.hpp"
#include "wdvv/rational.hpp"

#include <cstddef>
#include <vector>

namespace wdvv {

struct BoundaryClassMod2 {
    bool h = false;
    std::vector<bool> f;  // length r

    friend bool operator==(const BoundaryClassMod2&, const BoundaryClassMod2&) = default;
};

/// d theta = (d mod 2) dH + sum (alpha_i mod 2) dF_i; E~_j has no boundary.
inline BoundaryClassMod2 boundary_mod2(const RelativeClassIndex& c)
{
    BoundaryClassMod2 x;
    x.h = (c.d & 1) != 0;
    for (int a : c.alpha)
        x.f.push_back((a & 1) != 0);
    return x;
}

inline int generator_count(const BoundaryClassMod2& x)
{
    int n = x.h ? 1 : 0;
    for (bool b : x.f)
        n += b ? 1 : 0;
    return n;
}

inline bool pairing_mod2(const BoundaryClassMod2& x, const BoundaryClassMod2& y)
{
    bool p = x.h && y.h;
    for (std::size_t i = 0; i < std::min(x.f.size(), y.f.size()); ++i)
        p ^= x.f[i] && y.f[i];
    return p;
}

inline bool w1(const BoundaryClassMod2& x) { return (generator_count(x) & 1) != 0; }

/// Builds x one generator at a time from t(0) = 0.
inline bool t_p(const BoundaryClassMod2& x)
{
    bool t = false;
    int so_far = 0;  // generators already added; none of them pairs with the next
    for (int i = 0; i < generator_count(x); ++i) {
        t ^= true ^ ((so_far & 1) != 0);
        ++so_far;
    }
    return t;
}

inline bool s_p(const RelativeClassIndex& c)
{
    const int mu = maslov_index(c);
    const int self = self_intersection(double_class(c));
    const int twice = mu - self - 2;
    if (twice % 2 != 0)
        throw consistency_error("odd mu - theta.theta at " + to_string(c));
    const int half = twice / 2;
    return (((half & 1) != 0) ^ t_p(boundary_mod2(c))) ^ true;
}

inline int sign_of(const RelativeClassIndex& c) { return s_p(c) ? -1 : 1; }

namespace detail {
inline Rational power_of_two(int e)
{
    Rational q = 1;
    if (e >= 0)
        mpz_mul_2exp(q.get_num_mpz_t(), q.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
    else
        mpz_mul_2exp(q.get_den_mpz_t(), q.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    return q;
}
}  // namespace detail

/// W = (-1)^{s_p} 2^{l-1} Gamma.
inline Integer welschinger_from_gamma(const RelativeClassIndex& c, const Rational& gamma)
{
    const auto l = interior_points(c);
    if (!l)
        throw std::invalid_argument("no interior-point count for " + to_string(c));
    Rational w = gamma * detail::power_of_two(*l - 1) * sign_of(c);
    w.canonicalize();
    if (!is_integral(w))
        throw integrality_error("Welschinger count " + to_string(w) + " is not an integer at " + to_string(c));
    return w.get_num();
}

inline Rational gamma_from_welschinger(const RelativeClassIndex& c, const Integer& w)
{
    const auto l = interior_points(c);
    if (!l)
        throw std::invalid_argument("no interior-point count for " + to_string(c));
    Rational g = Rational(w) * detail::power_of_two(1 - *l) * sign_of(c);
    g.canonicalize();
    return g;
}

}  // namespace wdvv

#endif  // WDVV_WELSCHINGER_HPP_
