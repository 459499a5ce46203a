#ifndef WDVV_RATIONAL_HPP_
#define WDVV_RATIONAL_HPP_

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wdvv {

/// Arbitrary precision integer.
using Integer = mpz_class;
/// Arbitrary precision rational, always kept in lowest terms with positive
/// denominator.
using Rational = mpq_class;

inline bool is_integral(const Rational& q) { return q.get_den() == 1; }

/// `p/q`, or plain `p` when the denominator is 1.
inline std::string to_string(const Rational& q)
{
    if (q.get_den() == 1)
        return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

/// Always `p/q`, also for integers (`-6672/1`).
inline std::string to_fraction_string(const Rational& q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Parses `p`, `-p` or `p/q` with decimal digits. Throws std::invalid_argument
/// on anything else (including a zero denominator).
inline Rational parse_rational(std::string_view text)
{
    auto digits = [](std::string_view s, bool allow_sign) {
        if (s.empty())
            return false;
        std::size_t i = 0;
        if (allow_sign && (s[0] == '-' || s[0] == '+'))
            i = 1;
        if (i == s.size())
            return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9')
                return false;
        return true;
    };
    const auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!digits(num, true) || !digits(den, false))
        throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
    std::string n(num);
    if (!n.empty() && n[0] == '+')
        n.erase(0, 1);
    Integer numerator(n, 10);
    Integer denominator(std::string(den), 10);
    if (denominator == 0)
        throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    Rational q(numerator, denominator);
    q.canonicalize();
    return q;
}

/// An element of (1/2)Z stored as twice its value.
class HalfInteger {
public:
    constexpr HalfInteger() = default;
    constexpr HalfInteger(int value) : twice_(2 * value) {}  // NOLINT: integers embed

    static constexpr HalfInteger from_twice(int twice)
    {
        HalfInteger h;
        h.twice_ = twice;
        return h;
    }

    constexpr int twice() const { return twice_; }
    constexpr bool is_integral() const { return twice_ % 2 == 0; }
    /// Only meaningful when is_integral().
    constexpr int as_int() const { return twice_ / 2; }
    Rational to_rational() const
    {
        Rational q(twice_, 2);
        q.canonicalize();
        return q;
    }

    constexpr HalfInteger operator-() const { return from_twice(-twice_); }
    friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) { return from_twice(a.twice_ + b.twice_); }
    friend constexpr HalfInteger operator-(HalfInteger a, HalfInteger b) { return from_twice(a.twice_ - b.twice_); }
    friend constexpr bool operator==(HalfInteger, HalfInteger) = default;
    friend constexpr auto operator<=>(HalfInteger, HalfInteger) = default;

private:
    int twice_ = 0;
};

inline std::string to_string(HalfInteger h)
{
    if (h.is_integral())
        return std::to_string(h.as_int());
    return std::to_string(h.twice()) + "/2";
}

}  // namespace wdvv

#endif  // WDVV_RATIONAL_HPP_
