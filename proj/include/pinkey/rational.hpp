#ifndef PINKEY_RATIONAL_HPP
#define PINKEY_RATIONAL_HPP

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace pinkey {

// Compare against Rational(n), not a bare int: boost's mixed int/int64 operator== recurses.
using Rational = boost::rational<std::int64_t>;

/// "6" for integers, "7/2" otherwise.
inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline std::int64_t floor(const Rational& r) {
    auto q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
    return q;
}

} // namespace pinkey

#endif
