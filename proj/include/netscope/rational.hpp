#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace netscope {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow_int(std::uint64_t base, std::uint64_t exp) {
    BigInt r = 1;
    BigInt b = base;
    while (exp > 0) {
        if (exp & 1) r *= b;
        b *= b;
        exp >>= 1;
    }
    return r;
}

/// Renders a nonnegative rational as a fixed-point decimal with the given
/// number of places, rounding ties half-even. Used for table output so that
/// printed values are reproducible regardless of the float environment.
inline std::string decimal_string(const Rational& r, int places) {
    if (r < 0) return "-" + decimal_string(-r, places);
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    BigInt scale = pow_int(10, static_cast<std::uint64_t>(places));
    num *= scale;
    BigInt q = num / den;
    BigInt rem = num % den;
    // half-even on the remainder
    BigInt twice = rem * 2;
    if (twice > den || (twice == den && (q & 1) == 1)) ++q;
    BigInt whole = q / scale;
    BigInt frac = q % scale;
    std::string out = whole.str();
    if (places > 0) {
        std::string f = frac.str();
        out += "." + std::string(static_cast<std::size_t>(places) - f.size(), '0') + f;
    }
    return out;
}

inline std::string exact_string(const Rational& r) {
    return boost::multiprecision::numerator(r).str() + "/" +
           boost::multiprecision::denominator(r).str();
}

inline Rational rational_from_string(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace netscope
