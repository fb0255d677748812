#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netscope/rational.hpp"

namespace netscope {

using digit_t = std::uint8_t;

inline constexpr int kMaxBase = 255;
inline constexpr int kGammaInfinity = std::numeric_limits<int>::max();

inline void check_base(int base) {
    if (base < 2 || base > kMaxBase)
        throw std::invalid_argument("base must be in [2, " + std::to_string(kMaxBase) + "], got " +
                                    std::to_string(base));
}

/// Digits needed so that a coordinate round-trips through 64-bit fixed
/// point: ceil(64 / log2(base)).
inline int default_precision(int base) {
    check_base(base);
    int p = 0;
    BigInt v = 1;
    const BigInt two64 = BigInt(1) << 64;
    while (v < two64) {
        v *= base;
        ++p;
    }
    return p;
}

struct FbMatrix;
struct GeneratingMatrices;

/// Construction record carried along with a point set. The matrices are kept
/// when the set was built digitally so that matrix-level scrambles can be
/// applied later; a rebase or file load drops them.
struct Provenance {
    std::string descriptor;  // JSON construction descriptor, free-form
    std::shared_ptr<const GeneratingMatrices> matrices;
};

/// One point stored as exact base-b digit vectors, one vector of `precision`
/// digits per coordinate. Coordinate value = sum of d_r * base^-r.
struct DigitPoint {
    int base = 2;
    int precision = 0;
    int s = 0;
    std::vector<digit_t> digits;  // s * precision, coordinate-major

    std::span<const digit_t> coord(int j) const {
        return {digits.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(precision),
                static_cast<std::size_t>(precision)};
    }
    std::span<digit_t> coord(int j) {
        return {digits.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(precision),
                static_cast<std::size_t>(precision)};
    }
};

struct PointSet {
    int base = 2;
    int s = 0;
    int precision = 0;
    std::size_t n = 0;
    std::vector<digit_t> digits;  // n * s * precision
    Provenance provenance;

    std::span<const digit_t> coord(std::size_t i, int j) const {
        const std::size_t stride = static_cast<std::size_t>(s) * static_cast<std::size_t>(precision);
        return {digits.data() + i * stride + static_cast<std::size_t>(j) * static_cast<std::size_t>(precision),
                static_cast<std::size_t>(precision)};
    }
    std::span<digit_t> coord(std::size_t i, int j) {
        const std::size_t stride = static_cast<std::size_t>(s) * static_cast<std::size_t>(precision);
        return {digits.data() + i * stride + static_cast<std::size_t>(j) * static_cast<std::size_t>(precision),
                static_cast<std::size_t>(precision)};
    }

    DigitPoint point(std::size_t i) const {
        DigitPoint p;
        p.base = base;
        p.precision = precision;
        p.s = s;
        const std::size_t stride = static_cast<std::size_t>(s) * static_cast<std::size_t>(precision);
        p.digits.assign(digits.begin() + static_cast<std::ptrdiff_t>(i * stride),
                        digits.begin() + static_cast<std::ptrdiff_t>((i + 1) * stride));
        return p;
    }

    void validate() const {
        check_base(base);
        if (precision < 1) throw std::invalid_argument("precision must be >= 1");
        for (digit_t d : digits)
            if (d >= base) throw std::invalid_argument("digit out of range for base");
    }
};

/// Exact number of shared initial digits of two equal-precision coordinates;
/// kGammaInfinity when all stored digits agree. Finite precision makes the
/// stored expansion the analysis horizon.
inline int gamma_scalar(std::span<const digit_t> x, std::span<const digit_t> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("gamma_scalar: precision mismatch");
    for (std::size_t r = 0; r < x.size(); ++r)
        if (x[r] != y[r]) return static_cast<int>(r);
    return kGammaInfinity;
}

struct GammaVector {
    std::vector<int> entries;

    bool is_finite() const {
        for (int e : entries)
            if (e == kGammaInfinity) return false;
        return true;
    }
    /// |gamma|; kGammaInfinity when any entry is infinite.
    long long total() const {
        long long t = 0;
        for (int e : entries) {
            if (e == kGammaInfinity) return kGammaInfinity;
            t += e;
        }
        return t;
    }
};

inline GammaVector gamma_vector(const DigitPoint& x, const DigitPoint& y) {
    if (x.base != y.base) throw std::invalid_argument("gamma_vector: base mismatch");
    if (x.s != y.s) throw std::invalid_argument("gamma_vector: dimension mismatch");
    if (x.precision != y.precision) throw std::invalid_argument("gamma_vector: precision mismatch");
    GammaVector g;
    g.entries.reserve(static_cast<std::size_t>(x.s));
    for (int j = 0; j < x.s; ++j) g.entries.push_back(gamma_scalar(x.coord(j), y.coord(j)));
    return g;
}

inline GammaVector gamma_vector(const PointSet& ps, std::size_t i, std::size_t l) {
    GammaVector g;
    g.entries.reserve(static_cast<std::size_t>(ps.s));
    for (int j = 0; j < ps.s; ++j) g.entries.push_back(gamma_scalar(ps.coord(i, j), ps.coord(l, j)));
    return g;
}

/// Digitwise complement d -> (b-1)-d. gamma is invariant under flipping both
/// arguments, and flip is an involution.
inline DigitPoint digit_flip(const DigitPoint& x) {
    DigitPoint out = x;
    const digit_t top = static_cast<digit_t>(x.base - 1);
    for (auto& d : out.digits) d = static_cast<digit_t>(top - d);
    return out;
}

inline PointSet digit_flip(const PointSet& ps) {
    PointSet out = ps;
    const digit_t top = static_cast<digit_t>(ps.base - 1);
    for (auto& d : out.digits) d = static_cast<digit_t>(top - d);
    out.provenance.matrices.reset();
    return out;
}

inline double coordinate_value(std::span<const digit_t> digits, int base) {
    double v = 0.0;
    for (std::size_t r = digits.size(); r-- > 0;) v = (v + digits[r]) / base;
    return v;
}

inline Rational coordinate_rational(std::span<const digit_t> digits, int base) {
    BigInt num = 0;
    for (digit_t d : digits) {
        num *= base;
        num += d;
    }
    return Rational(num, pow_int(static_cast<std::uint64_t>(base), digits.size()));
}

/// Exact base-b digits of a double in [0,1]; the dyadic value is expanded
/// exactly, digits beyond its binary precision are 0.
inline std::vector<digit_t> digits_of_double(double x, int base, int count) {
    check_base(base);
    if (!(x >= 0.0) || x >= 1.0) throw std::invalid_argument("digits_of_double: x must be in [0,1)");
    std::vector<digit_t> out(static_cast<std::size_t>(count), 0);
    if (x == 0.0) return out;
    int e = 0;
    const double m = std::frexp(x, &e);
    const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    const int shift = 53 - e;  // x = mant / 2^shift exactly
    BigInt num = mant;
    const BigInt den = BigInt(1) << shift;
    for (int r = 0; r < count; ++r) {
        num *= base;
        const BigInt d = num / den;
        num -= d * den;
        out[static_cast<std::size_t>(r)] = static_cast<digit_t>(d.convert_to<int>());
    }
    return out;
}

/// Largest shared-prefix length over all pairs in one coordinate, i.e. the
/// depth at which every prefix bucket becomes a singleton, minus one.
/// Throws when two points share a full coordinate vector (coincident
/// coordinates break the finite-support counting assumptions).
inline int max_shared_prefix(const PointSet& ps, int j) {
    std::vector<std::size_t> order(ps.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ca = ps.coord(a, j);
        const auto cb = ps.coord(b, j);
        return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
    });
    int best = 0;
    for (std::size_t i = 0; i + 1 < ps.n; ++i) {
        const int g = gamma_scalar(ps.coord(order[i], j), ps.coord(order[i + 1], j));
        if (g == kGammaInfinity)
            throw std::runtime_error("coincident coordinate values in dimension " + std::to_string(j) +
                                     " (points " + std::to_string(order[i]) + " and " +
                                     std::to_string(order[i + 1]) + ")");
        best = std::max(best, g);
    }
    return best;
}

inline bool has_distinct_coordinates(const PointSet& ps) {
    try {
        for (int j = 0; j < ps.s; ++j) (void)max_shared_prefix(ps, j);
    } catch (const std::runtime_error&) {
        return false;
    }
    return true;
}

// ---- point-set text format ----
// header: base=<b> s=<s> n=<n> precision=<P>
// then one point per line, s whitespace-separated coordinate tokens, each
// token the P digits (most significant first) joined by commas.

inline void write_pointset(std::ostream& os, const PointSet& ps) {
    os << "base=" << ps.base << " s=" << ps.s << " n=" << ps.n << " precision=" << ps.precision
       << "\n";
    for (std::size_t i = 0; i < ps.n; ++i) {
        for (int j = 0; j < ps.s; ++j) {
            if (j) os << ' ';
            const auto c = ps.coord(i, j);
            for (std::size_t r = 0; r < c.size(); ++r) {
                if (r) os << ',';
                os << static_cast<int>(c[r]);
            }
        }
        os << "\n";
    }
}

inline PointSet read_pointset(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("point set: missing header");
    PointSet ps;
    long long n = -1;
    {
        std::istringstream hs(header);
        std::string field;
        while (hs >> field) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) throw std::runtime_error("point set: bad header field " + field);
            const std::string key = field.substr(0, eq);
            const long long value = std::stoll(field.substr(eq + 1));
            if (key == "base")
                ps.base = static_cast<int>(value);
            else if (key == "s")
                ps.s = static_cast<int>(value);
            else if (key == "n")
                n = value;
            else if (key == "precision")
                ps.precision = static_cast<int>(value);
            else
                throw std::runtime_error("point set: unknown header key " + key);
        }
    }
    if (n < 0 || ps.s <= 0 || ps.precision <= 0) throw std::runtime_error("point set: incomplete header");
    check_base(ps.base);
    ps.n = static_cast<std::size_t>(n);
    ps.digits.reserve(ps.n * static_cast<std::size_t>(ps.s) * static_cast<std::size_t>(ps.precision));
    std::string token;
    for (std::size_t i = 0; i < ps.n; ++i) {
        for (int j = 0; j < ps.s; ++j) {
            if (!(is >> token)) throw std::runtime_error("point set: truncated at point " + std::to_string(i));
            int count = 0;
            std::size_t pos = 0;
            while (pos <= token.size()) {
                const auto comma = token.find(',', pos);
                const std::string piece =
                    token.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
                const int d = std::stoi(piece);
                if (d < 0 || d >= ps.base) throw std::runtime_error("point set: digit out of range");
                ps.digits.push_back(static_cast<digit_t>(d));
                ++count;
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            if (count != ps.precision) throw std::runtime_error("point set: wrong digit count in token");
        }
    }
    ps.provenance.descriptor = "{\"kind\":\"from_file\"}";
    return ps;
}

}  // namespace netscope
