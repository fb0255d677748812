#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netscope/digits.hpp"
#include "netscope/fb_matrix.hpp"
#include "netscope/rng.hpp"

namespace netscope {

/// Upper-triangular Pascal matrix over F_b: entry (r,c) = binomial(c, r)
/// mod b (0-indexed). Its powers generate the Faure construction.
inline FbMatrix pascal_matrix(int base, int m) {
    FbMatrix P(base, m, m);
    for (int c = 0; c < m; ++c) {
        P.at(0, c) = 1;
        for (int r = 1; r <= c; ++r)
            P.at(r, c) = static_cast<digit_t>((P.at(r, c - 1) + P.at(r - 1, c - 1)) %
                                              static_cast<unsigned>(base));
    }
    return P;
}

inline FbMatrix matrix_power(const FbMatrix& M, int exp) {
    FbMatrix result = FbMatrix::identity(M.base, M.rows);
    FbMatrix b = M;
    while (exp > 0) {
        if (exp & 1) result = matmul(result, b);
        if (exp >>= 1) b = matmul(b, b);
    }
    return result;
}

/// Faure generating matrices: C_j = Pascal^(j-1) mod b, requires prime
/// b >= s. C_1 is the identity (van der Corput coordinate).
inline GeneratingMatrices faure_matrices(int base, int s, int m) {
    check_prime_base(base);
    if (base < s)
        throw std::invalid_argument("faure: requires prime base >= dimension (got b=" +
                                    std::to_string(base) + ", s=" + std::to_string(s) + ")");
    GeneratingMatrices gm;
    gm.base = base;
    gm.s = s;
    const FbMatrix P = pascal_matrix(base, m);
    FbMatrix C = FbMatrix::identity(base, m);
    for (int j = 0; j < s; ++j) {
        gm.C.push_back(C);
        if (j + 1 < s) C = matmul(C, P);
    }
    return gm;
}

/// Generalized Faure: left-multiplies each Faure matrix by a seeded random
/// non-singular lower triangular matrix. The NLT factors are drawn at full
/// default precision and truncated, so matrices requested at different sizes
/// m from the same seed agree on their common top-left block (prefixes of
/// the sequence and the b^m net coincide).
inline GeneratingMatrices gfaure_matrices(int base, int s, int m, std::uint64_t seed) {
    const int full = std::max(m, default_precision(base));
    GeneratingMatrices gm = faure_matrices(base, s, m);
    for (int j = 0; j < s; ++j) {
        Rng rng(derive_seed(seed, 0x67666175ULL /*tag*/, static_cast<std::uint64_t>(j)));
        const FbMatrix Lfull = random_nlt(base, full, rng);
        FbMatrix L(base, m, m);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c <= r; ++c) L.at(r, c) = Lfull.at(r, c);
        gm.C[static_cast<std::size_t>(j)] = matmul(L, gm.C[static_cast<std::size_t>(j)]);
    }
    return gm;
}

// Primitive polynomials over F_2 as full bitmasks (x^4+x+1 -> 0b10011),
// in the classic Bratley-Fox ordering; index 0 is the van der Corput
// coordinate. Enough entries for 40 coordinates.
inline constexpr std::uint32_t kSobolPolynomials[] = {
    1,   3,   7,   11,  13,  19,  25,  37,  59,  47,  61,  55,  41,  67,
    97,  91,  109, 103, 115, 131, 193, 137, 145, 143, 241, 157, 185, 167,
    229, 171, 213, 191, 253, 203, 211, 239, 247, 285, 369, 299};

inline constexpr int kSobolMaxDim = static_cast<int>(sizeof(kSobolPolynomials) / sizeof(kSobolPolynomials[0]));

/// Base-2 Sobol' generating matrices with every free direction integer set
/// to 1. Column c of C_j holds the binary digits of the c-th direction
/// number; the matrices come out upper triangular with unit diagonal.
inline GeneratingMatrices sobol_unit_matrices(int s, int m) {
    if (s > kSobolMaxDim)
        throw std::invalid_argument("sobol_unit: bundled polynomial table covers " +
                                    std::to_string(kSobolMaxDim) + " coordinates, requested " +
                                    std::to_string(s));
    GeneratingMatrices gm;
    gm.base = 2;
    gm.s = s;
    for (int j = 0; j < s; ++j) {
        const std::uint32_t poly = kSobolPolynomials[j];
        int degree = 0;
        while ((poly >> (degree + 1)) != 0) ++degree;
        std::vector<std::uint64_t> dir(static_cast<std::size_t>(m) + 1, 0);
        for (int k = 1; k <= m; ++k) {
            if (k <= degree || degree == 0) {
                dir[static_cast<std::size_t>(k)] = 1;
            } else {
                std::uint64_t v = dir[static_cast<std::size_t>(k - degree)] ^
                                  (dir[static_cast<std::size_t>(k - degree)] << degree);
                for (int i = 1; i < degree; ++i)
                    if ((poly >> (degree - i)) & 1U) v ^= dir[static_cast<std::size_t>(k - i)] << i;
                dir[static_cast<std::size_t>(k)] = v;
            }
        }
        FbMatrix C(2, m, m);
        for (int c = 0; c < m; ++c)
            for (int r = 0; r <= c; ++r)
                C.at(r, c) = static_cast<digit_t>((dir[static_cast<std::size_t>(c + 1)] >> (c - r)) & 1U);
        gm.C.push_back(std::move(C));
    }
    return gm;
}

inline void index_digits(std::uint64_t i, int base, std::span<digit_t> out) {
    for (auto& d : out) {
        d = static_cast<digit_t>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
    }
}

/// Points i = 0..count-1 with coordinate digits C_j * digits(i); digit i_0
/// is the least significant digit of the index. Output precision equals the
/// matrix row count.
inline PointSet points_from_matrices(const GeneratingMatrices& gm, std::uint64_t count,
                                     const std::string& descriptor) {
    if (gm.C.empty()) throw std::invalid_argument("points_from_matrices: no matrices");
    const int in = gm.C.front().cols;
    const int out = gm.C.front().rows;
    for (const auto& M : gm.C) {
        if (M.base != gm.base) throw std::invalid_argument("points_from_matrices: base mismatch");
        if (M.cols != in || M.rows != out)
            throw std::invalid_argument("points_from_matrices: ragged matrix sizes");
    }
    // count <= base^in so every index is representable
    BigInt capacity = pow_int(static_cast<std::uint64_t>(gm.base), static_cast<std::uint64_t>(in));
    if (BigInt(count) > capacity)
        throw std::invalid_argument("points_from_matrices: index precision overflow (n too large)");

    PointSet ps;
    ps.base = gm.base;
    ps.s = gm.s;
    ps.precision = out;
    ps.n = count;
    ps.digits.assign(count * static_cast<std::size_t>(gm.s) * static_cast<std::size_t>(out), 0);
    ps.provenance.descriptor = descriptor;
    ps.provenance.matrices = std::make_shared<GeneratingMatrices>(gm);

    std::vector<digit_t> idigits(static_cast<std::size_t>(in));
    for (std::uint64_t i = 0; i < count; ++i) {
        index_digits(i, gm.base, idigits);
        for (int j = 0; j < gm.s; ++j) {
            const auto v = matvec(gm.C[static_cast<std::size_t>(j)], idigits);
            auto dst = ps.coord(i, j);
            std::copy(v.begin(), v.end(), dst.begin());
        }
    }
    return ps;
}

/// Digital net of b^m points from the given generating matrices.
inline PointSet generate_digital_net(const GeneratingMatrices& gm, int m) {
    if (gm.C.empty() || gm.C.front().cols < m)
        throw std::invalid_argument("generate_digital_net: matrices have fewer than m columns");
    BigInt n = pow_int(static_cast<std::uint64_t>(gm.base), static_cast<std::uint64_t>(m));
    if (n > BigInt(std::uint64_t(1) << 62)) throw std::invalid_argument("generate_digital_net: b^m too large");
    std::ostringstream d;
    d << "{\"kind\":\"digital_net\",\"base\":" << gm.base << ",\"s\":" << gm.s << ",\"m\":" << m << "}";
    return points_from_matrices(gm, n.convert_to<std::uint64_t>(), d.str());
}

enum class SequenceKind { faure, gfaure };

/// First n points of a (0,s)-sequence in base b (Faure or its randomized
/// generalization), for arbitrary n up to the digit capacity of the default
/// precision.
inline PointSet sequence_prefix(SequenceKind kind, int base, int s, std::uint64_t n,
                                std::uint64_t seed = 0) {
    if (n < 1) throw std::invalid_argument("sequence_prefix: n must be >= 1");
    const int P = default_precision(base);
    GeneratingMatrices gm = kind == SequenceKind::faure ? faure_matrices(base, s, P)
                                                        : gfaure_matrices(base, s, P, seed);
    std::ostringstream d;
    d << "{\"kind\":\"" << (kind == SequenceKind::faure ? "faure" : "gfaure") << "\",\"base\":" << base
      << ",\"s\":" << s << ",\"n\":" << n;
    if (kind == SequenceKind::gfaure) d << ",\"seed\":" << seed;
    d << "}";
    return points_from_matrices(gm, n, d.str());
}

/// Restriction of a point set to the selected coordinates (0-based),
/// order preserved.
inline PointSet project(const PointSet& ps, std::span<const int> coords) {
    for (int j : coords)
        if (j < 0 || j >= ps.s)
            throw std::invalid_argument("project: coordinate index " + std::to_string(j) + " out of range");
    PointSet out;
    out.base = ps.base;
    out.s = static_cast<int>(coords.size());
    out.precision = ps.precision;
    out.n = ps.n;
    out.digits.reserve(out.n * static_cast<std::size_t>(out.s) * static_cast<std::size_t>(out.precision));
    for (std::size_t i = 0; i < ps.n; ++i)
        for (int j : coords) {
            const auto c = ps.coord(i, j);
            out.digits.insert(out.digits.end(), c.begin(), c.end());
        }
    std::ostringstream d;
    d << "{\"kind\":\"projection\",\"coords\":[";
    for (std::size_t j = 0; j < coords.size(); ++j) d << (j ? "," : "") << coords[j];
    d << "],\"parent\":" << (ps.provenance.descriptor.empty() ? "null" : ps.provenance.descriptor) << "}";
    out.provenance.descriptor = d.str();
    if (ps.provenance.matrices) {
        auto sub = std::make_shared<GeneratingMatrices>();
        sub->base = ps.provenance.matrices->base;
        sub->s = out.s;
        for (int j : coords) sub->C.push_back(ps.provenance.matrices->C[static_cast<std::size_t>(j)]);
        out.provenance.matrices = std::move(sub);
    }
    return out;
}

/// Random digital net matrices with each per-coordinate matrix non-singular
/// (rejection sampled), so every one-dimensional projection is perfectly
/// stratified.
inline GeneratingMatrices random_nonsingular_matrices(int base, int s, int m, std::uint64_t seed) {
    check_prime_base(base);
    GeneratingMatrices gm;
    gm.base = base;
    gm.s = s;
    Rng rng(derive_seed(seed, 0x726e6431ULL));
    for (int j = 0; j < s; ++j) {
        FbMatrix M(base, m, m);
        do {
            for (auto& e : M.e) e = static_cast<digit_t>(rng.below(static_cast<std::uint64_t>(base)));
        } while (rank(M) < m);
        gm.C.push_back(std::move(M));
    }
    return gm;
}

/// CLI-facing construction descriptor.
struct NetSpec {
    std::string kind;  // faure | gfaure | sobol_unit | from_file
    int base = 2;
    int s = 2;
    int m = -1;             // net size exponent (n = b^m) ...
    std::int64_t n = -1;    // ... or explicit prefix length
    std::uint64_t seed = 0;
    std::vector<int> coords;  // optional projection, 0-based
    std::string matrix_file;
};

inline PointSet build_pointset(const NetSpec& spec) {
    PointSet ps;
    if (spec.kind == "faure" || spec.kind == "gfaure") {
        const auto kind = spec.kind == "faure" ? SequenceKind::faure : SequenceKind::gfaure;
        if (spec.n > 0) {
            ps = sequence_prefix(kind, spec.base, spec.s, static_cast<std::uint64_t>(spec.n), spec.seed);
        } else if (spec.m > 0) {
            const auto gm = kind == SequenceKind::faure
                                ? faure_matrices(spec.base, spec.s, spec.m)
                                : gfaure_matrices(spec.base, spec.s, spec.m, spec.seed);
            ps = generate_digital_net(gm, spec.m);
        } else {
            throw std::invalid_argument("net spec: need m or n");
        }
    } else if (spec.kind == "sobol_unit") {
        if (spec.base != 2) throw std::invalid_argument("sobol_unit: base must be 2");
        if (spec.m <= 0) throw std::invalid_argument("sobol_unit: need m");
        ps = generate_digital_net(sobol_unit_matrices(spec.s, spec.m), spec.m);
    } else if (spec.kind == "from_file") {
        std::ifstream in(spec.matrix_file);
        if (!in) throw std::runtime_error("cannot open matrix file " + spec.matrix_file);
        const auto gm = read_matrices(in);
        const int m = spec.m > 0 ? spec.m : gm.C.front().rows;
        ps = generate_digital_net(gm, m);
    } else {
        throw std::invalid_argument("unknown construction kind " + spec.kind);
    }
    if (!spec.coords.empty()) ps = project(ps, spec.coords);
    return ps;
}

}  // namespace netscope
