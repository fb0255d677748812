#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "netscope/digits.hpp"
#include "netscope/fb_matrix.hpp"
#include "netscope/netgen.hpp"
#include "netscope/rng.hpp"

namespace netscope {

enum class ScrambleMethod { nested_uniform, affine_nlt };

inline std::string to_string(ScrambleMethod m) {
    return m == ScrambleMethod::nested_uniform ? "nested_uniform" : "affine_nlt";
}

inline ScrambleMethod scramble_method_from_string(const std::string& s) {
    if (s == "nested_uniform") return ScrambleMethod::nested_uniform;
    if (s == "affine_nlt") return ScrambleMethod::affine_nlt;
    throw std::invalid_argument("unknown scramble method " + s);
}

/// The scrambling base may differ from the base a net was constructed in;
/// nested uniform scrambling accepts any point set after re-expansion in the
/// scrambling base, the affine method is tied to the construction.
struct ScrambleSpec {
    int base = 2;
    ScrambleMethod method = ScrambleMethod::nested_uniform;
    std::uint64_t seed = 0;
    int depth = 0;  // output digit precision; 0 -> default for the base

    int effective_depth() const { return depth > 0 ? depth : default_precision(base); }
};

/// Re-expands every coordinate in a new base by exact long division of the
/// stored fixed-point value.
inline PointSet rebase(const PointSet& ps, int new_base, int precision) {
    check_base(new_base);
    if (precision < 1) throw std::invalid_argument("rebase: precision must be >= 1");
    if (new_base == ps.base && precision == ps.precision) return ps;

    PointSet out;
    out.base = new_base;
    out.s = ps.s;
    out.precision = precision;
    out.n = ps.n;
    out.digits.assign(ps.n * static_cast<std::size_t>(ps.s) * static_cast<std::size_t>(precision), 0);
    const BigInt den = pow_int(static_cast<std::uint64_t>(ps.base), static_cast<std::uint64_t>(ps.precision));
    for (std::size_t i = 0; i < ps.n; ++i)
        for (int j = 0; j < ps.s; ++j) {
            const auto src = ps.coord(i, j);
            BigInt num = 0;
            for (digit_t d : src) {
                num *= ps.base;
                num += d;
            }
            auto dst = out.coord(i, j);
            for (int r = 0; r < precision; ++r) {
                num *= new_base;
                const BigInt d = num / den;
                num -= d * den;
                dst[static_cast<std::size_t>(r)] = static_cast<digit_t>(d.convert_to<int>());
            }
        }
    std::ostringstream d;
    d << "{\"kind\":\"rebase\",\"base\":" << new_base << ",\"parent\":"
      << (ps.provenance.descriptor.empty() ? "null" : ps.provenance.descriptor) << "}";
    out.provenance.descriptor = d.str();
    return out;
}

/// Owen-style nested uniform scramble. The permutation applied to digit r of
/// a coordinate is keyed by (seed, coordinate, digits 1..r-1), realized as a
/// lazily materialized Fisher-Yates permutation drawn from a hash of that
/// key, so equal prefixes see the same permutation and storage stays
/// proportional to points x depth rather than base^depth.
inline PointSet nested_uniform_scramble(const PointSet& ps, const ScrambleSpec& spec) {
    if (spec.base != ps.base)
        throw std::invalid_argument("nested_uniform_scramble: point set must be expressed in the scrambling base");
    const int b = spec.base;
    const int depth = spec.effective_depth();

    PointSet out;
    out.base = b;
    out.s = ps.s;
    out.precision = depth;
    out.n = ps.n;
    out.digits.assign(ps.n * static_cast<std::size_t>(ps.s) * static_cast<std::size_t>(depth), 0);

    std::unordered_map<std::uint64_t, std::vector<std::uint8_t>> perms;
    perms.reserve(ps.n * static_cast<std::size_t>(depth) / 2);
    for (int j = 0; j < ps.s; ++j) {
        const std::uint64_t root = derive_seed(spec.seed, 0x6e657374ULL, static_cast<std::uint64_t>(j));
        for (std::size_t i = 0; i < ps.n; ++i) {
            const auto src = ps.coord(i, j);
            auto dst = out.coord(i, j);
            std::uint64_t key = root;
            for (int r = 0; r < depth; ++r) {
                const digit_t d = r < ps.precision ? src[static_cast<std::size_t>(r)] : digit_t{0};
                auto [it, inserted] = perms.try_emplace(key);
                if (inserted) {
                    Rng rng(key);
                    it->second = random_permutation(b, rng);
                }
                dst[static_cast<std::size_t>(r)] = it->second[d];
                key = derive_seed(key, static_cast<std::uint64_t>(d) + 1);
            }
        }
    }
    std::ostringstream d;
    d << "{\"kind\":\"nested_uniform\",\"base\":" << b << ",\"seed\":" << spec.seed
      << ",\"depth\":" << depth << ",\"parent\":"
      << (ps.provenance.descriptor.empty() ? "null" : ps.provenance.descriptor) << "}";
    out.provenance.descriptor = d.str();
    return out;
}

/// Affine matrix scramble: each generating matrix is left-multiplied by a
/// random non-singular lower triangular matrix (drawn at the output depth)
/// and an independent uniform digital shift is added per coordinate.
struct AffineScramble {
    GeneratingMatrices matrices;                 // S_l * C_l, depth x cols
    std::vector<std::vector<digit_t>> shift;     // per coordinate, depth digits
};

inline AffineScramble affine_matrix_scramble(const GeneratingMatrices& gm, const ScrambleSpec& spec) {
    check_prime_base(spec.base);
    if (spec.base != gm.base)
        throw std::invalid_argument("affine_matrix_scramble: scrambling base must match the construction base");
    const int depth = std::max(spec.effective_depth(), gm.C.empty() ? 0 : gm.C.front().rows);

    AffineScramble out;
    out.matrices.base = gm.base;
    out.matrices.s = gm.s;
    for (int j = 0; j < gm.s; ++j) {
        const auto& C = gm.C[static_cast<std::size_t>(j)];
        Rng rng(derive_seed(spec.seed, 0x61666e65ULL, static_cast<std::uint64_t>(j)));
        const FbMatrix S = random_nlt(gm.base, depth, rng);
        FbMatrix padded(gm.base, depth, C.cols);
        for (int r = 0; r < C.rows; ++r)
            for (int c = 0; c < C.cols; ++c) padded.at(r, c) = C.at(r, c);
        out.matrices.C.push_back(matmul(S, padded));
        std::vector<digit_t> sh(static_cast<std::size_t>(depth));
        for (auto& d : sh) d = static_cast<digit_t>(rng.below(static_cast<std::uint64_t>(gm.base)));
        out.shift.push_back(std::move(sh));
    }
    return out;
}

inline PointSet apply_affine(const AffineScramble& scr, std::uint64_t n, std::uint64_t seed_for_record = 0) {
    std::ostringstream d;
    d << "{\"kind\":\"affine_nlt\",\"base\":" << scr.matrices.base << ",\"seed\":" << seed_for_record
      << ",\"n\":" << n << "}";
    PointSet ps = points_from_matrices(scr.matrices, n, d.str());
    const int b = ps.base;
    for (std::size_t i = 0; i < ps.n; ++i)
        for (int j = 0; j < ps.s; ++j) {
            auto c = ps.coord(i, j);
            const auto& sh = scr.shift[static_cast<std::size_t>(j)];
            for (std::size_t r = 0; r < c.size(); ++r)
                c[r] = static_cast<digit_t>((c[r] + sh[r]) % static_cast<unsigned>(b));
        }
    return ps;
}

/// Scrambles a point set with either method. Nested uniform rebases first
/// when the scrambling base differs; the affine method requires the set to
/// carry its generating matrices in the scrambling base.
inline PointSet scramble_pointset(const PointSet& ps, const ScrambleSpec& spec) {
    if (spec.method == ScrambleMethod::nested_uniform) {
        if (ps.base != spec.base) {
            return nested_uniform_scramble(rebase(ps, spec.base, spec.effective_depth()), spec);
        }
        return nested_uniform_scramble(ps, spec);
    }
    if (!ps.provenance.matrices)
        throw std::invalid_argument("affine scramble: point set carries no generating matrices");
    if (ps.base != spec.base || ps.provenance.matrices->base != spec.base)
        throw std::invalid_argument("affine scramble: base mismatch with the digital construction");
    const auto scr = affine_matrix_scramble(*ps.provenance.matrices, spec);
    return apply_affine(scr, ps.n, spec.seed);
}

}  // namespace netscope
