#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "netscope/digits.hpp"
#include "netscope/quality.hpp"
#include "netscope/rational.hpp"

namespace netscope {

namespace detail {

// shared-prefix length of two doubles in base b, looking at most `cap`
// digits; returns cap when no difference shows up that deep (callers only
// ever compare it against indices < cap).
inline int gamma_of_doubles(const std::vector<digit_t>& dx, const std::vector<digit_t>& dy) {
    const std::size_t cap = dx.size();
    for (std::size_t r = 0; r < cap; ++r)
        if (dx[r] != dy[r]) return static_cast<int>(r);
    return static_cast<int>(cap);
}

}  // namespace detail

/// V_i(x,y) for i = 0..depth: the area of [0,x) x [0,y) intersected with the
/// set of pairs sharing exactly i initial base-b digits. Closed-form cases on
/// the relation between i and the shared-prefix length of x and y, with the
/// boundary rule V_i(x,1) = x (b-1) / b^(i+1).
inline std::vector<double> scalar_volumes(double x, double y, int b, int depth) {
    if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0))
        throw std::invalid_argument("scalar_volumes: arguments must lie in [0,1]");
    std::vector<double> v(static_cast<std::size_t>(depth) + 1, 0.0);
    if (x == 0.0 || y == 0.0) return v;
    double binv = 1.0 / b;
    if (x == 1.0 || y == 1.0) {
        const double other = x == 1.0 ? y : x;
        double scale = other * (b - 1) * binv;
        for (int i = 0; i <= depth; ++i) {
            v[static_cast<std::size_t>(i)] = scale;
            scale *= binv;
        }
        return v;
    }

    const double mn = std::min(x, y);
    const auto dx = digits_of_double(x, b, depth + 2);
    const auto dy = digits_of_double(y, b, depth + 2);
    const int gamma = x == y ? kGammaInfinity : detail::gamma_of_doubles(dx, dy);
    const auto& dmin = x <= y ? dx : dy;

    // h[i] = value of the first i digits of min(x,y); powneg[i] = b^-i
    std::vector<double> h(static_cast<std::size_t>(depth) + 2, 0.0);
    std::vector<double> powneg(static_cast<std::size_t>(depth) + 2, 1.0);
    for (int i = 1; i <= depth + 1; ++i) {
        powneg[static_cast<std::size_t>(i)] = powneg[static_cast<std::size_t>(i - 1)] * binv;
        h[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(i - 1)] +
                                         dmin[static_cast<std::size_t>(i - 1)] * powneg[static_cast<std::size_t>(i)];
    }

    for (int i = 0; i <= depth; ++i) {
        double value;
        if (gamma < i) {
            value = (b - 1) * binv * mn * powneg[static_cast<std::size_t>(i)];
        } else if (gamma == i) {
            const double hi = h[static_cast<std::size_t>(i)];
            value = x * y - hi * (x + y - hi - powneg[static_cast<std::size_t>(i)]) -
                    mn * powneg[static_cast<std::size_t>(i)] * binv;
        } else {
            const double hi = h[static_cast<std::size_t>(i)];
            const double hi1 = h[static_cast<std::size_t>(i + 1)];
            value = hi1 * (x + y - hi1 - powneg[static_cast<std::size_t>(i + 1)]) -
                    hi * (x + y - hi - powneg[static_cast<std::size_t>(i)]);
        }
        v[static_cast<std::size_t>(i)] = value;
    }
    return v;
}

inline double v_scalar(double x, double y, int i, int b) {
    if (i < 0) throw std::invalid_argument("v_scalar: i must be >= 0");
    return scalar_volumes(x, y, b, i)[static_cast<std::size_t>(i)];
}

inline double v_vector(std::span<const double> x, std::span<const double> y, const MultiIndex& i, int b) {
    if (x.size() != y.size() || x.size() != i.size())
        throw std::invalid_argument("v_vector: dimension mismatch");
    double prod = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) prod *= v_scalar(x[j], y[j], i[j], b);
    return prod;
}

/// Nonnegative coefficients of the elementary-interval decomposition of the
/// volume vector of [0,x) x [0,y). Product structure over coordinates:
/// t_k = prod_j t[j][k_j], and the coefficient sum telescopes to
/// vol = prod_j x_j y_j.
struct DecompCoeffs {
    int base = 2;
    std::vector<std::vector<double>> per_dim;  // [j][k]

    double at(const MultiIndex& k) const {
        double prod = 1.0;
        for (std::size_t j = 0; j < per_dim.size(); ++j) {
            const auto& tj = per_dim[j];
            const int kj = k[j];
            prod *= kj < static_cast<int>(tj.size()) ? tj[static_cast<std::size_t>(kj)] : 0.0;
        }
        return prod;
    }
    double sum() const {
        double prod = 1.0;
        for (const auto& tj : per_dim) {
            double s = 0.0;
            for (double t : tj) s += t;
            prod *= s;
        }
        return prod;
    }
};

inline DecompCoeffs t_coefficients(std::span<const double> x, std::span<const double> y, int b, int depth) {
    if (x.size() != y.size()) throw std::invalid_argument("t_coefficients: dimension mismatch");
    DecompCoeffs out;
    out.base = b;
    out.per_dim.reserve(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const auto v = scalar_volumes(x[j], y[j], b, depth);
        std::vector<double> t(static_cast<std::size_t>(depth) + 1);
        t[0] = b * v[0] / (b - 1);
        for (int k = 1; k <= depth; ++k) {
            double tk = (b * v[static_cast<std::size_t>(k)] - v[static_cast<std::size_t>(k - 1)]) / (b - 1);
            if (tk < -1e-12)
                throw std::logic_error("t_coefficients: negative coefficient " + std::to_string(tk) +
                                       " at k=" + std::to_string(k) + "; volume recursion is broken");
            t[static_cast<std::size_t>(k)] = std::max(tk, 0.0);
        }
        out.per_dim.push_back(std::move(t));
    }
    return out;
}

/// Joint density of an ordered pair of distinct points from a digitally
/// scrambled copy of the counted set: constant on each shared-prefix cell,
/// psi_i = N(i) b^(s+|i|) / (n(n-1) (b-1)^s), zero off the finite support.
struct JointPdf {
    int base = 2;
    int s = 0;
    std::uint64_t n = 0;
    IndexMap<Rational> psi;
    std::vector<int> support_bound;  // componentwise max of the support

    Rational at(const MultiIndex& i) const {
        const auto it = psi.find(i);
        return it == psi.end() ? Rational(0) : it->second;
    }
};

inline JointPdf joint_pdf(const PairCounts& pc) {
    JointPdf pdf;
    pdf.base = pc.base;
    pdf.s = pc.s;
    pdf.n = pc.n;
    pdf.support_bound.assign(static_cast<std::size_t>(pc.s), 0);
    const BigInt bm1s = pow_int(static_cast<std::uint64_t>(pc.base - 1), static_cast<std::uint64_t>(pc.s));
    for (const auto& [i, count] : pc.N) {
        const BigInt num = BigInt(count) * pow_int(static_cast<std::uint64_t>(pc.base),
                                                   static_cast<std::uint64_t>(pc.s + norm_of(i)));
        pdf.psi.emplace(i, Rational(num, BigInt(pc.pairs()) * bm1s));
        for (int j = 0; j < pc.s; ++j)
            pdf.support_bound[static_cast<std::size_t>(j)] =
                std::max(pdf.support_bound[static_cast<std::size_t>(j)], i[static_cast<std::size_t>(j)]);
    }
    return pdf;
}

/// sum of psi_i Vol(D_i); equals 1 exactly for a valid pdf.
inline Rational pdf_normalization(const JointPdf& pdf) {
    const Rational volbase(BigInt(pdf.base - 1), BigInt(pdf.base));
    Rational total = 0;
    for (const auto& [i, p] : pdf.psi) {
        Rational vol = 1;
        for (int j = 0; j < pdf.s; ++j) {
            vol *= volbase;
            vol /= pow_int(static_cast<std::uint64_t>(pdf.base),
                           static_cast<std::uint64_t>(i[static_cast<std::size_t>(j)]));
        }
        total += p * vol;
    }
    return total;
}

/// H(x,y) = integral of psi over [0,x) x [0,y), evaluated exactly as the
/// finite sum of volume-weighted cell values (up to double rounding).
inline double h_via_pdf(const JointPdf& pdf, std::span<const double> x, std::span<const double> y) {
    if (static_cast<int>(x.size()) != pdf.s || static_cast<int>(y.size()) != pdf.s)
        throw std::invalid_argument("h_via_pdf: dimension mismatch");
    std::vector<std::vector<double>> vtab(static_cast<std::size_t>(pdf.s));
    for (int j = 0; j < pdf.s; ++j)
        vtab[static_cast<std::size_t>(j)] =
            scalar_volumes(x[static_cast<std::size_t>(j)], y[static_cast<std::size_t>(j)], pdf.base,
                           pdf.support_bound[static_cast<std::size_t>(j)]);
    double total = 0.0;
    for (const auto& [i, p] : pdf.psi) {
        double vol = 1.0;
        for (int j = 0; j < pdf.s; ++j)
            vol *= vtab[static_cast<std::size_t>(j)][static_cast<std::size_t>(i[static_cast<std::size_t>(j)])];
        if (vol != 0.0) total += to_double(p) * vol;
    }
    return total;
}

/// Same quantity through the decomposition route: sum over k of
/// t_k C_b(k); the two evaluations agree to fp accuracy and checking that is
/// the module's central cross-check.
inline double h_via_decomposition(const QualityProfile& qp, std::span<const double> x,
                                  std::span<const double> y) {
    if (static_cast<int>(x.size()) != qp.s || static_cast<int>(y.size()) != qp.s)
        throw std::invalid_argument("h_via_decomposition: dimension mismatch");
    int depth = 0;
    for (int j = 0; j < qp.s; ++j) depth = std::max(depth, qp.horizon[static_cast<std::size_t>(j)]);
    const DecompCoeffs tc = t_coefficients(x, y, qp.base, depth);
    double total = 0.0;
    for (const auto& [k, c] : qp.values) {
        const double t = tc.at(k);
        if (t != 0.0) total += t * to_double(c);
    }
    return total;
}

/// Exact value of H at the corner of the elementary interval pair anchored
/// at the origin: H(b^-k, b^-k) = C_b(k) / b^(2|k|), computed from the pdf.
inline Rational h_at_elementary_anchor(const JointPdf& pdf, const MultiIndex& k) {
    if (static_cast<int>(k.size()) != pdf.s) throw std::invalid_argument("h_at_elementary_anchor: bad index");
    Rational total = 0;
    const Rational volbase(BigInt(pdf.base - 1), BigInt(pdf.base));
    for (const auto& [i, p] : pdf.psi) {
        bool dominated = true;
        for (int j = 0; j < pdf.s; ++j)
            if (i[static_cast<std::size_t>(j)] < k[static_cast<std::size_t>(j)]) {
                dominated = false;
                break;
            }
        if (!dominated) continue;
        Rational vol = 1;
        for (int j = 0; j < pdf.s; ++j) {
            vol *= volbase;
            vol /= pow_int(static_cast<std::uint64_t>(pdf.base),
                           static_cast<std::uint64_t>(i[static_cast<std::size_t>(j)] -
                                                      k[static_cast<std::size_t>(j)]));
        }
        total += p * vol;
    }
    total /= pow_int(static_cast<std::uint64_t>(pdf.base), 2 * static_cast<std::uint64_t>(norm_of(k)));
    return total;
}

/// T(x,y): probability that a random pair of distinct points lands in the
/// upper orthants; by the digit-flip symmetry of the pdf this is H(1-x,1-y).
inline double t_survival(const JointPdf& pdf, std::span<const double> x, std::span<const double> y) {
    std::vector<double> fx(x.size()), fy(y.size());
    for (std::size_t j = 0; j < x.size(); ++j) fx[j] = 1.0 - x[j];
    for (std::size_t j = 0; j < y.size(); ++j) fy[j] = 1.0 - y[j];
    return h_via_pdf(pdf, fx, fy);
}

struct NlodWitness {
    MultiIndex k;
    Rational c_value;
    Rational excess;  // H(b^-k, b^-k) - b^(-2|k|) > 0
};

/// Returns the multi-index certifying failure of negative lower orthant
/// dependence (the graded-lex-first arg max of C over the values exceeding
/// 1), or nothing when the set is completely quasi-equidistributed.
inline std::optional<NlodWitness> nlod_witness(const QualityProfile& qp) {
    std::optional<NlodWitness> best;
    for (const auto& [k, c] : qp.values) {
        if (norm_of(k) < 1 || c <= 1) continue;
        if (!best || c > best->c_value) {
            NlodWitness w;
            w.k = k;
            w.c_value = c;
            w.excess = (c - 1) / pow_int(static_cast<std::uint64_t>(qp.base),
                                         2 * static_cast<std::uint64_t>(norm_of(k)));
            best = std::move(w);
        }
    }
    return best;
}

/// Alternating corner sum over the box [a,b]; nonnegative for all boxes iff
/// the function is quasi-monotone.
inline double quasi_monotone_delta(const std::function<double(std::span<const double>)>& f,
                                   std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("quasi_monotone_delta: dimension mismatch");
    const std::size_t s = a.size();
    if (s > 30) throw std::invalid_argument("quasi_monotone_delta: dimension too large");
    std::vector<double> x(s);
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << s); ++mask) {
        int bits = 0;
        for (std::size_t j = 0; j < s; ++j) {
            if (mask & (1u << j)) {
                x[j] = a[j];
                ++bits;
            } else {
                x[j] = b[j];
            }
        }
        total += (bits % 2 == 0 ? 1.0 : -1.0) * f(x);
    }
    return total;
}

}  // namespace netscope
