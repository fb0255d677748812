#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "netscope/digits.hpp"
#include "netscope/parallel.hpp"
#include "netscope/rng.hpp"
#include "netscope/scramble.hpp"

namespace netscope {

struct Integrand {
    std::string name;
    int s = 0;
    std::function<double(std::span<const double>)> f;
    std::optional<double> exact_mean;
    std::optional<double> sigma2;  // Var(f(U)) when known in closed form

    /// f(u) = prod_j (1 + c (u_j - 1/2)): mean 1 for any c, variance
    /// (1 + c^2/12)^s - 1.
    static Integrand product_linear(int s, double c) {
        Integrand g;
        g.name = "product_linear(c=" + std::to_string(c) + ")";
        g.s = s;
        g.f = [c](std::span<const double> u) {
            double prod = 1.0;
            for (double uj : u) prod *= 1.0 + c * (uj - 0.5);
            return prod;
        };
        g.exact_mean = 1.0;
        g.sigma2 = std::pow(1.0 + c * c / 12.0, s) - 1.0;
        return g;
    }
};

inline double evaluate_mean(const PointSet& ps, const Integrand& f) {
    if (f.s != ps.s) throw std::invalid_argument("integrand dimension mismatch");
    std::vector<double> u(static_cast<std::size_t>(ps.s));
    double total = 0.0;
    for (std::size_t i = 0; i < ps.n; ++i) {
        for (int j = 0; j < ps.s; ++j)
            u[static_cast<std::size_t>(j)] = coordinate_value(ps.coord(i, j), ps.base);
        total += f.f(u);
    }
    return total / static_cast<double>(ps.n);
}

struct VarianceReport {
    std::string estimator;
    std::uint64_t n = 0;
    int replicates = 0;
    std::uint64_t master_seed = 0;
    std::vector<double> estimates;  // one mean per replicate
    double mean = 0.0;
    double sample_variance = 0.0;   // variance of the replicate means

    /// standard error of `mean`
    double se_of_mean() const { return std::sqrt(sample_variance / replicates); }
};

inline void finalize(VarianceReport& r) {
    double total = 0.0;
    for (double e : r.estimates) total += e;
    r.mean = total / r.replicates;
    double ss = 0.0;
    for (double e : r.estimates) ss += (e - r.mean) * (e - r.mean);
    r.sample_variance = r.replicates > 1 ? ss / (r.replicates - 1) : 0.0;
}

/// Estimator variance under repeated independent scrambles. Replicate r uses
/// the child seed derived from (spec.seed, r), so any replicate can be
/// regenerated in isolation and the parallel schedule cannot affect results.
inline VarianceReport estimate_variance(const PointSet& ps, const ScrambleSpec& spec, const Integrand& f,
                                        int R) {
    if (R < 2) throw std::invalid_argument("estimate_variance: need at least two replicates");
    VarianceReport report;
    report.estimator = "scramble(" + to_string(spec.method) + ",base=" + std::to_string(spec.base) + ")";
    report.n = ps.n;
    report.replicates = R;
    report.master_seed = spec.seed;
    report.estimates.assign(static_cast<std::size_t>(R), 0.0);

    // rebase once, not per replicate
    const PointSet* source = &ps;
    PointSet rebased;
    if (spec.method == ScrambleMethod::nested_uniform && ps.base != spec.base) {
        rebased = rebase(ps, spec.base, spec.effective_depth());
        source = &rebased;
    }
    parallel_for(static_cast<std::size_t>(R), [&](std::size_t r) {
        ScrambleSpec child = spec;
        child.seed = derive_seed(spec.seed, 0x72657065ULL, static_cast<std::uint64_t>(r));
        const PointSet scrambled = scramble_pointset(*source, child);
        report.estimates[r] = evaluate_mean(scrambled, f);
    });
    finalize(report);
    return report;
}

/// R independent batches of n i.i.d. uniform points.
inline VarianceReport monte_carlo_baseline(const Integrand& f, std::uint64_t n, int R, std::uint64_t seed) {
    if (R < 2) throw std::invalid_argument("monte_carlo_baseline: need at least two replicates");
    VarianceReport report;
    report.estimator = "monte_carlo";
    report.n = n;
    report.replicates = R;
    report.master_seed = seed;
    report.estimates.assign(static_cast<std::size_t>(R), 0.0);
    parallel_for(static_cast<std::size_t>(R), [&](std::size_t r) {
        Rng rng(derive_seed(seed, 0x6d633032ULL, static_cast<std::uint64_t>(r)));
        std::vector<double> u(static_cast<std::size_t>(f.s));
        double total = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            for (auto& uj : u) uj = rng.uniform();
            total += f.f(u);
        }
        report.estimates[r] = total / static_cast<double>(n);
    });
    finalize(report);
    return report;
}

/// Pair covariance implied by the replicate variance through
/// Var(mean) = sigma^2/n + (n-1)/n * cov; negative for negatively dependent
/// schemes on quasi-monotone integrands.
inline double extract_covariance(const VarianceReport& report, double sigma2, std::uint64_t n) {
    return (report.sample_variance - sigma2 / static_cast<double>(n)) * static_cast<double>(n) /
           static_cast<double>(n - 1);
}

struct EquivalenceReport {
    VarianceReport nested;
    VarianceReport affine;
    double ratio = 0.0;  // nested variance / affine variance
    double band_lo = 0.5;
    double band_hi = 2.0;
    bool equivalent = false;
};

/// Both scrambling methods share the pair joint pdf, so their estimator
/// variances agree; this runs both at R replicates and checks the sample
/// variance ratio against the acceptance band.
inline EquivalenceReport scramble_equivalence_test(const PointSet& ps, const Integrand& f, int R,
                                                   std::uint64_t seed, double band_lo = 0.5,
                                                   double band_hi = 2.0) {
    if (!ps.provenance.matrices)
        throw std::invalid_argument("scramble_equivalence_test: point set must carry generating matrices");
    ScrambleSpec nested;
    nested.base = ps.base;
    nested.method = ScrambleMethod::nested_uniform;
    nested.seed = derive_seed(seed, 1);
    ScrambleSpec affine = nested;
    affine.method = ScrambleMethod::affine_nlt;
    affine.seed = derive_seed(seed, 2);

    EquivalenceReport out;
    out.nested = estimate_variance(ps, nested, f, R);
    out.affine = estimate_variance(ps, affine, f, R);
    out.ratio = out.nested.sample_variance / out.affine.sample_variance;
    out.band_lo = band_lo;
    out.band_hi = band_hi;
    out.equivalent = out.ratio >= band_lo && out.ratio <= band_hi;
    return out;
}

}  // namespace netscope
