#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "netscope/digits.hpp"
#include "netscope/rational.hpp"

namespace netscope {

using MultiIndex = std::vector<int>;

inline int norm_of(const MultiIndex& k) {
    int t = 0;
    for (int e : k) t += e;
    return t;
}

inline MultiIndex axis_index(int s, int j, int value) {
    MultiIndex k(static_cast<std::size_t>(s), 0);
    k[static_cast<std::size_t>(j)] = value;
    return k;
}

/// Graded lexicographic order: first by |k|, then lexicographically. Maps
/// keyed this way iterate level by level, which is the enumeration order
/// used for the beta summaries and for deterministic tie-breaking.
struct GradedLex {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        const int na = norm_of(a), nb = norm_of(b);
        if (na != nb) return na < nb;
        return a < b;
    }
};

template <typename T>
using IndexMap = std::map<MultiIndex, T, GradedLex>;

/// Aggregate pair counts of a point set in a counting base b:
///   M[k] = ordered pairs of distinct points sharing the first k_j digits in
///          every coordinate j (present only when nonzero);
///   N[i] = ordered pairs whose shared-prefix vector is exactly i.
/// k_max[j] bounds the depth at which any pair still shares digits; all
/// counts vanish beyond it.
struct PairCounts {
    int base = 2;
    int s = 0;
    std::uint64_t n = 0;
    std::vector<int> k_max;
    IndexMap<std::uint64_t> M;
    IndexMap<std::uint64_t> N;

    std::uint64_t pairs() const { return n * (n - 1); }
    std::uint64_t M_at(const MultiIndex& k) const {
        const auto it = M.find(k);
        return it == M.end() ? 0 : it->second;
    }
    std::uint64_t N_at(const MultiIndex& i) const {
        const auto it = N.find(i);
        return it == N.end() ? 0 : it->second;
    }
};

namespace detail {

struct PrefixGroup {
    std::vector<std::uint32_t> pts;
};

// Depth-first walk over the k-grid. Each k is visited once (its canonical
// parent decrements the last nonzero entry) and carries the partition of
// points into groups sharing the k-prefix; only groups of size >= 2
// contribute pairs, so singletons are dropped as the walk deepens.
inline void count_pairs_dfs(const PointSet& ps, MultiIndex& k, int min_axis,
                            const std::vector<PrefixGroup>& groups, IndexMap<std::uint64_t>& M) {
    std::uint64_t m = 0;
    for (const auto& g : groups) {
        const auto c = static_cast<std::uint64_t>(g.pts.size());
        m += c * (c - 1);
    }
    if (m == 0) return;
    M.emplace(k, m);

    for (int j = min_axis; j < ps.s; ++j) {
        const int depth = k[static_cast<std::size_t>(j)];  // next digit index in dim j
        if (depth >= ps.precision) continue;
        std::vector<PrefixGroup> refined;
        std::unordered_map<unsigned, std::size_t> slot;
        for (const auto& g : groups) {
            slot.clear();
            const std::size_t first = refined.size();
            for (const std::uint32_t p : g.pts) {
                const unsigned d = ps.coord(p, j)[static_cast<std::size_t>(depth)];
                auto [it, inserted] = slot.emplace(d, refined.size());
                if (inserted) refined.emplace_back();
                refined[it->second].pts.push_back(p);
            }
            // drop singleton buckets created from this group
            std::size_t w = first;
            for (std::size_t r = first; r < refined.size(); ++r)
                if (refined[r].pts.size() >= 2) {
                    if (w != r) refined[w] = std::move(refined[r]);
                    ++w;
                }
            refined.resize(w);
        }
        if (refined.empty()) continue;
        ++k[static_cast<std::size_t>(j)];
        count_pairs_dfs(ps, k, j, refined, M);
        --k[static_cast<std::size_t>(j)];
    }
}

}  // namespace detail

/// Counts M and N for all multi-indices with nonzero counts. Requires the
/// point set to be expressed in the counting base and to have pairwise
/// distinct coordinate values in every dimension (checked; violations are
/// rejected with a diagnostic).
inline PairCounts count_pairs(const PointSet& ps, int base) {
    if (ps.base != base)
        throw std::invalid_argument("count_pairs: point set is in base " + std::to_string(ps.base) +
                                    ", rebase it to " + std::to_string(base) + " first");
    if (ps.n < 2) throw std::invalid_argument("count_pairs: need at least two points");

    PairCounts pc;
    pc.base = base;
    pc.s = ps.s;
    pc.n = ps.n;
    pc.k_max.reserve(static_cast<std::size_t>(ps.s));
    for (int j = 0; j < ps.s; ++j) pc.k_max.push_back(max_shared_prefix(ps, j));

    // M by prefix-bucket refinement
    std::vector<detail::PrefixGroup> root(1);
    root[0].pts.resize(ps.n);
    for (std::size_t i = 0; i < ps.n; ++i) root[0].pts[i] = static_cast<std::uint32_t>(i);
    MultiIndex k(static_cast<std::size_t>(ps.s), 0);
    detail::count_pairs_dfs(ps, k, 0, root, pc.M);

    // N by inclusion-exclusion over the e in {0,1}^s shifts of M
    IndexMap<std::uint64_t> candidates;
    for (const auto& [kk, m] : pc.M) {
        (void)m;
        // every i with N(i) != 0 satisfies M(i) != 0, so the support of M
        // already contains all candidates
        candidates.emplace(kk, 0);
    }
    for (auto& [i, value] : candidates) {
        long long acc = 0;
        MultiIndex probe = i;
        const unsigned masks = 1u << ps.s;
        for (unsigned e = 0; e < masks; ++e) {
            int bits = 0;
            for (int j = 0; j < ps.s; ++j)
                if (e & (1u << j)) {
                    ++probe[static_cast<std::size_t>(j)];
                    ++bits;
                }
            const auto m = pc.M_at(probe);
            acc += (bits % 2 == 0) ? static_cast<long long>(m) : -static_cast<long long>(m);
            for (int j = 0; j < ps.s; ++j)
                if (e & (1u << j)) --probe[static_cast<std::size_t>(j)];
        }
        if (acc < 0) throw std::logic_error("count_pairs: negative N from inclusion-exclusion");
        value = static_cast<std::uint64_t>(acc);
    }
    for (const auto& [i, v] : candidates)
        if (v > 0) pc.N.emplace(i, v);
    return pc;
}

/// Per-point count of the other points lying in the same elementary
/// k-interval (the per-point version of M).
inline std::vector<std::uint64_t> m_per_point(const PointSet& ps, const MultiIndex& k) {
    if (static_cast<int>(k.size()) != ps.s) throw std::invalid_argument("m_per_point: wrong index length");
    for (int e : k)
        if (e < 0) throw std::invalid_argument("m_per_point: negative depth");
    std::unordered_map<std::string, std::uint64_t> bucket_size;
    std::vector<std::string> keys(ps.n);
    for (std::size_t i = 0; i < ps.n; ++i) {
        std::string key;
        for (int j = 0; j < ps.s; ++j) {
            // prefixes deeper than the stored precision only match when the
            // whole coordinate vector does
            const auto depth = std::min(k[static_cast<std::size_t>(j)], ps.precision);
            const auto c = ps.coord(i, j);
            key.append(reinterpret_cast<const char*>(c.data()), static_cast<std::size_t>(depth));
            key.push_back('\xff');
        }
        ++bucket_size[key];
        keys[i] = std::move(key);
    }
    std::vector<std::uint64_t> out(ps.n);
    for (std::size_t i = 0; i < ps.n; ++i) out[i] = bucket_size[keys[i]] - 1;
    return out;
}

/// Per-point inclusion-exclusion: n(k; point l) = sum over e in {0,1}^s of
/// (-1)^|e| m(k+e; point l). Also the second, slower route to N used to
/// cross-check count_pairs.
inline std::vector<std::int64_t> n_per_point(const PointSet& ps, const MultiIndex& k) {
    std::vector<std::int64_t> out(ps.n, 0);
    MultiIndex probe = k;
    const unsigned masks = 1u << ps.s;
    for (unsigned e = 0; e < masks; ++e) {
        int bits = 0;
        for (int j = 0; j < ps.s; ++j)
            if (e & (1u << j)) {
                ++probe[static_cast<std::size_t>(j)];
                ++bits;
            }
        const auto m = m_per_point(ps, probe);
        const int sign = (bits % 2 == 0) ? 1 : -1;
        for (std::size_t i = 0; i < ps.n; ++i) out[i] += sign * static_cast<std::int64_t>(m[i]);
        for (int j = 0; j < ps.s; ++j)
            if (e & (1u << j)) --probe[static_cast<std::size_t>(j)];
    }
    return out;
}

inline std::uint64_t aggregate_n(const PointSet& ps, const MultiIndex& k) {
    std::int64_t total = 0;
    for (auto v : n_per_point(ps, k)) total += v;
    if (total < 0) throw std::logic_error("aggregate_n: negative count");
    return static_cast<std::uint64_t>(total);
}

/// C_b(k) = b^|k| M_b(k) / (n(n-1)), exact.
inline Rational c_value(const PairCounts& pc, const MultiIndex& k) {
    return Rational(pow_int(static_cast<std::uint64_t>(pc.base), static_cast<std::uint64_t>(norm_of(k))) *
                        pc.M_at(k),
                    BigInt(pc.pairs()));
}

struct BetaEntry {
    Rational value;
    MultiIndex argmax;
};

/// Full quality profile: every nonzero C value, the per-level maxima
/// beta_{b,k}, their overall maximum (over k >= 1, matching how the summary
/// figure is quoted), and the quasi-equidistribution verdict.
struct QualityProfile {
    int base = 2;
    int s = 0;
    std::uint64_t n = 0;
    std::vector<int> horizon;
    IndexMap<std::uint64_t> M;
    IndexMap<Rational> values;        // nonzero C values only
    std::map<int, BetaEntry> beta;    // level |k| >= 1 -> max C and arg max
    Rational c_max = 0;               // max over |k| >= 1
    bool cqe = false;
    std::optional<int> t;

    Rational value_at(const MultiIndex& k) const {
        const auto it = values.find(k);
        return it == values.end() ? Rational(0) : it->second;
    }
    Rational beta_at(int level) const {
        const auto it = beta.find(level);
        return it == beta.end() ? Rational(0) : it->second.value;
    }
};

inline QualityProfile make_profile(const PairCounts& pc) {
    QualityProfile qp;
    qp.base = pc.base;
    qp.s = pc.s;
    qp.n = pc.n;
    qp.horizon = pc.k_max;
    qp.M = pc.M;
    bool all_le_one = true;
    for (const auto& [k, m] : pc.M) {
        Rational c(pow_int(static_cast<std::uint64_t>(pc.base), static_cast<std::uint64_t>(norm_of(k))) * m,
                   BigInt(pc.pairs()));
        const int level = norm_of(k);
        if (level >= 1) {
            auto [it, inserted] = qp.beta.try_emplace(level, BetaEntry{c, k});
            if (!inserted && c > it->second.value) it->second = BetaEntry{c, k};
            if (c > qp.c_max) qp.c_max = c;
            if (c > 1) all_le_one = false;
        }
        qp.values.emplace(k, std::move(c));
    }
    qp.cqe = all_le_one;
    return qp;
}

inline QualityProfile make_profile(const PointSet& ps, int base) {
    return make_profile(count_pairs(ps, base));
}

inline bool is_cqe(const QualityProfile& qp) { return qp.cqe; }

/// True iff n = b^m and every elementary k-interval holds exactly
/// b^(m - |k|) points.
inline bool is_equidistributed(const PointSet& ps, const MultiIndex& k) {
    if (static_cast<int>(k.size()) != ps.s) throw std::invalid_argument("is_equidistributed: wrong index length");
    std::uint64_t n = ps.n;
    int m = 0;
    while (n % static_cast<std::uint64_t>(ps.base) == 0) {
        n /= static_cast<std::uint64_t>(ps.base);
        ++m;
    }
    if (n != 1) throw std::invalid_argument("is_equidistributed: n is not a power of the base");
    const int level = norm_of(k);
    if (level > m) throw std::invalid_argument("is_equidistributed: |k| exceeds m");
    // every interval has the right count iff every nonempty one does and the
    // nonempty ones exhaust all b^|k| intervals; with sum n = b^m both follow
    // from each nonempty bucket holding exactly b^(m-|k|).
    std::unordered_map<std::string, std::uint64_t> bucket;
    for (std::size_t i = 0; i < ps.n; ++i) {
        std::string key;
        for (int j = 0; j < ps.s; ++j) {
            const auto c = ps.coord(i, j);
            key.append(reinterpret_cast<const char*>(c.data()), static_cast<std::size_t>(k[static_cast<std::size_t>(j)]));
            key.push_back('\xff');
        }
        ++bucket[key];
    }
    std::uint64_t want = 1;
    for (int i = 0; i < m - level; ++i) want *= static_cast<std::uint64_t>(ps.base);
    for (const auto& [key, count] : bucket)
        if (count != want) return false;
    return true;
}

/// Quality parameter recovered from the profile:
///   t = m - max{ l <= m : C_b(k) <= 1 for every |k| = l }.
/// Valid when every one-dimensional projection is a (0,m,1)-net, which is
/// verified from the profile itself (axis counts must match the perfectly
/// stratified closed form); refuses otherwise.
inline int t_parameter(const QualityProfile& qp, int m) {
    BigInt n_expected = pow_int(static_cast<std::uint64_t>(qp.base), static_cast<std::uint64_t>(m));
    if (BigInt(qp.n) != n_expected)
        throw std::invalid_argument("t_parameter: n != base^m");
    // axis check: dimension j is a (0,m,1)-net iff M(k e_j) = b^m (b^(m-k)-1)
    for (int j = 0; j < qp.s; ++j) {
        for (int d = 1; d <= m; ++d) {
            BigInt want = n_expected * (pow_int(static_cast<std::uint64_t>(qp.base),
                                                static_cast<std::uint64_t>(m - d)) -
                                        1);
            MultiIndex k = axis_index(qp.s, j, d);
            const auto it = qp.M.find(k);
            const BigInt have = it == qp.M.end() ? BigInt(0) : BigInt(it->second);
            if (have != want)
                throw std::invalid_argument(
                    "t_parameter: one-dimensional projection " + std::to_string(j) +
                    " is not a (0,m,1)-net; the recovery formula does not apply");
        }
    }
    int best = 0;
    for (int level = 1; level <= m; ++level)
        if (qp.beta_at(level) <= 1) best = level;
    return m - best;
}

}  // namespace netscope
