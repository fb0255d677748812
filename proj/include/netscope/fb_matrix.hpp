#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netscope/digits.hpp"
#include "netscope/rng.hpp"

namespace netscope {

inline bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline void check_prime_base(int base) {
    check_base(base);
    if (!is_prime(base)) throw std::invalid_argument("base must be prime, got " + std::to_string(base));
}

/// a^-1 mod p via extended Euclid; requires gcd(a, p) = 1.
inline int mod_inverse(int a, int p) {
    int t = 0, new_t = 1;
    int r = p, new_r = a % p;
    while (new_r != 0) {
        const int q = r / new_r;
        t -= q * new_t;
        std::swap(t, new_t);
        r -= q * new_r;
        std::swap(r, new_r);
    }
    if (r != 1) throw std::invalid_argument("mod_inverse: not invertible");
    return t < 0 ? t + p : t;
}

/// Dense matrix over the prime field F_b, entries reduced mod b.
struct FbMatrix {
    int base = 2;
    int rows = 0;
    int cols = 0;
    std::vector<digit_t> e;  // row-major

    FbMatrix() = default;
    FbMatrix(int base_, int rows_, int cols_) : base(base_), rows(rows_), cols(cols_) {
        check_prime_base(base_);
        e.assign(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0);
    }

    digit_t& at(int r, int c) { return e[static_cast<std::size_t>(r) * cols + c]; }
    digit_t at(int r, int c) const { return e[static_cast<std::size_t>(r) * cols + c]; }
    std::span<const digit_t> row(int r) const {
        return {e.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }

    static FbMatrix identity(int base, int m) {
        FbMatrix I(base, m, m);
        for (int i = 0; i < m; ++i) I.at(i, i) = 1;
        return I;
    }

    bool operator==(const FbMatrix& o) const {
        return base == o.base && rows == o.rows && cols == o.cols && e == o.e;
    }
};

inline std::vector<digit_t> matvec(const FbMatrix& M, std::span<const digit_t> v) {
    if (static_cast<std::size_t>(M.cols) != v.size())
        throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<digit_t> out(static_cast<std::size_t>(M.rows));
    for (int r = 0; r < M.rows; ++r) {
        unsigned acc = 0;
        const digit_t* row = M.e.data() + static_cast<std::size_t>(r) * M.cols;
        for (int c = 0; c < M.cols; ++c) acc += static_cast<unsigned>(row[c]) * v[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(r)] = static_cast<digit_t>(acc % static_cast<unsigned>(M.base));
    }
    return out;
}

inline FbMatrix matmul(const FbMatrix& A, const FbMatrix& B) {
    if (A.base != B.base) throw std::invalid_argument("matmul: base mismatch");
    if (A.cols != B.rows) throw std::invalid_argument("matmul: dimension mismatch");
    FbMatrix C(A.base, A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            const unsigned a = A.at(i, k);
            if (!a) continue;
            for (int j = 0; j < B.cols; ++j)
                C.at(i, j) = static_cast<digit_t>((C.at(i, j) + a * B.at(k, j)) % static_cast<unsigned>(A.base));
        }
    return C;
}

/// Rank over F_b by Gaussian elimination with modular pivots. The first
/// nonzero entry in each column is used as pivot; exact arithmetic, no
/// tie-breaking ambiguity.
inline int rank(FbMatrix M) {
    const int b = M.base;
    int rank_ = 0;
    for (int col = 0; col < M.cols && rank_ < M.rows; ++col) {
        int pivot = -1;
        for (int r = rank_; r < M.rows; ++r)
            if (M.at(r, col) != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != rank_)
            for (int c = col; c < M.cols; ++c) std::swap(M.at(pivot, c), M.at(rank_, c));
        const int inv = mod_inverse(M.at(rank_, col), b);
        for (int c = col; c < M.cols; ++c)
            M.at(rank_, c) = static_cast<digit_t>(static_cast<unsigned>(M.at(rank_, c)) * inv % b);
        for (int r = 0; r < M.rows; ++r) {
            if (r == rank_) continue;
            const unsigned f = M.at(r, col);
            if (!f) continue;
            for (int c = col; c < M.cols; ++c) {
                const unsigned v = M.at(r, c) + static_cast<unsigned>(b - 1) * f % b * M.at(rank_, c);
                M.at(r, c) = static_cast<digit_t>(v % static_cast<unsigned>(b));
            }
        }
        ++rank_;
    }
    return rank_;
}

struct GeneratingMatrices {
    int base = 2;
    int s = 0;
    std::vector<FbMatrix> C;
};

/// Matrix of the first k_j rows of each C_j, stacked in coordinate order.
/// rank(stack_rows(C, k)) is the rank figure r(k); r(0) = 0 for the empty
/// stack.
inline FbMatrix stack_rows(const GeneratingMatrices& gm, std::span<const int> k) {
    if (static_cast<int>(k.size()) != gm.s) throw std::invalid_argument("stack_rows: wrong index length");
    int total = 0;
    int cols = gm.C.empty() ? 0 : gm.C.front().cols;
    for (int j = 0; j < gm.s; ++j) {
        if (k[static_cast<std::size_t>(j)] < 0 || k[static_cast<std::size_t>(j)] > gm.C[static_cast<std::size_t>(j)].rows)
            throw std::invalid_argument("stack_rows: k exceeds available rows in coordinate " +
                                        std::to_string(j));
        total += k[static_cast<std::size_t>(j)];
    }
    FbMatrix out(gm.base, total, cols);
    int r = 0;
    for (int j = 0; j < gm.s; ++j)
        for (int i = 0; i < k[static_cast<std::size_t>(j)]; ++i, ++r)
            for (int c = 0; c < cols; ++c) out.at(r, c) = gm.C[static_cast<std::size_t>(j)].at(i, c);
    return out;
}

inline int rank_of_stack(const GeneratingMatrices& gm, std::span<const int> k) {
    return rank(stack_rows(gm, k));
}

/// Random non-singular lower triangular matrix: diagonal uniform in
/// {1,...,b-1}, entries below uniform in {0,...,b-1}, zero above.
inline FbMatrix random_nlt(int base, int m, Rng& rng) {
    check_prime_base(base);
    FbMatrix L(base, m, m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < r; ++c) L.at(r, c) = static_cast<digit_t>(rng.below(static_cast<std::uint64_t>(base)));
        L.at(r, r) = static_cast<digit_t>(1 + rng.below(static_cast<std::uint64_t>(base - 1)));
    }
    return L;
}

// ---- matrix file format ----
// header: base=<b> m=<m> s=<s>
// then s blocks of m rows, each row m whitespace-separated digits.

inline void write_matrices(std::ostream& os, const GeneratingMatrices& gm) {
    if (gm.C.empty()) throw std::invalid_argument("write_matrices: empty");
    const int m = gm.C.front().rows;
    for (const auto& M : gm.C)
        if (M.rows != m || M.cols != m)
            throw std::invalid_argument("write_matrices: file format requires square matrices of equal size");
    os << "base=" << gm.base << " m=" << m << " s=" << gm.s << "\n";
    for (const auto& M : gm.C)
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                if (c) os << ' ';
                os << static_cast<int>(M.at(r, c));
            }
            os << "\n";
        }
}

inline GeneratingMatrices read_matrices(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("matrix file: missing header");
    int base = 0, m = 0, s = 0;
    {
        std::istringstream hs(header);
        std::string field;
        while (hs >> field) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) throw std::runtime_error("matrix file: bad header field " + field);
            const std::string key = field.substr(0, eq);
            const int value = std::stoi(field.substr(eq + 1));
            if (key == "base")
                base = value;
            else if (key == "m")
                m = value;
            else if (key == "s")
                s = value;
            else
                throw std::runtime_error("matrix file: unknown header key " + key);
        }
    }
    if (base < 2 || m < 1 || s < 1) throw std::runtime_error("matrix file: incomplete header");
    GeneratingMatrices gm;
    gm.base = base;
    gm.s = s;
    for (int j = 0; j < s; ++j) {
        FbMatrix M(base, m, m);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) {
                int d;
                if (!(is >> d)) throw std::runtime_error("matrix file: truncated");
                if (d < 0 || d >= base) throw std::runtime_error("matrix file: entry out of range");
                M.at(r, c) = static_cast<digit_t>(d);
            }
        gm.C.push_back(std::move(M));
    }
    return gm;
}

}  // namespace netscope
