#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "octovisc/errors.hpp"
#include "octovisc/linalg.hpp"
#include "octovisc/octonion.hpp"

namespace octovisc {

/// V = (X, Y, Z) in R^24, each block an octonion coefficient vector.
struct TriplePoint {
    Octonion x, y, z;

    static constexpr std::size_t kDim = 24;

    static TriplePoint from_flat(std::span<const double> v) {
        if (v.size() != kDim) throw DimensionMismatch("TriplePoint needs 24 coordinates");
        TriplePoint p;
        for (std::size_t i = 0; i < 8; ++i) {
            p.x.c[i] = v[i];
            p.y.c[i] = v[8 + i];
            p.z.c[i] = v[16 + i];
        }
        return p;
    }
    [[nodiscard]] Vector flat() const {
        Vector v(kDim);
        for (std::size_t i = 0; i < 8; ++i) {
            v[i] = x.c[i];
            v[8 + i] = y.c[i];
            v[16 + i] = z.c[i];
        }
        return v;
    }
    [[nodiscard]] double norm() const { return octovisc::norm(flat()); }

    friend TriplePoint operator*(double s, TriplePoint p) {
        p.x = s * p.x;
        p.y = s * p.y;
        p.z = s * p.z;
        return p;
    }
    friend bool operator==(const TriplePoint&, const TriplePoint&) = default;
};

/// One monomial sign * X_i * Y_j * Z_k of the expanded triality form.
struct TrilinearTerm {
    int sign;
    int i, j, k;
};

/// The 64 monomials of Re((oX . oY) . oZ), transcribed row by row: the
/// coefficient of X_i is a signed sum of Z_k Y_j.
inline constexpr std::array<TrilinearTerm, 64> kExpandedP24{{
    // X0: Z0Y0-Z1Y1-Z2Y2-Z3Y3-Z4Y4-Z5Y5-Z6Y6-Z7Y7
    {+1, 0, 0, 0}, {-1, 0, 1, 1}, {-1, 0, 2, 2}, {-1, 0, 3, 3},
    {-1, 0, 4, 4}, {-1, 0, 5, 5}, {-1, 0, 6, 6}, {-1, 0, 7, 7},
    // X1: -Z1Y0-Z0Y1-Z4Y2-Z7Y3+Z2Y4-Z6Y5+Z5Y6+Z3Y7
    {-1, 1, 0, 1}, {-1, 1, 1, 0}, {-1, 1, 2, 4}, {-1, 1, 3, 7},
    {+1, 1, 4, 2}, {-1, 1, 5, 6}, {+1, 1, 6, 5}, {+1, 1, 7, 3},
    // X2: -Z2Y0+Z4Y1-Z0Y2-Z5Y3-Z1Y4+Z3Y5-Z7Y6+Z6Y7
    {-1, 2, 0, 2}, {+1, 2, 1, 4}, {-1, 2, 2, 0}, {-1, 2, 3, 5},
    {-1, 2, 4, 1}, {+1, 2, 5, 3}, {-1, 2, 6, 7}, {+1, 2, 7, 6},
    // X3: -Z3Y0+Z7Y1+Z5Y2-Z0Y3-Z6Y4-Z2Y5+Z4Y6-Z1Y7
    {-1, 3, 0, 3}, {+1, 3, 1, 7}, {+1, 3, 2, 5}, {-1, 3, 3, 0},
    {-1, 3, 4, 6}, {-1, 3, 5, 2}, {+1, 3, 6, 4}, {-1, 3, 7, 1},
    // X4: -Z4Y0-Z2Y1+Z1Y2+Z6Y3-Z0Y4-Z7Y5-Z3Y6+Z5Y7
    {-1, 4, 0, 4}, {-1, 4, 1, 2}, {+1, 4, 2, 1}, {+1, 4, 3, 6},
    {-1, 4, 4, 0}, {-1, 4, 5, 7}, {-1, 4, 6, 3}, {+1, 4, 7, 5},
    // X5: -Z5Y0+Z6Y1-Z3Y2+Z2Y3+Z7Y4-Z0Y5-Z1Y6-Z4Y7
    {-1, 5, 0, 5}, {+1, 5, 1, 6}, {-1, 5, 2, 3}, {+1, 5, 3, 2},
    {+1, 5, 4, 7}, {-1, 5, 5, 0}, {-1, 5, 6, 1}, {-1, 5, 7, 4},
    // X6: -Z6Y0-Z5Y1+Z7Y2-Z4Y3+Z3Y4+Z1Y5-Z0Y6-Z2Y7
    {-1, 6, 0, 6}, {-1, 6, 1, 5}, {+1, 6, 2, 7}, {-1, 6, 3, 4},
    {+1, 6, 4, 3}, {+1, 6, 5, 1}, {-1, 6, 6, 0}, {-1, 6, 7, 2},
    // X7: -Z7Y0-Z3Y1-Z6Y2+Z1Y3-Z5Y4+Z4Y5+Z2Y6-Z0Y7
    {-1, 7, 0, 7}, {-1, 7, 1, 3}, {-1, 7, 2, 6}, {+1, 7, 3, 1},
    {-1, 7, 4, 5}, {+1, 7, 5, 4}, {+1, 7, 6, 2}, {-1, 7, 7, 0},
}};

/// P(X,Y,Z) = Re((oX . oY) . oZ) through the octonion product.
inline double eval_P24_octonion(const TriplePoint& v) noexcept { return re_part(mul(mul(v.x, v.y), v.z)); }

/// P(X,Y,Z) through the expanded 64-term polynomial.
inline double eval_P24_polynomial(const TriplePoint& v) noexcept {
    double s = 0.0;
    for (const auto& t : kExpandedP24)
        s += t.sign * v.x.c[static_cast<std::size_t>(t.i)] * v.y.c[static_cast<std::size_t>(t.j)] *
             v.z.c[static_cast<std::size_t>(t.k)];
    return s;
}

inline double eval_P24(const TriplePoint& v) noexcept { return eval_P24_polynomial(v); }

struct DualEvaluation {
    double octonion;
    double polynomial;

    /// |difference| / (1 + |X||Y||Z|).
    [[nodiscard]] double scaled_gap(double m) const noexcept {
        return std::abs(octonion - polynomial) / (1.0 + m);
    }
};

inline DualEvaluation eval_P24_dual(const TriplePoint& v) noexcept {
    return {eval_P24_octonion(v), eval_P24_polynomial(v)};
}

inline Vector grad_P24(const TriplePoint& v) {
    Vector g(24, 0.0);
    for (const auto& t : kExpandedP24) {
        const auto i = static_cast<std::size_t>(t.i);
        const auto j = static_cast<std::size_t>(t.j);
        const auto k = static_cast<std::size_t>(t.k);
        g[i] += t.sign * v.y.c[j] * v.z.c[k];
        g[8 + j] += t.sign * v.x.c[i] * v.z.c[k];
        g[16 + k] += t.sign * v.x.c[i] * v.y.c[j];
    }
    return g;
}

/// 24x24 Hessian; linear in V with vanishing diagonal 8x8 blocks.
inline SymMatrix hess_P24(const TriplePoint& v) {
    SymMatrix h(24, 24);
    for (const auto& t : kExpandedP24) {
        const auto i = static_cast<std::size_t>(t.i);
        const auto j = 8 + static_cast<std::size_t>(t.j);
        const auto k = 16 + static_cast<std::size_t>(t.k);
        h(i, j) += t.sign * v.z.c[k - 16];
        h(i, k) += t.sign * v.y.c[j - 8];
        h(j, k) += t.sign * v.x.c[i];
    }
    for (std::size_t r = 0; r < 24; ++r)
        for (std::size_t c = r + 1; c < 24; ++c) h(c, r) = h(r, c);
    return h;
}

struct Invariants {
    double m; ///< |X| |Y| |Z|
    double w; ///< P(V)
};

inline Invariants invariants_mW(const TriplePoint& v) {
    return {norm(v.x) * norm(v.y) * norm(v.z), eval_P24(v)};
}

/// Re(q1 q2 q3); the quaternion product is associative so no bracketing is needed.
inline double eval_P12(const Quaternion& q1, const Quaternion& q2, const Quaternion& q3) noexcept {
    return mul(mul(q1, q2), q3).c[0];
}

/// Embeds a quaternion triple into R^24.
inline TriplePoint embed_triple(const Quaternion& q1, const Quaternion& q2, const Quaternion& q3) noexcept {
    return {q1.embed(), q2.embed(), q3.embed()};
}

// --- 4x4 building blocks ---------------------------------------------------

enum class BlockPattern { M, L };

using Block4 = std::array<std::array<double, 4>, 4>;

inline Block4 build_block(const std::array<double, 4>& s, BlockPattern pattern) noexcept {
    const double s0 = s[0], s1 = s[1], s2 = s[2], s3 = s[3];
    if (pattern == BlockPattern::M) {
        return {{{s0, -s1, -s2, -s3}, {-s1, -s0, -s3, s2}, {-s2, s3, -s0, -s1}, {-s3, -s2, s1, -s0}}};
    }
    return {{{-s0, -s1, s2, -s3}, {s1, -s0, -s3, -s2}, {-s2, s3, -s0, -s1}, {s3, s2, s1, -s0}}};
}

inline Matrix to_matrix(const Block4& b) {
    Matrix m(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) m(i, j) = b[i][j];
    return m;
}

/// Coordinate order in which the Hessian at a quaternionic point splits into
/// two 12x12 blocks: {X0,X1,X2,X4,Y0,..,Z4, X5,X6,X3,X7,Y5,..,Z7}.
inline constexpr std::array<std::size_t, 24> kQuaternionicOrder = [] {
    std::array<std::size_t, 24> p{};
    constexpr std::array<std::size_t, 4> head{0, 1, 2, 4};
    constexpr std::array<std::size_t, 4> tail{5, 6, 3, 7};
    std::size_t n = 0;
    for (std::size_t b = 0; b < 3; ++b)
        for (auto i : head) p[n++] = 8 * b + i;
    for (std::size_t b = 0; b < 3; ++b)
        for (auto i : tail) p[n++] = 8 * b + i;
    return p;
}();

inline Matrix permute(const Matrix& a, std::span<const std::size_t> order) {
    Matrix out(order.size(), order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = 0; j < order.size(); ++j) out(i, j) = a(order[i], order[j]);
    return out;
}

/// The 12x12 block [[0, B_z, B_y^T], [B_z^T, 0, B_x], [B_y, B_x^T, 0]] with
/// B the M- or L-pattern. The (X,Z) block carries the transpose of B_y.
inline Matrix quaternionic_block(const Quaternion& x, const Quaternion& y, const Quaternion& z,
                                 BlockPattern pattern) {
    const Matrix bx = to_matrix(build_block(x.c, pattern));
    const Matrix by = to_matrix(build_block(y.c, pattern));
    const Matrix bz = to_matrix(build_block(z.c, pattern));
    Matrix h(12, 12);
    auto put = [&h](std::size_t r0, std::size_t c0, const Matrix& b, bool transpose) {
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) h(r0 + i, c0 + j) = transpose ? b(j, i) : b(i, j);
    };
    put(0, 4, bz, false);
    put(4, 0, bz, true);
    put(0, 8, by, true);
    put(8, 0, by, false);
    put(4, 8, bx, false);
    put(8, 4, bx, true);
    return h;
}

// --- generic cubic forms ----------------------------------------------------

/// A cubic form on R^n stored as monomials coef * x_i x_j x_k.
class CubicForm {
public:
    struct Monomial {
        double coef;
        std::size_t i, j, k;
    };

    CubicForm(std::size_t n, std::vector<Monomial> terms) : n_(n), terms_(std::move(terms)) {
        for (const auto& t : terms_)
            if (t.i >= n_ || t.j >= n_ || t.k >= n_) throw DimensionMismatch("monomial index out of range");
    }

    static CubicForm p24() {
        std::vector<Monomial> t;
        for (const auto& e : kExpandedP24)
            t.push_back({double(e.sign), std::size_t(e.i), 8 + std::size_t(e.j), 16 + std::size_t(e.k)});
        return {24, std::move(t)};
    }

    /// Re(q1 q2 q3) on R^12 = H^3.
    static CubicForm p12() {
        constexpr std::array<int, 8> slot{0, 1, 2, -1, 3, -1, -1, -1};
        std::vector<Monomial> t;
        for (const auto& e : kExpandedP24) {
            const int a = slot[std::size_t(e.i)], b = slot[std::size_t(e.j)], c = slot[std::size_t(e.k)];
            if (a < 0 || b < 0 || c < 0) continue;
            t.push_back({double(e.sign), std::size_t(a), 4 + std::size_t(b), 8 + std::size_t(c)});
        }
        return {12, std::move(t)};
    }

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] const std::vector<Monomial>& terms() const noexcept { return terms_; }

    [[nodiscard]] bool is_zero() const noexcept {
        for (const auto& t : terms_)
            if (t.coef != 0.0) return false;
        return true;
    }

    [[nodiscard]] double eval(std::span<const double> x) const {
        check(x);
        double s = 0.0;
        for (const auto& t : terms_) s += t.coef * x[t.i] * x[t.j] * x[t.k];
        return s;
    }

    [[nodiscard]] Vector grad(std::span<const double> x) const {
        check(x);
        Vector g(n_, 0.0);
        for (const auto& t : terms_) {
            g[t.i] += t.coef * x[t.j] * x[t.k];
            g[t.j] += t.coef * x[t.i] * x[t.k];
            g[t.k] += t.coef * x[t.i] * x[t.j];
        }
        return g;
    }

    [[nodiscard]] SymMatrix hess(std::span<const double> x) const {
        check(x);
        SymMatrix h(n_, n_);
        auto add = [&h](std::size_t a, std::size_t b, double v) {
            h(a, b) += v;
            h(b, a) += v;
        };
        for (const auto& t : terms_) {
            add(t.i, t.j, t.coef * x[t.k]);
            add(t.i, t.k, t.coef * x[t.j]);
            add(t.j, t.k, t.coef * x[t.i]);
        }
        return h;
    }

private:
    void check(std::span<const double> x) const {
        if (x.size() != n_) throw DimensionMismatch("cubic form dimension mismatch");
    }

    std::size_t n_;
    std::vector<Monomial> terms_;
};

} // namespace octovisc
