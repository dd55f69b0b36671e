#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace octovisc {

namespace detail {

struct BasisProduct {
    int sign;
    int index;
};

using ProductTable = std::array<std::array<BasisProduct, 8>, 8>;

// Generated from e1 e2 = e4 and the index-shift rule e_i e_{i+1} = e_{i+3}
// (indices of imaginary units taken mod 7): the seven quaternionic lines are
// (i, i+1, i+3), each cyclically oriented.
constexpr ProductTable make_product_table() {
    ProductTable t{};
    for (int i = 0; i < 8; ++i) {
        t[0][i] = {1, i};
        t[i][0] = {1, i};
    }
    for (int i = 1; i < 8; ++i) t[i][i] = {-1, 0};
    for (int k = 0; k < 7; ++k) {
        const int a = k + 1;
        const int b = (k + 1) % 7 + 1;
        const int c = (k + 3) % 7 + 1;
        const int line[3][3] = {{a, b, c}, {b, c, a}, {c, a, b}};
        for (const auto& l : line) {
            t[l[0]][l[1]] = {1, l[2]};
            t[l[1]][l[0]] = {-1, l[2]};
        }
    }
    return t;
}

} // namespace detail

inline constexpr detail::ProductTable kOctonionTable = detail::make_product_table();

/// Element of the Cayley algebra: c[0] is the real part, c[i] the
/// coefficient of e_i.
struct Octonion {
    std::array<double, 8> c{};

    static constexpr Octonion unit(int i) noexcept {
        Octonion o;
        o.c[static_cast<std::size_t>(i)] = 1.0;
        return o;
    }
    static constexpr Octonion real(double r) noexcept {
        Octonion o;
        o.c[0] = r;
        return o;
    }

    constexpr double operator[](std::size_t i) const noexcept { return c[i]; }
    constexpr double& operator[](std::size_t i) noexcept { return c[i]; }

    friend constexpr Octonion operator+(Octonion a, const Octonion& b) noexcept {
        for (std::size_t i = 0; i < 8; ++i) a.c[i] += b.c[i];
        return a;
    }
    friend constexpr Octonion operator-(Octonion a, const Octonion& b) noexcept {
        for (std::size_t i = 0; i < 8; ++i) a.c[i] -= b.c[i];
        return a;
    }
    friend constexpr Octonion operator*(double s, Octonion a) noexcept {
        for (double& x : a.c) x *= s;
        return a;
    }
    friend constexpr bool operator==(const Octonion&, const Octonion&) = default;
};

constexpr Octonion mul(const Octonion& a, const Octonion& b) noexcept {
    Octonion r;
    for (std::size_t i = 0; i < 8; ++i) {
        if (a.c[i] == 0.0) continue;
        for (std::size_t j = 0; j < 8; ++j) {
            const auto [sign, k] = kOctonionTable[i][j];
            r.c[static_cast<std::size_t>(k)] += sign * a.c[i] * b.c[j];
        }
    }
    return r;
}

constexpr Octonion operator*(const Octonion& a, const Octonion& b) noexcept { return mul(a, b); }

constexpr Octonion conj(Octonion o) noexcept {
    for (std::size_t i = 1; i < 8; ++i) o.c[i] = -o.c[i];
    return o;
}

constexpr double re_part(const Octonion& o) noexcept { return o.c[0]; }

inline double norm(const Octonion& o) noexcept {
    double s = 0.0;
    for (double x : o.c) s += x * x;
    return std::sqrt(s);
}

/// Quaternion over the basis {1, e1, e2, e4} of the Cayley algebra.
struct Quaternion {
    std::array<double, 4> c{};

    static constexpr std::array<std::size_t, 4> kOctonionSlots{0, 1, 2, 4};

    constexpr Octonion embed() const noexcept {
        Octonion o;
        for (std::size_t i = 0; i < 4; ++i) o.c[kOctonionSlots[i]] = c[i];
        return o;
    }
    /// Projection onto the quaternion span (drops e3, e5, e6, e7).
    static constexpr Quaternion project(const Octonion& o) noexcept {
        Quaternion q;
        for (std::size_t i = 0; i < 4; ++i) q.c[i] = o.c[kOctonionSlots[i]];
        return q;
    }
    friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

/// Product inside the subalgebra spanned by {1, e1, e2, e4}.
constexpr Quaternion mul(const Quaternion& a, const Quaternion& b) noexcept {
    return Quaternion::project(mul(a.embed(), b.embed()));
}

constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) noexcept { return mul(a, b); }

inline double norm(const Quaternion& q) noexcept {
    double s = 0.0;
    for (double x : q.c) s += x * x;
    return std::sqrt(s);
}

} // namespace octovisc
