#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "octovisc/certificate.hpp"
#include "octovisc/errors.hpp"
#include "octovisc/linalg.hpp"
#include "octovisc/random.hpp"
#include "octovisc/spectral.hpp"
#include "octovisc/trilinear.hpp"

namespace octovisc {

// --- exponent ----------------------------------------------------------------

/// The exponent delta of w = P / |x|^delta, restricted to [1, 2).
class Delta {
public:
    explicit Delta(double value) : value_(value) {
        if (!(value >= 1.0 && value < 2.0))
            throw DomainError("delta must lie in [1, 2), got " + std::to_string(value));
    }
    [[nodiscard]] double value() const noexcept { return value_; }
    operator double() const noexcept { return value_; }

    /// (2 - delta) / (4 + delta): the scalar ratio bound.
    [[nodiscard]] double scalar_epsilon() const noexcept { return (2.0 - value_) / (4.0 + value_); }
    /// min{(2 - delta)/(4 + delta), 1/20}: the matrix ratio bound.
    [[nodiscard]] double epsilon() const noexcept { return std::min(scalar_epsilon(), 1.0 / 20.0); }

private:
    double value_;
};

// --- the singular function and its Hessian -----------------------------------

struct WValue {
    double value;
    bool at_origin; ///< V = 0, where w is defined by continuity
};

/// w(V) = P(V) / |V|^delta.
inline WValue eval_w(const TriplePoint& v, double delta) {
    const double r = v.norm();
    if (r == 0.0) return {0.0, true};
    return {eval_P24(v) / std::pow(r, delta), false};
}

inline SymMatrix hess_w(const TriplePoint& v, double delta) {
    const Vector x = v.flat();
    const double r2 = dot(x, x);
    const double r = std::sqrt(r2);
    if (r < 1e-8) throw SingularPoint("hess_w is undefined at the origin");
    const double p = eval_P24(v);
    const Vector g = grad_P24(v);
    const double rd = std::pow(r, -delta);
    const double c_cross = -delta * rd / r2;
    const double c_id = -delta * p * rd / r2;
    const double c_vv = delta * (delta + 2.0) * p * rd / (r2 * r2);
    SymMatrix h = hess_P24(v);
    for (std::size_t i = 0; i < 24; ++i) {
        for (std::size_t j = i; j < 24; ++j) {
            h(i, j) = rd * h(i, j) + c_cross * (g[i] * x[j] + x[i] * g[j]) + c_vv * x[i] * x[j];
            h(j, i) = h(i, j);
        }
        h(i, i) += c_id;
    }
    return h;
}

// --- subspaces ---------------------------------------------------------------

/// A k-dimensional subspace of R^24 given by k orthonormal rows.
class Subspace {
public:
    explicit Subspace(Matrix basis, std::string label = "explicit") : basis_(std::move(basis)), label_(std::move(label)) {
        if (basis_.cols() != 24 || basis_.rows() == 0 || basis_.rows() > 24)
            throw DimensionMismatch("subspace basis must be k x 24 with 1 <= k <= 24");
        if (orthonormality_defect(basis_) > 1e-12) throw DomainError("subspace basis rows are not orthonormal");
    }

    /// span{e_1, ..., e_k}: the first k coordinates.
    static Subspace coordinate(std::size_t k) {
        Matrix b(k, 24);
        for (std::size_t i = 0; i < k; ++i) b(i, i) = 1.0;
        return Subspace(std::move(b), "coordinate-" + std::to_string(k));
    }

    /// Default 21-dimensional subspace used by the audits.
    static Subspace default21() { return coordinate(21); }

    /// Haar-random k-dimensional subspace.
    static Subspace random(std::size_t k, Stream& rng) {
        const Matrix q = haar_orthogonal(24, rng);
        Matrix b(k, 24);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < 24; ++j) b(i, j) = q(j, i);
        return Subspace(std::move(b), "random-" + std::to_string(k));
    }

    [[nodiscard]] std::size_t dim() const noexcept { return basis_.rows(); }
    [[nodiscard]] const Matrix& basis() const noexcept { return basis_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// Ambient point of the subspace with coordinates `c`.
    [[nodiscard]] Vector embed(std::span<const double> c) const {
        if (c.size() != dim()) throw DimensionMismatch("subspace coordinates");
        Vector x(24, 0.0);
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < 24; ++j) x[j] += c[i] * basis_(i, j);
        return x;
    }

    /// Coordinates of the orthogonal projection of `x` onto the subspace.
    [[nodiscard]] Vector coordinates(std::span<const double> x) const { return basis_ * x; }

    /// The subspace of vectors orthogonal to `x` (projected into this subspace first).
    [[nodiscard]] Subspace orthogonal_to(std::span<const double> x) const {
        Vector c = coordinates(x);
        const double cn = norm(c);
        if (cn < 1e-14) throw DomainError("vector is orthogonal to the subspace");
        for (double& v : c) v /= cn;
        // Householder reflection taking c to e_1; its remaining rows span c-perp.
        const std::size_t k = dim();
        Vector u = c;
        u[0] += (c[0] >= 0 ? 1.0 : -1.0);
        const double un = norm(u);
        for (double& v : u) v /= un;
        Matrix q = Matrix::identity(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) q(i, j) -= 2.0 * u[i] * u[j];
        Matrix rows(k - 1, k);
        for (std::size_t i = 1; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) rows(i - 1, j) = q(i, j);
        Matrix b = rows * basis_;
        return Subspace(std::move(b), label_ + "-perp");
    }

private:
    Matrix basis_;
    std::string label_;
};

/// B A B^T.
inline SymMatrix restrict_to(const SymMatrix& a, const Subspace& h) {
    if (a.rows() != 24 || a.cols() != 24) throw DimensionMismatch("restrict_to expects a 24x24 matrix");
    return congruence(h.basis(), a);
}

/// Hessian of w at the point of H' with coordinates `u`, restricted to H'.
inline SymMatrix restricted_hess_w(const Subspace& h, std::span<const double> u, double delta) {
    return restrict_to(hess_w(TriplePoint::from_flat(h.embed(u)), delta), h);
}

// --- the scalar root system ----------------------------------------------------

/// mu_i(delta) = (roots of T^3 - T + 2W) - delta W, descending.
inline std::array<double, 3> mu_roots(double w, double delta) {
    if (!(std::abs(w) <= kCubicBound + 1e-9)) throw DomainError("|W| exceeds 1/(3 sqrt 3)");
    auto r = solve_depressed_cubic(w).r;
    for (double& x : r) x -= delta * w;
    return r;
}

/// T^3 + 3 W delta T^2 + (3 W^2 delta^2 - 1) T + W (2 - delta) + W^3 delta^3.
inline double shifted_cubic(double t, double w, double delta) {
    return t * t * t + 3 * w * delta * t * t + (3 * w * w * delta * delta - 1) * t + w * (2 - delta) +
           w * w * w * delta * delta * delta;
}

/// mu_+(K) / (-mu_-(K)) for the componentwise differences mu_i - K mubar_i.
/// Empty when |K - 1| + |Wbar - W| vanishes.
inline std::optional<double> lemma41_ratio(double w, double wbar, double k, double delta) {
    if (std::abs(k - 1.0) + std::abs(wbar - w) <= 1e-12) return std::nullopt;
    const auto mu = mu_roots(w, delta);
    const auto mub = mu_roots(wbar, delta);
    double hi = -INFINITY, lo = INFINITY;
    for (std::size_t i = 0; i < 3; ++i) {
        const double d = mu[i] - k * mub[i];
        hi = std::max(hi, d);
        lo = std::min(lo, d);
    }
    return hi / (-lo);
}

struct AuditOptions {
    unsigned threads = 0;
    double tolerance_scale = 1.0;
};

inline Certificate certify_lemma41(Delta delta, std::uint64_t samples, std::uint64_t seed, AuditOptions opt = {}) {
    const double eps = delta.scalar_epsilon();
    const double slack = 1e-9 * opt.tolerance_scale;
    struct Acc {
        Extremum ratio;
        std::uint64_t skipped = 0, failures = 0;
        double worst = 0.0;
    };
    auto body = [&](std::size_t b, std::size_t e) {
        Acc acc;
        for (std::size_t i = b; i < e; ++i) {
            Stream rng(seed, tags::lemma41, i);
            const double w = rng.uniform(-kCubicBound, kCubicBound);
            const double wbar = rng.uniform(-kCubicBound, kCubicBound);
            const bool unit_scale = rng.uniform() < 0.2;
            const double bnorm = rng.uniform(1.0, 10.0);
            const double k = unit_scale ? 1.0 : std::pow(bnorm, -delta.value());
            const auto ratio = lemma41_ratio(w, wbar, k, delta);
            if (!ratio) {
                ++acc.skipped;
                continue;
            }
            acc.ratio.observe(*ratio, i);
            const double excess = std::isfinite(*ratio) && *ratio > 0 ? std::max(eps - *ratio, *ratio - 1.0 / eps) : INFINITY;
            acc.worst = std::max(acc.worst, excess);
            if (excess > slack) ++acc.failures;
        }
        return acc;
    };
    auto merge = [](Acc a, Acc b) {
        a.ratio.merge(b.ratio);
        a.skipped += b.skipped;
        a.failures += b.failures;
        a.worst = std::max(a.worst, b.worst);
        return a;
    };
    const Acc acc = parallel_reduce(samples, 4096, opt.threads, Acc{}, body, merge);

    Certificate cert;
    cert.name = "lemma41-scalar";
    cert.seed = seed;
    cert.samples = samples - acc.skipped;
    cert.skipped = acc.skipped;
    cert.failures = acc.failures;
    cert.tolerance = slack;
    cert.worst_residual = std::max(0.0, acc.worst);
    cert.record("ratio", acc.ratio);
    cert.extremes["epsilon"] = eps;
    cert.extremes["delta"] = delta;
    cert.metadata["K"] = "|b|^-delta with |b| ~ U[1,10]; K = 1 with probability 0.2";
    cert.finalize();
    return cert;
}

/// M_delta(a, b, O) = M(a) - O^T M(b) O on H'.
inline SymMatrix prop41_matrix(const Subspace& h, std::span<const double> a, std::span<const double> b,
                               const Matrix& o, double delta) {
    return restricted_hess_w(h, a, delta) - transpose_congruence(o, restricted_hess_w(h, b, delta));
}

inline Certificate certify_prop41(Delta delta, const Subspace& h, std::uint64_t samples, std::uint64_t seed,
                                  AuditOptions opt = {}) {
    if (h.dim() != 21) throw DimensionMismatch("certify_prop41 expects a 21-dimensional subspace");
    const double eps = delta.epsilon();
    const double slack = 1e-9 * opt.tolerance_scale;
    const std::size_t k = h.dim();
    struct Acc {
        Extremum ratio, lambda_top, lambda_bottom;
        std::uint64_t skipped = 0, failures = 0;
        double worst = 0.0;
    };
    auto body = [&](std::size_t begin, std::size_t end) {
        Acc acc;
        for (std::size_t i = begin; i < end; ++i) {
            Stream rng(seed, tags::prop41, i);
            for (int attempt = 0; attempt < 16; ++attempt) {
                const Vector a = rng.unit_vector(k);
                Vector b = rng.unit_vector(k);
                const double bn = rng.uniform(1.0, 10.0);
                for (double& x : b) x *= bn;
                const Matrix o = haar_orthogonal(k, rng);
                const SymMatrix m = prop41_matrix(h, a, b, o, delta);
                if (m.frobenius() < 1e-10) {
                    ++acc.skipped;
                    continue;
                }
                const Spectrum sp = sym_eigen(m);
                const double top = sp.front(), bottom = sp.back();
                acc.lambda_top.observe(top, i);
                acc.lambda_bottom.observe(bottom, i);
                double excess = INFINITY;
                if (top > 0 && bottom < 0) {
                    const double r = top / (-bottom);
                    acc.ratio.observe(r, i);
                    excess = std::max(eps - r, r - 1.0 / eps);
                }
                acc.worst = std::max(acc.worst, excess);
                if (excess > slack) ++acc.failures;
                break;
            }
        }
        return acc;
    };
    auto merge = [](Acc a, Acc b) {
        a.ratio.merge(b.ratio);
        a.lambda_top.merge(b.lambda_top);
        a.lambda_bottom.merge(b.lambda_bottom);
        a.skipped += b.skipped;
        a.failures += b.failures;
        a.worst = std::max(a.worst, b.worst);
        return a;
    };
    const Acc acc = parallel_reduce(samples, 64, opt.threads, Acc{}, body, merge);

    Certificate cert;
    cert.name = "prop41-ratio";
    cert.seed = seed;
    cert.samples = acc.lambda_top.count;
    cert.skipped = acc.skipped;
    cert.failures = acc.failures;
    cert.tolerance = slack;
    cert.worst_residual = std::max(0.0, acc.worst);
    cert.record("ratio", acc.ratio);
    cert.record("lambda_1", acc.lambda_top);
    cert.record("lambda_21", acc.lambda_bottom);
    cert.extremes["epsilon"] = eps;
    cert.extremes["delta"] = delta;
    cert.metadata["subspace"] = h.label();
    cert.metadata["sampling"] = "a uniform on the unit sphere of H', |b| ~ U[1,10], O Haar on O(21)";
    cert.finalize();
    return cert;
}

/// Residual of the tangential identity at a unit point `a`:
/// D^2 w(a) restricted to a-perp equals (D^2 P(a) - delta P(a) I) restricted to a-perp.
inline double tangential_residual(const TriplePoint& a, double delta) {
    const Subspace perp = Subspace(Matrix::identity(24), "ambient").orthogonal_to(a.flat());
    SymMatrix shifted = hess_P24(a);
    const double p = eval_P24(a);
    for (std::size_t i = 0; i < 24; ++i) shifted(i, i) -= delta * p;
    return (restrict_to(hess_w(a, delta), perp) - restrict_to(shifted, perp)).max_abs();
}

/// Two points of H' within `radius` of the origin where w takes opposite signs.
struct SignChangeWitness {
    Vector positive, negative;
    double w_positive, w_negative;
};

inline std::optional<SignChangeWitness> sign_change_witness(const Subspace& h, double delta, double radius, Stream& rng,
                                                            int attempts = 64) {
    for (int t = 0; t < attempts; ++t) {
        Vector u = rng.unit_vector(h.dim());
        for (double& x : u) x *= 0.5 * radius;
        const Vector p = h.embed(u);
        const double w = eval_w(TriplePoint::from_flat(p), delta).value;
        if (w == 0.0) continue;
        Vector q = p;
        for (double& x : q) x = -x;
        const double wq = eval_w(TriplePoint::from_flat(q), delta).value;
        if (w > 0) return SignChangeWitness{p, q, w, wq};
        return SignChangeWitness{q, p, wq, w};
    }
    return std::nullopt;
}

// --- directional Hessian at the maximiser of a cubic ---------------------------

struct Prop32Result {
    Vector direction;      ///< unit maximiser d of the form on the sphere
    double value = 0.0;    ///< P(d)
    Spectrum spectrum;     ///< descending spectrum of the quadratic form sum_i d_i dP/dx_i
    bool upper = false;    ///< lambda_1 >= 2 lambda_2 at d
    bool lower = false;    ///< 2 lambda_{n-1} >= lambda_n at the antipode -d (the minimiser)
    bool lower_same_direction = false; ///< the same inequality read at d itself
    double tangential_gradient = 0.0;
    [[nodiscard]] bool holds() const noexcept { return upper && lower; }
};

struct Prop32Options {
    int max_iterations = 5000;
    double gradient_tolerance = 1e-10;
    double tolerance = 1e-8;
};

namespace detail {

struct AscentResult {
    Vector x;
    double value;
    double tangential_gradient;
};

inline AscentResult sphere_ascent(const CubicForm& p, Vector x, const Prop32Options& opt) {
    double fx = p.eval(x);
    double step = 1.0;
    double tg = INFINITY;
    for (int it = 0; it < opt.max_iterations; ++it) {
        Vector g = p.grad(x);
        const double radial = dot(g, x);
        for (std::size_t i = 0; i < x.size(); ++i) g[i] -= radial * x[i];
        tg = norm(g);
        if (tg <= opt.gradient_tolerance) break;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            Vector y = x;
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += step * g[i];
            const double yn = norm(y);
            for (double& v : y) v /= yn;
            const double fy = p.eval(y);
            if (fy >= fx + 1e-4 * step * tg * tg) {
                x = std::move(y);
                fx = fy;
                step *= 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return {std::move(x), fx, tg};
}

/// Newton steps for the Riemannian Hessian on the sphere. Directions of
/// nonnegative curvature (including the flat ones along a manifold of maxima)
/// are left alone.
inline AscentResult sphere_newton_polish(const CubicForm& p, AscentResult start, const Prop32Options& opt) {
    const std::size_t n = start.x.size();
    if (n < 2) return start;
    AscentResult cur = std::move(start);
    for (int it = 0; it < 30 && cur.tangential_gradient > opt.gradient_tolerance; ++it) {
        // orthonormal tangent basis from the Householder reflection taking x to e_1
        Vector u = cur.x;
        u[0] += (u[0] >= 0 ? 1.0 : -1.0);
        const double un = norm(u);
        for (double& v : u) v /= un;
        Matrix t(n - 1, n);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) t(i - 1, j) = (i == j ? 1.0 : 0.0) - 2.0 * u[i] * u[j];
        const Vector g = p.grad(cur.x);
        SymMatrix h = p.hess(cur.x);
        const double radial = dot(g, cur.x);
        for (std::size_t i = 0; i < n; ++i) h(i, i) -= radial;
        const EigenDecomposition eig = sym_eigen_vectors(congruence(t, h));
        const Vector gt = t * g;
        const double scale = std::max(1.0, eig.spectrum.values.empty() ? 0.0 : std::abs(eig.spectrum.back()));
        Vector step(n - 1, 0.0);
        for (std::size_t k = 0; k < n - 1; ++k) {
            const double hk = eig.spectrum.values[k];
            if (hk > -1e-8 * scale) continue;
            double c = 0.0;
            for (std::size_t i = 0; i < n - 1; ++i) c += eig.vectors(i, k) * gt[i];
            for (std::size_t i = 0; i < n - 1; ++i) step[i] -= c / hk * eig.vectors(i, k);
        }
        Vector y = cur.x;
        for (std::size_t i = 0; i < n - 1; ++i)
            for (std::size_t j = 0; j < n; ++j) y[j] += step[i] * t(i, j);
        const double yn = norm(y);
        for (double& v : y) v /= yn;
        const double fy = p.eval(y);
        if (fy < cur.value - 1e-12 * (1 + std::abs(cur.value))) break;
        Vector gy = p.grad(y);
        const double ry = dot(gy, y);
        for (std::size_t i = 0; i < n; ++i) gy[i] -= ry * y[i];
        const double tgy = norm(gy);
        if (tgy >= cur.tangential_gradient) break;
        cur = {std::move(y), fy, tgy};
    }
    return cur;
}

} // namespace detail

inline Prop32Result prop32_audit(const CubicForm& p, int restarts, std::uint64_t seed, Prop32Options opt = {}) {
    if (p.is_zero()) throw ZeroForm("prop32_audit needs a nonzero cubic form");
    if (p.dim() > 24) throw DimensionMismatch("prop32_audit supports n <= 24");
    const std::size_t n = p.dim();
    std::optional<detail::AscentResult> best;
    for (int r = 0; r < std::max(1, restarts); ++r) {
        Stream rng(seed, tags::prop32, static_cast<std::uint64_t>(r));
        auto res = detail::sphere_ascent(p, rng.unit_vector(n), opt);
        if (!best || res.value > best->value) best = std::move(res);
    }
    best = detail::sphere_newton_polish(p, std::move(*best), opt);
    Prop32Result out;
    out.direction = best->x;
    out.value = best->value;
    out.tangential_gradient = best->tangential_gradient;
    out.spectrum = sym_eigen(p.hess(out.direction));
    const auto& l = out.spectrum.values;
    out.upper = n < 2 || l[0] >= 2 * l[1] - opt.tolerance;
    out.lower_same_direction = n < 2 || 2 * l[n - 2] >= l[n - 1] - opt.tolerance;
    // D^2 P(-d) = -D^2 P(d): the mirrored inequality at -d is the upper one at d.
    Vector anti = out.direction;
    for (double& v : anti) v = -v;
    const Spectrum s_anti = sym_eigen(p.hess(anti));
    out.lower = n < 2 || 2 * s_anti.values[n - 2] >= s_anti.values[n - 1] - opt.tolerance;
    return out;
}

} // namespace octovisc
