#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "octovisc/certificate.hpp"
#include "octovisc/errors.hpp"
#include "octovisc/linalg.hpp"
#include "octovisc/random.hpp"
#include "octovisc/singular.hpp"
#include "octovisc/spectral.hpp"

namespace octovisc {

/// The two-parameter family alpha F1 + beta F2.
struct Pencil {
    SymMatrix f1, f2;

    Pencil(SymMatrix a, SymMatrix b) : f1(std::move(a)), f2(std::move(b)) {
        if (!f1.square() || f1.rows() != f2.rows() || f1.cols() != f2.cols())
            throw DimensionMismatch("pencil matrices must be square and of equal size");
    }

    [[nodiscard]] std::size_t dim() const noexcept { return f1.rows(); }

    [[nodiscard]] SymMatrix at(double theta) const {
        SymMatrix a = f1;
        a *= std::cos(theta);
        SymMatrix b = f2;
        b *= std::sin(theta);
        a += b;
        return a;
    }
};

struct HyperbolicityResult {
    bool hyperbolic = false; ///< lambda_1 > 0 > lambda_n at every grid angle, beyond roundoff
    bool certified = false;  ///< grid margins exceed the Lipschitz drift between grid points
    double m_est = INFINITY; ///< max of -lambda_1/lambda_n and -lambda_n/lambda_1
    double min_margin = 0.0; ///< min over the grid of min(lambda_1, -lambda_n)
    double lipschitz = 0.0;  ///< bound on |d lambda / d theta|
};

inline HyperbolicityResult hyperbolicity_certificate(const Pencil& p, int grid = 64) {
    if (grid < 8) throw DomainError("hyperbolicity grid must have at least 8 points");
    HyperbolicityResult out;
    out.lipschitz = p.f1.frobenius() + p.f2.frobenius();
    out.hyperbolic = true;
    out.m_est = 0.0;
    out.min_margin = INFINITY;
    const double floor = 1e-12 * out.lipschitz;
    for (int j = 0; j < grid; ++j) {
        const double theta = std::numbers::pi * double(j) / double(grid);
        const Spectrum s = sym_eigen(p.at(theta));
        const double top = s.front(), bottom = s.back();
        out.min_margin = std::min(out.min_margin, std::min(top, -bottom));
        if (!(top > floor && bottom < -floor)) {
            out.hyperbolic = false;
            out.m_est = INFINITY;
            continue;
        }
        out.m_est = std::max({out.m_est, -top / bottom, -bottom / top});
    }
    // each angle lies within half a grid step of a grid point, and A(theta + pi) = -A(theta)
    const double drift = out.lipschitz * 0.5 * std::numbers::pi / double(grid);
    out.certified = out.hyperbolic && out.min_margin > drift;
    return out;
}

/// Positive definite Q orthogonal to both forms of a pencil.
struct PositiveWitness {
    SymMatrix q;
    double ellipticity = 1.0; ///< lambda_max(Q) / lambda_min(Q)
    Vector a2;                ///< unit vector with F1'(a2) = 0, F2(a2) = -a (empty when Q = I)
    double a = 0.0;
    double m = 0.0;           ///< trace of the reduced F2
    double residual1 = 0.0;   ///< |Tr(F1 Q)| / (|F1| |Q|)
    double residual2 = 0.0;   ///< |Tr(F2 Q)| / (|F2| |Q|)
    double lambda_min = 0.0;
    int restarts_used = 0;
};

struct WitnessOptions {
    int min_restarts = 8;
    int max_restarts = 200;
    int iterations = 500;
    int grid = 64;
    double tolerance = 1e-8;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

namespace detail {

/// One Newton step towards x^T G x = 0 along the sphere, then renormalise.
inline bool quadric_newton(const SymMatrix& g, Vector& x) {
    const Vector gx = g * x;
    const double val = dot(x, gx);
    Vector u = gx;
    for (std::size_t i = 0; i < x.size(); ++i) u[i] -= val * x[i];
    const double uu = dot(u, u);
    if (uu < 1e-300) return std::abs(val) < 1e-300;
    const double step = -val / (2.0 * uu);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += step * u[i];
    const double xn = norm(x);
    for (double& v : x) v /= xn;
    return true;
}

inline void quadric_polish(const SymMatrix& g, Vector& x) {
    for (int k = 0; k < 20; ++k) {
        if (std::abs(quadratic(g, x)) <= 1e-16) return;
        if (!quadric_newton(g, x)) return;
    }
}

/// Tangent direction of -grad(x^T G2 x) on {x^T G1 x = 0} n S^{n-1}.
inline Vector constrained_descent(const SymMatrix& g1, const SymMatrix& g2, const Vector& x) {
    Vector d = g2 * x;
    for (double& v : d) v *= -2.0;
    Vector n1 = x;
    Vector n2 = g1 * x;
    const double c = dot(n2, n1);
    for (std::size_t i = 0; i < x.size(); ++i) n2[i] -= c * n1[i];
    const double n2n = norm(n2);
    const double dx = dot(d, n1);
    for (std::size_t i = 0; i < x.size(); ++i) d[i] -= dx * n1[i];
    if (n2n > 1e-14) {
        const double d2 = dot(d, n2) / (n2n * n2n);
        for (std::size_t i = 0; i < x.size(); ++i) d[i] -= d2 * n2[i];
    }
    return d;
}

struct SearchResult {
    Vector x;
    double value = INFINITY;
    int restarts = 0;
};

/// Minimises x^T G2 x over x^T G1 x = 0 on the unit sphere.
inline SearchResult quadric_minimum(const SymMatrix& g1, const SymMatrix& g2, const WitnessOptions& opt) {
    const std::size_t n = g1.rows();
    SearchResult best;
    for (int r = 0; r < opt.max_restarts; ++r) {
        if (r >= opt.min_restarts && best.value < 0.0) break;
        best.restarts = r + 1;
        Stream rng(opt.seed, tags::witness, (opt.index << 8) + std::uint64_t(r));
        Vector x = rng.unit_vector(n);
        quadric_polish(g1, x);
        if (std::abs(quadratic(g1, x)) > 1e-10) continue;
        double fx = quadratic(g2, x);
        double step = 0.1;
        for (int it = 0; it < opt.iterations; ++it) {
            const Vector d = constrained_descent(g1, g2, x);
            const double dn2 = dot(d, d);
            if (dn2 < 1e-26) break;
            bool moved = false;
            for (int bt = 0; bt < 40; ++bt) {
                Vector y = x;
                for (std::size_t i = 0; i < n; ++i) y[i] += step * d[i];
                const double yn = norm(y);
                for (double& v : y) v /= yn;
                quadric_newton(g1, y);
                const double fy = quadratic(g2, y);
                if (std::abs(quadratic(g1, y)) < 1e-8 && fy <= fx - 1e-4 * step * dn2) {
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
        quadric_polish(g1, x);
        fx = quadratic(g2, x);
        if (fx < best.value) {
            best.value = fx;
            best.x = x;
        }
    }
    return best;
}

inline SymMatrix normalised(const SymMatrix& a) {
    const double f = a.frobenius();
    SymMatrix out = a;
    if (f > 0.0) out *= 1.0 / f;
    return out;
}

} // namespace detail

/// Builds Q > 0 with Tr(F1 Q) = Tr(F2 Q) = 0 for a strictly hyperbolic pencil.
inline PositiveWitness orthogonal_positive_witness(const Pencil& p, WitnessOptions opt = {}) {
    const HyperbolicityResult hyp = hyperbolicity_certificate(p, opt.grid);
    if (!hyp.hyperbolic) throw NotHyperbolic("pencil has a direction that is not strictly hyperbolic");
    const std::size_t n = p.dim();

    // Work with unit-norm copies so that positive rescaling of the inputs
    // does not change the construction.
    const SymMatrix u1 = detail::normalised(p.f1), u2 = detail::normalised(p.f2);
    const double t1 = u1.trace(), t2 = u2.trace();
    const double tiny = 1e-14 * double(n);
    SymMatrix g1, g2;
    if (std::abs(t1) <= tiny) {
        g1 = u1;
        g2 = u2;
    } else if (std::abs(t2) <= tiny) {
        g1 = u2;
        g2 = u1;
    } else {
        g1 = u1;
        g1 *= t2;
        SymMatrix tmp = u2;
        tmp *= t1;
        g1 -= tmp;
        g2 = u2;
    }
    g1 = detail::normalised(g1);
    double m = g2.trace();
    if (m < 0.0) {
        g2 *= -1.0;
        m = -m;
    }

    PositiveWitness w;
    w.m = m;
    if (m <= tiny) {
        w.q = Matrix::identity(n);
    } else {
        const detail::SearchResult s = detail::quadric_minimum(g1, g2, opt);
        w.restarts_used = s.restarts;
        if (!(s.value < 0.0))
            throw SearchFailure("no point with F1' = 0 and F2 < 0 after " + std::to_string(s.restarts) +
                                " restarts; best F2 value " + std::to_string(s.value));
        w.a2 = s.x;
        // fix the sign of the returned direction
        std::size_t lead = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(w.a2[i]) > std::abs(w.a2[lead]) + 1e-12) lead = i;
        if (w.a2[lead] < 0)
            for (double& v : w.a2) v = -v;
        w.a = -s.value;
        const double l = w.a / m;
        w.q = outer(w.a2, w.a2);
        for (std::size_t i = 0; i < n; ++i) w.q(i, i) += l;
    }

    const Spectrum qs = sym_eigen(w.q);
    w.lambda_min = qs.back();
    w.ellipticity = qs.front() / qs.back();
    const double qn = w.q.frobenius();
    w.residual1 = std::abs(trace_product(p.f1, w.q)) / (std::max(p.f1.frobenius(), 1e-300) * qn);
    w.residual2 = std::abs(trace_product(p.f2, w.q)) / (std::max(p.f2.frobenius(), 1e-300) * qn);
    if (!(w.lambda_min > 0.0) || w.residual1 > opt.tolerance || w.residual2 > opt.tolerance)
        throw SearchFailure("witness failed verification: residuals " + std::to_string(w.residual1) + ", " +
                            std::to_string(w.residual2) + ", lambda_min " + std::to_string(w.lambda_min));
    return w;
}

/// Random strictly hyperbolic pencil: a 2x2 rotation-invariant block
/// (eigenvalues +-r for every angle) plus an arbitrary symmetric block,
/// conjugated by a Haar orthogonal matrix. For n = 2 the pair is drawn at
/// random and kept once its determinant form is negative definite.
inline Pencil random_hyperbolic_pencil(std::size_t n, Stream& rng) {
    if (n < 2) throw DimensionMismatch("pencils need n >= 2");
    if (n == 2) {
        for (;;) {
            Matrix a = random_symmetric(2, rng), b = random_symmetric(2, rng);
            // det(cA + sB) = q11 c^2 + 2 q12 c s + q22 s^2
            const double q11 = a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1);
            const double q22 = b(0, 0) * b(1, 1) - b(0, 1) * b(0, 1);
            const double q12 = 0.5 * (a(0, 0) * b(1, 1) + b(0, 0) * a(1, 1)) - a(0, 1) * b(0, 1);
            if (q11 < -1e-3 && q22 < -1e-3 && q11 * q22 - q12 * q12 > 1e-6) return {a, b};
        }
    }
    const double r = rng.uniform(0.5, 2.0);
    Matrix a(n, n), b(n, n);
    a(0, 0) = r;
    a(1, 1) = -r;
    b(0, 1) = r;
    b(1, 0) = r;
    const Matrix ra = random_symmetric(n - 2, rng), rb = random_symmetric(n - 2, rng);
    for (std::size_t i = 0; i < n - 2; ++i)
        for (std::size_t j = 0; j < n - 2; ++j) {
            a(2 + i, 2 + j) = 0.5 * ra(i, j);
            b(2 + i, 2 + j) = 0.5 * rb(i, j);
        }
    const Matrix o = haar_orthogonal(n, rng);
    return {congruence(o, a), congruence(o, b)};
}

// --- sampled sup-inf -------------------------------------------------------------

struct SupInfOptions {
    std::uint64_t n_b = 1000;
    std::uint64_t n_a = 1000;
    std::uint64_t test_points = 100;
    double tolerance = 1e-2;
    unsigned threads = 0;
    int witness_grid = 8;
    int witness_restarts = 1;
};

/// For each test point x: the sampled inf over a in b0* of Tr(a D^2 w(x)) for
/// every b0 in a sampled family, and for b = D^2 w(x/|x|) itself.
inline Certificate supinf_audit(Delta delta, const Subspace& h, std::uint64_t seed, SupInfOptions opt = {}) {
    const std::size_t k = h.dim();
    const std::size_t kk = k * k;

    // family Gamma and a shared pool of positive unit-trace matrices
    std::vector<SymMatrix> gamma(opt.n_b);
    for (std::uint64_t j = 0; j < opt.n_b; ++j) {
        Stream rng(seed, tags::supinf, j);
        gamma[j] = restricted_hess_w(h, rng.unit_vector(k), delta);
    }
    std::vector<double> pool(opt.n_a * kk);
    for (std::uint64_t j = 0; j < opt.n_a; ++j) {
        Stream rng(seed, tags::supinf, (1ULL << 40) + j);
        Matrix g(k, k);
        for (double& v : g.data()) v = rng.normal();
        Matrix a = g * g.transposed();
        a *= 1.0 / a.trace();
        std::copy(a.data().begin(), a.data().end(), pool.begin() + std::ptrdiff_t(j * kk));
    }
    auto pool_trace = [&](std::size_t j, const SymMatrix& b) {
        double s = 0.0;
        const double* pa = pool.data() + j * kk;
        const auto bd = b.data();
        for (std::size_t t = 0; t < kk; ++t) s += pa[t] * bd[t];
        return s;
    };
    std::vector<double> tg(opt.n_a * opt.n_b);
    for (std::size_t b = 0; b < opt.n_b; ++b)
        for (std::size_t j = 0; j < opt.n_a; ++j) tg[b * opt.n_a + j] = pool_trace(j, gamma[b]);

    // sampled inf over the closure of b*: pool members with Tr(a b) >= 0 and
    // boundary points of segments between consecutive pool members
    auto sampled_inf = [&](const std::vector<double>& t, const std::vector<double>& d) {
        double inf = INFINITY;
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (t[j] >= 0.0) inf = std::min(inf, d[j]);
            const std::size_t i = j + 1 < t.size() ? j + 1 : 0;
            if ((t[j] > 0.0) != (t[i] > 0.0)) {
                const double s = t[j] / (t[j] - t[i]);
                inf = std::min(inf, (1.0 - s) * d[j] + s * d[i]);
            }
        }
        return inf;
    };

    struct Acc {
        Extremum own_inf, other_inf, sup, witness_residual, witness_c;
        std::uint64_t failures = 0, witness_failures = 0;
    };
    auto body = [&](std::size_t begin, std::size_t end) {
        Acc acc;
        for (std::size_t p = begin; p < end; ++p) {
            Stream rng(seed, tags::supinf, (2ULL << 40) + p);
            Vector u = rng.unit_vector(k);
            const double radius = rng.uniform(0.5, 2.0);
            Vector xr = u;
            for (double& v : xr) v *= radius;
            const SymMatrix dx = restricted_hess_w(h, xr, delta);
            const SymMatrix own = restricted_hess_w(h, u, delta);
            std::vector<double> d(opt.n_a), t(opt.n_a);
            for (std::size_t j = 0; j < opt.n_a; ++j) {
                d[j] = pool_trace(j, dx);
                t[j] = pool_trace(j, own);
            }
            const double inf_own = sampled_inf(t, d);
            acc.own_inf.observe(inf_own, p);
            if (!(inf_own >= -opt.tolerance)) ++acc.failures;
            double sup = inf_own;
            for (std::size_t b = 0; b < opt.n_b; ++b) {
                std::vector<double> tb(tg.begin() + std::ptrdiff_t(b * opt.n_a),
                                       tg.begin() + std::ptrdiff_t((b + 1) * opt.n_a));
                double inf = sampled_inf(tb, d);
                try {
                    WitnessOptions wo;
                    wo.grid = opt.witness_grid;
                    wo.min_restarts = opt.witness_restarts;
                    wo.seed = seed;
                    wo.index = (p << 20) + b;
                    const PositiveWitness w = orthogonal_positive_witness(Pencil(gamma[b], dx), wo);
                    SymMatrix a = w.q;
                    a *= 1.0 / a.trace();
                    const double tb0 = trace_product(a, gamma[b]);
                    const double tdx = trace_product(a, dx);
                    acc.witness_residual.observe(std::max(std::abs(tb0), std::abs(tdx)), p * opt.n_b + b);
                    acc.witness_c.observe(w.ellipticity, p * opt.n_b + b);
                    inf = std::min(inf, tdx);
                } catch (const Error&) {
                    ++acc.witness_failures;
                    ++acc.failures;
                }
                acc.other_inf.observe(inf, p * opt.n_b + b);
                if (!(inf <= opt.tolerance)) ++acc.failures;
                sup = std::max(sup, inf);
            }
            acc.sup.observe(sup, p);
            if (!(std::abs(sup) <= opt.tolerance)) ++acc.failures;
        }
        return acc;
    };
    auto merge = [](Acc a, Acc b) {
        a.own_inf.merge(b.own_inf);
        a.other_inf.merge(b.other_inf);
        a.sup.merge(b.sup);
        a.witness_residual.merge(b.witness_residual);
        a.witness_c.merge(b.witness_c);
        a.failures += b.failures;
        a.witness_failures += b.witness_failures;
        return a;
    };
    const Acc acc = parallel_reduce(opt.test_points, 1, opt.threads, Acc{}, body, merge);

    Certificate cert;
    cert.name = "supinf";
    cert.seed = seed;
    cert.samples = opt.test_points;
    cert.failures = acc.failures;
    cert.tolerance = opt.tolerance;
    cert.worst_residual = acc.sup.count ? std::max(std::abs(acc.sup.min), std::abs(acc.sup.max)) : 0.0;
    cert.record("inf_own", acc.own_inf);
    cert.record("inf_other", acc.other_inf);
    cert.record("sup_inf", acc.sup);
    cert.record("witness_residual", acc.witness_residual);
    cert.record("witness_ellipticity", acc.witness_c);
    cert.extremes["witness_failures"] = double(acc.witness_failures);
    cert.extremes["n_a"] = double(opt.n_a);
    cert.extremes["n_b"] = double(opt.n_b);
    cert.metadata["dual_set"] = "closure Tr(a b) >= 0";
    cert.metadata["subspace"] = h.label();
    cert.finalize();
    return cert;
}

} // namespace octovisc
