#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "octovisc/certificate.hpp"
#include "octovisc/isaacs.hpp"
#include "octovisc/octonion.hpp"
#include "octovisc/random.hpp"
#include "octovisc/singular.hpp"
#include "octovisc/spectral.hpp"
#include "octovisc/trilinear.hpp"

namespace octovisc {

namespace detail {

inline Octonion random_octonion(Stream& rng) {
    Octonion o;
    for (double& x : o.c) x = rng.normal();
    return o;
}

inline double max_abs(const Octonion& a) {
    double m = 0.0;
    for (double x : a.c) m = std::max(m, std::abs(x));
    return m;
}

/// Shared fold for audits that track one residual per sample.
struct ResidualAcc {
    Extremum residual;
    std::uint64_t failures = 0;

    void observe(double r, std::uint64_t i, double tol) {
        residual.observe(r, i);
        if (!(r <= tol)) ++failures;
    }
    static ResidualAcc merge(ResidualAcc a, const ResidualAcc& b) {
        a.residual.merge(b.residual);
        a.failures += b.failures;
        return a;
    }
};

inline void finish(Certificate& c, const ResidualAcc& acc) {
    c.failures = acc.failures;
    c.worst_residual = acc.residual.count ? acc.residual.max : 0.0;
    c.record("residual", acc.residual);
    c.finalize();
}

} // namespace detail

/// Alternative laws, multiplicativity of the norm and Re((ab)c) = Re(a(bc))
/// on Gaussian octonions. Residuals are scaled by the product of the norms.
inline Certificate octonion_axiom_audit(std::uint64_t samples, std::uint64_t seed, unsigned threads = 0,
                                        double tolerance = 1e-12) {
    if (samples < 1) throw DomainError("octonion_axiom_audit needs at least one sample");
    struct Acc {
        Extremum left, right, normmul, weak, worst;
        std::uint64_t failures = 0;
    };
    auto body = [&](std::size_t b, std::size_t e) {
        Acc acc;
        for (std::size_t i = b; i < e; ++i) {
            Stream rng(seed, tags::octonion_axioms, i);
            const Octonion x = detail::random_octonion(rng), y = detail::random_octonion(rng),
                           z = detail::random_octonion(rng);
            const double nx = norm(x), ny = norm(y), nz = norm(z);
            const double l = detail::max_abs((x * x) * y - x * (x * y)) / (nx * nx * ny);
            const double r = detail::max_abs((y * x) * x - y * (x * x)) / (nx * nx * ny);
            const double nm = std::abs(norm(x * y) - nx * ny) / (nx * ny);
            const double w = std::abs(re_part((x * y) * z) - re_part(x * (y * z))) / (nx * ny * nz);
            acc.left.observe(l, i);
            acc.right.observe(r, i);
            acc.normmul.observe(nm, i);
            acc.weak.observe(w, i);
            const double worst = std::max({l, r, nm, w});
            acc.worst.observe(worst, i);
            if (!(worst <= tolerance)) ++acc.failures;
        }
        return acc;
    };
    auto merge = [](Acc a, const Acc& b) {
        a.left.merge(b.left);
        a.right.merge(b.right);
        a.normmul.merge(b.normmul);
        a.weak.merge(b.weak);
        a.worst.merge(b.worst);
        a.failures += b.failures;
        return a;
    };
    const Acc acc = parallel_reduce(samples, 4096, threads, Acc{}, body, merge);
    Certificate c;
    c.name = "octonion-axioms";
    c.seed = seed;
    c.samples = samples;
    c.tolerance = tolerance;
    c.failures = acc.failures;
    c.worst_residual = acc.worst.max;
    c.record("left_alternative", acc.left);
    c.record("right_alternative", acc.right);
    c.record("norm_multiplicative", acc.normmul);
    c.record("weak_associativity", acc.weak);
    c.finalize();
    return c;
}

/// Octonion product against the expanded polynomial, |difference| / (|X||Y||Z|).
inline Certificate dual_path_audit(std::uint64_t samples, std::uint64_t seed, unsigned threads = 0,
                                   double tolerance = 1e-12) {
    if (samples < 1) throw DomainError("dual_path_audit needs at least one sample");
    auto body = [&](std::size_t b, std::size_t e) {
        detail::ResidualAcc acc;
        for (std::size_t i = b; i < e; ++i) {
            Stream rng(seed, tags::dual_path, i);
            const TriplePoint v = TriplePoint::from_flat(rng.normal_vector(24));
            const auto d = eval_P24_dual(v);
            const double m = invariants_mW(v).m;
            acc.observe(std::abs(d.octonion - d.polynomial) / m, i, tolerance);
        }
        return acc;
    };
    const auto acc = parallel_reduce(samples, 8192, threads, detail::ResidualAcc{}, body, detail::ResidualAcc::merge);
    Certificate c;
    c.name = "dual-path";
    c.seed = seed;
    c.samples = samples;
    c.tolerance = tolerance;
    c.metadata["distribution"] = "i.i.d. N(0,1) coordinates in R^24";
    detail::finish(c, acc);
    return c;
}

/// Closed-form spectrum against Jacobi on the assembled Hessian at unit points.
inline Certificate closed_form_audit(std::uint64_t samples, std::uint64_t seed, unsigned threads = 0,
                                     double tolerance = 1e-9) {
    if (samples < 1) throw DomainError("closed_form_audit needs at least one sample");
    auto body = [&](std::size_t b, std::size_t e) {
        detail::ResidualAcc acc;
        for (std::size_t i = b; i < e; ++i) {
            Stream rng(seed, tags::closed_form, i);
            const TriplePoint v = TriplePoint::from_flat(rng.unit_vector(24));
            acc.observe(max_abs_diff(closed_form_spectrum(v), sym_eigen(hess_P24(v))), i, tolerance);
        }
        return acc;
    };
    const auto acc = parallel_reduce(samples, 256, threads, detail::ResidualAcc{}, body, detail::ResidualAcc::merge);
    Certificate c;
    c.name = "closed-form-spectrum";
    c.seed = seed;
    c.samples = samples;
    c.tolerance = tolerance;
    detail::finish(c, acc);
    return c;
}

/// 2 lambda_3 >= lambda_1 and 2 lambda_{n-2} <= lambda_n for the Hessians of
/// P24 and P12 at random unit points. The residual is the larger violation.
inline Certificate extreme_eigenvalue_audit(std::uint64_t samples, std::uint64_t seed, unsigned threads = 0,
                                            double tolerance = 1e-10) {
    if (samples < 1) throw DomainError("extreme_eigenvalue_audit needs at least one sample");
    struct Acc {
        Extremum upper24, lower24, upper12, lower12;
        std::uint64_t failures = 0;
    };
    static const CubicForm p12 = CubicForm::p12();
    auto body = [&](std::size_t b, std::size_t e) {
        Acc acc;
        for (std::size_t i = b; i < e; ++i) {
            Stream rng(seed, tags::extreme_eigenvalues, i);
            const Spectrum s24 = sym_eigen(hess_P24(TriplePoint::from_flat(rng.unit_vector(24))));
            const Spectrum s12 = sym_eigen(p12.hess(rng.unit_vector(12)));
            const double u24 = 2 * s24.at(3) - s24.at(1), l24 = s24.at(24) - 2 * s24.at(22);
            const double u12 = 2 * s12.at(3) - s12.at(1), l12 = s12.at(12) - 2 * s12.at(10);
            acc.upper24.observe(u24, i);
            acc.lower24.observe(l24, i);
            acc.upper12.observe(u12, i);
            acc.lower12.observe(l12, i);
            if (std::min({u24, l24, u12, l12}) < -tolerance) ++acc.failures;
        }
        return acc;
    };
    auto merge = [](Acc a, const Acc& b) {
        a.upper24.merge(b.upper24);
        a.lower24.merge(b.lower24);
        a.upper12.merge(b.upper12);
        a.lower12.merge(b.lower12);
        a.failures += b.failures;
        return a;
    };
    const Acc acc = parallel_reduce(samples, 256, threads, Acc{}, body, merge);
    Certificate c;
    c.name = "extreme-eigenvalues";
    c.seed = seed;
    c.samples = samples;
    c.tolerance = tolerance;
    c.failures = acc.failures;
    const double slack = std::min({acc.upper24.min, acc.lower24.min, acc.upper12.min, acc.lower12.min});
    c.worst_residual = std::max(0.0, -slack);
    c.record("p24.upper_slack", acc.upper24);
    c.record("p24.lower_slack", acc.lower24);
    c.record("p12.upper_slack", acc.upper12);
    c.record("p12.lower_slack", acc.lower12);
    c.finalize();
    return c;
}

/// D^2 w(a) restricted to a^perp against D^2 P(a) - delta P(a) I at unit points.
inline Certificate tangential_audit(Delta delta, std::uint64_t samples, std::uint64_t seed, unsigned threads = 0,
                                    double tolerance = 1e-10) {
    if (samples < 1) throw DomainError("tangential_audit needs at least one sample");
    auto body = [&](std::size_t b, std::size_t e) {
        detail::ResidualAcc acc;
        for (std::size_t i = b; i < e; ++i) {
            Stream rng(seed, tags::tangential, i);
            acc.observe(tangential_residual(TriplePoint::from_flat(rng.unit_vector(24)), delta), i, tolerance);
        }
        return acc;
    };
    const auto acc = parallel_reduce(samples, 256, threads, detail::ResidualAcc{}, body, detail::ResidualAcc::merge);
    Certificate c;
    c.name = "tangential-identity";
    c.seed = seed;
    c.samples = samples;
    c.tolerance = tolerance;
    c.extremes["delta"] = delta;
    detail::finish(c, acc);
    return c;
}

/// Runs the Weyl and interlacing checkers on random instances; any reported
/// violation counts as a failure.
inline Certificate checker_audit(std::uint64_t samples, std::uint64_t seed, unsigned threads = 0) {
    if (samples < 1) throw DomainError("checker_audit needs at least one sample");
    struct Acc {
        std::uint64_t weyl = 0, interlacing = 0;
    };
    auto body = [&](std::size_t b, std::size_t e) {
        Acc acc;
        for (std::size_t i = b; i < e; ++i) {
            Stream rng(seed, tags::checkers, i);
            const std::size_t n = 2 + rng() % 23;
            const SymMatrix a = random_symmetric(n, rng);
            SymMatrix pert = random_symmetric(n, rng);
            pert *= std::pow(10.0, rng.uniform(-6.0, 1.0));
            if (!weyl_gap_check(a, a + pert)) ++acc.weyl;
            const std::size_t k = 1 + rng() % (n - 1);
            const Matrix q = haar_orthogonal(n, rng);
            Matrix basis(n - k, n);
            for (std::size_t r = 0; r < n - k; ++r)
                for (std::size_t j = 0; j < n; ++j) basis(r, j) = q(j, r);
            if (!interlacing_check(sym_eigen(a), sym_eigen(congruence(basis, a)))) ++acc.interlacing;
        }
        return acc;
    };
    auto merge = [](Acc a, const Acc& b) {
        a.weyl += b.weyl;
        a.interlacing += b.interlacing;
        return a;
    };
    const Acc acc = parallel_reduce(samples, 512, threads, Acc{}, body, merge);
    Certificate c;
    c.name = "weyl-interlacing";
    c.seed = seed;
    c.samples = samples;
    c.failures = acc.weyl + acc.interlacing;
    c.worst_residual = double(c.failures);
    c.tolerance = 0.0;
    c.extremes["weyl_violations"] = double(acc.weyl);
    c.extremes["interlacing_violations"] = double(acc.interlacing);
    c.metadata["instances"] = "random symmetric n in [2,24], Weyl pair A, A + E; compression to a Haar subspace";
    c.finalize();
    return c;
}

/// Hyperbolicity of pencils built from two restricted Hessians of w at
/// random points of H'. M_est must stay below 1/epsilon(delta).
inline Certificate pencil_audit(Delta delta, const Subspace& h, std::uint64_t pairs, std::uint64_t seed,
                                unsigned threads = 0, int grid = 64) {
    if (pairs < 1) throw DomainError("pencil_audit needs at least one pair");
    const double bound = 1.0 / delta.epsilon();
    struct Acc {
        Extremum m_est, margin;
        std::uint64_t not_hyperbolic = 0, uncertified = 0, over_bound = 0;
    };
    auto body = [&](std::size_t b, std::size_t e) {
        Acc acc;
        for (std::size_t i = b; i < e; ++i) {
            Stream rng(seed, tags::pencils, i);
            const Vector u = rng.unit_vector(h.dim());
            Vector v = rng.unit_vector(h.dim());
            const double r = rng.uniform(1.0, 10.0);
            for (double& x : v) x *= r;
            const auto res = hyperbolicity_certificate(
                Pencil(restricted_hess_w(h, u, delta), restricted_hess_w(h, v, delta)), grid);
            if (!res.hyperbolic) {
                ++acc.not_hyperbolic;
                continue;
            }
            acc.uncertified += !res.certified;
            acc.m_est.observe(res.m_est, i);
            acc.margin.observe(res.min_margin, i);
            if (res.m_est > bound * (1 + 1e-9)) ++acc.over_bound;
        }
        return acc;
    };
    auto merge = [](Acc a, const Acc& b) {
        a.m_est.merge(b.m_est);
        a.margin.merge(b.margin);
        a.not_hyperbolic += b.not_hyperbolic;
        a.uncertified += b.uncertified;
        a.over_bound += b.over_bound;
        return a;
    };
    const Acc acc = parallel_reduce(pairs, 16, threads, Acc{}, body, merge);
    Certificate c;
    c.name = "pencils";
    c.seed = seed;
    c.samples = pairs;
    c.failures = acc.not_hyperbolic + acc.over_bound;
    c.worst_residual = acc.m_est.count ? acc.m_est.max : INFINITY;
    c.tolerance = bound;
    c.record("m_est", acc.m_est);
    c.record("min_margin", acc.margin);
    c.extremes["not_hyperbolic"] = double(acc.not_hyperbolic);
    c.extremes["uncertified"] = double(acc.uncertified);
    c.extremes["delta"] = delta;
    c.metadata["grid"] = std::to_string(grid);
    c.finalize();
    return c;
}

struct WitnessAuditOptions {
    std::uint64_t random_pencils = 1000; ///< spread evenly over n in {2, 3, 5, 21}
    std::uint64_t hessian_pairs = 1000;
    double tolerance = 1e-8;
    unsigned threads = 0;
};

/// Positive witnesses for random hyperbolic pencils and for pairs of
/// restricted Hessians of w. Residuals above tolerance, a non-positive
/// lambda_min and search failures all count as failures.
inline Certificate witness_audit(Delta delta, const Subspace& h, std::uint64_t seed, WitnessAuditOptions opt = {}) {
    const std::uint64_t total = opt.random_pencils + opt.hessian_pairs;
    if (total < 1) throw DomainError("witness_audit needs at least one pencil");
    static constexpr std::size_t kDims[] = {2, 3, 5, 21};
    struct Acc {
        Extremum residual, lambda_min, ellipticity, restarts;
        std::uint64_t search_failures = 0, rejected = 0, failures = 0;
    };
    auto body = [&](std::size_t b, std::size_t e) {
        Acc acc;
        for (std::size_t i = b; i < e; ++i) {
            Stream rng(seed, tags::pencils, (1ULL << 40) + i);
            const bool random = i < opt.random_pencils;
            const Pencil p = random ? random_hyperbolic_pencil(kDims[i % 4], rng)
                                    : Pencil(restricted_hess_w(h, rng.unit_vector(h.dim()), delta),
                                             restricted_hess_w(h, rng.unit_vector(h.dim()), delta));
            WitnessOptions wo;
            wo.seed = seed;
            wo.index = i;
            wo.tolerance = opt.tolerance;
            try {
                const PositiveWitness w = orthogonal_positive_witness(p, wo);
                const double r = std::max(w.residual1, w.residual2);
                acc.residual.observe(r, i);
                acc.lambda_min.observe(w.lambda_min, i);
                acc.ellipticity.observe(w.ellipticity, i);
                acc.restarts.observe(w.restarts_used, i);
                if (!(r <= opt.tolerance) || !(w.lambda_min > 0.0)) ++acc.failures;
            } catch (const SearchFailure&) {
                ++acc.search_failures;
                ++acc.failures;
            } catch (const NotHyperbolic&) {
                ++acc.rejected;
                ++acc.failures;
            }
        }
        return acc;
    };
    auto merge = [](Acc a, const Acc& b) {
        a.residual.merge(b.residual);
        a.lambda_min.merge(b.lambda_min);
        a.ellipticity.merge(b.ellipticity);
        a.restarts.merge(b.restarts);
        a.search_failures += b.search_failures;
        a.rejected += b.rejected;
        a.failures += b.failures;
        return a;
    };
    const Acc acc = parallel_reduce(total, 8, opt.threads, Acc{}, body, merge);
    Certificate c;
    c.name = "witness";
    c.seed = seed;
    c.samples = total;
    c.tolerance = opt.tolerance;
    c.failures = acc.failures;
    c.worst_residual = acc.residual.count ? acc.residual.max : INFINITY;
    c.record("residual", acc.residual);
    c.record("lambda_min", acc.lambda_min);
    c.record("ellipticity", acc.ellipticity);
    c.record("restarts", acc.restarts);
    c.extremes["search_failures"] = double(acc.search_failures);
    c.extremes["not_hyperbolic"] = double(acc.rejected);
    c.extremes["random_pencils"] = double(opt.random_pencils);
    c.extremes["hessian_pairs"] = double(opt.hessian_pairs);
    c.extremes["delta"] = delta;
    c.finalize();
    return c;
}

} // namespace octovisc
