#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "octovisc/certificate.hpp"
#include "octovisc/errors.hpp"
#include "octovisc/linalg.hpp"
#include "octovisc/random.hpp"
#include "octovisc/trilinear.hpp"

namespace octovisc {

inline const double kSqrt3 = std::sqrt(3.0);
/// 1/(3 sqrt 3): the maximum of m and |W| on the unit sphere.
inline const double kCubicBound = 1.0 / (3.0 * kSqrt3);

/// Eigenvalues in descending order, with multiplicity.
struct Spectrum {
    std::vector<double> values;

    Spectrum() = default;
    explicit Spectrum(std::vector<double> v) : values(std::move(v)) {
        std::sort(values.begin(), values.end(), std::greater<>());
    }

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    /// 1-based access, matching the lambda_1 >= ... >= lambda_n labelling.
    [[nodiscard]] double at(std::size_t one_based) const { return values.at(one_based - 1); }
    [[nodiscard]] double front() const { return values.front(); }
    [[nodiscard]] double back() const { return values.back(); }
    [[nodiscard]] double sum() const noexcept {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
};

inline double max_abs_diff(const Spectrum& a, const Spectrum& b) {
    if (a.size() != b.size()) throw DimensionMismatch("spectra of different length");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

// --- depressed cubic ---------------------------------------------------------

/// The three real roots of T^3 - T + 2c, descending.
struct CubicRoots {
    std::array<double, 3> r;

    [[nodiscard]] double residual(double c) const noexcept {
        double m = 0.0;
        for (double x : r) m = std::max(m, std::abs(x * x * x - x + 2.0 * c));
        return m;
    }
};

/// Trigonometric solution T = (2/sqrt3) cos(gamma) with cos(3 gamma) = -3 sqrt3 c.
inline CubicRoots solve_depressed_cubic(double c) {
    constexpr double kSlack = 1e-9;
    if (!(std::abs(c) <= kCubicBound + kSlack))
        throw DomainError("T^3 - T + 2c has no three real roots for c = " + std::to_string(c));
    const double x = std::clamp(3.0 * kSqrt3 * c, -1.0, 1.0);
    const double alpha = std::acos(x);
    const double k = 2.0 / kSqrt3;
    constexpr double pi = std::numbers::pi;
    return {{k * std::cos((alpha - pi) / 3.0), k * std::cos((alpha + pi) / 3.0), -k * std::cos(alpha / 3.0)}};
}

/// Spectrum of D^2 P24 at a unit point from the factorisation
/// (T^3 - T + 2m)(T^3 - T - 2m)(T^3 - T + 2W)^6.
inline Spectrum closed_form_spectrum_mW(double m, double w) {
    std::vector<double> v;
    v.reserve(24);
    for (double r : solve_depressed_cubic(m).r) v.push_back(r);
    for (double r : solve_depressed_cubic(-m).r) v.push_back(r);
    const auto mu = solve_depressed_cubic(w).r;
    for (int rep = 0; rep < 6; ++rep)
        for (double r : mu) v.push_back(r);
    return Spectrum(std::move(v));
}

inline Spectrum closed_form_spectrum(const TriplePoint& v) {
    if (std::abs(v.norm() - 1.0) > 1e-10) throw DomainError("closed_form_spectrum expects a unit point");
    const auto [m, w] = invariants_mW(v);
    return closed_form_spectrum_mW(m, w);
}

/// The 24 eigenvalues placed by position: lambda_1, mu_1 x6, l_1, l_2,
/// mu_2 x6, -l_2, -l_1, mu_3 x6, lambda_24.
inline std::array<double, 24> descending_layout(double m, double w) {
    constexpr double pi = std::numbers::pi;
    const double k = 2.0 / kSqrt3;
    const double alpha = std::acos(std::clamp(3.0 * kSqrt3 * m, -1.0, 1.0));
    const double top = k * std::cos(alpha / 3.0);
    const double c1 = k * std::cos((alpha + pi) / 3.0);
    const double c5 = k * std::cos((alpha + 5.0 * pi) / 3.0);
    const double l1 = std::max(c1, c5);
    const double l2 = std::min(c1, c5);
    const auto mu = solve_depressed_cubic(w).r;
    std::array<double, 24> out{};
    out[0] = top;
    for (std::size_t i = 1; i <= 6; ++i) out[i] = mu[0];
    out[7] = l1;
    out[8] = l2;
    for (std::size_t i = 9; i <= 14; ++i) out[i] = mu[1];
    out[15] = -l2;
    out[16] = -l1;
    for (std::size_t i = 17; i <= 22; ++i) out[i] = mu[2];
    out[23] = -top;
    return out;
}

// --- Jacobi eigensolver -----------------------------------------------------

struct EigenDecomposition {
    Spectrum spectrum;
    Matrix vectors; ///< column j is the eigenvector of spectrum.values[j]
    int sweeps = 0;
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

/// Cyclic Jacobi. Diagonalises `a` in place; applies the rotations to `v` if given.
inline int jacobi_sweeps(Matrix& a, Matrix* v) {
    constexpr int kMaxSweeps = 100;
    const std::size_t n = a.rows();
    const double target = 1e-12 * a.frobenius();
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= target) return sweep;
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                // Once |apq| is below the rounding level of both diagonal
                // entries the rotation is a no-op in binary64.
                if (sweep > 3 && std::abs(apq) * 1e17 < std::abs(app) && std::abs(apq) * 1e17 < std::abs(aqq)) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    const double nrp = c * arp - s * arq;
                    const double nrq = s * arp + c * arq;
                    a(r, p) = nrp;
                    a(p, r) = nrp;
                    a(r, q) = nrq;
                    a(q, r) = nrq;
                }
                if (v != nullptr) {
                    for (std::size_t r = 0; r < n; ++r) {
                        const double vrp = (*v)(r, p);
                        const double vrq = (*v)(r, q);
                        (*v)(r, p) = c * vrp - s * vrq;
                        (*v)(r, q) = s * vrp + c * vrq;
                    }
                }
                rotated = true;
            }
        }
        if (!rotated) return sweep + 1;
    }
    if (off_diagonal_norm(a) <= target) return kMaxSweeps;
    throw ConvergenceError("Jacobi eigensolver did not converge in 100 sweeps");
}

inline void require_symmetric(const Matrix& a) {
    if (!a.square()) throw DimensionMismatch("eigensolver expects a square matrix");
    const double scale = std::max(1.0, a.max_abs());
    if (a.asymmetry() > 1e-12 * scale) throw DomainError("eigensolver expects a symmetric matrix");
}

} // namespace detail

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
inline Spectrum sym_eigen(const SymMatrix& a) {
    detail::require_symmetric(a);
    Matrix work = a;
    detail::jacobi_sweeps(work, nullptr);
    std::vector<double> d(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) d[i] = work(i, i);
    return Spectrum(std::move(d));
}

/// Eigenvalues and the accumulated orthogonal transform.
inline EigenDecomposition sym_eigen_vectors(const SymMatrix& a) {
    detail::require_symmetric(a);
    const std::size_t n = a.rows();
    Matrix work = a;
    Matrix v = Matrix::identity(n);
    const int sweeps = detail::jacobi_sweeps(work, &v);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return work(i, i) > work(j, j); });
    EigenDecomposition out;
    out.spectrum.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.spectrum.values[j] = work(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    out.sweeps = sweeps;
    return out;
}

// --- perturbation checkers --------------------------------------------------

/// Weyl: the extreme eigenvalues of A - B bracket the ordered differences
/// lambda_i(A) - lambda_i(B).
inline bool weyl_gap_check(const SymMatrix& a, const SymMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("weyl_gap_check");
    const Spectrum la = sym_eigen(a);
    const Spectrum lb = sym_eigen(b);
    const Spectrum gap = sym_eigen(a - b);
    const double tol = 1e-10 * (a.frobenius() + b.frobenius());
    double hi = -INFINITY, lo = INFINITY;
    for (std::size_t i = 0; i < la.size(); ++i) {
        hi = std::max(hi, la.values[i] - lb.values[i]);
        lo = std::min(lo, la.values[i] - lb.values[i]);
    }
    return gap.front() >= hi - tol && gap.back() <= lo + tol;
}

/// Cauchy interlacing for a compression to codimension k:
/// lambda_i >= lambda'_i >= lambda_{i+k}.
inline bool interlacing_check(const Spectrum& full, const Spectrum& restricted) {
    if (restricted.size() == 0 || restricted.size() >= full.size())
        throw DimensionMismatch("interlacing_check: restricted spectrum must be strictly shorter");
    const std::size_t k = full.size() - restricted.size();
    double scale = 1.0;
    for (double v : full.values) scale = std::max(scale, std::abs(v));
    const double tol = 1e-10 * scale;
    for (std::size_t i = 0; i < restricted.size(); ++i) {
        const double r = restricted.values[i];
        if (r > full.values[i] + tol || r < full.values[i + k] - tol) return false;
    }
    return true;
}

// --- characteristic polynomials --------------------------------------------

/// Coefficients of det(T I - A), leading coefficient first
/// (Faddeev-LeVerrier; intended for small n).
inline std::vector<double> char_poly(const Matrix& a) {
    if (!a.square()) throw DimensionMismatch("char_poly expects a square matrix");
    const std::size_t n = a.rows();
    std::vector<double> c(n + 1, 0.0);
    c[0] = 1.0;
    Matrix m(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        Matrix am = a * m;
        for (std::size_t i = 0; i < n; ++i) am(i, i) += c[k - 1];
        m = std::move(am);
        const double tr = (a * m).trace();
        c[k] = -tr / static_cast<double>(k);
    }
    return c;
}

inline std::vector<double> poly_mul(std::span<const double> p, std::span<const double> q) {
    std::vector<double> r(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
}

/// max_k |p_k - q_k| / (1 + |q_k|).
inline double coefficient_residual(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionMismatch("polynomials of different degree");
    double m = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) m = std::max(m, std::abs(p[k] - q[k]) / (1.0 + std::abs(q[k])));
    return m;
}

inline double determinant4(const Matrix& a) { return char_poly(a).back(); }

// --- the M_s / L_s block audit -------------------------------------------

struct BlockResiduals {
    double orthogonality = 0.0;  ///< property 1
    double determinant = 0.0;    ///< property 2
    double char_poly = 0.0;      ///< property 3
    double symmetric_part = 0.0; ///< property 4
    double product = 0.0;        ///< property 5

    [[nodiscard]] double worst() const noexcept {
        return std::max({orthogonality, determinant, char_poly, symmetric_part, product});
    }
};

/// Checks properties 1-5 of the 4x4 blocks at one (r, s, t).
inline BlockResiduals block_properties(const std::array<double, 4>& r, const std::array<double, 4>& s,
                                       const std::array<double, 4>& t) {
    BlockResiduals out;
    const auto sq = [](const std::array<double, 4>& u) { return u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3]; };
    const double s2 = sq(s);
    const double sn = std::sqrt(s2);

    const Matrix ms = to_matrix(build_block(s, BlockPattern::M));
    const Matrix ls = to_matrix(build_block(s, BlockPattern::L));
    const Matrix id = Matrix::identity(4);
    for (const Matrix* b : {&ms, &ls}) {
        const Matrix bt = b->transposed();
        out.orthogonality = std::max(
            {out.orthogonality, (*b * bt - s2 * id).max_abs() / (1.0 + s2), (bt * *b - s2 * id).max_abs() / (1.0 + s2)});
    }

    const double s4 = s2 * s2;
    out.determinant = std::max(std::abs(determinant4(ms) + s4), std::abs(determinant4(ls) - s4)) / (1.0 + s4);

    const std::vector<double> quad{1.0, 2.0 * s[0], s2};
    const std::vector<double> split{1.0, 0.0, -s2};
    out.char_poly = std::max(coefficient_residual(char_poly(ms), poly_mul(split, quad)),
                             coefficient_residual(char_poly(ls), poly_mul(quad, quad)));
    if (sn > 0.0) {
        const Matrix os = ms * (1.0 / sn);
        const Matrix ops = ls * (1.0 / sn);
        const double s0n = s[0] / sn;
        const std::vector<double> quad1{1.0, 2.0 * s0n, 1.0};
        const std::vector<double> split1{1.0, 0.0, -1.0};
        out.determinant = std::max({out.determinant, std::abs(determinant4(os) + 1.0), std::abs(determinant4(ops) - 1.0)});
        out.char_poly = std::max({out.char_poly, coefficient_residual(char_poly(os), poly_mul(split1, quad1)),
                                  coefficient_residual(char_poly(ops), poly_mul(quad1, quad1))});

        const Spectrum ns = sym_eigen(os + os.transposed());
        const Spectrum nps = sym_eigen(ops + ops.transposed());
        const Spectrum ns_expected(std::vector<double>{2.0, -2.0, -2.0 * s0n, -2.0 * s0n});
        const Spectrum nps_expected(std::vector<double>(4, -2.0 * s0n));
        out.symmetric_part = std::max(max_abs_diff(ns, ns_expected), max_abs_diff(nps, nps_expected));
    }

    const double rr = sq(r) * s2 * sq(t);
    const double p = eval_P12(Quaternion{r}, Quaternion{s}, Quaternion{t});
    const std::vector<double> coupled{1.0, 2.0 * p, rr};
    const std::vector<double> split3{1.0, 0.0, -rr};
    const Matrix mrst = to_matrix(build_block(r, BlockPattern::M)) * ms * to_matrix(build_block(t, BlockPattern::M));
    const Matrix lrst = to_matrix(build_block(r, BlockPattern::L)) * ls * to_matrix(build_block(t, BlockPattern::L));
    out.product = std::max(coefficient_residual(char_poly(mrst), poly_mul(split3, coupled)),
                           coefficient_residual(char_poly(lrst), poly_mul(coupled, coupled)));
    return out;
}

struct BlockAuditOptions {
    double tolerance = 1e-9;
    unsigned threads = 0;
};

inline Certificate block_property_audit(std::uint64_t samples, std::uint64_t seed, BlockAuditOptions opt = {}) {
    if (samples < 1) throw DomainError("block_property_audit needs at least one sample");
    struct Acc {
        Extremum orth, det, cp, sym, prod, worst;
    };
    auto body = [seed](std::size_t b, std::size_t e) {
        Acc acc;
        for (std::size_t i = b; i < e; ++i) {
            Stream rng(seed, tags::block_audit, i);
            std::array<double, 4> r{}, s{}, t{};
            for (auto* u : {&r, &s, &t})
                for (double& x : *u) x = rng.normal();
            const BlockResiduals res = block_properties(r, s, t);
            acc.orth.observe(res.orthogonality, i);
            acc.det.observe(res.determinant, i);
            acc.cp.observe(res.char_poly, i);
            acc.sym.observe(res.symmetric_part, i);
            acc.prod.observe(res.product, i);
            acc.worst.observe(res.worst(), i);
        }
        return acc;
    };
    auto merge = [](Acc a, Acc b) {
        a.orth.merge(b.orth);
        a.det.merge(b.det);
        a.cp.merge(b.cp);
        a.sym.merge(b.sym);
        a.prod.merge(b.prod);
        a.worst.merge(b.worst);
        return a;
    };
    const Acc acc = parallel_reduce(samples, 1024, opt.threads, Acc{}, body, merge);

    Certificate cert;
    cert.name = "block-properties";
    cert.seed = seed;
    cert.samples = samples;
    cert.tolerance = opt.tolerance;
    cert.worst_residual = acc.worst.max;
    cert.record("orthogonality", acc.orth);
    cert.record("determinant", acc.det);
    cert.record("char_poly", acc.cp);
    cert.record("symmetric_part", acc.sym);
    cert.record("product", acc.prod);
    cert.metadata["distribution"] = "r, s, t with i.i.d. N(0,1) coordinates";
    cert.finalize();
    return cert;
}

} // namespace octovisc
