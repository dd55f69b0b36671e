#include <gtest/gtest.h>

#include <numbers>

#include "octovisc/random.hpp"
#include "octovisc/spectral.hpp"

using namespace octovisc;

namespace {

const double s3 = std::sqrt(3.0);

TriplePoint random_unit_point(Stream& rng) { return TriplePoint::from_flat(rng.unit_vector(24)); }

/// Counts entries of `values` within `tol` of `target`.
std::size_t count_near(const std::vector<double>& values, double target, double tol) {
    std::size_t n = 0;
    for (double v : values) n += std::abs(v - target) <= tol;
    return n;
}

} // namespace

TEST(DepressedCubic, Examples) {
    const auto r0 = solve_depressed_cubic(0.0).r;
    EXPECT_NEAR(r0[0], 1.0, 1e-15);
    EXPECT_NEAR(r0[1], 0.0, 1e-15);
    EXPECT_NEAR(r0[2], -1.0, 1e-15);

    const auto rp = solve_depressed_cubic(kCubicBound).r;
    EXPECT_NEAR(rp[0], 1 / s3, 1e-12);
    EXPECT_NEAR(rp[1], 1 / s3, 1e-12);
    EXPECT_NEAR(rp[2], -2 / s3, 1e-12);

    const auto rm = solve_depressed_cubic(-kCubicBound).r;
    EXPECT_NEAR(rm[0], 2 / s3, 1e-12);
    EXPECT_NEAR(rm[1], -1 / s3, 1e-12);
    EXPECT_NEAR(rm[2], -1 / s3, 1e-12);
}

TEST(DepressedCubic, ResidualSweep) {
    double worst = 0.0;
    for (int k = 0; k <= 10000; ++k) {
        const double c = -kCubicBound + 2 * kCubicBound * k / 10000.0;
        const CubicRoots roots = solve_depressed_cubic(c);
        worst = std::max(worst, roots.residual(c));
        EXPECT_GE(roots.r[0], roots.r[1]);
        EXPECT_GE(roots.r[1], roots.r[2]);
        EXPECT_NEAR(roots.r[0] + roots.r[1] + roots.r[2], 0.0, 1e-14);
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(DepressedCubic, BoundaryClampAndDomainError) {
    EXPECT_NO_THROW(solve_depressed_cubic(kCubicBound + 1e-12));
    EXPECT_NO_THROW(solve_depressed_cubic(-kCubicBound - 5e-10));
    EXPECT_THROW(solve_depressed_cubic(kCubicBound + 1e-8), DomainError);
    EXPECT_THROW(solve_depressed_cubic(0.3), DomainError);
    EXPECT_THROW(solve_depressed_cubic(std::nan("")), DomainError);
}

TEST(ClosedForm, SingleBlockPoint) {
    const TriplePoint v{Octonion::unit(5), Octonion{}, Octonion{}};
    const Spectrum sp = closed_form_spectrum(v);
    ASSERT_EQ(sp.size(), 24u);
    EXPECT_EQ(count_near(sp.values, 1.0, 1e-12), 8u);
    EXPECT_EQ(count_near(sp.values, 0.0, 1e-12), 8u);
    EXPECT_EQ(count_near(sp.values, -1.0, 1e-12), 8u);
    EXPECT_LE(max_abs_diff(sp, sym_eigen(hess_P24(v))), 1e-12);
}

TEST(ClosedForm, RealUnitTriple) {
    const TriplePoint v = (1 / s3) * TriplePoint{Octonion::real(1), Octonion::real(1), Octonion::real(1)};
    const Spectrum sp = closed_form_spectrum(v);
    // (T^3-T+2m) -> {1/s3, 1/s3, -2/s3}, (T^3-T-2m) -> {2/s3, -1/s3, -1/s3},
    // (T^3-T+2W)^6 with W = m -> six copies of the first factor's roots.
    EXPECT_EQ(count_near(sp.values, 2 / s3, 1e-7), 1u);
    EXPECT_EQ(count_near(sp.values, 1 / s3, 1e-7), 14u);
    EXPECT_EQ(count_near(sp.values, -1 / s3, 1e-7), 2u);
    EXPECT_EQ(count_near(sp.values, -2 / s3, 1e-7), 7u);
    EXPECT_NEAR(sp.sum(), 0.0, 1e-12);
    EXPECT_LE(max_abs_diff(sp, sym_eigen(hess_P24(v))), 1e-7);
}

TEST(ClosedForm, RejectsNonUnitPoints) {
    const TriplePoint v{Octonion::real(1), Octonion::real(1), Octonion::real(1)};
    EXPECT_THROW(closed_form_spectrum(v), DomainError);
}

TEST(ClosedForm, AgreesWithJacobiOnRandomUnitPoints) {
    double worst = 0.0;
    for (std::uint64_t n = 0; n < 2000; ++n) {
        Stream rng(30, 0, n);
        const TriplePoint v = random_unit_point(rng);
        const Spectrum sp = closed_form_spectrum(v);
        worst = std::max(worst, max_abs_diff(sp, sym_eigen(hess_P24(v))));
        EXPECT_NEAR(sp.sum(), 0.0, 1e-10 * 24);
    }
    EXPECT_LE(worst, 1e-9);
}

TEST(ClosedForm, DescendingLayout) {
    for (std::uint64_t n = 0; n < 2000; ++n) {
        Stream rng(31, 0, n);
        const TriplePoint v = random_unit_point(rng);
        const auto [m, w] = invariants_mW(v);
        const auto layout = descending_layout(m, w);
        const Spectrum sp = closed_form_spectrum(v);
        for (std::size_t i = 0; i < 24; ++i) ASSERT_NEAR(layout[i], sp.values[i], 1e-8) << "position " << i + 1;
        const auto mu = solve_depressed_cubic(w).r;
        for (std::size_t pos = 2; pos <= 7; ++pos) EXPECT_NEAR(sp.at(pos), mu[0], 1e-8);
        for (std::size_t pos = 10; pos <= 15; ++pos) EXPECT_NEAR(sp.at(pos), mu[1], 1e-8);
        for (std::size_t pos = 18; pos <= 23; ++pos) EXPECT_NEAR(sp.at(pos), mu[2], 1e-8);
        const double top = 2 / s3 * std::cos(std::acos(std::min(1.0, 3 * s3 * m)) / 3);
        EXPECT_NEAR(sp.at(1), top, 1e-12);
        EXPECT_NEAR(sp.at(24), -top, 1e-12);
    }
}

TEST(ClosedForm, ExtremeEigenvalueInequalities) {
    const CubicForm p12 = CubicForm::p12();
    for (std::uint64_t n = 0; n < 2000; ++n) {
        Stream rng(32, 0, n);
        const Spectrum s24 = closed_form_spectrum(random_unit_point(rng));
        EXPECT_GE(2 * s24.at(3) - s24.at(1), -1e-10);
        EXPECT_LE(2 * s24.at(22) - s24.at(24), 1e-10);
        const Spectrum s12 = sym_eigen(p12.hess(rng.unit_vector(12)));
        EXPECT_GE(2 * s12.at(3) - s12.at(1), -1e-10);
        EXPECT_LE(2 * s12.at(10) - s12.at(12), 1e-10);
    }
}

TEST(Jacobi, Examples) {
    const Spectrum id = sym_eigen(Matrix::identity(24));
    for (double v : id.values) EXPECT_EQ(v, 1.0);
    const std::vector<double> d{1.0, 3.0, -2.0};
    const Spectrum sd = sym_eigen(Matrix::diagonal(d));
    EXPECT_EQ(sd.values, (std::vector<double>{3.0, 1.0, -2.0}));
    EXPECT_EQ(sym_eigen(Matrix(5, 5)).values, std::vector<double>(5, 0.0));
}

TEST(Jacobi, RecoversConstructedSpectrum) {
    double worst = 0.0;
    for (std::uint64_t n = 0; n < 300; ++n) {
        Stream rng(33, 0, n);
        const std::size_t dim = 2 + n % 23;
        const Matrix q = haar_orthogonal(dim, rng);
        Vector d = rng.normal_vector(dim);
        Matrix a = q * Matrix::diagonal(d) * q.transposed();
        a.symmetrize();
        std::sort(d.begin(), d.end(), std::greater<>());
        const Spectrum sp = sym_eigen(a);
        for (std::size_t i = 0; i < dim; ++i) worst = std::max(worst, std::abs(sp.values[i] - d[i]));
    }
    EXPECT_LE(worst, 1e-11);
}

TEST(Jacobi, EigenvectorsAreOrthonormal) {
    for (std::uint64_t n = 0; n < 50; ++n) {
        Stream rng(34, 0, n);
        const Matrix a = random_symmetric(21, rng);
        const EigenDecomposition ed = sym_eigen_vectors(a);
        EXPECT_LE(orthonormality_defect(ed.vectors.transposed()), 1e-13);
        const Matrix av = a * ed.vectors;
        for (std::size_t j = 0; j < 21; ++j)
            for (std::size_t i = 0; i < 21; ++i)
                EXPECT_NEAR(av(i, j), ed.spectrum.values[j] * ed.vectors(i, j), 1e-11);
        EXPECT_LE(max_abs_diff(ed.spectrum, sym_eigen(a)), 1e-12);
    }
}

TEST(Jacobi, RejectsAsymmetricInput) {
    EXPECT_THROW(sym_eigen(Matrix{{1, 2}, {0, 1}}), DomainError);
    EXPECT_THROW(sym_eigen(Matrix(2, 3)), DimensionMismatch);
}

TEST(Weyl, Examples) {
    const Matrix a = Matrix::diagonal(std::vector<double>{1, 0});
    const Matrix b = Matrix::diagonal(std::vector<double>{0, 1});
    EXPECT_TRUE(weyl_gap_check(a, b));
    EXPECT_TRUE(weyl_gap_check(a, Matrix(2, 2)));
    EXPECT_THROW(weyl_gap_check(a, Matrix(3, 3)), DimensionMismatch);
}

TEST(Weyl, RandomPairs) {
    for (std::uint64_t n = 0; n < 1000; ++n) {
        Stream rng(35, 0, n);
        const std::size_t dim = 1 + n % 24;
        ASSERT_TRUE(weyl_gap_check(random_symmetric(dim, rng), random_symmetric(dim, rng))) << n;
    }
}

TEST(Interlacing, Examples) {
    const Spectrum full(std::vector<double>{2, 1, 0});
    EXPECT_TRUE(interlacing_check(full, Spectrum(std::vector<double>{2, 1})));
    EXPECT_TRUE(interlacing_check(full, Spectrum(std::vector<double>{2, 0})));
    EXPECT_TRUE(interlacing_check(full, Spectrum(std::vector<double>{1, 0})));
    EXPECT_FALSE(interlacing_check(Spectrum(std::vector<double>{1, 0}), Spectrum(std::vector<double>{2})));
    EXPECT_THROW(interlacing_check(full, full), DimensionMismatch);
}

TEST(Interlacing, RandomHyperplanes) {
    for (std::uint64_t n = 0; n < 1000; ++n) {
        Stream rng(36, 0, n);
        const std::size_t dim = 2 + n % 23;
        const std::size_t k = 1 + n % 3 < dim ? 1 + n % 3 : 1;
        const Matrix a = random_symmetric(dim, rng);
        const Matrix q = haar_orthogonal(dim, rng);
        Matrix basis(dim - k, dim);
        for (std::size_t i = 0; i < dim - k; ++i)
            for (std::size_t j = 0; j < dim; ++j) basis(i, j) = q(j, i);
        ASSERT_TRUE(interlacing_check(sym_eigen(a), sym_eigen(congruence(basis, a)))) << n;
    }
}

TEST(CharPoly, KnownMatrix) {
    const Matrix a{{2, 1}, {1, 2}};
    const auto c = char_poly(a);
    EXPECT_NEAR(c[0], 1, 1e-15);
    EXPECT_NEAR(c[1], -4, 1e-15);
    EXPECT_NEAR(c[2], 3, 1e-15);
}

TEST(BlockAudit, IdentityQuaternion) {
    const std::array<double, 4> one{1, 0, 0, 0};
    const Matrix o = to_matrix(build_block(one, BlockPattern::M));
    const Spectrum ns = sym_eigen(o + o.transposed());
    EXPECT_EQ(ns.values, (std::vector<double>{2, -2, -2, -2}));
    const BlockResiduals res = block_properties(one, one, one);
    EXPECT_LE(res.worst(), 1e-15);
    // P(1,1,1) = 1: PM_rst = (T^2 - 1)(T + 1)^2, roots {1, -1, -1, -1}
    const Matrix mrst = o * o * o;
    const Spectrum roots = sym_eigen(mrst);
    EXPECT_EQ(roots.values, (std::vector<double>{1, -1, -1, -1}));
}

TEST(BlockAudit, RandomTriplesPass) {
    const Certificate cert = block_property_audit(10000, 7);
    EXPECT_TRUE(cert.pass) << cert.worst_residual;
    EXPECT_LE(cert.worst_residual, 1e-9);
    EXPECT_EQ(cert.samples, 10000u);
}

TEST(BlockAudit, ThreadCountDoesNotChangeTheCertificate) {
    const Certificate a = block_property_audit(3000, 9, {.threads = 1});
    const Certificate b = block_property_audit(3000, 9, {.threads = 4});
    EXPECT_EQ(a.worst_residual, b.worst_residual);
    EXPECT_EQ(a.extremes, b.extremes);
}
