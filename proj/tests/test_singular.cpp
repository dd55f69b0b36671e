#include <gtest/gtest.h>

#include "octovisc/singular.hpp"

using namespace octovisc;

namespace {

TriplePoint unit_point(Stream& rng) { return TriplePoint::from_flat(rng.unit_vector(24)); }

Matrix fd_hessian_w(const TriplePoint& v, double delta, double h) {
    const Vector x = v.flat();
    Matrix hm(24, 24);
    auto f = [&](const Vector& y) { return eval_P24_octonion(TriplePoint::from_flat(y)) / std::pow(norm(y), delta); };
    for (std::size_t i = 0; i < 24; ++i)
        for (std::size_t j = i; j < 24; ++j) {
            auto at = [&](double si, double sj) {
                Vector y = x;
                y[i] += si * h;
                y[j] += sj * h;
                return f(y);
            };
            const double d = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
            hm(i, j) = d;
            hm(j, i) = d;
        }
    return hm;
}

} // namespace

TEST(Delta, RangeAndEpsilon) {
    EXPECT_THROW(Delta(2.5), DomainError);
    EXPECT_THROW(Delta(2.0), DomainError);
    EXPECT_THROW(Delta(0.5), DomainError);
    EXPECT_DOUBLE_EQ(Delta(1.0).scalar_epsilon(), 0.2);
    EXPECT_DOUBLE_EQ(Delta(1.0).epsilon(), 0.05);
    EXPECT_NEAR(Delta(1.99).epsilon(), 0.01 / 5.99, 1e-15);
}

TEST(EvalW, Examples) {
    const TriplePoint ones{Octonion::real(1), Octonion::real(1), Octonion::real(1)};
    EXPECT_NEAR(eval_w(ones, 1.0).value, 1.0 / std::sqrt(3.0), 1e-15);
    const auto zero = eval_w(TriplePoint{}, 1.5);
    EXPECT_EQ(zero.value, 0.0);
    EXPECT_TRUE(zero.at_origin);
    for (std::uint64_t n = 0; n < 10000; ++n) {
        Stream rng(30, 0, n);
        const TriplePoint v = TriplePoint::from_flat(rng.normal_vector(24));
        const double delta = rng.uniform(1.0, 2.0);
        const double t = rng.uniform(0.1, 10.0);
        const double w = eval_w(v, delta).value;
        ASSERT_NEAR(eval_w(t * v, delta).value, std::pow(t, 3 - delta) * w, 1e-12 * std::pow(t, 3 - delta) * (1 + std::abs(w)));
        ASSERT_EQ(eval_w(-1.0 * v, delta).value, -w);
    }
}

TEST(HessW, DeltaZeroIsHessianOfP) {
    Stream rng(31, 0, 0);
    const TriplePoint v = unit_point(rng);
    EXPECT_EQ((hess_w(v, 0.0) - hess_P24(v)).max_abs(), 0.0);
    EXPECT_THROW(hess_w(TriplePoint{}, 1.0), SingularPoint);
    EXPECT_THROW(hess_w(1e-9 * v, 1.0), SingularPoint);
}

TEST(HessW, MatchesFiniteDifferences) {
    double worst = 0.0;
    for (std::uint64_t n = 0; n < 10; ++n) {
        Stream rng(32, 0, n);
        const TriplePoint v = unit_point(rng);
        const double delta = rng.uniform(1.0, 2.0);
        const Matrix h = hess_w(v, delta);
        EXPECT_EQ(h.asymmetry(), 0.0);
        worst = std::max(worst, (h - fd_hessian_w(v, delta, 1e-4)).max_abs());
    }
    EXPECT_LE(worst, 1e-6);
}

TEST(HessW, Homogeneity) {
    for (std::uint64_t n = 0; n < 200; ++n) {
        Stream rng(33, 0, n);
        const TriplePoint v = unit_point(rng);
        const double delta = rng.uniform(1.0, 2.0);
        const double t = rng.uniform(0.5, 5.0);
        Matrix scaled = hess_w(v, delta);
        scaled *= std::pow(t, 1 - delta);
        EXPECT_LE((hess_w(t * v, delta) - scaled).max_abs(), 1e-12);
    }
}

TEST(HessW, TangentialIdentity) {
    double worst = 0.0;
    for (double delta : {1.0, 1.5, 1.99})
        for (std::uint64_t n = 0; n < 1000; ++n) {
            Stream rng(34, 0, n);
            worst = std::max(worst, tangential_residual(unit_point(rng), delta));
        }
    EXPECT_LE(worst, 1e-10);
}

TEST(Subspace, ValidationAndRestriction) {
    EXPECT_THROW(Subspace(Matrix(3, 23)), DimensionMismatch);
    Matrix bad(2, 24);
    bad(0, 0) = 1.0;
    bad(1, 0) = 1.0;
    EXPECT_THROW(Subspace(std::move(bad)), DomainError);

    Stream rng(35, 0, 0);
    const Subspace h = Subspace::random(21, rng);
    EXPECT_LE((restrict_to(Matrix::identity(24), h) - Matrix::identity(21)).max_abs(), 1e-14);

    const Matrix a = random_symmetric(24, rng);
    const Matrix r = restrict_to(a, Subspace::default21());
    for (std::size_t i = 0; i < 21; ++i)
        for (std::size_t j = 0; j < 21; ++j) EXPECT_EQ(r(i, j), a(i, j));

    const Vector x = h.embed(rng.normal_vector(21));
    const Subspace perp = h.orthogonal_to(x);
    EXPECT_EQ(perp.dim(), 20u);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(dot(perp.basis().row(i), x), 0.0, 1e-13 * norm(x));
}

TEST(Subspace, RestrictionInterlaces) {
    for (std::uint64_t n = 0; n < 2000; ++n) {
        Stream rng(36, 0, n);
        const std::size_t k = std::array<std::size_t, 3>{19, 21, 23}[n % 3];
        const Subspace h = Subspace::random(k, rng);
        const Matrix a = random_symmetric(24, rng);
        ASSERT_TRUE(interlacing_check(sym_eigen(a), sym_eigen(restrict_to(a, h))));
    }
}

TEST(MuRoots, Examples) {
    const auto z = mu_roots(0.0, 1.3);
    EXPECT_NEAR(z[0], 1.0, 1e-15);
    EXPECT_NEAR(z[1], 0.0, 1e-15);
    EXPECT_NEAR(z[2], -1.0, 1e-15);
    const double s3 = std::sqrt(3.0);
    for (double delta : {1.0, 1.5, 1.99}) {
        const auto r = mu_roots(kCubicBound, delta);
        const double shift = delta / (3 * s3);
        EXPECT_NEAR(r[0], 1 / s3 - shift, 1e-7);
        EXPECT_NEAR(r[1], 1 / s3 - shift, 1e-7);
        EXPECT_NEAR(r[2], -2 / s3 - shift, 1e-12);
    }
    EXPECT_THROW(mu_roots(0.2, 1.0), DomainError);
    for (std::uint64_t n = 0; n < 10000; ++n) {
        Stream rng(37, 0, n);
        const double w = rng.uniform(-kCubicBound, kCubicBound);
        const double delta = rng.uniform(1.0, 2.0);
        const auto mu = mu_roots(w, delta);
        const auto neg = mu_roots(-w, delta);
        for (double m : mu) ASSERT_LE(std::abs(shifted_cubic(m, w, delta)), 1e-12);
        ASSERT_GE(mu[0], mu[1]);
        ASSERT_GE(mu[1], mu[2]);
        ASSERT_NEAR(neg[0], -mu[2], 1e-12);
        ASSERT_NEAR(neg[1], -mu[1], 1e-12);
    }
}

TEST(MuRoots, PrintedExpansionIsTheShiftedCubic) {
    // Q1(S) = S^3 - S + 2W evaluated at S = T + delta W
    for (std::uint64_t n = 0; n < 1000; ++n) {
        Stream rng(47, 0, n);
        const double t = rng.uniform(-2.0, 2.0), w = rng.uniform(-kCubicBound, kCubicBound);
        const double delta = rng.uniform(1.0, 2.0);
        const double s = t + delta * w;
        EXPECT_NEAR(shifted_cubic(t, w, delta), s * s * s - s + 2 * w, 1e-13);
    }
}

TEST(Lemma41, SkipAndRatio) {
    EXPECT_FALSE(lemma41_ratio(0.1, 0.1, 1.0, 1.0).has_value());
    const auto r = lemma41_ratio(0.1, -0.05, 0.5, 1.0);
    ASSERT_TRUE(r.has_value());
    EXPECT_GT(*r, 0.2);
    EXPECT_LT(*r, 5.0);
}

TEST(Lemma41, Certificate) {
    for (double d : {1.0, 1.5, 1.99}) {
        const Certificate c = certify_lemma41(Delta(d), 20000, 7);
        EXPECT_TRUE(c.pass) << d;
        EXPECT_EQ(c.failures, 0u);
        EXPECT_GE(c.extremes.at("ratio.min"), Delta(d).scalar_epsilon() - 1e-9);
        EXPECT_LE(c.extremes.at("ratio.max"), 1 / Delta(d).scalar_epsilon() + 1e-9);
    }
}

TEST(Prop41, OddPairIsWithinBounds) {
    const Subspace h = Subspace::default21();
    Stream rng(38, 0, 0);
    const Vector a = rng.unit_vector(21);
    Vector b = a;
    for (double& x : b) x = -x;
    const Spectrum s = sym_eigen(prop41_matrix(h, a, b, Matrix::identity(21), 1.0));
    ASSERT_GT(s.front(), 0.0);
    ASSERT_LT(s.back(), 0.0);
    const double r = s.front() / -s.back();
    EXPECT_GE(r, 0.05);
    EXPECT_LE(r, 20.0);
}

TEST(Prop41, CertificateAndThreadInvariance) {
    Stream rng(39, tags::subspace, 0);
    const Subspace h = Subspace::random(21, rng);
    const Certificate one = certify_prop41(Delta(1.5), h, 400, 11, {1, 1.0});
    const Certificate many = certify_prop41(Delta(1.5), h, 400, 11, {4, 1.0});
    EXPECT_TRUE(one.pass);
    EXPECT_EQ(one.samples, 400u);
    EXPECT_EQ(one.extremes, many.extremes);
    EXPECT_EQ(one.worst_residual, many.worst_residual);
    EXPECT_THROW(certify_prop41(Delta(1.0), Subspace::coordinate(19), 1, 1), DimensionMismatch);
}

TEST(Cor41, PinnedEigenvaluesOnCodimensionFiveSlices) {
    const Subspace h = Subspace::default21();
    for (std::uint64_t n = 0; n < 300; ++n) {
        Stream rng(40, 0, n);
        const double delta = rng.uniform(1.0, 2.0);
        const Vector u = h.embed(rng.unit_vector(21));
        const TriplePoint a = TriplePoint::from_flat(u);
        const auto mu = mu_roots(eval_P24(a), delta);
        const Subspace h20 = h.orthogonal_to(u);
        const Subspace h19 = h20.orthogonal_to(h20.embed(rng.normal_vector(20)));
        for (const Subspace* s : {&h20, &h19}) {
            const Spectrum sp = sym_eigen(restrict_to(hess_w(a, delta), *s));
            EXPECT_NEAR(sp.at(2), mu[0], 1e-8);
            EXPECT_NEAR(sp.at(10), mu[1], 1e-8);
            EXPECT_NEAR(sp.at(18), mu[2], 1e-8);
        }
    }
}

TEST(SignChange, WitnessNearOrigin) {
    Stream rng(41, 0, 0);
    const Subspace h = Subspace::default21();
    for (double radius : {1.0, 1e-3, 1e-6}) {
        const auto w = sign_change_witness(h, 1.0, radius, rng);
        ASSERT_TRUE(w.has_value());
        EXPECT_GT(w->w_positive, 0.0);
        EXPECT_LT(w->w_negative, 0.0);
        EXPECT_LE(norm(w->positive), radius);
        EXPECT_LE(norm(w->negative), radius);
    }
}

TEST(Prop32, SingleVariableCube) {
    const CubicForm p(3, {{1.0, 0, 0, 0}});
    const Prop32Result r = prop32_audit(p, 5, 1);
    EXPECT_NEAR(r.direction[0], 1.0, 1e-9);
    EXPECT_NEAR(r.spectrum.front(), 6.0, 1e-8);
    EXPECT_NEAR(r.spectrum.at(2), 0.0, 1e-8);
    EXPECT_TRUE(r.holds());
    EXPECT_TRUE(r.lower_same_direction);
}

TEST(Prop32, P24AttainsTheEqualityCase) {
    const Prop32Result r = prop32_audit(CubicForm::p24(), 5, 2);
    const double s3 = std::sqrt(3.0);
    EXPECT_NEAR(r.value, kCubicBound, 1e-12);
    EXPECT_LE(r.tangential_gradient, 1e-9);
    EXPECT_NEAR(r.spectrum.front(), 2 / s3, 1e-8);
    EXPECT_NEAR(r.spectrum.at(2), 1 / s3, 1e-8);
    EXPECT_TRUE(r.holds());
    // bottom of the spectrum is -2/sqrt3 with multiplicity 7, so the lower
    // inequality does not hold at the maximiser itself
    EXPECT_FALSE(r.lower_same_direction);
}

TEST(Prop32, RandomCubics) {
    for (std::uint64_t n = 0; n < 20; ++n) {
        Stream rng(42, 0, n);
        const std::size_t dim = 3 + n % 6;
        std::vector<CubicForm::Monomial> terms;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i; j < dim; ++j)
                for (std::size_t k = j; k < dim; ++k) terms.push_back({rng.normal(), i, j, k});
        const Prop32Result r = prop32_audit(CubicForm(dim, terms), 50, n);
        EXPECT_TRUE(r.holds()) << n;
    }
    EXPECT_THROW(prop32_audit(CubicForm(3, {}), 1, 1), ZeroForm);
}
