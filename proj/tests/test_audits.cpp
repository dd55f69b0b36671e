#include <gtest/gtest.h>

#include "octovisc/audits.hpp"

using namespace octovisc;

TEST(Audits, OctonionAxioms) {
    const Certificate c = octonion_axiom_audit(2000, 1);
    EXPECT_TRUE(c.pass);
    EXPECT_LE(c.extremes.at("weak_associativity.max"), 1e-13);
    EXPECT_EQ(c.extremes, octonion_axiom_audit(2000, 1, 3).extremes);
}

TEST(Audits, DualPath) {
    const Certificate c = dual_path_audit(20000, 2);
    EXPECT_TRUE(c.pass);
    EXPECT_EQ(c.samples, 20000u);
    EXPECT_LE(c.worst_residual, 1e-13);
}

TEST(Audits, ClosedFormAndExtremeEigenvalues) {
    EXPECT_TRUE(closed_form_audit(300, 3).pass);
    const Certificate r = extreme_eigenvalue_audit(300, 3);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.failures, 0u);
    EXPECT_GE(r.extremes.at("p24.upper_slack.min"), -1e-10);
    EXPECT_GE(r.extremes.at("p12.lower_slack.min"), -1e-10);
}

TEST(Audits, Tangential) {
    for (double d : {1.0, 1.99}) EXPECT_TRUE(tangential_audit(Delta(d), 200, 4).pass);
}

TEST(Audits, CheckersReportNoViolations) {
    const Certificate c = checker_audit(2000, 5);
    EXPECT_TRUE(c.pass);
    EXPECT_EQ(c.extremes.at("weyl_violations"), 0.0);
    EXPECT_EQ(c.extremes.at("interlacing_violations"), 0.0);
}

TEST(Audits, PencilsStayBelowTheRatioBound) {
    for (double d : {1.0, 1.99}) {
        const Certificate c = pencil_audit(Delta(d), Subspace::default21(), 50, 6);
        EXPECT_TRUE(c.pass);
        EXPECT_EQ(c.extremes.at("not_hyperbolic"), 0.0);
        EXPECT_LE(c.extremes.at("m_est.max"), 1 / Delta(d).epsilon());
        EXPECT_GE(c.extremes.at("m_est.min"), 1.0);
    }
}

TEST(Audits, WitnessesAreThreadInvariant) {
    WitnessAuditOptions opt;
    opt.random_pencils = 12;
    opt.hessian_pairs = 4;
    opt.threads = 1;
    const Certificate a = witness_audit(Delta(1.5), Subspace::default21(), 7, opt);
    EXPECT_TRUE(a.pass);
    EXPECT_EQ(a.extremes.at("search_failures"), 0.0);
    opt.threads = 4;
    EXPECT_EQ(witness_audit(Delta(1.5), Subspace::default21(), 7, opt).extremes, a.extremes);
}

TEST(Audits, ZeroSamplesRejected) {
    EXPECT_THROW(dual_path_audit(0, 1), DomainError);
    EXPECT_THROW(checker_audit(0, 1), DomainError);
}
