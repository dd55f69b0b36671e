// Runs the eleven acceptance criteria at full size and prints one PASS/FAIL
// line per criterion. Exit status is non-zero when any criterion fails.
//
//   octovisc_acceptance [report.json]

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "octovisc/octovisc.hpp"

using namespace octovisc;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Line {
    int id;
    bool pass;
    std::string text;
};

std::vector<Line> lines;
Json report = Json::object();

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void verdict(int id, bool pass, const std::string& text) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", text.c_str());
    std::fflush(stdout);
    lines.push_back({id, pass, text});
}

void keep(const std::string& key, const Certificate& c) { report[key].push_back(to_json(c)); }

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const Certificate c = closed_form_audit(10000, kSeed, 1, 1e-9);
    const double t = seconds_since(t0);
    keep("1", c);
    verdict(1, c.pass && t <= 60.0,
            "closed-form vs Jacobi spectrum, 1e4 unit points: max diff " + num(c.worst_residual) + " (<= 1e-9), " +
                num(t) + " s single-threaded (<= 60 s)");
}

void criterion2() {
    const Certificate dual = dual_path_audit(1000000, kSeed);
    const Certificate ax = octonion_axiom_audit(10000, kSeed);
    keep("2", dual);
    keep("2", ax);
    const double weak = ax.extremes.at("weak_associativity.max");
    verdict(2, dual.pass && weak <= 1e-12,
            "dual-path P24, 1e6 points: max rel gap " + num(dual.worst_residual) +
                "; weak associativity, 1e4 triples: " + num(weak) + " (both <= 1e-12)");
}

void criterion3() {
    const Certificate c = block_property_audit(10000, kSeed);
    keep("3", c);
    verdict(3, c.pass, "block properties 1-5, 1e4 samples: max residual " + num(c.worst_residual) + " (<= 1e-9)");
}

void criterion4() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Subspace> spaces{Subspace::default21()};
    for (std::uint64_t k = 0; k < 5; ++k) {
        Stream rng(kSeed, tags::subspace, 100 + k);
        spaces.push_back(Subspace::random(21, rng));
    }
    bool pass = true;
    double lo = INFINITY, hi = -INFINITY;
    std::uint64_t failures = 0;
    for (double d : {1.0, 1.5, 1.99}) {
        double dlo = INFINITY, dhi = -INFINITY;
        for (std::size_t s = 0; s < spaces.size(); ++s) {
            const Certificate c = certify_prop41(Delta(d), spaces[s], 100000, kSeed + s);
            keep("4", c);
            pass = pass && c.pass && c.samples == 100000;
            failures += c.failures;
            dlo = std::min(dlo, c.extremes.at("ratio.min"));
            dhi = std::max(dhi, c.extremes.at("ratio.max"));
        }
        const double eps = Delta(d).epsilon();
        std::printf("    delta %.2f: ratio in [%.6g, %.6g], bound [%.6g, %.6g]\n", d, dlo, dhi, eps, 1 / eps);
        lo = std::min(lo, dlo);
        hi = std::max(hi, dhi);
    }
    const double t = seconds_since(t0);
    const unsigned threads = resolve_threads(0);
    pass = pass && t <= 600.0;
    verdict(4, pass,
            "Lambda_1/(-Lambda_21), 3 deltas x 6 subspaces x 1e5: observed [" + num(lo) + ", " + num(hi) + "], " +
                std::to_string(failures) + " outside [eps, 1/eps] +- 1e-9; " + num(t) + " s on " +
                std::to_string(threads) + " thread(s) (<= 600 s)");
}

void criterion5() {
    bool pass = true;
    std::string text = "mu+/(-mu-), 1e6 per delta:";
    for (double d : {1.0, 1.5, 1.99}) {
        const Certificate c = certify_lemma41(Delta(d), 1000000, kSeed);
        keep("5", c);
        pass = pass && c.pass;
        text += " delta " + num(d) + " [" + num(c.extremes.at("ratio.min")) + ", " + num(c.extremes.at("ratio.max")) +
                "] vs [" + num(c.extremes.at("epsilon")) + ", " + num(1 / c.extremes.at("epsilon")) + "];";
    }
    verdict(5, pass, text);
}

void criterion6() {
    bool pass = true;
    double worst = 0.0;
    for (double d : {1.0, 1.5, 1.99}) {
        const Certificate c = tangential_audit(Delta(d), 10000, kSeed);
        keep("6", c);
        pass = pass && c.pass;
        worst = std::max(worst, c.worst_residual);
    }
    verdict(6, pass, "tangential identity, 1e4 unit points x 3 deltas: max residual " + num(worst) + " (<= 1e-10)");
}

void criterion7() {
    const auto t0 = std::chrono::steady_clock::now();
    const Delta delta(1.0);
    const Subspace h = Subspace::default21();
    const ConeParams cone{20.2, 21};
    try {
        const OperatorTable table = build_table(delta, h, 100000, kSeed, cone, {10000, 0});
        std::printf("    table: %zu entries, %llu pairs checked, %llu K-cone violations (%.0f s)\n", table.size(),
                    (unsigned long long)table.metadata().pairs_checked,
                    (unsigned long long)table.metadata().violations, seconds_since(t0));
        OperatorAuditOptions opt;
        opt.table_points = 1000;
        opt.fresh_points = 1000;
        opt.probes = 100000;
        const Certificate c = audit_operator(table, delta, h, kSeed, opt);
        keep("7", c);
        const auto& e = c.extremes;
        const bool table_ok = e.at("table_failures") == 0 && e.at("table_residual.max") <= 1e-12;
        const bool fresh_ok = e.at("fresh_residual.max") <= 1e-2;
        const bool probes_ok = e.at("probe_failures") == 0;
        std::printf("    7a K-cone pairs:        %s (0 violations of 1e4)\n", "PASS");
        std::printf("    7b table residual:      %s (max %.3g, <= 1e-12)\n", table_ok ? "PASS" : "FAIL",
                    e.at("table_residual.max"));
        std::printf("    7c fresh residual:      %s (max %.3g, min %.3g, %g of 1000 above 1e-2; density bound max %.3g,"
                    " excess over bound max %.3g)\n",
                    fresh_ok ? "PASS" : "FAIL", e.at("fresh_residual.max"), e.at("fresh_residual.min"),
                    e.at("fresh_over_tolerance"), e.at("fresh_density_bound.max"), e.at("fresh_excess_over_bound.max"));
        std::printf("    7d difference quotients: %s ([%.4g, %.4g] within [1/C0, C0] = [%.4g, %.4g], 1e5 probes)\n",
                    probes_ok ? "PASS" : "FAIL", e.at("difference_quotient.min"), e.at("difference_quotient.max"),
                    1 / e.at("C0"), e.at("C0"));
        const std::string text =
            "operator factory, 1e5-entry table: no cone violations, table residual " + num(e.at("table_residual.max")) + ", fresh residual max " +
               num(e.at("fresh_residual.max")) + " (<= 1e-2), quotients " +
               (probes_ok ? "within" : "outside") + " [1/C0, C0]; " + num(seconds_since(t0)) + " s";
        verdict(7, table_ok && fresh_ok && probes_ok, text);
    } catch (const ConeViolation& e) {
        verdict(7, false, "K-cone condition violated on " + std::to_string(e.violations()) + " sampled pairs");
    }
}

void criterion8() {
    const Subspace h = Subspace::default21();
    const double deltas[] = {1.0, 1.5, 1.99};
    const std::uint64_t pairs[] = {334, 333, 333};
    bool pass = true;
    double worst = 0.0, lmin = INFINITY, search = 0;
    for (int k = 0; k < 3; ++k) {
        WitnessAuditOptions opt;
        opt.random_pencils = k == 0 ? 1000 : 0;
        opt.hessian_pairs = pairs[k];
        const Certificate c = witness_audit(Delta(deltas[k]), h, kSeed + std::uint64_t(k), opt);
        keep("8", c);
        pass = pass && c.pass && c.failures == 0;
        worst = std::max(worst, c.worst_residual);
        lmin = std::min(lmin, c.extremes.at("lambda_min.min"));
        search += c.extremes.at("search_failures");
    }
    verdict(8, pass && search == 0,
            "positive witnesses, 1e3 random pencils (n in {2,3,5,21}) + 1e3 Hessian pairs: max residual " +
                num(worst) + " (<= 1e-8), min lambda_min " + num(lmin) + " (> 0), " + num(search) +
                " search failures");
}

void criterion9() {
    const Certificate c = checker_audit(100000, kSeed);
    keep("9", c);
    verdict(9, c.pass,
            "Weyl and interlacing checkers, 1e5 instances each: " + num(c.extremes.at("weyl_violations")) + " + " +
                num(c.extremes.at("interlacing_violations")) + " violations");
}

void criterion10() {
    const Certificate c = extreme_eigenvalue_audit(100000, kSeed);
    keep("10", c);
    const auto& e = c.extremes;
    verdict(10, c.pass,
            "2 l3 >= l1 and 2 l(n-2) <= l(n), 1e5 unit points, P24 and P12: min slack " +
                num(std::min({e.at("p24.upper_slack.min"), e.at("p24.lower_slack.min"), e.at("p12.upper_slack.min"),
                              e.at("p12.lower_slack.min")})) +
                " (>= -1e-10)");
}

void criterion11() {
    const std::string base = std::filesystem::temp_directory_path().string() + "/octovisc_acceptance_full";
    std::vector<std::string> texts;
    bool ran = true;
    for (unsigned threads : {1u, 4u, 1u}) {
        RunConfig c;
        c.command = Command::full_check;
        c.seed = kSeed;
        c.samples = 500;
        c.threads = threads;
        c.out = base + std::to_string(texts.size()) + ".json";
        try {
            (void)execute(c);
            texts.push_back(read_text(c.out));
        } catch (const Error& e) {
            ran = false;
            std::printf("    full-check failed to run: %s\n", e.what());
            break;
        }
        std::filesystem::remove(c.out);
    }
    const bool same = ran && texts.size() == 3 && texts[0] == texts[1] && texts[1] == texts[2];
    verdict(11, same,
            "full-check repeated with threads 1, 4, 1: reports " + std::string(same ? "byte-identical" : "differ") +
                (ran ? " (" + std::to_string(texts.empty() ? 0 : texts[0].size()) + " bytes)" : ""));
}

} // namespace

int main(int argc, char** argv) {
    const auto t0 = std::chrono::steady_clock::now();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();

    int failed = 0;
    for (const auto& l : lines) failed += !l.pass;
    std::printf("acceptance: %d of %zu criteria passed (%.0f s)\n", int(lines.size()) - failed, lines.size(),
                seconds_since(t0));
    if (argc > 1) {
        Json verdicts = Json::array();
        for (const auto& l : lines) verdicts.push_back(Json{{"criterion", l.id}, {"pass", l.pass}, {"detail", l.text}});
        report["verdicts"] = verdicts;
        write_report(report, argv[1]);
    }
    return failed == 0 ? 0 : 1;
}
