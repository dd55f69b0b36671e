#pragma once

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "octovisc/audits.hpp"
#include "octovisc/io.hpp"
#include "octovisc/isaacs.hpp"
#include "octovisc/operator.hpp"
#include "octovisc/singular.hpp"
#include "octovisc/spectral.hpp"

namespace octovisc {

enum class Command {
    spectrum,
    audit_blocks,
    certify_prop41,
    certify_lemma41,
    build_operator,
    audit_operator,
    isaacs_witness,
    supinf_audit,
    full_check,
    merge_tables,
};

inline const std::vector<std::pair<std::string, Command>>& command_names() {
    static const std::vector<std::pair<std::string, Command>> names{
        {"spectrum", Command::spectrum},
        {"audit-blocks", Command::audit_blocks},
        {"certify-prop41", Command::certify_prop41},
        {"certify-lemma41", Command::certify_lemma41},
        {"build-operator", Command::build_operator},
        {"audit-operator", Command::audit_operator},
        {"isaacs-witness", Command::isaacs_witness},
        {"supinf-audit", Command::supinf_audit},
        {"full-check", Command::full_check},
        {"merge-tables", Command::merge_tables},
    };
    return names;
}

inline std::string to_string(Command c) {
    for (const auto& [name, cmd] : command_names())
        if (cmd == c) return name;
    return "unknown";
}

inline Command parse_command(const std::string& s) {
    for (const auto& [name, cmd] : command_names())
        if (name == s) return cmd;
    throw ConfigError("unknown command '" + s + "'");
}

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitIo = 3 };

struct RunConfig {
    Command command = Command::full_check;
    double delta = 1.0;
    std::optional<std::uint64_t> seed;       ///< falls back to OCTOVISC_SEED, then 1
    std::optional<std::uint64_t> samples;    ///< per-command default when empty
    std::string subspace = "default";        ///< default | random | path to {"basis": ...}
    std::string point = "unit-real-triple";  ///< unit-real-triple | random | path to {"X","Y","Z"}
    std::string out;                         ///< report path; stdout when empty
    std::string csv;
    std::string table;                       ///< operator table (JSON lines)
    std::string merge_with;
    std::string table_out;
    std::string pencil;                      ///< {"F1","F2"}; random Hessian pair when empty
    unsigned threads = 0;
    double tolerance_scale = 1.0;
};

struct RunOutcome {
    int exit_code = kExitPass;
    Json report;
    std::string summary;
};

namespace detail {

inline std::uint64_t resolve_seed(const RunConfig& c) {
    if (c.seed) return *c.seed;
    if (const char* env = std::getenv("OCTOVISC_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const std::string s(env);
            const unsigned long long v = std::stoull(s, &used, 0);
            if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(std::string("OCTOVISC_SEED is not an unsigned integer: ") + env);
        }
    }
    return 1;
}

inline std::uint64_t samples_or(const RunConfig& c, std::uint64_t fallback) {
    if (!c.samples) return fallback;
    if (*c.samples < 1) throw ConfigError("--samples must be at least 1");
    return *c.samples;
}

inline Subspace resolve_subspace(const RunConfig& c, std::uint64_t seed, std::size_t k = 21) {
    if (c.subspace == "default") return Subspace::coordinate(k);
    if (c.subspace == "random") {
        Stream rng(seed, tags::subspace, 0);
        return Subspace::random(k, rng);
    }
    Subspace h = subspace_from_json(read_json(c.subspace), "file");
    if (h.dim() != k) throw ConfigError("subspace file has dimension " + std::to_string(h.dim()) + ", expected " +
                                        std::to_string(k));
    return h;
}

inline TriplePoint resolve_point(const RunConfig& c, std::uint64_t seed) {
    if (c.point == "unit-real-triple") {
        TriplePoint v;
        const double r = 1.0 / std::sqrt(3.0);
        v.x.c[0] = v.y.c[0] = v.z.c[0] = r;
        return v;
    }
    if (c.point == "random") {
        Stream rng(seed, tags::closed_form, ~std::uint64_t{0});
        return TriplePoint::from_flat(rng.unit_vector(24));
    }
    return triple_from_json(read_json(c.point));
}

/// Groups a descending spectrum into (value, multiplicity) runs.
inline std::vector<std::pair<double, int>> multiplicities(const Spectrum& s, double tol = 1e-9) {
    std::vector<std::pair<double, int>> out;
    for (double v : s.values) {
        if (!out.empty() && std::abs(out.back().first - v) <= tol)
            ++out.back().second;
        else
            out.emplace_back(v, 1);
    }
    return out;
}

inline std::string fmt(double v) {
    std::string s;
    write_number(s, v);
    return s;
}

inline std::string certificate_summary(const Certificate& c) {
    return c.name + " " + (c.pass ? "PASS" : "FAIL") + " samples=" + std::to_string(c.samples) +
           " failures=" + std::to_string(c.failures) + " worst=" + fmt(c.worst_residual) +
           " tolerance=" + fmt(c.tolerance);
}

inline Certificate table_certificate(const OperatorTable& t) {
    Certificate c;
    c.name = "operator-table";
    c.seed = t.metadata().seed;
    c.samples = t.metadata().pairs_checked;
    c.failures = t.metadata().violations;
    c.tolerance = 0.0;
    c.worst_residual = double(c.failures);
    c.extremes["entries"] = double(t.size());
    c.extremes["lambda_aspect"] = t.cone().lambda_aspect;
    c.extremes["delta"] = t.metadata().delta;
    c.metadata["subspace"] = t.metadata().subspace;
    c.finalize();
    return c;
}

struct Sections {
    std::vector<Certificate> certs;
    Json extra = Json::object();

    bool pass() const {
        if (certs.empty()) return false;
        for (const auto& c : certs)
            if (!c.pass) return false;
        return true;
    }
};

inline Sections run_spectrum(const RunConfig& c, std::uint64_t seed) {
    const TriplePoint v = resolve_point(c, seed);
    const double r = v.norm();
    if (std::abs(r - 1.0) > 1e-12) throw ConfigError("--point must be a unit vector in R^24");
    const Spectrum closed = closed_form_spectrum(v);
    const Spectrum numeric = sym_eigen(hess_P24(v));
    const auto [m, w] = invariants_mW(v);
    Certificate cert;
    cert.name = "spectrum";
    cert.seed = seed;
    cert.samples = 1;
    cert.tolerance = 1e-9 * c.tolerance_scale;
    cert.worst_residual = max_abs_diff(closed, numeric);
    cert.extremes["m"] = m;
    cert.extremes["W"] = w;
    cert.finalize();
    Sections s;
    s.certs.push_back(cert);
    s.extra["point"] = to_json(v);
    s.extra["closed_form"] = to_json(closed);
    s.extra["numerical"] = to_json(numeric);
    Json groups = Json::array();
    for (const auto& [value, mult] : multiplicities(closed)) groups.push_back(Json{{"value", value}, {"multiplicity", mult}});
    s.extra["multiplicities"] = groups;
    return s;
}

inline Sections run_build(const RunConfig& c, std::uint64_t seed, const Subspace& h) {
    if (c.table.empty()) throw ConfigError("build-operator needs --table <path> for the output table");
    const Delta delta(c.delta);
    Sections s;
    try {
        const OperatorTable t = build_table(delta, h, samples_or(c, 100000), seed, ConeParams::for_delta(delta),
                                            BuildOptions{10000, c.threads});
        write_table(t, c.table);
        s.certs.push_back(table_certificate(t));
    } catch (const ConeViolation& e) {
        Certificate cert;
        cert.name = "operator-table";
        cert.seed = seed;
        cert.samples = 10000;
        cert.failures = e.violations();
        cert.worst_residual = double(e.violations());
        cert.metadata["error"] = e.what();
        cert.finalize();
        s.certs.push_back(cert);
    }
    return s;
}

inline OperatorAuditOptions operator_options(const RunConfig& c, std::uint64_t probes) {
    OperatorAuditOptions o;
    o.probes = probes;
    o.threads = c.threads;
    o.table_tolerance *= c.tolerance_scale;
    o.slack *= c.tolerance_scale;
    return o;
}

inline Pencil resolve_pencil(const RunConfig& c, std::uint64_t seed, const Subspace& h) {
    if (!c.pencil.empty()) return pencil_from_json(read_json(c.pencil));
    Stream rng(seed, tags::pencils, ~std::uint64_t{0});
    const Delta delta(c.delta);
    const Vector a = rng.unit_vector(h.dim()), b = rng.unit_vector(h.dim());
    return Pencil(restricted_hess_w(h, a, delta), restricted_hess_w(h, b, delta));
}

inline Sections run_witness(const RunConfig& c, std::uint64_t seed, const Subspace& h) {
    const Pencil p = resolve_pencil(c, seed, h);
    const HyperbolicityResult hyp = hyperbolicity_certificate(p);
    Certificate cert;
    cert.name = "isaacs-witness";
    cert.seed = seed;
    cert.samples = 1;
    cert.tolerance = 1e-8 * c.tolerance_scale;
    cert.extremes["m_est"] = hyp.m_est;
    cert.extremes["min_margin"] = hyp.min_margin;
    cert.extremes["hyperbolic"] = hyp.hyperbolic;
    cert.extremes["certified"] = hyp.certified;
    Sections s;
    s.extra["pencil"] = to_json(p);
    try {
        WitnessOptions wo;
        wo.seed = seed;
        wo.tolerance = cert.tolerance;
        const PositiveWitness w = orthogonal_positive_witness(p, wo);
        cert.worst_residual = std::max(w.residual1, w.residual2);
        cert.extremes["lambda_min"] = w.lambda_min;
        cert.extremes["ellipticity"] = w.ellipticity;
        if (!(w.lambda_min > 0.0)) cert.failures = 1;
        s.extra["witness"] = to_json(w);
    } catch (const NotHyperbolic& e) {
        cert.failures = 1;
        cert.worst_residual = INFINITY;
        cert.metadata["error"] = e.what();
    } catch (const SearchFailure& e) {
        cert.failures = 1;
        cert.worst_residual = INFINITY;
        cert.metadata["error"] = e.what();
    }
    cert.finalize();
    s.certs.push_back(cert);
    return s;
}

inline Sections run_merge(const RunConfig& c, std::uint64_t seed) {
    if (c.table.empty() || c.merge_with.empty() || c.table_out.empty())
        throw ConfigError("merge-tables needs --table, --merge-with and --table-out");
    const OperatorTable a = read_table(c.table), b = read_table(c.merge_with);
    Sections s;
    try {
        const OperatorTable m = merge_tables(a, b, samples_or(c, 10000), seed);
        write_table(m, c.table_out);
        s.certs.push_back(table_certificate(m));
    } catch (const ConeViolation& e) {
        Certificate cert;
        cert.name = "operator-table";
        cert.seed = seed;
        cert.samples = samples_or(c, 10000);
        cert.failures = e.violations();
        cert.worst_residual = double(e.violations());
        cert.metadata["error"] = e.what();
        cert.finalize();
        s.certs.push_back(cert);
    }
    return s;
}

/// All audits in order, sized from the base count n.
inline Sections run_full_check(const RunConfig& c, std::uint64_t seed, const Subspace& h, std::uint64_t n) {
    const unsigned th = c.threads;
    const double ts = c.tolerance_scale;
    auto at_least = [](std::uint64_t v, std::uint64_t lo) { return std::max(v, lo); };
    const Delta delta(c.delta);
    Sections s;
    s.certs.push_back(octonion_axiom_audit(n, seed, th, 1e-12 * ts));
    s.certs.push_back(dual_path_audit(10 * n, seed, th, 1e-12 * ts));
    s.certs.push_back(block_property_audit(n, seed, BlockAuditOptions{1e-9 * ts, th}));
    s.certs.push_back(closed_form_audit(n, seed, th, 1e-9 * ts));
    s.certs.push_back(extreme_eigenvalue_audit(n, seed, th, 1e-10 * ts));
    for (double d : {1.0, 1.5, 1.99}) s.certs.push_back(tangential_audit(Delta(d), n, seed, th, 1e-10 * ts));
    for (double d : {1.0, 1.5, 1.99}) s.certs.push_back(certify_lemma41(Delta(d), 10 * n, seed, {th, ts}));
    for (double d : {1.0, 1.5, 1.99}) s.certs.push_back(certify_prop41(Delta(d), h, n, seed, {th, ts}));

    try {
        const OperatorTable t = build_table(delta, h, at_least(n, 2), seed, ConeParams::for_delta(delta),
                                            BuildOptions{at_least(n, 100), th});
        s.certs.push_back(table_certificate(t));
        OperatorAuditOptions o = operator_options(c, n);
        o.table_points = at_least(n / 10, 1);
        o.fresh_points = at_least(n / 10, 1);
        s.certs.push_back(audit_operator(t, delta, h, seed, o));
    } catch (const ConeViolation& e) {
        Certificate cert;
        cert.name = "operator-table";
        cert.seed = seed;
        cert.failures = e.violations();
        cert.worst_residual = double(e.violations());
        cert.metadata["error"] = e.what();
        cert.finalize();
        s.certs.push_back(cert);
    }
    s.certs.push_back(pencil_audit(delta, h, at_least(n / 10, 1), seed, th));
    WitnessAuditOptions wo;
    wo.random_pencils = at_least(n / 10, 4);
    wo.hessian_pairs = at_least(n / 10, 1);
    wo.tolerance = 1e-8 * ts;
    wo.threads = th;
    s.certs.push_back(witness_audit(delta, h, seed, wo));
    SupInfOptions so;
    so.n_b = at_least(n / 10, 2);
    so.n_a = n;
    so.test_points = at_least(n / 100, 1);
    so.threads = th;
    s.certs.push_back(supinf_audit(delta, h, seed, so));
    return s;
}

inline Sections dispatch(const RunConfig& c, std::uint64_t seed) {
    AuditOptions ao{c.threads, c.tolerance_scale};
    switch (c.command) {
    case Command::spectrum:
        return run_spectrum(c, seed);
    case Command::audit_blocks: {
        Sections s;
        s.certs.push_back(block_property_audit(samples_or(c, 10000), seed, {1e-9 * c.tolerance_scale, c.threads}));
        return s;
    }
    case Command::certify_prop41: {
        Sections s;
        s.certs.push_back(certify_prop41(Delta(c.delta), resolve_subspace(c, seed), samples_or(c, 100000), seed, ao));
        return s;
    }
    case Command::certify_lemma41: {
        Sections s;
        s.certs.push_back(certify_lemma41(Delta(c.delta), samples_or(c, 1000000), seed, ao));
        return s;
    }
    case Command::build_operator:
        return run_build(c, seed, resolve_subspace(c, seed));
    case Command::audit_operator: {
        const Delta delta(c.delta);
        const Subspace h = resolve_subspace(c, seed);
        const OperatorTable t = c.table.empty()
                                    ? build_table(delta, h, 100000, seed, ConeParams::for_delta(delta), {10000, c.threads})
                                    : read_table(c.table);
        Sections s;
        s.certs.push_back(audit_operator(t, delta, h, seed, operator_options(c, samples_or(c, 100000))));
        return s;
    }
    case Command::isaacs_witness:
        return run_witness(c, seed, resolve_subspace(c, seed));
    case Command::supinf_audit: {
        SupInfOptions so;
        so.test_points = samples_or(c, 100);
        so.threads = c.threads;
        Sections s;
        s.certs.push_back(supinf_audit(Delta(c.delta), resolve_subspace(c, seed), seed, so));
        return s;
    }
    case Command::full_check:
        return run_full_check(c, seed, resolve_subspace(c, seed), samples_or(c, 1000));
    case Command::merge_tables:
        return run_merge(c, seed);
    }
    throw ConfigError("unhandled command");
}

} // namespace detail

/// Runs one command and assembles its report. Threads and output paths are
/// deliberately left out of the report.
inline RunOutcome execute(const RunConfig& c) {
    const std::uint64_t seed = detail::resolve_seed(c);
    if (c.command != Command::spectrum && c.command != Command::audit_blocks && c.command != Command::merge_tables)
        (void)Delta(c.delta);
    if (!(c.tolerance_scale > 0.0) || !std::isfinite(c.tolerance_scale))
        throw ConfigError("--tolerance-scale must be positive");
    detail::Sections s = detail::dispatch(c, seed);

    RunOutcome out;
    const bool pass = s.pass();
    out.exit_code = pass ? kExitPass : kExitFail;
    Json certs = Json::array();
    for (const auto& cert : s.certs) certs.push_back(to_json(cert));
    out.report = s.extra;
    out.report["command"] = to_string(c.command);
    out.report["seed"] = seed;
    out.report["delta"] = c.delta;
    out.report["subspace"] = c.subspace;
    out.report["tolerance_scale"] = c.tolerance_scale;
    if (c.samples) out.report["samples"] = *c.samples;
    out.report["certificates"] = certs;
    out.report["pass"] = pass;

    if (s.certs.size() == 1) {
        out.summary = to_string(c.command) + ": " + detail::certificate_summary(s.certs.front());
    } else {
        std::size_t failed = 0;
        for (const auto& cert : s.certs) failed += !cert.pass;
        out.summary = to_string(c.command) + ": " + (pass ? "PASS" : "FAIL") + " " +
                      std::to_string(s.certs.size() - failed) + "/" + std::to_string(s.certs.size()) +
                      " sections passed";
    }
    if (c.command == Command::spectrum) {
        std::string line;
        for (const auto& g : out.report["multiplicities"]) {
            if (!line.empty()) line += ", ";
            line += detail::fmt(g["value"].get<double>()) + " x" + std::to_string(g["multiplicity"].get<int>());
        }
        out.summary += "\nspectrum: {" + line + "}";
    }
    if (!c.out.empty()) write_report(out.report, c.out);
    if (!c.csv.empty()) write_csv(s.certs, c.csv);
    return out;
}

/// execute() with error handling mapped to exit codes.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        RunOutcome r = execute(c);
        if (c.out.empty()) out << canonical_json(r.report);
        out << r.summary << "\n";
        if (r.exit_code == kExitFail && c.command == Command::full_check)
            for (const auto& cert : r.report["certificates"])
                if (!cert["pass"].get<bool>()) out << "  failed: " << cert["name"].get<std::string>() << "\n";
        return r.exit_code;
    } catch (const IoError& e) {
        err << "octovisc: I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& e) {
        err << "octovisc: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "octovisc: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DimensionMismatch& e) {
        err << "octovisc: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        err << "octovisc: " << e.what() << "\n";
        return kExitFail;
    }
}

} // namespace octovisc
