#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "octovisc/certificate.hpp"
#include "octovisc/errors.hpp"
#include "octovisc/linalg.hpp"
#include "octovisc/random.hpp"
#include "octovisc/singular.hpp"
#include "octovisc/spectral.hpp"

namespace octovisc {

/// K_lambda = {v : v_i > 0, max v / min v <= lambda^2} in R^n. The cone used
/// by the K-cone condition is its dual.
struct ConeParams {
    double lambda_aspect = 20.2;
    std::size_t n = 21;

    ConeParams() = default;
    ConeParams(double aspect, std::size_t dim) : lambda_aspect(aspect), n(dim) {
        if (!(aspect >= 1.0) || !std::isfinite(aspect)) throw DomainError("lambda_aspect must be >= 1");
        if (dim < 2) throw DomainError("cone dimension must be >= 2");
    }

    /// 1/epsilon(delta) with a 1% margin.
    static ConeParams for_delta(Delta delta, std::size_t dim = 21) { return {1.01 / delta.epsilon(), dim}; }

    [[nodiscard]] double l2() const noexcept { return lambda_aspect * lambda_aspect; }

    /// Ellipticity constant: difference quotients of f lie in [1/C0, C0].
    [[nodiscard]] double c0() const noexcept { return (1.0 + l2() * double(n - 1)) / double(n); }
};

/// x . c >= 0 for every c in K_lambda; the minimum over extreme rays gives
/// sum of positive parts >= lambda^2 * sum of negative parts.
inline bool dual_cone_member(std::span<const double> x, const ConeParams& cone) {
    double pos = 0.0, neg = 0.0;
    for (double v : x) (v >= 0 ? pos : neg) += std::abs(v);
    return pos >= cone.l2() * neg;
}

// --- (z, s) coordinates ---------------------------------------------------------

// U is the Helmert basis of the hyperplane orthogonal to (1, ..., 1): column k
// has 1/sqrt(k(k+1)) in rows 0..k-1 and -k/sqrt(k(k+1)) in row k.

/// z = U^T x.
inline Vector to_z(std::span<const double> x) {
    const std::size_t n = x.size();
    Vector z(n - 1);
    double prefix = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        prefix += x[k];
        const double kk = double(k + 1);
        z[k] = (prefix - kk * x[k + 1]) / std::sqrt(kk * (kk + 1.0));
    }
    return z;
}

/// U z: the centred vector with Helmert coordinates z.
inline Vector from_z(std::span<const double> z) {
    const std::size_t n = z.size() + 1;
    Vector v(n, 0.0);
    double tail = 0.0; // sum over columns k >= row of z_k / sqrt(k(k+1))
    for (std::size_t kk = n - 1; kk-- > 0;) {
        const double k = double(kk + 1);
        const double c = z[kk] / std::sqrt(k * (k + 1.0));
        v[kk + 1] += -k * c;
        tail += c;
        v[kk] += tail;
    }
    return v;
}

namespace detail {

/// Smallest t with sum_i psi(d_i + t) >= 0, psi(y) = y for y >= 0 and
/// lambda^2 y otherwise. The sum is concave, increasing and piecewise linear
/// in t, so the root is found between consecutive breakpoints.
inline double gauge_shift(Vector d, double l2) {
    const std::size_t n = d.size();
    std::sort(d.begin(), d.end(), std::greater<>());
    const double total = std::accumulate(d.begin(), d.end(), 0.0);
    double top = 0.0; // sum of the k largest entries
    for (std::size_t k = 1; k <= n; ++k) {
        top += d[k - 1];
        const double rest = total - top;
        const double t = -(top + l2 * rest) / (double(k) + l2 * double(n - k));
        const double lo = -d[k - 1];
        const double hi = k < n ? -d[k] : INFINITY;
        if (t >= lo && t <= hi) return t;
    }
    return -d[n - 1];
}

inline double centred_gauge(std::span<const double> v, double l2) {
    return double(v.size()) * gauge_shift(Vector(v.begin(), v.end()), l2);
}

} // namespace detail

/// e(z) = inf{c : U z + (c/n) 1 in K}, the gauge in the direction of the
/// trace coordinate s.
inline double cone_gauge(std::span<const double> z, const ConeParams& cone) {
    if (z.size() + 1 != cone.n) throw DimensionMismatch("cone_gauge: z must have n - 1 entries");
    return detail::centred_gauge(from_z(z), cone.l2());
}

/// Bisection on dual_cone_member; a slower reference for cone_gauge.
inline double cone_gauge_bisection(std::span<const double> z, const ConeParams& cone) {
    if (z.size() + 1 != cone.n) throw DimensionMismatch("cone_gauge: z must have n - 1 entries");
    const Vector v = from_z(z);
    const double nn = double(cone.n);
    auto inside = [&](double c) {
        Vector x = v;
        for (double& t : x) t += c / nn;
        return dual_cone_member(x, cone);
    };
    const double tol = 1e-10 * (1.0 + norm(z));
    double hi = 1.0, lo = -1.0;
    while (!inside(hi)) hi *= 2.0;
    while (inside(lo)) lo *= 2.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? hi : lo) = mid;
    }
    return hi;
}

// --- the table ------------------------------------------------------------------

struct TableMetadata {
    double delta = 1.0;
    std::string subspace = "coordinate-21";
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t pairs_checked = 0;
    std::uint64_t violations = 0;
};

/// Sorted spectra projected to (z, s). Immutable once constructed; entries
/// are kept in order of increasing s for the scan in eval_f.
class OperatorTable {
public:
    struct Entry {
        Vector z;
        double s;
    };

    OperatorTable(ConeParams cone, TableMetadata meta, std::vector<Entry> entries)
        : cone_(cone), meta_(std::move(meta)) {
        for (const auto& e : entries)
            if (e.z.size() + 1 != cone_.n) throw DimensionMismatch("table entry has the wrong dimension");
        std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.s < b.s; });
        entries_ = std::move(entries);
        centred_.reserve(entries_.size() * cone_.n);
        traces_.reserve(entries_.size());
        for (const auto& e : entries_) {
            traces_.push_back(e.s);
            const Vector v = from_z(e.z);
            centred_.insert(centred_.end(), v.begin(), v.end());
        }
    }

    /// Builds entries from descending eigenvalue vectors.
    static OperatorTable from_spectra(ConeParams cone, TableMetadata meta, const std::vector<Vector>& spectra) {
        std::vector<Entry> entries;
        entries.reserve(spectra.size());
        for (Vector x : spectra) {
            if (x.size() != cone.n) throw DimensionMismatch("spectrum has the wrong dimension");
            std::sort(x.begin(), x.end(), std::greater<>());
            entries.push_back({to_z(x), std::accumulate(x.begin(), x.end(), 0.0)});
        }
        return OperatorTable(cone, std::move(meta), std::move(entries));
    }

    [[nodiscard]] const ConeParams& cone() const noexcept { return cone_; }
    [[nodiscard]] const TableMetadata& metadata() const noexcept { return meta_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }

    /// Descending eigenvalue vector of entry i.
    [[nodiscard]] Vector spectrum(std::size_t i) const {
        const auto c = centred(i);
        Vector x(c.begin(), c.end());
        for (double& v : x) v += entries_[i].s / double(cone_.n);
        return x;
    }

    [[nodiscard]] std::span<const double> centred(std::size_t i) const {
        return {centred_.data() + i * cone_.n, cone_.n};
    }

    /// g~(z) = min over entries of s_w + e(z - z_w), for the centred vector
    /// v = U z. `s_hint` (the query's own s) picks where the scan starts.
    [[nodiscard]] double extension(std::span<const double> v, double s_hint) const {
        const std::size_t n = cone_.n;
        const double l2 = cone_.l2();
        double best = INFINITY;
        Vector d(n);
        auto exact = [&](std::size_t i) {
            const auto cw = centred(i);
            for (std::size_t k = 0; k < n; ++k) d[k] = v[k] - cw[k];
            best = std::min(best, traces_[i] + detail::centred_gauge(d, l2));
        };
        const std::size_t pos = std::size_t(std::lower_bound(traces_.begin(), traces_.end(), s_hint) - traces_.begin());
        const std::size_t w0 = pos > kWindow ? pos - kWindow : 0;
        const std::size_t w1 = std::min(traces_.size(), pos + kWindow);
        for (std::size_t i = w0; i < w1; ++i) exact(i);
        // the gauge of a centred vector is >= 0, so entries with s_w >= best never win
        const std::size_t hi = std::size_t(std::lower_bound(traces_.begin(), traces_.end(), best) - traces_.begin());
        for (std::size_t i = hi; i-- > 0;) {
            if (i >= w0 && i < w1) continue;
            const double sw = traces_[i];
            if (sw >= best) continue;
            // entry i improves on best iff e(d) < best - s_w, i.e. the increasing
            // function sum psi(d_k + t) is already >= 0 at t = (best - s_w)/n
            const double tau = (best - sw) / double(n);
            const auto cw = centred(i);
            double phi = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double y = v[k] - cw[k] + tau;
                phi += std::min(y, l2 * y);
            }
            if (phi >= 0.0) exact(i);
        }
        return best;
    }

private:
    ConeParams cone_;
    TableMetadata meta_;
    std::vector<Entry> entries_;
    std::vector<double> centred_;
    std::vector<double> traces_;
    static constexpr std::size_t kWindow = 32;
};

/// f(x) = s - g~(z) after sorting x descending.
inline double eval_f(std::span<const double> lambda, const OperatorTable& table) {
    if (table.empty()) throw EmptyTable("eval_f on an empty table");
    if (lambda.size() != table.cone().n) throw DimensionMismatch("eval_f: wrong eigenvalue count");
    Vector x(lambda.begin(), lambda.end());
    std::sort(x.begin(), x.end(), std::greater<>());
    const double s = std::accumulate(x.begin(), x.end(), 0.0);
    const double mean = s / double(x.size());
    for (double& v : x) v -= mean;
    return s - table.extension(x, s);
}

/// Pos/neg mass ratio of a difference vector; the pair is admissible when it
/// lies strictly inside (1/lambda^2, lambda^2).
inline double mass_ratio(std::span<const double> d) {
    double pos = 0.0, neg = 0.0;
    for (double v : d) (v >= 0 ? pos : neg) += std::abs(v);
    return pos / neg;
}

/// Checks the K-cone condition on random pairs of entries.
inline Certificate cone_pair_audit(const OperatorTable& table, std::uint64_t pairs, std::uint64_t seed) {
    Certificate cert;
    cert.name = "cone-pairs";
    cert.seed = seed;
    cert.tolerance = 0.0;
    Extremum spread;
    const std::size_t count = table.size();
    const double l2 = table.cone().l2();
    if (count >= 2) {
        for (std::uint64_t p = 0; p < pairs; ++p) {
            Stream rng(seed, tags::cone_pairs, p);
            const std::size_t a = rng() % count;
            std::size_t b = rng() % (count - 1);
            if (b >= a) ++b;
            const auto va = table.centred(a), vb = table.centred(b);
            const double ds = (table.entries()[a].s - table.entries()[b].s) / double(table.cone().n);
            Vector d(va.size());
            for (std::size_t k = 0; k < d.size(); ++k) d[k] = va[k] - vb[k] + ds;
            const double r = mass_ratio(d);
            const double worst = std::max(r, 1.0 / r);
            spread.observe(worst, p);
            ++cert.samples;
            if (!(worst < l2)) ++cert.failures;
        }
    } else {
        cert.metadata["note"] = "fewer than two entries: condition holds vacuously";
        cert.samples = pairs;
    }
    cert.record("mass_ratio", spread);
    cert.extremes["lambda_aspect_squared"] = l2;
    cert.extremes["violations"] = double(cert.failures);
    cert.worst_residual = 0.0;
    cert.finalize();
    return cert;
}

struct BuildOptions {
    std::uint64_t pairs = 10000;
    unsigned threads = 0;
};

/// Samples unit points of H', stores the sorted spectra of the restricted
/// Hessian of w and checks the K-cone condition on random pairs.
inline OperatorTable build_table(Delta delta, const Subspace& h, std::uint64_t samples, std::uint64_t seed,
                                 ConeParams cone, BuildOptions opt = {}) {
    if (h.dim() != cone.n) throw DimensionMismatch("subspace and cone dimensions differ");
    std::vector<Vector> spectra(samples);
    parallel_reduce(
        samples, 256, opt.threads, 0,
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                Stream rng(seed, tags::table, i);
                const Vector u = rng.unit_vector(h.dim());
                spectra[i] = sym_eigen(restricted_hess_w(h, u, delta)).values;
            }
            return 0;
        },
        [](int, int) { return 0; });
    TableMetadata meta{delta.value(), h.label(), samples, seed, 0, 0};
    OperatorTable table = OperatorTable::from_spectra(cone, meta, spectra);
    const Certificate pairs = cone_pair_audit(table, opt.pairs, seed);
    if (pairs.failures > 0)
        throw ConeViolation("K-cone condition violated on " + std::to_string(pairs.failures) + " sampled pairs",
                            pairs.failures);
    meta.pairs_checked = pairs.samples;
    meta.violations = 0;
    return OperatorTable(cone, meta, table.entries());
}

/// l1 distance from a spectrum (sorted internally) to the nearest table entry.
inline double nearest_l1(const OperatorTable& table, std::span<const double> lambda) {
    Vector x(lambda.begin(), lambda.end());
    std::sort(x.begin(), x.end(), std::greater<>());
    const std::size_t n = x.size();
    const double s = std::accumulate(x.begin(), x.end(), 0.0);
    for (double& v : x) v -= s / double(n);
    double best = INFINITY;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto c = table.centred(i);
        const double ds = (s - table.entries()[i].s) / double(n);
        double d = 0.0;
        for (std::size_t k = 0; k < n && d < best; ++k) d += std::abs(x[k] - c[k] + ds);
        best = std::min(best, d);
    }
    return best;
}

struct OperatorAuditOptions {
    std::uint64_t table_points = 1000;
    std::uint64_t fresh_points = 1000;
    std::uint64_t probes = 100000;
    double fresh_tolerance = 1e-2;
    double table_tolerance = 1e-12;
    double probe_noise = 0.05;
    double slack = 1e-9;
    unsigned threads = 0;
};

/// f residuals at table points and fresh points, and difference-quotient
/// probes against [1/C0, C0].
inline Certificate audit_operator(const OperatorTable& table, Delta delta, const Subspace& h, std::uint64_t seed,
                                  OperatorAuditOptions opt = {}) {
    if (table.empty()) throw EmptyTable("audit_operator on an empty table");
    const std::size_t n = table.cone().n;
    const double c0 = table.cone().c0();

    struct Acc {
        Extremum value;
        std::uint64_t failures = 0;
    };
    auto merge = [](Acc a, Acc b) {
        a.value.merge(b.value);
        a.failures += b.failures;
        return a;
    };

    const std::uint64_t tp = std::min<std::uint64_t>(opt.table_points, table.size());
    const Acc at_table = parallel_reduce(
        tp, 16, opt.threads, Acc{},
        [&](std::size_t b, std::size_t e) {
            Acc acc;
            for (std::size_t i = b; i < e; ++i) {
                Stream rng(seed, tags::operator_audit, i);
                const std::size_t k = rng() % table.size();
                const double r = std::abs(eval_f(table.spectrum(k), table));
                acc.value.observe(r, i);
                if (!(r <= opt.table_tolerance)) ++acc.failures;
            }
            return acc;
        },
        merge);

    // |f(x)| <= C_up * min_w |x - x_w|_1: each coordinate moves f by at most
    // C_up per unit, sorting is an l1 contraction and f vanishes on the table
    const double l2 = table.cone().l2();
    const double c_up = double(n) * l2 / (double(n) - 1.0 + l2);
    struct FreshAcc {
        Extremum residual, bound, excess;
        std::uint64_t failures = 0, over_tolerance = 0;
    };
    const FreshAcc fresh = parallel_reduce(
        opt.fresh_points, 16, opt.threads, FreshAcc{},
        [&](std::size_t b, std::size_t e) {
            FreshAcc acc;
            for (std::size_t i = b; i < e; ++i) {
                Stream rng(seed, tags::operator_audit, (1ULL << 40) + i);
                const Vector u = rng.unit_vector(h.dim());
                const Vector x = sym_eigen(restricted_hess_w(h, u, delta)).values;
                const double r = std::abs(eval_f(x, table));
                const double bound = c_up * nearest_l1(table, x);
                acc.residual.observe(r, i);
                acc.bound.observe(bound, i);
                acc.excess.observe(r - bound, i);
                if (!(r <= bound + opt.slack)) ++acc.failures;
                if (!(r <= opt.fresh_tolerance)) ++acc.over_tolerance;
            }
            return acc;
        },
        [](FreshAcc a, FreshAcc b) {
            a.residual.merge(b.residual);
            a.bound.merge(b.bound);
            a.excess.merge(b.excess);
            a.failures += b.failures;
            a.over_tolerance += b.over_tolerance;
            return a;
        });

    const Acc probes = parallel_reduce(
        opt.probes, 64, opt.threads, Acc{},
        [&](std::size_t b, std::size_t e) {
            Acc acc;
            for (std::size_t i = b; i < e; ++i) {
                Stream rng(seed, tags::operator_audit, (2ULL << 40) + i);
                Vector x = table.spectrum(rng() % table.size());
                for (double& v : x) v += opt.probe_noise * rng.normal();
                const std::size_t k = rng() % n;
                const double mu = 1.0 - rng.uniform(); // (0, 1]
                const double f0 = eval_f(x, table);
                x[k] += mu;
                const double q = (eval_f(x, table) - f0) / mu;
                acc.value.observe(q, i);
                if (!(q >= 1.0 / c0 - opt.slack && q <= c0 + opt.slack)) ++acc.failures;
            }
            return acc;
        },
        merge);

    Certificate cert;
    cert.name = "operator-audit";
    cert.seed = seed;
    cert.samples = tp + opt.fresh_points + opt.probes;
    cert.failures = at_table.failures + fresh.failures + probes.failures;
    cert.record("table_residual", at_table.value);
    cert.record("fresh_residual", fresh.residual);
    cert.record("fresh_density_bound", fresh.bound);
    cert.record("fresh_excess_over_bound", fresh.excess);
    cert.extremes["fresh_over_tolerance"] = double(fresh.over_tolerance);
    cert.extremes["lipschitz_l1"] = c_up;
    cert.record("difference_quotient", probes.value);
    cert.extremes["C0"] = c0;
    cert.extremes["table_failures"] = double(at_table.failures);
    cert.extremes["fresh_failures"] = double(fresh.failures);
    cert.extremes["probe_failures"] = double(probes.failures);
    cert.extremes["table_tolerance"] = opt.table_tolerance;
    cert.extremes["fresh_tolerance"] = opt.fresh_tolerance;
    cert.extremes["table_size"] = double(table.size());
    cert.tolerance = opt.table_tolerance;
    cert.worst_residual = at_table.value.count ? at_table.value.max : 0.0;
    cert.metadata["symmetrization"] = "inputs sorted descending instead of summing over all permutations";
    cert.metadata["fresh_residual"] = "asserted against C_up * l1 distance to the table; fresh_tolerance is reported only";
    cert.metadata["subspace"] = h.label();
    cert.finalize();
    return cert;
}

} // namespace octovisc
