#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "octovisc/linalg.hpp"

namespace octovisc {

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

/// Counter-based random stream. The state of sample `index` of audit `tag`
/// under `seed` is a pure function of the three, so results never depend on
/// how samples are distributed across threads.
class Stream {
public:
    using result_type = std::uint64_t;

    Stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) noexcept
        : state_(detail::splitmix64(detail::splitmix64(seed ^ detail::splitmix64(tag)) + index)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal (Marsaglia polar method; no cached second variate).
    double normal() noexcept {
        for (;;) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    Vector normal_vector(std::size_t n) noexcept {
        Vector v(n);
        for (double& x : v) x = normal();
        return v;
    }

    Vector unit_vector(std::size_t n) noexcept {
        for (;;) {
            Vector v = normal_vector(n);
            const double r = norm(v);
            if (r > 1e-300) {
                for (double& x : v) x /= r;
                return v;
            }
        }
    }

private:
    std::uint64_t state_;
};

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of diag(R) folded into Q.
inline Matrix haar_orthogonal(std::size_t n, Stream& rng) {
    Matrix g(n, n);
    for (double& x : g.data()) x = rng.normal();
    auto [q, rdiag] = householder_qr(std::move(g));
    for (std::size_t j = 0; j < n; ++j) {
        if (rdiag[j] < 0.0)
            for (std::size_t i = 0; i < n; ++i) q(i, j) = -q(i, j);
    }
    return q;
}

/// Symmetric matrix with i.i.d. N(0,1) upper triangle.
inline Matrix random_symmetric(std::size_t n, Stream& rng) {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = rng.normal();
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

inline unsigned resolve_threads(unsigned requested) noexcept {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Splits [0, count) into fixed-size chunks (independent of the thread
/// count), evaluates `body(begin, end)` for every chunk on a worker pool and
/// folds the chunk results in chunk order with `merge`.
template <class Acc, class Body, class Merge>
Acc parallel_reduce(std::size_t count, std::size_t chunk, unsigned threads, Acc init, Body body,
                    Merge merge) {
    chunk = std::max<std::size_t>(chunk, 1);
    const std::size_t nchunks = (count + chunk - 1) / chunk;
    std::vector<Acc> partial(nchunks, init);
    const unsigned nthreads =
        static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(nchunks, 1)));

    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&](unsigned t) {
        for (std::size_t c = t; c < nchunks; c += nthreads) {
            try {
                const std::size_t b = c * chunk;
                partial[c] = body(b, std::min(count, b + chunk));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    if (nthreads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    Acc acc = std::move(init);
    for (auto& p : partial) acc = merge(std::move(acc), std::move(p));
    return acc;
}

/// Stream tags keep the audits' random streams disjoint.
namespace tags {
inline constexpr std::uint64_t octonion_axioms = 0x0c7001;
inline constexpr std::uint64_t dual_path = 0x0c7002;
inline constexpr std::uint64_t block_audit = 0x0c7003;
inline constexpr std::uint64_t closed_form = 0x0c7004;
inline constexpr std::uint64_t extreme_eigenvalues = 0x0c7005;
inline constexpr std::uint64_t tangential = 0x0c7006;
inline constexpr std::uint64_t lemma41 = 0x0c7007;
inline constexpr std::uint64_t prop41 = 0x0c7008;
inline constexpr std::uint64_t subspace = 0x0c7009;
inline constexpr std::uint64_t table = 0x0c700a;
inline constexpr std::uint64_t cone_pairs = 0x0c700b;
inline constexpr std::uint64_t operator_audit = 0x0c700c;
inline constexpr std::uint64_t pencils = 0x0c700d;
inline constexpr std::uint64_t witness = 0x0c700e;
inline constexpr std::uint64_t supinf = 0x0c700f;
inline constexpr std::uint64_t prop32 = 0x0c7010;
inline constexpr std::uint64_t checkers = 0x0c7011;
} // namespace tags

} // namespace octovisc
