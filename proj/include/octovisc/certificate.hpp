#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>

namespace octovisc {

/// Running min/max with the index of the sample that produced each.
struct Extremum {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    std::uint64_t argmin = 0;
    std::uint64_t argmax = 0;
    std::uint64_t count = 0;

    void observe(double v, std::uint64_t index) noexcept {
        if (v < min || count == 0) {
            min = v;
            argmin = index;
        }
        if (v > max || count == 0) {
            max = v;
            argmax = index;
        }
        ++count;
    }

    /// Folds `o` into this; ties keep the earlier (lower-index) witness.
    void merge(const Extremum& o) noexcept {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        if (o.min < min || (o.min == min && o.argmin < argmin)) {
            min = o.min;
            argmin = o.argmin;
        }
        if (o.max > max || (o.max == max && o.argmax < argmax)) {
            max = o.max;
            argmax = o.argmax;
        }
        count += o.count;
    }
};

/// Outcome of a deterministic or Monte Carlo audit.
struct Certificate {
    std::string name;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    std::uint64_t skipped = 0;
    std::uint64_t failures = 0;
    double worst_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::map<std::string, double> extremes;
    std::map<std::string, std::string> metadata;

    void record(const std::string& key, const Extremum& e) {
        if (e.count == 0) return;
        extremes[key + ".min"] = e.min;
        extremes[key + ".max"] = e.max;
        extremes[key + ".argmin"] = static_cast<double>(e.argmin);
        extremes[key + ".argmax"] = static_cast<double>(e.argmax);
    }

    /// Sets `pass` from the failure count and the residual bound. An audit
    /// that evaluated nothing does not pass.
    void finalize() {
        pass = samples > 0 && failures == 0 && std::isfinite(worst_residual) && worst_residual <= tolerance;
    }
};

} // namespace octovisc
