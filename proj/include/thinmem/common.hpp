#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace thinmem {

// Parameter errors map to CLI exit code 1, internal errors to exit code 2.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Mismatched grid / scenario between two objects.
struct MismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input field violates a boundary/transmission condition in strict mode.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A condition the library guarantees internally failed; never expected.
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw MismatchError("sup_diff: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Composite trapezoid on a uniform grid with spacing h (values at both ends).
inline double trapezoid_uniform(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

}  // namespace thinmem
