#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bilp {

using dvec = std::vector<double>;
using index_list = std::vector<std::size_t>;

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline double dot(const dvec& a, const dvec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double linf_norm(const dvec& v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

inline double l2_norm(const dvec& v) { return std::sqrt(dot(v, v)); }

inline double linf_diff(const dvec& a, const dvec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("linf_diff: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline bool all_finite(const dvec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline dvec concat(const dvec& a, const dvec& b) {
    dvec r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

} // namespace bilp
