#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace emacfem {

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

// Error categories; the CLI maps them to distinct exit codes.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace emacfem
