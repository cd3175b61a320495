#pragma once

#include "emacfem/common.hpp"

#include <array>
#include <vector>

namespace emacfem {

// Quadrature on the reference triangle {(x,y): x,y >= 0, x+y <= 1}.
// Points in barycentric coordinates; weights sum to the reference area 1/2.
struct QuadratureRule {
    int degree = 0;
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }
};

namespace detail {

inline void push_point(QuadratureRule& r, double l0, double l1, double l2, double w) {
    r.points.push_back({l0, l1, l2});
    r.weights.push_back(0.5 * w);
}

inline void push_sym3(QuadratureRule& r, double a, double w) {
    const double b = 1.0 - 2.0 * a;
    push_point(r, b, a, a, w);
    push_point(r, a, b, a, w);
    push_point(r, a, a, b, w);
}

inline void push_sym6(QuadratureRule& r, double a, double b, double w) {
    const double c = 1.0 - a - b;
    push_point(r, a, b, c, w);
    push_point(r, b, c, a, w);
    push_point(r, c, a, b, w);
    push_point(r, b, a, c, w);
    push_point(r, c, b, a, w);
    push_point(r, a, c, b, w);
}

} // namespace detail

// Rules exact for all bivariate polynomials up to the requested degree
// (Dunavant point sets). Supported degrees: 1..6.
inline QuadratureRule quadrature_rule(int degree) {
    QuadratureRule r;
    r.degree = degree;
    switch (degree) {
    case 1:
        detail::push_point(r, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0);
        break;
    case 2:
        detail::push_sym3(r, 1.0 / 6.0, 1.0 / 3.0);
        break;
    case 3:
        detail::push_point(r, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -9.0 / 16.0);
        detail::push_sym3(r, 1.0 / 5.0, 25.0 / 48.0);
        break;
    case 4:
        detail::push_sym3(r, 0.445948490915965, 0.223381589678011);
        detail::push_sym3(r, 0.091576213509771, 0.109951743655322);
        break;
    case 5:
        detail::push_point(r, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225);
        detail::push_sym3(r, 0.470142064105115, 0.132394152788506);
        detail::push_sym3(r, 0.101286507323456, 0.125939180544827);
        break;
    case 6:
        detail::push_sym3(r, 0.063089014491502, 0.050844906370207);
        detail::push_sym3(r, 0.249286745170910, 0.116786275726379);
        detail::push_sym6(r, 0.310352451033785, 0.053145049844816, 0.082851075618374);
        break;
    default:
        throw config_error("quadrature_rule: unsupported degree " + std::to_string(degree) +
                           " (supported: 1..6)");
    }
    return r;
}

} // namespace emacfem
