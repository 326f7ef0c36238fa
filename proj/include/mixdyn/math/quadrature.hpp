#pragma once

#include <Eigen/Core>

namespace mixdyn {

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

// Gauss-Hermite rule normalized against the standard normal density:
// E[f(Z)] ~ sum_i weights[i] * f(nodes[i]) for Z ~ N(0,1).
// Rules are computed by Golub-Welsch and cached; thread-safe.
const QuadratureRule& gauss_hermite_rule(int n);

// Gauss-Legendre rule on [-1,1]: integral_{-1}^{1} f ~ sum w_i f(x_i).
const QuadratureRule& gauss_legendre_rule(int n);

// Convenience: integral of f over [a,b] with an n-point Legendre rule.
template <class F>
double integrate_legendre(F&& f, double a, double b, int n) {
    const QuadratureRule& rule = gauss_legendre_rule(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * acc;
}

// Panelled version for integrands with localized features.
template <class F>
double integrate_legendre_panels(F&& f, double a, double b, int panels, int n) {
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        acc += integrate_legendre(f, a + p * h, a + (p + 1) * h, n);
    return acc;
}

}  // namespace mixdyn
