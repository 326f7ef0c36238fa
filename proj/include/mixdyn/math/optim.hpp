#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mixdyn/errors.hpp"

namespace mixdyn {

struct ScalarMinimum {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Brent minimization on [a,b] (golden section with parabolic steps).
template <class F>
ScalarMinimum brent_minimize(F&& f, double a, double b, double xtol,
                             int max_iter = 200) {
    const double golden = 0.3819660112501051;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    ScalarMinimum out;
    for (int iter = 0; iter < max_iter; ++iter) {
        const double mid = 0.5 * (a + b);
        const double tol1 = xtol * std::abs(x) + 1e-14;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) {
            out.converged = true;
            break;
        }
        double step = 0.0;
        bool parabolic_ok = false;
        if (std::abs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double e_prev = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) &&
                p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2)
                    d = (mid > x) ? tol1 : -tol1;
                parabolic_ok = true;
            }
        }
        if (!parabolic_ok) {
            e = (x < mid) ? b - x : a - x;
            d = golden * e;
        }
        step = (std::abs(d) >= tol1) ? d : (d > 0 ? tol1 : -tol1);
        const double u = x + step;
        const double fu = f(u);
        ++out.iterations;

        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    out.x = x;
    out.value = fx;
    return out;
}

struct SimplexResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead downhill simplex with standard coefficients.
template <class F>
SimplexResult nelder_mead(F&& f, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& initial_step, double ftol,
                          int max_iter) {
    const int n = static_cast<int>(x0.size());
    if (n < 1) throw invalid_input_error("nelder_mead: empty parameter vector");

    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (int i = 0; i < n; ++i) pts[i + 1][i] += initial_step[i];
    for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    SimplexResult out;
    std::vector<int> order(n + 1);
    for (; out.iterations < max_iter; ++out.iterations) {
        for (int i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return vals[a] < vals[b]; });
        const int best = order[0], worst = order[n], second_worst = order[n - 1];

        const double spread =
            std::abs(vals[worst] - vals[best]) /
            (std::abs(vals[worst]) + std::abs(vals[best]) + 1e-300);
        if (spread < ftol) {
            out.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += pts[i];
        centroid /= n;

        Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
        double f_reflected = f(reflected);
        if (f_reflected < vals[best]) {
            Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
            double f_expanded = f(expanded);
            if (f_expanded < f_reflected) {
                pts[worst] = std::move(expanded);
                vals[worst] = f_expanded;
            } else {
                pts[worst] = std::move(reflected);
                vals[worst] = f_reflected;
            }
        } else if (f_reflected < vals[second_worst]) {
            pts[worst] = std::move(reflected);
            vals[worst] = f_reflected;
        } else {
            Eigen::VectorXd contracted = centroid + 0.5 * (pts[worst] - centroid);
            double f_contracted = f(contracted);
            if (f_contracted < vals[worst]) {
                pts[worst] = std::move(contracted);
                vals[worst] = f_contracted;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (vals[i] < vals[best]) best = i;
    out.x = pts[best];
    out.value = vals[best];
    return out;
}

}  // namespace mixdyn
