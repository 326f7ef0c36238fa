#include "mixdyn/math/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "mixdyn/errors.hpp"

namespace mixdyn {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 * (first eigenvector component)^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
    const int n = static_cast<int>(offdiag.size()) + 1;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        jacobi(i, i + 1) = offdiag[i];
        jacobi(i + 1, i) = offdiag[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    QuadratureRule rule;
    rule.nodes = solver.eigenvalues();
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

QuadratureRule make_hermite(int n) {
    // Probabilists' Hermite Jacobi matrix: b_k = sqrt(k); mu0 = 1 against
    // the standard normal weight.
    Eigen::VectorXd b(n - 1);
    for (int k = 1; k < n; ++k) b[k - 1] = std::sqrt(static_cast<double>(k));
    return golub_welsch(b, 1.0);
}

QuadratureRule make_legendre(int n) {
    Eigen::VectorXd b(n - 1);
    for (int k = 1; k < n; ++k)
        b[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(b, 2.0);
}

const QuadratureRule& cached(int n, std::map<int, std::unique_ptr<QuadratureRule>>& cache,
                             std::mutex& guard, QuadratureRule (*make)(int)) {
    if (n < 1) throw invalid_input_error("quadrature rule needs at least one node");
    std::lock_guard<std::mutex> lock(guard);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<QuadratureRule>(make(n))).first;
    return *it->second;
}

}  // namespace

const QuadratureRule& gauss_hermite_rule(int n) {
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    static std::mutex guard;
    return cached(n, cache, guard, &make_hermite);
}

const QuadratureRule& gauss_legendre_rule(int n) {
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    static std::mutex guard;
    return cached(n, cache, guard, &make_legendre);
}

}  // namespace mixdyn
