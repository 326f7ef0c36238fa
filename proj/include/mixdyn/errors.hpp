#pragma once

#include <stdexcept>
#include <string>

namespace mixdyn {

// Base class for everything thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite or structurally invalid inputs (negative forwards, empty
// quote lists, weight vectors that do not sum to one, ...).
class invalid_input_error : public error {
public:
    using error::error;
};

// Evaluation outside the mathematical domain of an operation
// (t <= 0 for a density, state below the shifted support, ...).
class domain_error : public error {
public:
    using error::error;
};

// The shifted-lognormal assumptions are violated: effective strike
// K - beta*exp(mu*T) <= 0 or effective spot S0 - beta <= 0.
class shift_domain_error : public domain_error {
public:
    using domain_error::domain_error;
};

// Implied-volatility inversion has no solution.
class no_solution_error : public error {
public:
    enum class Bound { below_intrinsic, above_bound };

    no_solution_error(const std::string& what, Bound bound)
        : error(what), bound_(bound) {}

    Bound bound() const { return bound_; }

private:
    Bound bound_;
};

// A correlation specification that the requested model cannot represent
// (e.g. a scenario matrix handed to the single-Brownian SCMD dynamics).
class unsupported_spec_error : public error {
public:
    using error::error;
};

// A model is missing pieces required by the requested operation
// (rates absent, quanto adjustment not applied, ...).
class configuration_error : public error {
public:
    using error::error;
};

// Numerical integration failed to produce a trustworthy value.
class integration_error : public error {
public:
    using error::error;
};

// Correlation magnitudes too close to one for stable evaluation.
class conditioning_error : public error {
public:
    using error::error;
};

// The state-dependent diffusion matrix lost positive definiteness.
class diffusion_degeneracy_error : public error {
public:
    using error::error;
};

// Sample correlation requested on degenerate (constant) samples.
class undefined_correlation_error : public error {
public:
    using error::error;
};

// A Monte Carlo objective whose variation is indistinguishable from its
// own sampling noise.
class noisy_objective_error : public error {
public:
    using error::error;
};

}  // namespace mixdyn
