#pragma once

// Box-constrained nonlinear least squares, min 1/2 ||r(x)||^2 s.t. lo <= x <= hi,
// by an interior trust-region reflective method (Coleman-Li affine scaling).
//
// Iterates stay strictly inside the box. Each iteration solves a scaled
// trust-region subproblem, then picks the best of three candidate steps under
// the quadratic model: the subproblem step if feasible, otherwise the step
// pulled back from the boundary, its reflection off the boundary, and a
// constrained anti-gradient step.

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace sdi {

struct BoxBounds {
    Eigen::VectorXd lower;  // -inf allowed
    Eigen::VectorXd upper;  // +inf allowed
};

struct LsqProblem {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

struct LsqOptions {
    int max_iterations = 500;
    double gradient_tol = 1e-10;  // on the projected gradient, infinity norm
    double step_tol = 1e-12;      // relative to ||x||
};

enum class LsqStatus { GradientTolerance, StepTolerance, IterationLimit };

struct LsqSolution {
    Eigen::VectorXd x;
    Eigen::VectorXd residual;
    Eigen::MatrixXd jacobian;
    double cost = 0.0;  // 1/2 ||r||^2
    int iterations = 0;
    int evaluations = 0;
    LsqStatus status = LsqStatus::IterationLimit;

    bool converged() const noexcept { return status != LsqStatus::IterationLimit; }
};

/// ||x - clamp(x - g)||_inf, zero at a first-order stationary point.
double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& gradient,
                               const BoxBounds& bounds);

LsqSolution solve_bounded_lsq(const LsqProblem& problem, const Eigen::VectorXd& x0,
                              const BoxBounds& bounds, const LsqOptions& options = {});

std::string to_string(LsqStatus status);

} // namespace sdi
