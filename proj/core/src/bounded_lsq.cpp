#include "sdi/bounded_lsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "sdi/errors.hpp"

namespace sdi {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

bool in_bounds(const VectorXd& x, const BoxBounds& b)
{
    return ((x.array() >= b.lower.array()) && (x.array() <= b.upper.array())).all();
}

struct BoundHit {
    double step;
    Eigen::VectorXi hits;  // sign of s for the components that hit first
};

// Largest t >= 0 keeping x + t s inside the box, and which components bind.
BoundHit step_size_to_bound(const VectorXd& x, const VectorXd& s, const BoxBounds& b)
{
    const Eigen::Index n = x.size();
    VectorXd steps = VectorXd::Constant(n, kInf);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (s[i] != 0.0)
            steps[i] = std::max((b.lower[i] - x[i]) / s[i], (b.upper[i] - x[i]) / s[i]);
    }
    const double min_step = steps.minCoeff();
    Eigen::VectorXi hits = Eigen::VectorXi::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (steps[i] == min_step) hits[i] = (s[i] > 0.0) - (s[i] < 0.0);
    return {min_step, hits};
}

// Roots t of ||x + t s|| = radius, smaller first. x must lie inside the region.
std::pair<double, double> intersect_trust_region(const VectorXd& x, const VectorXd& s, double radius)
{
    const double a = s.squaredNorm();
    if (a == 0.0) return {0.0, 0.0};
    const double b = x.dot(s);
    const double c = std::min(x.squaredNorm() - radius * radius, 0.0);
    const double d = std::sqrt(std::max(b * b - a * c, 0.0));
    const double q = -(b + std::copysign(d, b));
    double t1 = q / a;
    double t2 = (q != 0.0) ? c / q : -t1;
    if (t1 > t2) std::swap(t1, t2);
    return {t1, t2};
}

// 1/2 s'(J'J + diag)s + g's
double evaluate_quadratic(const MatrixXd& J, const VectorXd& g, const VectorXd& s, const VectorXd& diag)
{
    const VectorXd js = J * s;
    return 0.5 * (js.squaredNorm() + s.dot(diag.cwiseProduct(s))) + g.dot(s);
}

struct Quadratic1d {
    double a, b, c;
};

// Coefficients of f(t) = a t^2 + b t + c along s0 + t s.
Quadratic1d build_quadratic_1d(const MatrixXd& J, const VectorXd& g, const VectorXd& s,
                               const VectorXd& diag, const VectorXd* s0 = nullptr)
{
    const VectorXd v = J * s;
    double a = 0.5 * (v.squaredNorm() + s.dot(diag.cwiseProduct(s)));
    double b = g.dot(s);
    double c = 0.0;
    if (s0) {
        const VectorXd u = J * (*s0);
        b += u.dot(v) + s0->dot(diag.cwiseProduct(s));
        c = 0.5 * (u.squaredNorm() + s0->dot(diag.cwiseProduct(*s0))) + g.dot(*s0);
    }
    return {a, b, c};
}

std::pair<double, double> minimize_quadratic_1d(const Quadratic1d& q, double lo, double hi)
{
    auto value = [&](double t) { return t * (q.a * t + q.b) + q.c; };
    double best_t = lo;
    double best_v = value(lo);
    auto consider = [&](double t) {
        const double v = value(t);
        if (v < best_v) {
            best_v = v;
            best_t = t;
        }
    };
    consider(hi);
    if (q.a != 0.0) {
        const double extremum = -0.5 * q.b / q.a;
        if (lo < extremum && extremum < hi) consider(extremum);
    }
    return {best_t, best_v};
}

// Coleman-Li scaling: distance to the bound the anti-gradient points at.
void cl_scaling(const VectorXd& x, const VectorXd& g, const BoxBounds& b, VectorXd& v, VectorXd& dv)
{
    v.setOnes(x.size());
    dv.setZero(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (g[i] < 0.0 && std::isfinite(b.upper[i])) {
            v[i] = b.upper[i] - x[i];
            dv[i] = -1.0;
        } else if (g[i] > 0.0 && std::isfinite(b.lower[i])) {
            v[i] = x[i] - b.lower[i];
            dv[i] = 1.0;
        }
    }
}

VectorXd make_strictly_feasible(const VectorXd& x, const BoxBounds& b, double rstep)
{
    VectorXd out = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double lo = b.lower[i];
        const double hi = b.upper[i];
        if (rstep == 0.0) {
            if (out[i] <= lo) out[i] = std::nextafter(lo, hi);
            if (out[i] >= hi) out[i] = std::nextafter(hi, lo);
        } else {
            const double lo_in = lo + rstep * std::max(1.0, std::abs(lo));
            const double hi_in = hi - rstep * std::max(1.0, std::abs(hi));
            if (out[i] < lo_in) out[i] = lo_in;
            if (out[i] > hi_in) out[i] = hi_in;
            if (out[i] < lo || out[i] > hi) out[i] = 0.5 * (lo + hi);
        }
    }
    return out;
}

struct SubproblemStep {
    VectorXd p;
    double alpha;
};

// min ||J p + f|| s.t. ||p|| <= radius given the thin SVD J = U diag(s) V'.
// Levenberg parameter alpha found by safeguarded Newton on ||p(alpha)|| = radius.
SubproblemStep solve_trust_region(const VectorXd& uf, const VectorXd& s, const MatrixXd& V,
                                  double radius, double initial_alpha, Eigen::Index m)
{
    const Eigen::Index n = s.size();
    const VectorXd suf = s.cwiseProduct(uf);

    bool full_rank = false;
    if (m >= n && n > 0) {
        const double threshold = kEps * static_cast<double>(m) * s[0];
        full_rank = s[n - 1] > threshold;
    }
    if (full_rank) {
        VectorXd p = -V * uf.cwiseQuotient(s);
        if (p.norm() <= radius) return {p, 0.0};
    }

    auto phi_and_derivative = [&](double alpha) {
        const VectorXd denom = s.array().square() + alpha;
        const double p_norm = suf.cwiseQuotient(denom).norm();
        const double phi = p_norm - radius;
        const double phi_prime = -(suf.array().square() / denom.array().cube()).sum() / p_norm;
        return std::pair{phi, phi_prime};
    };

    double alpha_upper = suf.norm() / radius;
    double alpha_lower = 0.0;
    if (full_rank) {
        auto [phi, phi_prime] = phi_and_derivative(0.0);
        alpha_lower = -phi / phi_prime;
    }
    double alpha = initial_alpha;
    if (!full_rank && initial_alpha == 0.0)
        alpha = std::max(0.001 * alpha_upper, std::sqrt(alpha_lower * alpha_upper));

    for (int it = 0; it < 10; ++it) {
        if (alpha < alpha_lower || alpha > alpha_upper)
            alpha = std::max(0.001 * alpha_upper, std::sqrt(alpha_lower * alpha_upper));
        auto [phi, phi_prime] = phi_and_derivative(alpha);
        if (phi < 0.0) alpha_upper = alpha;
        const double ratio = phi / phi_prime;
        alpha_lower = std::max(alpha_lower, alpha - ratio);
        alpha -= (phi + radius) * ratio / radius;
        if (std::abs(phi) < 0.01 * radius) break;
    }

    const VectorXd denom = s.array().square() + alpha;
    VectorXd p = -V * suf.cwiseQuotient(denom);
    const double p_norm = p.norm();
    if (p_norm > 0.0) p *= radius / p_norm;
    return {p, alpha};
}

struct SelectedStep {
    VectorXd step;
    VectorXd step_h;
    double predicted_reduction;
};

SelectedStep select_step(const VectorXd& x, const MatrixXd& J_h, const VectorXd& diag_h,
                         const VectorXd& g_h, VectorXd p, VectorXd p_h, const VectorXd& d,
                         double radius, const BoxBounds& b, double theta)
{
    if (in_bounds(x + p, b)) {
        const double value = evaluate_quadratic(J_h, g_h, p_h, diag_h);
        return {p, p_h, -value};
    }

    const BoundHit to_boundary = step_size_to_bound(x, p, b);
    const double p_stride = to_boundary.step;

    // reflect off the bounds that were hit
    VectorXd r_h = p_h;
    for (Eigen::Index i = 0; i < r_h.size(); ++i)
        if (to_boundary.hits[i] != 0) r_h[i] = -r_h[i];
    VectorXd r = d.cwiseProduct(r_h);

    p *= p_stride;
    p_h *= p_stride;
    const VectorXd x_on_bound = x + p;

    const double to_tr = intersect_trust_region(p_h, r_h, radius).second;
    const double to_bound = step_size_to_bound(x_on_bound, r, b).step;
    double r_stride = std::min(to_bound, to_tr);
    double r_stride_l = 0.0;
    double r_stride_u = -1.0;
    if (r_stride > 0.0) {
        r_stride_l = (1.0 - theta) * p_stride / r_stride;
        r_stride_u = (r_stride == to_bound) ? theta * to_bound : to_tr;
    }
    double r_value = kInf;
    if (r_stride_l <= r_stride_u) {
        const auto q = build_quadratic_1d(J_h, g_h, r_h, diag_h, &p_h);
        auto [t, value] = minimize_quadratic_1d(q, r_stride_l, r_stride_u);
        r_value = value;
        r_h = p_h + t * r_h;
        r = d.cwiseProduct(r_h);
    }

    // step back from the boundary
    p *= theta;
    p_h *= theta;
    const double p_value = evaluate_quadratic(J_h, g_h, p_h, diag_h);

    VectorXd ag_h = -g_h;
    VectorXd ag = d.cwiseProduct(ag_h);
    const double ag_to_tr = radius / ag_h.norm();
    const double ag_to_bound = step_size_to_bound(x, ag, b).step;
    const double ag_limit = (ag_to_bound < ag_to_tr) ? theta * ag_to_bound : ag_to_tr;
    const auto q = build_quadratic_1d(J_h, g_h, ag_h, diag_h);
    auto [ag_stride, ag_value] = minimize_quadratic_1d(q, 0.0, ag_limit);
    ag_h *= ag_stride;
    ag *= ag_stride;

    if (p_value < r_value && p_value < ag_value) return {p, p_h, -p_value};
    if (r_value < p_value && r_value < ag_value) return {r, r_h, -r_value};
    return {ag, ag_h, -ag_value};
}

std::pair<double, double> update_radius(double radius, double actual, double predicted,
                                        double step_norm, bool bound_hit)
{
    double ratio = 0.0;
    if (predicted > 0.0)
        ratio = actual / predicted;
    else if (predicted == actual)
        ratio = 1.0;
    if (ratio < 0.25)
        radius = 0.25 * step_norm;
    else if (ratio > 0.75 && bound_hit)
        radius *= 2.0;
    return {radius, ratio};
}

} // namespace

double projected_gradient_norm(const VectorXd& x, const VectorXd& gradient, const BoxBounds& bounds)
{
    const VectorXd moved = (x - gradient).cwiseMax(bounds.lower).cwiseMin(bounds.upper);
    return (x - moved).cwiseAbs().maxCoeff();
}

LsqSolution solve_bounded_lsq(const LsqProblem& problem, const VectorXd& x0,
                              const BoxBounds& bounds, const LsqOptions& options)
{
    const Eigen::Index n = x0.size();
    if (n == 0 || bounds.lower.size() != n || bounds.upper.size() != n)
        throw InvalidInputError("bounded least squares: dimension mismatch");
    if ((bounds.lower.array() >= bounds.upper.array()).any())
        throw InvalidInputError("bounded least squares: each lower bound must be below its upper bound");

    LsqSolution sol;
    VectorXd x = make_strictly_feasible(x0, bounds, 1e-10);
    VectorXd f = problem.residual(x);
    MatrixXd J = problem.jacobian(x);
    const Eigen::Index m = f.size();
    if (!f.allFinite() || !J.allFinite())
        throw InvalidInputError("bounded least squares: non-finite residual at the starting point");
    sol.evaluations = 1;
    double cost = 0.5 * f.squaredNorm();
    VectorXd g = J.transpose() * f;

    VectorXd v, dv;
    cl_scaling(x, g, bounds, v, dv);
    double radius = x.cwiseQuotient(v.cwiseSqrt()).norm();
    if (radius == 0.0 || !std::isfinite(radius)) radius = 1.0;

    const int max_evaluations = options.max_iterations * 10;
    double alpha = 0.0;
    MatrixXd J_aug(m + n, n);
    VectorXd f_aug = VectorXd::Zero(m + n);

    while (true) {
        cl_scaling(x, g, bounds, v, dv);
        if (projected_gradient_norm(x, g, bounds) < options.gradient_tol) {
            sol.status = LsqStatus::GradientTolerance;
            break;
        }
        if (sol.iterations >= options.max_iterations || sol.evaluations >= max_evaluations) {
            sol.status = LsqStatus::IterationLimit;
            break;
        }

        const double g_norm = g.cwiseProduct(v).cwiseAbs().maxCoeff();
        const VectorXd d = v.cwiseSqrt();
        const VectorXd diag_h = g.cwiseProduct(dv);
        const VectorXd g_h = d.cwiseProduct(g);

        J_aug.topRows(m) = J * d.asDiagonal();
        J_aug.bottomRows(n) = diag_h.cwiseSqrt().asDiagonal();
        f_aug.head(m) = f;
        const MatrixXd J_h = J_aug.topRows(m);

        Eigen::JacobiSVD<MatrixXd> svd(J_aug, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const VectorXd s = svd.singularValues();
        const MatrixXd& V = svd.matrixV();
        const VectorXd uf = svd.matrixU().transpose() * f_aug;

        const double theta = std::max(0.995, 1.0 - g_norm);
        double actual_reduction = -1.0;
        bool stop_on_step = false;
        VectorXd x_new, f_new;
        double cost_new = cost;

        while (actual_reduction <= 0.0 && sol.evaluations < max_evaluations) {
            auto sub = solve_trust_region(uf, s, V, radius, alpha, m + n);
            alpha = sub.alpha;
            const VectorXd p = d.cwiseProduct(sub.p);
            auto chosen = select_step(x, J_h, diag_h, g_h, p, sub.p, d, radius, bounds, theta);

            x_new = make_strictly_feasible(x + chosen.step, bounds, 0.0);
            f_new = problem.residual(x_new);
            ++sol.evaluations;
            const double step_h_norm = chosen.step_h.norm();
            if (!f_new.allFinite()) {
                radius = 0.25 * step_h_norm;
                continue;
            }
            cost_new = 0.5 * f_new.squaredNorm();
            actual_reduction = cost - cost_new;
            auto [new_radius, ratio] = update_radius(radius, actual_reduction, chosen.predicted_reduction,
                                                     step_h_norm, step_h_norm > 0.95 * radius);
            (void)ratio;
            const double step_norm = chosen.step.norm();
            if (step_norm < options.step_tol * (options.step_tol + x.norm())) {
                stop_on_step = true;
                break;
            }
            if (new_radius > 0.0) alpha *= radius / new_radius;
            radius = new_radius;
            if (radius == 0.0) {
                stop_on_step = true;
                break;
            }
        }

        if (actual_reduction > 0.0) {
            x = x_new;
            f = f_new;
            cost = cost_new;
            J = problem.jacobian(x);
            g = J.transpose() * f;
        }
        ++sol.iterations;
        if (stop_on_step) {
            sol.status = LsqStatus::StepTolerance;
            break;
        }
    }

    sol.x = x;
    sol.residual = f;
    sol.jacobian = J;
    sol.cost = cost;
    return sol;
}

std::string to_string(LsqStatus status)
{
    switch (status) {
    case LsqStatus::GradientTolerance: return "gradient-tolerance";
    case LsqStatus::StepTolerance: return "step-tolerance";
    case LsqStatus::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

} // namespace sdi
