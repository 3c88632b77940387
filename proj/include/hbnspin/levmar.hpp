#ifndef HBNSPIN_LEVMAR_HPP
#define HBNSPIN_LEVMAR_HPP

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>

namespace hbnspin::analysis {

/// Fills the residual vector and, when jac is non-null, the analytic Jacobian
/// d r_i / d p_j at the given parameter vector.
using ResidualFn =
    std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac)>;

struct LMOptions {
    int max_iterations = 500;
    double relative_tolerance = 1e-10;  // stop when the cost change falls below this
    double lambda_init = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    double lambda_max = 1e14;
};

struct LMResult {
    Eigen::VectorXd params;
    double cost = 0;          // sum of squared residuals
    int iterations = 0;
    bool converged = false;
};

/// Thrown when the damped normal equations cannot produce a cost decrease at
/// any damping level; carries the last accepted iterate.
class FitFailure : public std::runtime_error {
  public:
    FitFailure(std::string msg, LMResult last)
        : std::runtime_error(std::move(msg)), last_iterate(std::move(last)) {}
    LMResult last_iterate;
};

/// Damped Gauss-Newton minimization of |r(p)|^2 with a Levenberg-Marquardt
/// schedule.  Accepted steps never increase the cost.
LMResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd p0,
                             const LMOptions& opts = {});

/// Central-difference Jacobian (relative step 1e-6); test oracle for the
/// analytic Jacobians.
Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& fn, const Eigen::VectorXd& p,
                                           double rel_step = 1e-6);

}  // namespace hbnspin::analysis

#endif
