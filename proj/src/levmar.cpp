#include "hbnspin/levmar.hpp"

#include <cmath>

namespace hbnspin::analysis {

using Eigen::MatrixXd;
using Eigen::VectorXd;

LMResult levenberg_marquardt(const ResidualFn& fn, VectorXd p0, const LMOptions& opts) {
    const int np = static_cast<int>(p0.size());
    VectorXd r;
    MatrixXd jac;
    fn(p0, r, &jac);

    LMResult cur;
    cur.params = std::move(p0);
    cur.cost = r.squaredNorm();

    double lambda = opts.lambda_init;
    bool ever_accepted = false;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        cur.iterations = it;
        const MatrixXd jtj = jac.transpose() * jac;
        const VectorXd jtr = jac.transpose() * r;
        const double diag_floor = 1e-12 * (1.0 + jtj.diagonal().maxCoeff());

        bool accepted = false;
        while (lambda <= opts.lambda_max) {
            MatrixXd a = jtj;
            for (int k = 0; k < np; ++k)
                a(k, k) += lambda * std::max(jtj(k, k), diag_floor);
            const VectorXd step = a.ldlt().solve(-jtr);
            if (!step.allFinite()) {
                lambda *= opts.lambda_up;
                continue;
            }
            VectorXd r_trial;
            fn(cur.params + step, r_trial, nullptr);
            const double cost_trial = r_trial.squaredNorm();
            if (cost_trial < cur.cost) {
                const double prev = cur.cost;
                cur.params += step;
                cur.cost = cost_trial;
                lambda = std::max(lambda * opts.lambda_down, 1e-15);
                ever_accepted = true;
                const bool tiny_drop = prev - cost_trial <=
                                       opts.relative_tolerance * std::max(prev, 1e-300);
                const bool tiny_step = step.norm() <= 1e-10 * (1.0 + cur.params.norm());
                if (tiny_drop || tiny_step || cur.cost == 0.0) {
                    cur.converged = true;
                    return cur;
                }
                fn(cur.params, r, &jac);
                accepted = true;
                break;
            }
            lambda *= opts.lambda_up;
        }
        if (!accepted) {
            // damping exhausted: no decrease exists at machine precision
            if (ever_accepted || jtr.norm() <= 1e-12 * (1.0 + cur.cost)) {
                cur.converged = true;
                return cur;
            }
            throw FitFailure("levenberg_marquardt: no descent from the initial point", cur);
        }
    }
    cur.converged = false;
    return cur;
}

MatrixXd finite_difference_jacobian(const ResidualFn& fn, const VectorXd& p, double rel_step) {
    VectorXd r0;
    fn(p, r0, nullptr);
    MatrixXd jac(r0.size(), p.size());
    for (int j = 0; j < p.size(); ++j) {
        const double h = rel_step * std::max(1.0, std::abs(p(j)));
        VectorXd pp = p, pm = p;
        pp(j) += h;
        pm(j) -= h;
        VectorXd rp, rm;
        fn(pp, rp, nullptr);
        fn(pm, rm, nullptr);
        jac.col(j) = (rp - rm) / (2.0 * h);
    }
    return jac;
}

}  // namespace hbnspin::analysis
