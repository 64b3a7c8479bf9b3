#include "twomode/levmar.hpp"

#include <cmath>

#include "twomode/errors.hpp"

namespace twomode {

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residuals, const Eigen::VectorXd& p) {
    const Eigen::VectorXd r0 = residuals(p);
    Eigen::MatrixXd jac(r0.size(), p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        const double h = 1e-7 * std::max(1.0, std::abs(p(j)));
        Eigen::VectorXd pp = p;
        pp(j) += h;
        jac.col(j) = (residuals(pp) - r0) / h;
    }
    return jac;
}

LevMarResult levmar_fit(const ResidualFn& residuals, const Eigen::VectorXd& init,
                        const LevMarOptions& opts) {
    Eigen::VectorXd p = init;
    Eigen::VectorXd r = residuals(p);
    if (!r.allFinite()) throw FitError("residuals are non-finite at the initial point");
    double sse = r.squaredNorm();
    double lambda = opts.lambda_init;

    LevMarResult result;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        const Eigen::MatrixXd jac = numeric_jacobian(residuals, p);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;
        if (jtr.lpNorm<Eigen::Infinity>() < opts.gradient_tol) {
            result.converged = true;
            break;
        }
        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal().array() += lambda * (jtj.diagonal().array().abs() + 1e-12);
            const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
            const Eigen::VectorXd p_try = p + step;
            const Eigen::VectorXd r_try = residuals(p_try);
            const double sse_try = r_try.allFinite() ? r_try.squaredNorm()
                                                     : std::numeric_limits<double>::infinity();
            if (sse_try < sse) {
                const double rel_step =
                    step.norm() / std::max(1.0, p.norm());
                p = p_try;
                r = r_try;
                const double improvement = sse - sse_try;
                sse = sse_try;
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                if (rel_step < opts.step_tol || improvement < opts.step_tol * sse) {
                    result.converged = true;
                }
                break;
            }
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
        if (!accepted || result.converged) {
            result.converged = result.converged || !accepted;  // stalled counts as done
            break;
        }
    }

    result.params = p;
    result.sse = sse;
    result.iterations = iter;

    const Eigen::Index n_res = r.size();
    const Eigen::Index n_par = p.size();
    if (n_res > n_par) {
        const Eigen::MatrixXd jac = numeric_jacobian(residuals, p);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
        if (lu.isInvertible()) {
            const double sigma2 = sse / double(n_res - n_par);
            result.covariance = sigma2 * lu.inverse();
        }
    }
    return result;
}

}  // namespace twomode
