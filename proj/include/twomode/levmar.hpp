#ifndef TWOMODE_LEVMAR_HPP
#define TWOMODE_LEVMAR_HPP

#include <Eigen/Dense>
#include <functional>

namespace twomode {

struct LevMarOptions {
    int max_iterations = 300;
    double gradient_tol = 1e-10;   // max |J^T r|
    double step_tol = 1e-12;       // relative parameter step
    double lambda_init = 1e-3;
};

struct LevMarResult {
    Eigen::VectorXd params;
    double sse = 0.0;
    bool converged = false;
    int iterations = 0;
    // sigma^2 (J^T J)^-1 with sigma^2 = sse / (n_res - n_par); valid only
    // when n_res > n_par and J^T J is invertible, else zero-sized.
    Eigen::MatrixXd covariance;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Damped Gauss-Newton with a forward-difference Jacobian. Throws FitError on
// a non-finite residual at the initial point.
LevMarResult levmar_fit(const ResidualFn& residuals, const Eigen::VectorXd& init,
                        const LevMarOptions& opts = {});

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residuals, const Eigen::VectorXd& p);

}  // namespace twomode

#endif
