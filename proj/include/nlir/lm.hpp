#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nlir::retrieval {

struct LmOptions {
    int max_iterations = 200;
    /// Converged when every |step_j| / (|p_j| + typical_j) falls below this.
    double step_tolerance = 1e-8;
    /// Converged when an accepted step lowers the cost by less than this fraction.
    double cost_tolerance = 1e-10;
    double confidence = 0.95;
    /// Typical parameter magnitudes; sets finite-difference steps and the step test.
    /// Defaults to 1 for every parameter when empty.
    std::vector<double> typical;
};

struct LmResult {
    std::vector<double> params;
    Eigen::MatrixXd covariance;
    std::vector<double> sigma;
    /// Half-width of the linearised confidence interval at `confidence`.
    std::vector<double> ci_halfwidth;
    double residual_norm = 0.0;
    /// Sum of squared residuals over degrees of freedom (s^2).
    double reduced_chi2 = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    bool singular = false;
    double confidence = 0.95;
    std::vector<std::string> warnings;
};

/// Fills `residuals` (fixed length) for the given parameters.
using ResidualFn = std::function<void(std::span<const double> params, std::span<double> residuals)>;

/// Damped Gauss-Newton (Marquardt diagonal scaling) with central-difference
/// Jacobians. The undamped step is tried first and damping is only raised when a
/// step fails to lower the cost. Covariance is (J^T J)^-1 s^2 at the returned point.
LmResult levenberg_marquardt(const ResidualFn& residual, std::vector<double> p0, std::size_t residual_count,
                             const LmOptions& options = {});

/// z such that P(|Z| <= z) = level for a standard normal Z.
double two_sided_normal_quantile(double level);

}  // namespace nlir::retrieval
