#include "nlir/lm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "nlir/error.hpp"

namespace nlir::retrieval {

namespace {

struct Problem {
    const ResidualFn& fn;
    std::size_t m;
    int evaluations = 0;

    Eigen::VectorXd residual(const Eigen::VectorXd& p) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(m));
        fn(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
           std::span<double>(r.data(), m));
        ++evaluations;
        return r;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& p, const std::vector<double>& typical) {
        const double rel = std::cbrt(std::numeric_limits<double>::epsilon());
        Eigen::MatrixXd j(static_cast<Eigen::Index>(m), p.size());
        Eigen::VectorXd q = p;
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            const double h = rel * std::max(std::abs(p[k]), typical[static_cast<std::size_t>(k)]);
            q[k] = p[k] + h;
            const auto up = residual(q);
            q[k] = p[k] - h;
            const auto down = residual(q);
            q[k] = p[k];
            j.col(k) = (up - down) / (2.0 * h);
        }
        return j;
    }
};

double half_norm2(const Eigen::VectorXd& r) { return 0.5 * r.squaredNorm(); }

/// Pseudo-inverse of a symmetric positive semi-definite matrix. The matrix is first
/// equilibrated to unit diagonal so that parameters of very different magnitude do
/// not fall under the eigenvalue cut.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, bool& singular) {
    Eigen::VectorXd s = a.diagonal().cwiseMax(0.0).cwiseSqrt();
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (!(s[k] > 0.0)) s[k] = 1.0;
    }
    const Eigen::VectorXd si = s.cwiseInverse();
    const Eigen::MatrixXd scaled = si.asDiagonal() * a * si.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
    const auto& w = eig.eigenvalues();
    const double wmax = w.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (!(w[i] > wmax * 1e-13)) {
            singular = true;
            inv[i] = 0.0;
        } else {
            inv[i] = 1.0 / w[i];
        }
    }
    return si.asDiagonal() * (eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose()) * si.asDiagonal();
}

Eigen::VectorXd solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, bool& singular) {
    return pseudo_inverse(a, singular) * b;
}

}  // namespace

double two_sided_normal_quantile(double level) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * level);
}

LmResult levenberg_marquardt(const ResidualFn& fn, std::vector<double> p0, std::size_t m, const LmOptions& options) {
    const std::size_t n = p0.size();
    if (n == 0) throw DomainError("levenberg_marquardt: no parameters");
    for (double v : p0) {
        if (!std::isfinite(v)) throw DomainError("levenberg_marquardt: non-finite starting point");
    }
    std::vector<double> typical = options.typical;
    if (typical.empty()) typical.assign(n, 1.0);
    if (typical.size() != n) throw DomainError("levenberg_marquardt: typical scale has the wrong length");

    Problem prob{fn, m};
    LmResult out;
    out.confidence = options.confidence;
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(p0.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd r = prob.residual(p);
    if (!r.allFinite()) throw DomainError("levenberg_marquardt: residual is not finite at the starting point");
    double cost = half_norm2(r);
    double mu = 0.0;
    bool converged = false;

    for (int iter = 0; iter < options.max_iterations && !converged; ++iter) {
        if (cost == 0.0) {
            converged = true;
            break;
        }
        const Eigen::MatrixXd j = prob.jacobian(p, typical);
        const Eigen::MatrixXd a = j.transpose() * j;
        const Eigen::VectorXd g = j.transpose() * r;
        if (g.cwiseAbs().maxCoeff() == 0.0) {
            converged = true;
            break;
        }
        Eigen::VectorXd diag = a.diagonal();
        const double dmax = std::max(diag.maxCoeff(), std::numeric_limits<double>::min());
        for (Eigen::Index k = 0; k < diag.size(); ++k) diag[k] = std::max(diag[k], 1e-12 * dmax);

        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd damped = a;
            damped.diagonal() += mu * diag;
            bool singular = false;
            const Eigen::VectorXd step = solve(damped, -g, singular);
            if (singular && !out.singular) {
                out.singular = true;
                out.warnings.push_back("singular normal matrix; using a damped pseudo-inverse");
            }
            double rel_step = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const auto kk = static_cast<Eigen::Index>(k);
                rel_step = std::max(rel_step, std::abs(step[kk]) / (std::abs(p[kk]) + typical[k]));
            }
            if (!std::isfinite(rel_step)) {
                mu = mu == 0.0 ? 1e-3 : mu * 10.0;
                if (mu > 1e20) break;
                continue;
            }
            if (rel_step < options.step_tolerance) {
                converged = true;
                break;
            }
            const Eigen::VectorXd trial = p + step;
            const Eigen::VectorXd r_trial = prob.residual(trial);
            const double cost_trial = r_trial.allFinite() ? half_norm2(r_trial) : std::numeric_limits<double>::infinity();
            if (cost_trial < cost) {
                const double drop = (cost - cost_trial) / cost;
                p = trial;
                r = r_trial;
                cost = cost_trial;
                ++out.iterations;
                accepted = true;
                mu = mu < 1e-6 ? 0.0 : mu / 10.0;
                if (drop < options.cost_tolerance) converged = true;
            } else {
                mu = mu == 0.0 ? 1e-3 : mu * 10.0;
                if (mu > 1e20) {
                    // No descent direction left at machine precision: a stationary point.
                    converged = true;
                    break;
                }
            }
        }
    }

    out.converged = converged;
    if (!converged) out.warnings.push_back("maximum iterations reached without convergence");
    out.params.assign(p.data(), p.data() + n);
    out.residual_norm = r.norm();
    const double dof = static_cast<double>(m > n ? m - n : 1);
    out.reduced_chi2 = r.squaredNorm() / dof;

    const Eigen::MatrixXd j = prob.jacobian(p, typical);
    bool singular = false;
    out.covariance = pseudo_inverse(j.transpose() * j, singular) * out.reduced_chi2;
    if (singular && !out.singular) {
        out.singular = true;
        out.warnings.push_back("singular normal matrix at the solution; covariance uses a pseudo-inverse");
    }
    const double z = two_sided_normal_quantile(options.confidence);
    out.sigma.resize(n);
    out.ci_halfwidth.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        out.sigma[k] = std::sqrt(std::max(out.covariance(kk, kk), 0.0));
        out.ci_halfwidth[k] = z * out.sigma[k];
    }
    out.evaluations = prob.evaluations;
    return out;
}

}  // namespace nlir::retrieval
