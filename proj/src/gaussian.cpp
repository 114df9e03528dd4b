#include "irrev/gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace irrev {
namespace gaussian {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kCovSymTol = 1e-12;
constexpr double kUncertaintyTol = 1e-9;
constexpr double kRefinementTol = 1e-4;
constexpr double kStepBound = 0.01;

// Row sums are accumulated per row and combined serially, so serial and
// parallel evaluation produce bit-identical results for any thread count.
template <typename F>
double grid_sum(const PhaseSpaceGrid& grid, int n, QuadratureMode mode, F&& integrand) {
    const double l = grid.half_extent;
    const double h = 2.0 * l / (n - 1);
    std::vector<double> row_sums(n, 0.0);
    if (mode == QuadratureMode::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            const double x = -l + i * h;
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += integrand(x, -l + j * h);
            row_sums[i] = acc;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const double x = -l + i * h;
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += integrand(x, -l + j * h);
            row_sums[i] = acc;
        }
    }
    double total = 0.0;
    for (double r : row_sums) total += r;
    return total * h * h;
}

struct WignerEval {
    Eigen::Vector2d mean;
    Eigen::Matrix2d cov_inv;
    double norm;  // 1/(2 pi sqrt(det C))

    explicit WignerEval(const GaussianState& s)
        : mean(s.mean()),
          cov_inv(s.cov().inverse()),
          norm(1.0 / (2.0 * kPi * std::sqrt(s.cov().determinant()))) {}

    double density(double x, double p) const {
        const Eigen::Vector2d r(x - mean[0], p - mean[1]);
        return norm * std::exp(-0.5 * r.dot(cov_inv * r));
    }
    Eigen::Vector2d gradient_factor(double x, double p) const {
        // grad W = -W * C^{-1} (r - mu); this returns C^{-1}(r - mu).
        const Eigen::Vector2d r(x - mean[0], p - mean[1]);
        return cov_inv * r;
    }
};

}  // namespace

GaussianState GaussianState::validate(Eigen::Vector2d mean, Eigen::Matrix2d cov) {
    const double asym = std::abs(cov(0, 1) - cov(1, 0));
    if (asym > kCovSymTol) {
        throw ValidationError("covariance is not symmetric", asym);
    }
    cov(0, 1) = cov(1, 0) = 0.5 * (cov(0, 1) + cov(1, 0));
    const double det = cov.determinant();
    if (det < 0.25 - kUncertaintyTol) {
        throw ValidationError("covariance violates the uncertainty bound det >= 1/4", det);
    }
    if (cov(0, 0) <= 0.0 || cov(1, 1) <= 0.0 || det <= 0.0) {
        throw ValidationError("covariance is not positive definite", det);
    }
    return GaussianState(std::move(mean), std::move(cov));
}

GaussianState GaussianState::thermal(double nbar) {
    return validate(Eigen::Vector2d::Zero(), (nbar + 0.5) * Eigen::Matrix2d::Identity());
}

OscillatorBath OscillatorBath::validate(double gamma, double nbar, double omega, double beta) {
    if (!(gamma > 0.0)) throw ValidationError("bath damping rate must be positive", gamma);
    if (nbar < 0.0) throw ValidationError("bath occupation must be nonnegative", nbar);
    if (!(omega > 0.0)) throw ValidationError("oscillator frequency must be positive", omega);
    double b;
    if (beta < 0.0) {
        b = nbar > 0.0 ? std::log1p(1.0 / nbar) / omega : kInfinity;
    } else {
        b = beta;
        const double implied = std::isinf(b) ? 0.0 : 1.0 / std::expm1(b * omega);
        if (std::abs(implied - nbar) > 1e-9) {
            throw ValidationError("beta inconsistent with nbar = 1/(e^{beta omega}-1)",
                                  std::abs(implied - nbar));
        }
        if (nbar == 0.0 && !std::isinf(b)) {
            throw ValidationError("nbar = 0 requires infinite beta", b);
        }
    }
    return OscillatorBath{gamma, nbar, omega, b};
}

PhaseSpaceGrid PhaseSpaceGrid::validate(double half_extent, int points_per_axis,
                                        const GaussianState& state) {
    if (!(half_extent > 0.0)) throw ValidationError("grid half extent must be positive", half_extent);
    if (points_per_axis < 64) {
        throw ValidationError("grid needs at least 64 points per axis", points_per_axis);
    }
    const double offset = state.mean().cwiseAbs().maxCoeff();
    const double max_std =
        std::sqrt(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(state.cov()).eigenvalues()
                      .maxCoeff());
    const double required = offset + 6.0 * max_std;
    if (half_extent < required - 1e-12) {
        throw GridTooCoarse("grid half extent " + std::to_string(half_extent) +
                            " below required " + std::to_string(required));
    }
    return PhaseSpaceGrid{half_extent, points_per_axis};
}

PhaseSpaceGrid PhaseSpaceGrid::covering(const GaussianState& state, int points_per_axis) {
    const double offset = state.mean().cwiseAbs().maxCoeff();
    const double max_std =
        std::sqrt(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(state.cov()).eigenvalues()
                      .maxCoeff());
    return validate(std::ceil(offset + 6.0 * max_std), points_per_axis, state);
}

double wigner(const GaussianState& state, double x, double p) {
    return WignerEval(state).density(x, p);
}

double wigner_entropy(const GaussianState& state) {
    return std::log(2.0 * kPi * std::numbers::e * std::sqrt(state.cov().determinant()));
}

double wigner_entropy_quadrature(const GaussianState& state, const PhaseSpaceGrid& grid,
                                 QuadratureMode mode) {
    WignerEval w(state);
    return grid_sum(grid, grid.points_per_axis, mode, [&](double x, double p) {
        const double v = w.density(x, p);
        return v > 1e-300 ? -v * std::log(v) : 0.0;
    });
}

double mean_excitation(const GaussianState& state) {
    return 0.5 * (state.cov()(0, 0) + state.cov()(1, 1)) +
           0.5 * state.mean().squaredNorm() - 0.5;
}

Eigen::Matrix2d drift_matrix(const OscillatorBath& bath) {
    Eigen::Matrix2d a;
    a << -0.5 * bath.gamma, bath.omega, -bath.omega, -0.5 * bath.gamma;
    return a;
}

Eigen::Matrix2d diffusion_matrix(const OscillatorBath& bath) {
    return bath.gamma * (bath.nbar + 0.5) * Eigen::Matrix2d::Identity();
}

Eigen::Matrix2d cov_derivative(const Eigen::Matrix2d& cov, const OscillatorBath& bath) {
    const Eigen::Matrix2d a = drift_matrix(bath);
    return a * cov + cov * a.transpose() + diffusion_matrix(bath);
}

std::vector<GaussianState> evolve(const GaussianState& state, const OscillatorBath& bath,
                                  double dt, int steps) {
    if (steps < 0) throw ValidationError("step count must be nonnegative", steps);
    if (dt * std::max(bath.gamma, bath.omega) > kStepBound) {
        throw UnstableStep("dt * max(gamma, omega) exceeds " + std::to_string(kStepBound));
    }
    const Eigen::Matrix2d a = drift_matrix(bath);

    std::vector<GaussianState> out;
    out.reserve(steps + 1);
    out.push_back(state);
    Eigen::Vector2d mu = state.mean();
    Eigen::Matrix2d c = state.cov();
    for (int s = 0; s < steps; ++s) {
        // Classical RK4 on the exact linear flow.
        const Eigen::Vector2d k1 = a * mu;
        const Eigen::Vector2d k2 = a * (mu + 0.5 * dt * k1);
        const Eigen::Vector2d k3 = a * (mu + 0.5 * dt * k2);
        const Eigen::Vector2d k4 = a * (mu + dt * k3);
        const Eigen::Matrix2d m1 = cov_derivative(c, bath);
        const Eigen::Matrix2d m2 = cov_derivative(c + 0.5 * dt * m1, bath);
        const Eigen::Matrix2d m3 = cov_derivative(c + 0.5 * dt * m2, bath);
        const Eigen::Matrix2d m4 = cov_derivative(c + dt * m3, bath);
        mu += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        c += dt / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
        out.push_back(GaussianState::validate(mu, c));
    }
    return out;
}

double entropy_flux(const GaussianState& state, const OscillatorBath& bath) {
    return bath.gamma / (bath.nbar + 0.5) * (mean_excitation(state) - bath.nbar);
}

Complex current_j(const GaussianState& state, const OscillatorBath& bath, double x, double p) {
    WignerEval w(state);
    const double w_alpha = 2.0 * w.density(x, p);
    const Eigen::Vector2d g = w.gradient_factor(x, p);
    // d_{alpha*} = (d_x + i d_p)/sqrt(2) acting on the alpha-normalized W.
    const Complex d_astar = -w_alpha * Complex(g[0], g[1]) / std::sqrt(2.0);
    const Complex alpha = Complex(x, p) / std::sqrt(2.0);
    return 0.5 * bath.gamma * (alpha * w_alpha + (bath.nbar + 0.5) * d_astar);
}

double entropy_production_quadrature(const GaussianState& state, const OscillatorBath& bath,
                                     const PhaseSpaceGrid& grid, QuadratureMode mode) {
    WignerEval w(state);
    const double s = bath.nbar + 0.5;
    const double half_gamma = 0.5 * bath.gamma;
    const double sqrt2 = std::sqrt(2.0);
    const double integral =
        grid_sum(grid, grid.points_per_axis, mode, [&](double x, double p) {
            const double w_alpha = 2.0 * w.density(x, p);
            if (w_alpha < 1e-300) return 0.0;
            const Eigen::Vector2d g = w.gradient_factor(x, p);
            const Complex d_astar = -w_alpha * Complex(g[0], g[1]) / sqrt2;
            const Complex alpha = Complex(x, p) / sqrt2;
            const Complex j = half_gamma * (alpha * w_alpha + s * d_astar);
            return std::norm(j) / w_alpha;
        });
    // d^2alpha = dx dp / 2 under alpha = (x + ip)/sqrt(2).
    return 4.0 / (bath.gamma * s) * 0.5 * integral;
}

double entropy_production_rate(const GaussianState& state, const OscillatorBath& bath,
                               const PhaseSpaceGrid& grid, QuadratureMode mode) {
    const double coarse = entropy_production_quadrature(state, bath, grid, mode);
    PhaseSpaceGrid fine{grid.half_extent, 2 * grid.points_per_axis};
    const double refined = entropy_production_quadrature(state, bath, fine, mode);
    const double scale = std::max({std::abs(coarse), std::abs(refined), 1e-12});
    if (std::abs(refined - coarse) / scale > kRefinementTol) {
        throw GridTooCoarse("Pi quadrature moved by " +
                            std::to_string(std::abs(refined - coarse) / scale) +
                            " relative under refinement");
    }
    return refined;
}

double wigner_entropy_rate(const GaussianState& state, const OscillatorBath& bath) {
    // dS_W/dt = (1/2) d/dt ln det C = (1/2) tr(C^{-1} dC/dt).
    return 0.5 * (state.cov().inverse() * cov_derivative(state.cov(), bath)).trace();
}

std::pair<double, double> vn_rates(const GaussianState& state, const OscillatorBath& bath) {
    const double dn = mean_excitation(state) - bath.nbar;
    if (std::isinf(bath.beta)) {
        if (std::abs(dn) <= 1e-12) return {0.0, 0.0};
        return {kInfinity, kInfinity};
    }
    const double phi = bath.beta * bath.omega * bath.gamma * dn;
    // S_vN from the symplectic eigenvalue nu = sqrt(det C), differentiated
    // along the exact covariance flow.
    const double nu = std::sqrt(state.cov().determinant());
    const double dnu =
        0.5 * nu * (state.cov().inverse() * cov_derivative(state.cov(), bath)).trace();
    double ds_vn;
    if (nu - 0.5 < 1e-12) {
        ds_vn = std::abs(dnu) <= 1e-12 ? 0.0 : kInfinity;
    } else {
        ds_vn = std::log((nu + 0.5) / (nu - 0.5)) * dnu;
    }
    return {ds_vn + phi, phi};
}

RateReport rate_report(const GaussianState& state, const OscillatorBath& bath,
                       const PhaseSpaceGrid& grid, double time, QuadratureMode mode) {
    const auto [pi_vn, phi_vn] = vn_rates(state, bath);
    return RateReport{time,
                      entropy_production_rate(state, bath, grid, mode),
                      entropy_flux(state, bath),
                      wigner_entropy_rate(state, bath),
                      pi_vn,
                      phi_vn};
}

}  // namespace gaussian
}  // namespace irrev
