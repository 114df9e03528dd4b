#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "irrev/errors.hpp"

namespace irrev {
namespace gaussian {

using Complex = std::complex<double>;

// Conventions: hbar = 1, k_B = 1, alpha = (x + i p)/sqrt(2), vacuum
// covariance = I/2. wigner() is normalized over dx dp; the alpha-plane
// density used by the current and the Pi integral is 2 * wigner() with
// measure d^2alpha = dx dp / 2.

/// Single bosonic mode: quadrature means and 2x2 covariance in (x, p).
class GaussianState {
  public:
    static GaussianState validate(Eigen::Vector2d mean, Eigen::Matrix2d cov);
    static GaussianState thermal(double nbar);
    static GaussianState vacuum() { return thermal(0.0); }

    const Eigen::Vector2d& mean() const { return mean_; }
    const Eigen::Matrix2d& cov() const { return cov_; }
    Complex alpha() const { return Complex(mean_[0], mean_[1]) / std::sqrt(2.0); }

  private:
    GaussianState(Eigen::Vector2d mean, Eigen::Matrix2d cov)
        : mean_(std::move(mean)), cov_(std::move(cov)) {}
    Eigen::Vector2d mean_;
    Eigen::Matrix2d cov_;
};

/// Thermal damping bath: rates (gamma, omega), occupation nbar, and the
/// consistent inverse temperature (infinite for nbar = 0).
struct OscillatorBath {
    double gamma;
    double nbar;
    double omega;
    double beta;  // +inf marks zero temperature

    static OscillatorBath validate(double gamma, double nbar, double omega,
                                   double beta = -1.0);  // beta < 0: derive from nbar
};

struct PhaseSpaceGrid {
    double half_extent;
    int points_per_axis;

    /// Checks the grid captures the state's Gaussian mass:
    /// L >= mean offset + 6 * max standard deviation, n >= 64.
    static PhaseSpaceGrid validate(double half_extent, int points_per_axis,
                                   const GaussianState& state);
    /// Smallest admissible grid for a state (round L up to integer).
    static PhaseSpaceGrid covering(const GaussianState& state, int points_per_axis = 256);
};

struct RateReport {
    double time;
    double pi_wigner;
    double phi_wigner;
    double ds_dt;
    double pi_vn;   // +inf marker at zero temperature off equilibrium
    double phi_vn;  //
};

enum class QuadratureMode { Serial, Parallel };

/// Wigner density at (x, p); bivariate Gaussian, integrates to 1 over dx dp.
double wigner(const GaussianState& state, double x, double p);

/// S_W = ln(2 pi e sqrt(det cov)), nats.
double wigner_entropy(const GaussianState& state);

/// Quadrature evaluation of -int W ln W; test oracle for the closed form.
double wigner_entropy_quadrature(const GaussianState& state, const PhaseSpaceGrid& grid,
                                 QuadratureMode mode = QuadratureMode::Parallel);

/// <N> = (cov_xx + cov_pp)/2 + |alpha|^2 - 1/2.
double mean_excitation(const GaussianState& state);

/// RK4 trajectory of (mean, cov) under drift A = Omega - (gamma/2) I and
/// diffusion D = gamma (nbar + 1/2) I. Returns steps+1 states including the
/// initial one. Requires dt * max(gamma, omega) <= 0.01.
std::vector<GaussianState> evolve(const GaussianState& state, const OscillatorBath& bath,
                                  double dt, int steps);

/// Phi = gamma/(nbar + 1/2) (<N> - nbar); finite for all nbar >= 0.
double entropy_flux(const GaussianState& state, const OscillatorBath& bath);

/// Dissipator current J(W) = (gamma/2)[alpha W + (nbar+1/2) d_{alpha*} W],
/// evaluated on the alpha-normalized Wigner density.
Complex current_j(const GaussianState& state, const OscillatorBath& bath, double x, double p);

/// Pi = 4/(gamma (nbar+1/2)) int d^2alpha |J|^2 / W by trapezoidal grid
/// quadrature; evaluated at n and 2n points per axis, throwing GridTooCoarse
/// when the refinement moves the value by more than 1e-4 relative.
double entropy_production_rate(const GaussianState& state, const OscillatorBath& bath,
                               const PhaseSpaceGrid& grid,
                               QuadratureMode mode = QuadratureMode::Parallel);

/// Single-resolution quadrature of the Pi integrand (no refinement check).
double entropy_production_quadrature(const GaussianState& state, const OscillatorBath& bath,
                                     const PhaseSpaceGrid& grid,
                                     QuadratureMode mode = QuadratureMode::Parallel);

/// Exact dS_W/dt along the covariance flow: (1/2) tr(C^{-1} dC/dt).
double wigner_entropy_rate(const GaussianState& state, const OscillatorBath& bath);

/// Von-Neumann-based rates (Clausius flux and -d/dt S(rho||rho_eq)); both
/// are +inf at zero temperature whenever <N> != nbar.
std::pair<double, double> vn_rates(const GaussianState& state, const OscillatorBath& bath);

/// Full report at one instant.
RateReport rate_report(const GaussianState& state, const OscillatorBath& bath,
                       const PhaseSpaceGrid& grid, double time = 0.0,
                       QuadratureMode mode = QuadratureMode::Parallel);

/// Drift/diffusion pieces of the covariance flow (exposed for oracles).
Eigen::Matrix2d drift_matrix(const OscillatorBath& bath);
Eigen::Matrix2d diffusion_matrix(const OscillatorBath& bath);
Eigen::Matrix2d cov_derivative(const Eigen::Matrix2d& cov, const OscillatorBath& bath);

}  // namespace gaussian
}  // namespace irrev
