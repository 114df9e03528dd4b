#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <vector>

#include "irrev/errors.hpp"

namespace irrev {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Validation tolerance for Hermiticity / trace / positivity.
inline constexpr double kValidationTol = 1e-10;
// Stricter zero test used for support questions (logs, powers).
inline constexpr double kSupportTol = 1e-12;
// Dense spectral routines only; desk-scale exactness target.
inline constexpr int kMaxDim = 64;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Eigen-decomposition of a Hermitian matrix with orthonormal eigenvectors.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;  // ascending
    Matrix eigenvectors;          // columns

    explicit SpectralDecomposition(const Matrix& hermitian);
    Matrix reconstruct() const;
};

/// A validated d x d density operator: Hermitian, unit trace, positive
/// semidefinite (all within kValidationTol), d <= kMaxDim.
class DensityOperator {
  public:
    static DensityOperator validate(const Matrix& m);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Matrix& matrix() const { return mat_; }
    const SpectralDecomposition& spectrum() const { return spectrum_; }

  private:
    explicit DensityOperator(Matrix m);
    Matrix mat_;
    SpectralDecomposition spectrum_;
};

/// Complete family of orthogonal projectors with distinct real outcome labels.
class ProjectiveObservable {
  public:
    struct Outcome {
        double label;
        Matrix projector;
    };

    static ProjectiveObservable validate(std::vector<Outcome> outcomes);
    /// Rank-1 projectors onto the columns of a unitary, labels 0,1,...,d-1.
    static ProjectiveObservable from_basis(const Matrix& unitary);
    static ProjectiveObservable computational(int dim);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(outcomes_.size()); }
    const Outcome& outcome(int i) const { return outcomes_[i]; }
    const std::vector<Outcome>& outcomes() const { return outcomes_; }
    /// Sum of label * projector.
    Matrix observable_matrix() const;

  private:
    ProjectiveObservable(int dim, std::vector<Outcome> outcomes)
        : dim_(dim), outcomes_(std::move(outcomes)) {}
    int dim_;
    std::vector<Outcome> outcomes_;
};

/// rho^z = sum_j lambda_j^z |v_j><v_j|, with 0^z = 0 for Re(z) > 0.
/// Eigenvalues below kSupportTol count as zero; throws SingularPower when a
/// zero eigenvalue meets Re(z) <= 0.
Matrix matrix_power(const DensityOperator& rho, Complex z);

/// -sum lambda ln lambda, in nats.
double von_neumann_entropy(const DensityOperator& rho);

/// Tr[rho_a (ln rho_a - ln rho_b)] in nats; +infinity when supp(rho_a) is not
/// contained in supp(rho_b).
double relative_entropy(const DensityOperator& rho_a, const DensityOperator& rho_b);

}  // namespace irrev
