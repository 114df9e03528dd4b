#include "irrev/hilbert.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace irrev {

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Eigenvalues in [-kValidationTol, 0) are PSD noise; clip to 0 before logs
// and powers.
double clip_eigenvalue(double lambda) {
    return (lambda < 0.0 && lambda >= -kValidationTol) ? 0.0 : lambda;
}

}  // namespace

SpectralDecomposition::SpectralDecomposition(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
    if (solver.info() != Eigen::Success) {
        throw Error("eigen-decomposition failed to converge");
    }
    eigenvalues = solver.eigenvalues();
    eigenvectors = solver.eigenvectors();
}

Matrix SpectralDecomposition::reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
           eigenvectors.adjoint();
}

DensityOperator::DensityOperator(Matrix m) : mat_(std::move(m)), spectrum_(mat_) {}

DensityOperator DensityOperator::validate(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw DimMismatch("density matrix must be square");
    }
    if (m.rows() < 1 || m.rows() > kMaxDim) {
        std::ostringstream os;
        os << "dimension " << m.rows() << " outside [1, " << kMaxDim << "]";
        throw DimMismatch(os.str());
    }
    const double herm = max_abs(m - m.adjoint());
    if (herm > kValidationTol) {
        throw NotHermitian("NotHermitian: max|rho - rho^dag| = " + std::to_string(herm), herm);
    }
    const double trdev = std::abs(m.trace() - Complex(1.0, 0.0));
    if (trdev > kValidationTol) {
        throw NotUnitTrace("NotUnitTrace: |Tr rho - 1| = " + std::to_string(trdev), trdev);
    }
    // Symmetrize before the eigensolve so the stored spectrum is exact for
    // the stored matrix.
    Matrix sym = 0.5 * (m + m.adjoint());
    DensityOperator rho(std::move(sym));
    const double min_eig = rho.spectrum_.eigenvalues.minCoeff();
    if (min_eig < -kValidationTol) {
        throw NotPositive("NotPositive: smallest eigenvalue = " + std::to_string(min_eig),
                          -min_eig);
    }
    return rho;
}

ProjectiveObservable ProjectiveObservable::validate(std::vector<Outcome> outcomes) {
    if (outcomes.empty()) {
        throw DimMismatch("observable needs at least one outcome");
    }
    const int dim = static_cast<int>(outcomes.front().projector.rows());
    std::set<double> labels;
    Matrix sum = Matrix::Zero(dim, dim);
    for (const auto& o : outcomes) {
        const Matrix& p = o.projector;
        if (p.rows() != dim || p.cols() != dim) {
            throw DimMismatch("projector dimension mismatch");
        }
        if (max_abs(p - p.adjoint()) > kValidationTol) {
            throw NotHermitian("projector is not Hermitian", max_abs(p - p.adjoint()));
        }
        const double idem = max_abs(p * p - p);
        if (idem > kValidationTol) {
            throw ValidationError("projector is not idempotent: max|P^2 - P| = " +
                                      std::to_string(idem),
                                  idem);
        }
        if (!labels.insert(o.label).second) {
            throw ValidationError("duplicate outcome label " + std::to_string(o.label), 0.0);
        }
        sum += p;
    }
    for (size_t i = 0; i < outcomes.size(); ++i) {
        for (size_t j = i + 1; j < outcomes.size(); ++j) {
            const double cross = max_abs(outcomes[i].projector * outcomes[j].projector);
            if (cross > kValidationTol) {
                throw ValidationError("projectors are not mutually orthogonal", cross);
            }
        }
    }
    const double comp = max_abs(sum - Matrix::Identity(dim, dim));
    if (comp > kValidationTol) {
        throw ValidationError("projector family incomplete: max|sum P - 1| = " +
                                  std::to_string(comp),
                              comp);
    }
    return ProjectiveObservable(dim, std::move(outcomes));
}

ProjectiveObservable ProjectiveObservable::from_basis(const Matrix& unitary) {
    const int dim = static_cast<int>(unitary.rows());
    std::vector<Outcome> outcomes;
    outcomes.reserve(dim);
    for (int i = 0; i < dim; ++i) {
        Vector v = unitary.col(i);
        outcomes.push_back({static_cast<double>(i), v * v.adjoint()});
    }
    return validate(std::move(outcomes));
}

ProjectiveObservable ProjectiveObservable::computational(int dim) {
    return from_basis(Matrix::Identity(dim, dim));
}

Matrix ProjectiveObservable::observable_matrix() const {
    Matrix m = Matrix::Zero(dim_, dim_);
    for (const auto& o : outcomes_) m += o.label * o.projector;
    return m;
}

Matrix matrix_power(const DensityOperator& rho, Complex z) {
    const auto& sd = rho.spectrum();
    const int d = rho.dim();
    Vector powers(d);
    for (int j = 0; j < d; ++j) {
        const double lambda = clip_eigenvalue(sd.eigenvalues[j]);
        if (lambda < kSupportTol) {
            if (z.real() <= 0.0) {
                throw SingularPower("SingularPower: zero eigenvalue with Re(z) <= 0");
            }
            powers[j] = 0.0;
        } else {
            powers[j] = std::exp(z * std::log(lambda));
        }
    }
    return sd.eigenvectors * powers.asDiagonal() * sd.eigenvectors.adjoint();
}

double von_neumann_entropy(const DensityOperator& rho) {
    double s = 0.0;
    for (int j = 0; j < rho.dim(); ++j) {
        const double lambda = clip_eigenvalue(rho.spectrum().eigenvalues[j]);
        if (lambda > 0.0) s -= lambda * std::log(lambda);
    }
    return std::max(s, 0.0);
}

double relative_entropy(const DensityOperator& rho_a, const DensityOperator& rho_b) {
    if (rho_a.dim() != rho_b.dim()) {
        throw DimMismatch("relative_entropy: dimension mismatch");
    }
    const auto& sb = rho_b.spectrum();
    // Tr[rho_a ln rho_b] in rho_b's eigenbasis; any rho_a weight on the
    // kernel of rho_b means the divergence is infinite.
    double cross = 0.0;
    for (int j = 0; j < rho_b.dim(); ++j) {
        const double mu = clip_eigenvalue(sb.eigenvalues[j]);
        const Vector w = sb.eigenvectors.col(j);
        const double weight =
            std::max(0.0, std::real((w.adjoint() * rho_a.matrix() * w)(0, 0)));
        if (mu < kSupportTol) {
            if (weight > kSupportTol) return kInfinity;
            continue;
        }
        cross += weight * std::log(mu);
    }
    return std::max(0.0, -von_neumann_entropy(rho_a) - cross);
}

}  // namespace irrev
