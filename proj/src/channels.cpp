#include "irrev/channels.hpp"

#include <cmath>
#include <numbers>

namespace irrev {

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

void check_unitary(const Matrix& v, double tol) {
    const int d = static_cast<int>(v.rows());
    if (v.rows() != v.cols()) throw DimMismatch("unitary must be square");
    const double dev = max_abs(v.adjoint() * v - Matrix::Identity(d, d));
    if (dev > tol) {
        throw ValidationError("matrix is not unitary: max|V^dag V - 1| = " +
                                  std::to_string(dev),
                              dev);
    }
}

Matrix hermitian_exp(const Matrix& h, double t) {
    // exp(-i h t) via the spectral theorem.
    SpectralDecomposition sd(h);
    Vector phases(h.rows());
    for (int j = 0; j < h.rows(); ++j) {
        phases[j] = std::exp(Complex(0.0, -sd.eigenvalues[j] * t));
    }
    return sd.eigenvectors * phases.asDiagonal() * sd.eigenvectors.adjoint();
}

}  // namespace

TimeReversal TimeReversal::validate(Matrix basis_unitary) {
    check_unitary(basis_unitary, kValidationTol);
    return TimeReversal(std::move(basis_unitary));
}

TimeReversal TimeReversal::conjugation(int dim) {
    return TimeReversal(Matrix::Identity(dim, dim));
}

Matrix TimeReversal::conjugate_operator(const Matrix& a) const {
    if (a.rows() != v_.rows() || a.cols() != v_.cols()) {
        throw DimMismatch("time reversal: operator dimension mismatch");
    }
    return v_ * a.conjugate() * v_.adjoint();
}

QuantumChannel QuantumChannel::validate(std::vector<Matrix> kraus_ops) {
    if (kraus_ops.empty()) throw ValidationError("channel needs at least one Kraus operator", 0.0);
    const int dim = static_cast<int>(kraus_ops.front().rows());
    Matrix tp = Matrix::Zero(dim, dim);
    Matrix un = Matrix::Zero(dim, dim);
    for (const auto& e : kraus_ops) {
        if (e.rows() != dim || e.cols() != dim) {
            throw DimMismatch("Kraus operator dimension mismatch");
        }
        tp += e.adjoint() * e;
        un += e * e.adjoint();
    }
    const double tp_dev = max_abs(tp - Matrix::Identity(dim, dim));
    if (tp_dev > kChannelTol) {
        throw ValidationError("channel is not trace-preserving: max|sum E^dag E - 1| = " +
                                  std::to_string(tp_dev),
                              tp_dev);
    }
    const bool unital = max_abs(un - Matrix::Identity(dim, dim)) <= kChannelTol;
    return QuantumChannel(dim, std::move(kraus_ops), unital);
}

QuantumChannel QuantumChannel::identity(int dim) {
    return validate({Matrix::Identity(dim, dim)});
}

QuantumChannel QuantumChannel::from_unitary(const Matrix& u) {
    check_unitary(u, kChannelTol);
    return validate({u});
}

QuantumChannel QuantumChannel::dephasing(const ProjectiveObservable& obs) {
    std::vector<Matrix> kraus;
    kraus.reserve(obs.size());
    for (const auto& o : obs.outcomes()) kraus.push_back(o.projector);
    return validate(std::move(kraus));
}

QuantumChannel QuantumChannel::depolarizing(int dim, double p) {
    if (p < 0.0 || p > 1.0) throw ValidationError("depolarizing strength outside [0, 1]", p);
    // (1-p) rho + p 1/d, realized by a discrete Weyl twirl.
    const Complex omega = std::exp(Complex(0.0, 2.0 * std::numbers::pi / dim));
    Matrix shift = Matrix::Zero(dim, dim);
    Matrix clock = Matrix::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        shift((j + 1) % dim, j) = 1.0;
        clock(j, j) = std::pow(omega, j);
    }
    std::vector<Matrix> kraus;
    kraus.push_back(std::sqrt(1.0 - p + p / (dim * dim)) * Matrix::Identity(dim, dim));
    const double w = std::sqrt(p) / dim;
    Matrix xa = Matrix::Identity(dim, dim);
    for (int a = 0; a < dim; ++a) {
        Matrix op = xa;
        for (int b = 0; b < dim; ++b) {
            if (a != 0 || b != 0) kraus.push_back(w * op);
            op = op * clock;
        }
        xa = shift * xa;
    }
    return validate(std::move(kraus));
}

HamiltonianSchedule HamiltonianSchedule::validate(std::vector<HamiltonianSegment> segments) {
    if (segments.empty()) throw ValidationError("schedule needs at least one segment", 0.0);
    const int dim = static_cast<int>(segments.front().hamiltonian.rows());
    for (const auto& seg : segments) {
        const Matrix& h = seg.hamiltonian;
        if (h.rows() != dim || h.cols() != dim) {
            throw DimMismatch("schedule segment dimension mismatch");
        }
        const double dev = max_abs(h - h.adjoint());
        if (dev > kValidationTol) {
            throw NotHermitian("schedule Hamiltonian is not Hermitian", dev);
        }
        if (!(seg.duration > 0.0)) {
            throw ValidationError("segment duration must be positive", seg.duration);
        }
    }
    return HamiltonianSchedule(std::move(segments));
}

Matrix apply_raw(const QuantumChannel& channel, const Matrix& a) {
    if (a.rows() != channel.dim() || a.cols() != channel.dim()) {
        throw DimMismatch("apply: state dimension mismatch");
    }
    Matrix out = Matrix::Zero(channel.dim(), channel.dim());
    for (const auto& e : channel.kraus_ops()) out += e * a * e.adjoint();
    return out;
}

DensityOperator apply(const QuantumChannel& channel, const DensityOperator& rho) {
    return DensityOperator::validate(apply_raw(channel, rho.matrix()));
}

QuantumChannel unitary_from_schedule(const HamiltonianSchedule& schedule) {
    const int d = schedule.dim();
    Matrix u = Matrix::Identity(d, d);
    for (const auto& seg : schedule.segments()) {
        u = hermitian_exp(seg.hamiltonian, seg.duration) * u;
    }
    return QuantumChannel::from_unitary(u);
}

QuantumChannel time_reversed_channel(const QuantumChannel& channel, const TimeReversal& rev) {
    if (channel.dim() != rev.dim()) throw DimMismatch("time reversal dimension mismatch");
    if (!channel.unital()) {
        throw NotUnital("time_reversed_channel requires a unital channel");
    }
    std::vector<Matrix> kraus;
    kraus.reserve(channel.kraus_ops().size());
    for (const auto& e : channel.kraus_ops()) {
        kraus.push_back(rev.conjugate_operator(e.adjoint()));
    }
    return QuantumChannel::validate(std::move(kraus));
}

DensityOperator reverse_state(const DensityOperator& rho, const TimeReversal& rev) {
    return DensityOperator::validate(rev.conjugate_operator(rho.matrix()));
}

ProjectiveObservable reverse_observable(const ProjectiveObservable& obs, const TimeReversal& rev) {
    std::vector<ProjectiveObservable::Outcome> outcomes;
    outcomes.reserve(obs.size());
    for (const auto& o : obs.outcomes()) {
        outcomes.push_back({o.label, rev.conjugate_operator(o.projector)});
    }
    return ProjectiveObservable::validate(std::move(outcomes));
}

bool channels_equal(const QuantumChannel& a, const QuantumChannel& b, double tol) {
    if (a.dim() != b.dim()) return false;
    const int d = a.dim();
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Matrix unit = Matrix::Zero(d, d);
            unit(i, j) = 1.0;
            if (max_abs(apply_raw(a, unit) - apply_raw(b, unit)) > tol) return false;
        }
    }
    return true;
}

}  // namespace irrev
