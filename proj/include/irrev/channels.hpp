#pragma once

#include <vector>

#include "irrev/hilbert.hpp"

namespace irrev {

inline constexpr double kChannelTol = 1e-9;

/// Antiunitary time reversal Theta = V o conj, with V unitary.
class TimeReversal {
  public:
    static TimeReversal validate(Matrix basis_unitary);
    /// Plain complex conjugation in the computational basis (V = identity).
    static TimeReversal conjugation(int dim);

    int dim() const { return static_cast<int>(v_.rows()); }
    const Matrix& basis_unitary() const { return v_; }
    /// Theta A Theta^dag = V conj(A) V^dag for operators A.
    Matrix conjugate_operator(const Matrix& a) const;

  private:
    explicit TimeReversal(Matrix v) : v_(std::move(v)) {}
    Matrix v_;
};

/// CPTP map in Kraus form. Trace preservation is enforced at construction;
/// the unital flag is computed once and cached.
class QuantumChannel {
  public:
    static QuantumChannel validate(std::vector<Matrix> kraus_ops);
    static QuantumChannel identity(int dim);
    static QuantumChannel from_unitary(const Matrix& u);
    /// Kraus family {P_i} of a complete projector set (full dephasing).
    static QuantumChannel dephasing(const ProjectiveObservable& obs);
    /// Qubit-per-level depolarizing mix: (1-p) id + p * (discrete Weyl twirl).
    static QuantumChannel depolarizing(int dim, double p);

    int dim() const { return dim_; }
    bool unital() const { return unital_; }
    const std::vector<Matrix>& kraus_ops() const { return kraus_; }

  private:
    QuantumChannel(int dim, std::vector<Matrix> kraus, bool unital)
        : dim_(dim), kraus_(std::move(kraus)), unital_(unital) {}
    int dim_;
    std::vector<Matrix> kraus_;
    bool unital_;
};

/// Piecewise-constant Hamiltonian schedule (hbar = 1).
struct HamiltonianSegment {
    Matrix hamiltonian;
    double duration;
};

class HamiltonianSchedule {
  public:
    static HamiltonianSchedule validate(std::vector<HamiltonianSegment> segments);
    const std::vector<HamiltonianSegment>& segments() const { return segments_; }
    int dim() const { return static_cast<int>(segments_.front().hamiltonian.rows()); }

  private:
    explicit HamiltonianSchedule(std::vector<HamiltonianSegment> s)
        : segments_(std::move(s)) {}
    std::vector<HamiltonianSegment> segments_;
};

/// sum_u E_u rho E_u^dag, revalidated.
DensityOperator apply(const QuantumChannel& channel, const DensityOperator& rho);

/// Raw Kraus sum on an arbitrary matrix (no density-operator validation).
Matrix apply_raw(const QuantumChannel& channel, const Matrix& a);

/// U = exp(-i H_n t_n) ... exp(-i H_1 t_1), time-ordered right to left.
QuantumChannel unitary_from_schedule(const HamiltonianSchedule& schedule);

/// Kraus family E~_u = Theta E_u^dag Theta^dag; unital channels only.
QuantumChannel time_reversed_channel(const QuantumChannel& channel, const TimeReversal& rev);

/// rho~ = Theta rho Theta^dag.
DensityOperator reverse_state(const DensityOperator& rho, const TimeReversal& rev);

/// Theta-conjugated projector family (labels preserved).
ProjectiveObservable reverse_observable(const ProjectiveObservable& obs, const TimeReversal& rev);

/// Channel equality as maps: equal action on the d^2 matrix units.
bool channels_equal(const QuantumChannel& a, const QuantumChannel& b, double tol = 1e-8);

}  // namespace irrev
