#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "irrev/channels.hpp"

namespace irrev {

// Forward cells below this probability carry no measure and are dropped.
inline constexpr double kZeroMassTol = 1e-15;
// Sigma atoms closer than this are merged.
inline constexpr double kSigmaMergeTol = 1e-9;

/// Initial state, two projective observables, unital channel, time reversal.
struct ProtocolSpec {
    DensityOperator rho0;
    ProjectiveObservable obs_in;
    QuantumChannel channel;
    ProjectiveObservable obs_fin;
    TimeReversal reversal;

    static ProtocolSpec validate(DensityOperator rho0, ProjectiveObservable obs_in,
                                 QuantumChannel channel, ProjectiveObservable obs_fin,
                                 TimeReversal reversal);
};

/// Joint statistics of one forward (and optionally backward) protocol run.
struct ProtocolRun {
    Eigen::MatrixXd p_forward;   // K x M, rows = final outcome k
    Eigen::MatrixXd p_backward;  // M x K; empty until run_backward
    Eigen::VectorXd p_in;        // length M
    Eigen::VectorXd p_fin;       // length K
    DensityOperator rho_in;
    DensityOperator rho_fin;
    DensityOperator rho_tau;
};

/// Discrete distribution of the stochastic entropy production.
struct SigmaAtom {
    double sigma;
    double probability;
    std::vector<std::pair<int, int>> outcome_pairs;  // (k, m)
};

struct SigmaDistribution {
    std::vector<SigmaAtom> atoms;
};

struct InequalityReport {
    double relent;
    double mean_sigma;
    bool commuting_case;
};

/// Forward protocol: p_forward(k,m) = Tr[P_k^fin Phi(P_m^in rho0 P_m^in)],
/// plus the dephased intermediate states.
ProtocolRun run_forward(const ProtocolSpec& spec);

/// Backward protocol seeded by the time-reversed rho_tau of the forward run.
Eigen::MatrixXd run_backward(const ProtocolSpec& spec, const DensityOperator& rho_tau);

/// run_forward + run_backward in one call.
ProtocolRun run_protocol(const ProtocolSpec& spec);

/// sigma(k,m) = ln[p_fwd(k,m) / p_bwd(m,k)], weighted by p_fwd.
SigmaDistribution sigma_general(const Eigen::MatrixXd& p_forward,
                                const Eigen::MatrixXd& p_backward);

/// Unital shortcut sigma(k,m) = ln[p_in(m) / p_fin(k)], same weights.
SigmaDistribution sigma_unital(const ProtocolRun& run);

double mean_sigma(const SigmaDistribution& d);

/// Checks 0 <= S(rho_fin || rho_tau) <= <sigma>, plus the commuting-case
/// identities when [O_fin, rho_fin] = 0. Throws InequalityViolated on
/// failure (which signals an implementation bug, not a physics outcome).
InequalityReport check_inequality(const ProtocolRun& run, const ProjectiveObservable& obs_fin,
                                  const SigmaDistribution& d);

/// Bayesian arrow-of-time posterior (uniform prior):
/// P^F = 1/(1 + e^{-Sigma}), P^B = 1 - P^F.
std::pair<double, double> arrow_posterior(double total_sigma);

}  // namespace irrev
