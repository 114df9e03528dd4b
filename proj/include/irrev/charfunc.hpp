#pragma once

#include <cstdint>
#include <vector>

#include "irrev/twotime.hpp"

namespace irrev {

/// Indirect-estimation plan: gamma grid, shots per prepared state, RNG seed.
struct EstimationPlan {
    std::vector<double> gammas;
    std::int64_t shots = 100000;
    std::uint64_t seed = 0;

    static EstimationPlan validate(std::vector<double> gammas, std::int64_t shots,
                                   std::uint64_t seed);
    static std::vector<double> default_gammas();
};

/// Finite-shot occupation counts backing one estimate.
struct ShotRecord {
    double gamma;
    std::vector<std::int64_t> occupation_counts_fin;  // length K
    std::vector<std::int64_t> occupation_counts_in;   // length M
    double normalization;  // Tr[rho_in^{1-gamma}]
};

struct EstimatePoint {
    double gamma;
    double g_estimate;
    double g_exact;
    double stderr_boot;
    bool skipped = false;  // DegenerateSampling: sampled zero with gamma < 0
    int measurement_settings = 0;  // distinct occupation measurements, K + M
    ShotRecord record;
};

/// Closed form G(u) = Tr[rho_tau^{-iu} Phi(rho_in^{1+iu})].
Complex g_direct(const ProtocolRun& run, const QuantumChannel& channel, Complex u);

/// Distribution side: G(u) = sum_j p_j exp(i u sigma_j).
Complex g_from_distribution(const SigmaDistribution& d, Complex u);

/// <e^{-sigma}> = G(i); equals 1 for unital-channel runs.
double jarzynski_check(const SigmaDistribution& d);

/// sum_j p_j sigma_j^n.
double moments_from_distribution(const SigmaDistribution& d, int n);

/// Three-step indirect measurement of G(i gamma) with multinomial shot noise
/// and a bootstrap standard error. Deterministic given the plan seed; each
/// gamma draws from its own counter-derived stream, so points may be
/// evaluated in parallel and merged in gamma order.
std::vector<EstimatePoint> estimate_g(const ProtocolSpec& spec, const EstimationPlan& plan);

}  // namespace irrev
