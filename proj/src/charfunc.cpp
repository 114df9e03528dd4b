#include "irrev/charfunc.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace irrev {

namespace {

constexpr std::uint64_t kStreamStride = 0x9e3779b97f4a7c15ULL;
constexpr int kBootstrapResamples = 200;

// Multinomial draw via sequential conditional binomials; O(K) per draw.
std::vector<std::int64_t> multinomial(std::int64_t n, const Eigen::VectorXd& p,
                                      std::mt19937_64& rng) {
    const int k = static_cast<int>(p.size());
    std::vector<std::int64_t> counts(k, 0);
    std::int64_t remaining = n;
    double mass = p.sum();
    for (int j = 0; j + 1 < k && remaining > 0; ++j) {
        const double q = std::clamp(p[j] / std::max(mass, 1e-300), 0.0, 1.0);
        std::binomial_distribution<std::int64_t> bin(remaining, q);
        counts[j] = bin(rng);
        remaining -= counts[j];
        mass -= p[j];
    }
    if (k > 0) counts[k - 1] += remaining;
    return counts;
}

double pow_gamma(double p, double gamma) {
    if (gamma == 0.0) return 1.0;
    if (p <= 0.0) return gamma > 0.0 ? 0.0 : kInfinity;
    return std::pow(p, gamma);
}

// g-hat = norm * sum_k phat_k^gamma * qhat_k, with qhat from raw counts so
// that gamma = 0 yields exactly 1.
double combine(double norm, double gamma, const Eigen::VectorXd& phat,
               const std::vector<std::int64_t>& q_counts, std::int64_t shots, bool* degenerate) {
    double acc = 0.0;
    for (size_t j = 0; j < q_counts.size(); ++j) {
        if (q_counts[j] == 0) continue;
        const double w = pow_gamma(phat[static_cast<int>(j)], gamma);
        if (std::isinf(w)) {
            if (degenerate) *degenerate = true;
            return kInfinity;
        }
        acc += w * static_cast<double>(q_counts[j]);
    }
    return norm * (acc / static_cast<double>(shots));
}

}  // namespace

EstimationPlan EstimationPlan::validate(std::vector<double> gammas, std::int64_t shots,
                                        std::uint64_t seed) {
    for (double g : gammas) {
        if (!std::isfinite(g)) throw ValidationError("gamma values must be finite", g);
    }
    if (shots < 1) throw ValidationError("shots must be >= 1", static_cast<double>(shots));
    return EstimationPlan{std::move(gammas), shots, seed};
}

std::vector<double> EstimationPlan::default_gammas() {
    // Brackets the Jarzynski point gamma = 1 and the trivial point gamma = 0.
    return {-0.5, 0.0, 0.25, 0.5, 0.75, 1.0};
}

Complex g_direct(const ProtocolRun& run, const QuantumChannel& channel, Complex u) {
    if (u == Complex(0.0, 0.0)) return 1.0;  // Tr[Phi(rho_in)] = 1
    const Complex i(0.0, 1.0);
    Matrix tau_pow = matrix_power(run.rho_tau, -i * u);
    Matrix in_pow = matrix_power(run.rho_in, 1.0 + i * u);
    return (tau_pow * apply_raw(channel, in_pow)).trace();
}

Complex g_from_distribution(const SigmaDistribution& d, Complex u) {
    if (u == Complex(0.0, 0.0)) return 1.0;
    const Complex i(0.0, 1.0);
    Complex g = 0.0;
    for (const auto& atom : d.atoms) {
        g += atom.probability * std::exp(i * u * atom.sigma);
    }
    return g;
}

double jarzynski_check(const SigmaDistribution& d) {
    double s = 0.0;
    for (const auto& atom : d.atoms) s += atom.probability * std::exp(-atom.sigma);
    return s;
}

double moments_from_distribution(const SigmaDistribution& d, int n) {
    if (n < 1) throw ValidationError("moment order must be >= 1", n);
    double s = 0.0;
    for (const auto& atom : d.atoms) s += atom.probability * std::pow(atom.sigma, n);
    return s;
}

std::vector<EstimatePoint> estimate_g(const ProtocolSpec& spec, const EstimationPlan& plan) {
    const ProtocolRun run = run_forward(spec);
    const int k_count = static_cast<int>(run.p_fin.size());
    const int m_count = static_cast<int>(run.p_in.size());

    std::vector<EstimatePoint> points;
    points.reserve(plan.gammas.size());
    for (size_t gi = 0; gi < plan.gammas.size(); ++gi) {
        const double gamma = plan.gammas[gi];
        std::mt19937_64 rng(plan.seed + (static_cast<std::uint64_t>(gi) + 1) * kStreamStride);

        // Step (i): occupation statistics of the unmodified run, both bases.
        auto counts_in = multinomial(plan.shots, run.p_in, rng);
        auto counts_fin = multinomial(plan.shots, run.p_fin, rng);
        Eigen::VectorXd phat(k_count);
        for (int k = 0; k < k_count; ++k) {
            phat[k] = static_cast<double>(counts_fin[k]) / static_cast<double>(plan.shots);
        }

        // Step (ii): prepare rho_in^{1-gamma}/Tr[rho_in^{1-gamma}] and evolve.
        double norm = 1.0;
        Matrix prepared;
        if (gamma == 0.0) {
            prepared = run.rho_in.matrix();
        } else {
            Matrix pow = matrix_power(run.rho_in, Complex(1.0 - gamma, 0.0));
            norm = std::real(pow.trace());
            prepared = pow / norm;
        }
        Matrix evolved = apply_raw(spec.channel, prepared);

        // Step (iii): fin-basis occupations of the evolved gamma-state.
        Eigen::VectorXd q(k_count);
        for (int k = 0; k < k_count; ++k) {
            q[k] = std::max(
                0.0, std::real((spec.obs_fin.outcome(k).projector * evolved).trace()));
        }
        auto counts_q = multinomial(plan.shots, q, rng);

        EstimatePoint pt;
        pt.gamma = gamma;
        pt.g_exact = std::real(g_direct(run, spec.channel, Complex(0.0, gamma)));
        pt.measurement_settings = k_count + m_count;
        pt.record = ShotRecord{gamma, counts_fin, counts_in, norm};

        bool degenerate = false;
        pt.g_estimate = combine(norm, gamma, phat, counts_q, plan.shots, &degenerate);
        if (degenerate) {
            pt.skipped = true;
            pt.g_estimate = std::numeric_limits<double>::quiet_NaN();
            pt.stderr_boot = std::numeric_limits<double>::quiet_NaN();
            points.push_back(std::move(pt));
            continue;
        }

        // Bootstrap over both empirical multinomials.
        Eigen::VectorXd qhat(k_count);
        for (int k = 0; k < k_count; ++k) {
            qhat[k] = static_cast<double>(counts_q[k]) / static_cast<double>(plan.shots);
        }
        double sum = 0.0, sumsq = 0.0;
        int valid = 0;
        for (int b = 0; b < kBootstrapResamples; ++b) {
            auto cf = multinomial(plan.shots, phat, rng);
            auto cq = multinomial(plan.shots, qhat, rng);
            Eigen::VectorXd pb(k_count);
            for (int k = 0; k < k_count; ++k) {
                pb[k] = static_cast<double>(cf[k]) / static_cast<double>(plan.shots);
            }
            bool bad = false;
            const double gb = combine(norm, gamma, pb, cq, plan.shots, &bad);
            if (bad) continue;
            sum += gb;
            sumsq += gb * gb;
            ++valid;
        }
        pt.stderr_boot =
            valid > 1 ? std::sqrt(std::max(0.0, sumsq / valid - (sum / valid) * (sum / valid)))
                      : 0.0;
        points.push_back(std::move(pt));
    }
    return points;
}

}  // namespace irrev
