#include "irrev/twotime.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace irrev {

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

DensityOperator dephase(const ProjectiveObservable& obs, const DensityOperator& rho) {
    Matrix out = Matrix::Zero(rho.dim(), rho.dim());
    for (const auto& o : obs.outcomes()) out += o.projector * rho.matrix() * o.projector;
    return DensityOperator::validate(out);
}

void merge_atom(SigmaDistribution& d, double sigma, double prob, int k, int m) {
    for (auto& atom : d.atoms) {
        if (std::abs(atom.sigma - sigma) <= kSigmaMergeTol) {
            // Probability-weighted representative keeps the merge symmetric.
            atom.sigma = (atom.sigma * atom.probability + sigma * prob) /
                         (atom.probability + prob);
            atom.probability += prob;
            atom.outcome_pairs.emplace_back(k, m);
            return;
        }
    }
    d.atoms.push_back({sigma, prob, {{k, m}}});
}

SigmaDistribution finalize(SigmaDistribution d) {
    std::sort(d.atoms.begin(), d.atoms.end(),
              [](const SigmaAtom& a, const SigmaAtom& b) { return a.sigma < b.sigma; });
    return d;
}

}  // namespace

ProtocolSpec ProtocolSpec::validate(DensityOperator rho0, ProjectiveObservable obs_in,
                                    QuantumChannel channel, ProjectiveObservable obs_fin,
                                    TimeReversal reversal) {
    const int d = rho0.dim();
    if (obs_in.dim() != d || channel.dim() != d || obs_fin.dim() != d ||
        reversal.dim() != d) {
        throw DimMismatch("protocol components disagree on dimension");
    }
    if (!channel.unital()) {
        throw NotUnital("two-time protocol requires a unital channel");
    }
    return ProtocolSpec{std::move(rho0), std::move(obs_in), std::move(channel),
                        std::move(obs_fin), std::move(reversal)};
}

ProtocolRun run_forward(const ProtocolSpec& spec) {
    const int m_count = spec.obs_in.size();
    const int k_count = spec.obs_fin.size();

    DensityOperator rho_in = dephase(spec.obs_in, spec.rho0);
    DensityOperator rho_fin = apply(spec.channel, rho_in);
    DensityOperator rho_tau = dephase(spec.obs_fin, rho_fin);

    Eigen::MatrixXd p_forward(k_count, m_count);
    Eigen::VectorXd p_in(m_count);
    for (int m = 0; m < m_count; ++m) {
        const Matrix& pm = spec.obs_in.outcome(m).projector;
        Matrix branch = pm * spec.rho0.matrix() * pm;
        p_in[m] = std::max(0.0, std::real(branch.trace()));
        Matrix evolved = apply_raw(spec.channel, branch);
        for (int k = 0; k < k_count; ++k) {
            p_forward(k, m) = std::max(
                0.0, std::real((spec.obs_fin.outcome(k).projector * evolved).trace()));
        }
    }
    Eigen::VectorXd p_fin = p_forward.rowwise().sum();
    return ProtocolRun{std::move(p_forward), Eigen::MatrixXd(),       std::move(p_in),
                       std::move(p_fin),     std::move(rho_in),       std::move(rho_fin),
                       std::move(rho_tau)};
}

Eigen::MatrixXd run_backward(const ProtocolSpec& spec, const DensityOperator& rho_tau) {
    const int m_count = spec.obs_in.size();
    const int k_count = spec.obs_fin.size();

    QuantumChannel reversed = time_reversed_channel(spec.channel, spec.reversal);
    DensityOperator rho_tau_rev = reverse_state(rho_tau, spec.reversal);
    ProjectiveObservable obs_ref = reverse_observable(spec.obs_fin, spec.reversal);
    ProjectiveObservable obs_in_rev = reverse_observable(spec.obs_in, spec.reversal);

    Eigen::MatrixXd p_backward(m_count, k_count);
    for (int k = 0; k < k_count; ++k) {
        const Matrix& pk = obs_ref.outcome(k).projector;
        Matrix branch = pk * rho_tau_rev.matrix() * pk;
        Matrix evolved = apply_raw(reversed, branch);
        for (int m = 0; m < m_count; ++m) {
            p_backward(m, k) = std::max(
                0.0, std::real((obs_in_rev.outcome(m).projector * evolved).trace()));
        }
    }
    return p_backward;
}

ProtocolRun run_protocol(const ProtocolSpec& spec) {
    ProtocolRun run = run_forward(spec);
    run.p_backward = run_backward(spec, run.rho_tau);
    return run;
}

SigmaDistribution sigma_general(const Eigen::MatrixXd& p_forward,
                                const Eigen::MatrixXd& p_backward) {
    if (p_forward.rows() != p_backward.cols() || p_forward.cols() != p_backward.rows()) {
        throw DimMismatch("sigma_general: joint matrix shapes do not match");
    }
    SigmaDistribution d;
    for (int k = 0; k < p_forward.rows(); ++k) {
        for (int m = 0; m < p_forward.cols(); ++m) {
            const double pf = p_forward(k, m);
            if (pf <= kZeroMassTol) continue;  // zero-measure cell
            const double pb = p_backward(m, k);
            if (pb <= kZeroMassTol) {
                std::ostringstream os;
                os << "InfiniteSigma: forward mass " << pf << " on backward-zero cell (k="
                   << k << ", m=" << m << ")";
                throw InfiniteSigma(os.str(), k, m);
            }
            merge_atom(d, std::log(pf / pb), pf, k, m);
        }
    }
    return finalize(std::move(d));
}

SigmaDistribution sigma_unital(const ProtocolRun& run) {
    SigmaDistribution d;
    for (int k = 0; k < run.p_forward.rows(); ++k) {
        for (int m = 0; m < run.p_forward.cols(); ++m) {
            const double pf = run.p_forward(k, m);
            if (pf <= kZeroMassTol) continue;
            if (run.p_fin[k] <= kZeroMassTol) {
                throw InfiniteSigma("InfiniteSigma: forward mass with zero p_fin", k, m);
            }
            merge_atom(d, std::log(run.p_in[m] / run.p_fin[k]), pf, k, m);
        }
    }
    return finalize(std::move(d));
}

double mean_sigma(const SigmaDistribution& d) {
    double s = 0.0;
    for (const auto& atom : d.atoms) s += atom.probability * atom.sigma;
    return s;
}

InequalityReport check_inequality(const ProtocolRun& run, const ProjectiveObservable& obs_fin,
                                  const SigmaDistribution& d) {
    const double relent = relative_entropy(run.rho_fin, run.rho_tau);
    const double ms = mean_sigma(d);

    bool commuting = true;
    for (const auto& o : obs_fin.outcomes()) {
        if (max_abs(o.projector * run.rho_fin.matrix() -
                    run.rho_fin.matrix() * o.projector) > 1e-9) {
            commuting = false;
            break;
        }
    }

    if (relent < -1e-8 || relent > ms + 1e-8) {
        std::ostringstream os;
        os << "InequalityViolated: S(rho_fin||rho_tau) = " << relent << ", <sigma> = " << ms;
        throw InequalityViolated(os.str());
    }
    if (commuting) {
        const double gap =
            std::abs(ms - (von_neumann_entropy(run.rho_fin) - von_neumann_entropy(run.rho_in)));
        if (relent > 1e-8 || gap > 1e-8) {
            std::ostringstream os;
            os << "InequalityViolated (commuting case): relent = " << relent
               << ", |<sigma> - dS| = " << gap;
            throw InequalityViolated(os.str());
        }
    }
    return InequalityReport{relent, ms, commuting};
}

std::pair<double, double> arrow_posterior(double total_sigma) {
    const double pf = 1.0 / (1.0 + std::exp(-total_sigma));
    return {pf, 1.0 - pf};
}

}  // namespace irrev
