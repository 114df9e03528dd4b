#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "irrev/charfunc.hpp"
#include "test_helpers.hpp"

using namespace irrev;
using namespace irrev::testing;

namespace {

const std::vector<Complex> kUGrid = {{0.0, 0.0}, {0.5, 0.0}, {-0.5, 0.0}, {1.0, 0.0},
                                     {-1.0, 0.0}, {0.0, 1.0}, {0.0, 0.5}, {1.0, 1.0}};

}  // namespace

TEST_CASE("G(0) = 1 exactly on both computation paths") {
    auto spec = hadamard_spec();
    auto run = run_protocol(spec);
    auto dist = sigma_general(run.p_forward, run.p_backward);
    CHECK(g_direct(run, spec.channel, 0.0) == Complex(1.0, 0.0));
    CHECK(g_from_distribution(dist, 0.0) == Complex(1.0, 0.0));
}

TEST_CASE("G(i) recovers the Jarzynski identity from the closed form") {
    auto spec = hadamard_spec();
    auto run = run_protocol(spec);
    CHECK(std::abs(g_direct(run, spec.channel, Complex(0.0, 1.0)) - Complex(1.0)) < 1e-9);
}

TEST_CASE("closed form matches the distribution sum at u = i/2 (benchmark)") {
    auto spec = hadamard_spec();
    auto run = run_protocol(spec);
    auto dist = sigma_general(run.p_forward, run.p_backward);
    Complex direct = g_direct(run, spec.channel, Complex(0.0, 0.5));
    double oracle = 0.0;
    for (const auto& atom : dist.atoms) oracle += atom.probability * std::exp(-0.5 * atom.sigma);
    CHECK(std::abs(direct - Complex(oracle)) < 1e-9);
}

TEST_CASE("degenerate sigma distribution has flat characteristic function") {
    Eigen::MatrixXd joint(2, 2);
    joint << 0.5, 0.0, 0.0, 0.5;
    auto dist = sigma_general(joint, joint.transpose());
    for (Complex u : kUGrid) {
        CHECK(std::abs(g_from_distribution(dist, u) - Complex(1.0)) < 1e-12);
    }
}

TEST_CASE("central consistency: g_direct equals g_from_distribution on random specs") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 40; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 4);
        auto spec = random_spec(d, rng);
        auto run = run_protocol(spec);
        auto dist = sigma_general(run.p_forward, run.p_backward);
        for (Complex u : kUGrid) {
            CHECK(std::abs(g_direct(run, spec.channel, u) - g_from_distribution(dist, u)) <
                  1e-8);
        }
    }
}

TEST_CASE("|G(u)| bounded by 1 for real u") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        auto spec = random_spec(3, rng);
        auto run = run_protocol(spec);
        for (double u : {0.3, -0.7, 1.5, 4.0}) {
            CHECK(std::abs(g_direct(run, spec.channel, Complex(u, 0.0))) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("jarzynski_check: benchmark arithmetic and randomized suite") {
    auto run = run_protocol(hadamard_spec());
    auto dist = sigma_general(run.p_forward, run.p_backward);
    // 0.9 * (0.5/0.9) + 0.1 * (0.5/0.1) = 1
    CHECK(jarzynski_check(dist) == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 7);
        auto r = run_protocol(random_spec(d, rng));
        CHECK(std::abs(jarzynski_check(sigma_general(r.p_forward, r.p_backward)) - 1.0) <
              1e-9);
    }
}

TEST_CASE("moments: first moment equals mean sigma and -i G'(0)") {
    auto run = run_protocol(hadamard_spec());
    auto dist = sigma_general(run.p_forward, run.p_backward);
    CHECK(moments_from_distribution(dist, 1) ==
          doctest::Approx(mean_sigma(dist)).epsilon(1e-12));
    CHECK(moments_from_distribution(dist, 1) == doctest::Approx(0.368064).epsilon(1e-5));

    // central finite difference of G along real u
    const double h = 1e-4;
    Complex gp = g_from_distribution(dist, Complex(h, 0.0));
    Complex gm = g_from_distribution(dist, Complex(-h, 0.0));
    Complex derivative = (gp - gm) / (2.0 * h);
    CHECK(std::abs(Complex(0.0, -1.0) * derivative -
                   Complex(moments_from_distribution(dist, 1))) < 1e-6);

    Eigen::MatrixXd joint(2, 2);
    joint << 0.5, 0.0, 0.0, 0.5;
    auto flat = sigma_general(joint, joint.transpose());
    CHECK(moments_from_distribution(flat, 2) == doctest::Approx(0.0));
}

TEST_CASE("estimate_g: gamma = 0 is exact, gamma = 1 hits Jarzynski in the mean") {
    auto spec = hadamard_spec();
    auto plan = EstimationPlan::validate({0.0, 1.0}, 20000, 12345);
    auto points = estimate_g(spec, plan);
    REQUIRE(points.size() == 2);
    CHECK(points[0].g_estimate == 1.0);  // exactly
    CHECK(points[0].g_exact == doctest::Approx(1.0));
    CHECK(points[1].g_exact == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(points[1].g_estimate == doctest::Approx(1.0).epsilon(0.05));
    for (const auto& pt : points) CHECK(pt.measurement_settings == 4);  // K + M
}

TEST_CASE("estimate_g is deterministic given the seed") {
    auto spec = hadamard_spec();
    auto plan = EstimationPlan::validate(EstimationPlan::default_gammas(), 5000, 99);
    auto a = estimate_g(spec, plan);
    auto b = estimate_g(spec, plan);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].g_estimate == b[i].g_estimate);
        CHECK(a[i].stderr_boot == b[i].stderr_boot);
    }
}

TEST_CASE("estimate_g tracks the exact value within a few standard errors") {
    auto spec = hadamard_spec();
    auto plan = EstimationPlan::validate(EstimationPlan::default_gammas(), 100000, 2024);
    auto points = estimate_g(spec, plan);
    for (const auto& pt : points) {
        REQUIRE_FALSE(pt.skipped);
        const double slack = std::max(4.0 * pt.stderr_boot, 1e-12);
        CHECK(std::abs(pt.g_estimate - pt.g_exact) <= slack);
    }
}

TEST_CASE("bootstrap standard error scales as shots^{-1/2}") {
    // needs an asymmetric spec: at the Hadamard benchmark both occupation
    // vectors are (1/2, 1/2), a stationary point of the estimator where the
    // leading fluctuation is second order (~1/N) instead of ~1/sqrt(N)
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 0.9;
    rho0(1, 1) = 0.1;
    auto spec = ProtocolSpec::validate(
        DensityOperator::validate(rho0), ProjectiveObservable::computational(2),
        QuantumChannel::identity(2), ProjectiveObservable::computational(2),
        TimeReversal::conjugation(2));
    const double gamma = 0.5;
    std::vector<double> avg_err;
    for (std::int64_t shots : {1000, 4000, 16000}) {
        double sum = 0.0;
        const int seeds = 20;
        for (int s = 0; s < seeds; ++s) {
            auto plan = EstimationPlan::validate({gamma}, shots, 1000 + s);
            sum += estimate_g(spec, plan)[0].stderr_boot;
        }
        avg_err.push_back(sum / seeds);
    }
    CHECK(avg_err[0] / avg_err[1] == doctest::Approx(2.0).epsilon(0.3));
    CHECK(avg_err[1] / avg_err[2] == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("estimate_g error paths") {
    // rank-deficient rho_in with gamma > 1 must fail as a singular power
    Matrix pure = Matrix::Zero(2, 2);
    pure(0, 0) = 1.0;
    auto spec = ProtocolSpec::validate(
        DensityOperator::validate(pure), ProjectiveObservable::computational(2),
        QuantumChannel::identity(2), ProjectiveObservable::computational(2),
        TimeReversal::conjugation(2));
    auto plan = EstimationPlan::validate({1.5}, 100, 7);
    CHECK_THROWS_AS(estimate_g(spec, plan), SingularPower);

    CHECK_THROWS_AS(EstimationPlan::validate({0.5}, 0, 7), ValidationError);
    CHECK_THROWS_AS(EstimationPlan::validate({kInfinity}, 10, 7), ValidationError);
}

TEST_CASE("degenerate sampling with negative gamma skips the point") {
    // final outcome 1 has tiny probability: with few shots its sampled
    // occupation can be zero, which gamma < 0 cannot invert
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 0.98;
    rho0(1, 1) = 0.02;
    auto spec = ProtocolSpec::validate(
        DensityOperator::validate(rho0), ProjectiveObservable::computational(2),
        QuantumChannel::identity(2), ProjectiveObservable::computational(2),
        TimeReversal::conjugation(2));
    bool saw_skip = false;
    for (int seed = 0; seed < 100 && !saw_skip; ++seed) {
        auto points = estimate_g(spec, EstimationPlan::validate({-0.1}, 50, seed));
        saw_skip = points[0].skipped;
    }
    CHECK(saw_skip);
}
