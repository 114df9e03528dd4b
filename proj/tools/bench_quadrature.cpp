// Timing comparison of the serial and OpenMP entropy-production quadrature.

#include <chrono>
#include <cstdio>

#include "irrev/gaussian.hpp"

using namespace irrev::gaussian;

namespace {

double time_ms(QuadratureMode mode, const GaussianState& state, const OscillatorBath& bath,
               const PhaseSpaceGrid& grid, int reps, double* result) {
    using clock = std::chrono::steady_clock;
    double value = 0.0;
    const auto start = clock::now();
    for (int r = 0; r < reps; ++r) {
        value = entropy_production_quadrature(state, bath, grid, mode);
    }
    const auto stop = clock::now();
    *result = value;
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

}  // namespace

int main() {
    const auto bath = OscillatorBath::validate(1.0, 1.0, 2.0);
    const auto state = GaussianState::validate(Eigen::Vector2d(1.0, 1.0),
                                               2.5 * Eigen::Matrix2d::Identity());
    const int reps = 5;

    std::printf("%8s %14s %14s %10s %10s\n", "n", "serial_ms", "parallel_ms", "speedup",
                "max|diff|");
    for (int n : {128, 256, 512, 1024, 2048}) {
        const auto grid = PhaseSpaceGrid::covering(state, n);
        double serial_value = 0.0, parallel_value = 0.0;
        const double ts = time_ms(QuadratureMode::Serial, state, bath, grid, reps, &serial_value);
        const double tp =
            time_ms(QuadratureMode::Parallel, state, bath, grid, reps, &parallel_value);
        std::printf("%8d %14.3f %14.3f %10.2f %10.2e\n", n, ts, tp, ts / tp,
                    std::abs(serial_value - parallel_value));
    }
    return 0;
}
