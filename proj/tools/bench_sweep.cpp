//------------------------------------------------------------------------------
// bench_sweep.cpp
//
// Times the serial boundary-curve sweep against the OpenMP one on the same
// grid and checks that they agree bitwise.  The sweep is embarrassingly
// parallel over initial widths, so this is the one kernel worth threading.
//
// Usage: bench_sweep [n_points] [horizon]
//------------------------------------------------------------------------------

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "volcano/experiments.hpp"
#include "volcano/model.hpp"

using namespace volcano;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace

int main(int argc, char** argv) {
    const int    n       = argc > 1 ? std::atoi(argv[1]) : 16;
    const double horizon = argc > 2 ? std::atof(argv[2]) : 200.0;
    if (n < 2) {
        std::fprintf(stderr, "need at least 2 grid points\n");
        std::fprintf(stderr, "usage: bench_sweep [n_points] [horizon]\n");
        return 1;
    }

    const ModelParams     p{1.0, 0.1, 0.0, 1.0, 1.0};
    const EffectiveParams eff = effective_coefficients(1.0, 0.1, 3.0);
    const CouplingMode    mode{Coupling::Partial, 0.0};

    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        grid[static_cast<std::size_t>(i)] =
            0.02 + 0.28 * static_cast<double>(i) / static_cast<double>(n - 1);

    std::printf("boundary sweep, %d widths, horizon %.1f\n", n, horizon);

    auto t0 = std::chrono::steady_clock::now();
    const SweepResult serial =
        boundary_curve_serial(grid, mode, p, eff, horizon, 1e-3);
    const double t_serial = seconds_since(t0);
    std::printf("  serial   : %8.3f s\n", t_serial);

    t0 = std::chrono::steady_clock::now();
    const SweepResult parallel =
        boundary_curve(grid, mode, p, eff, horizon, 1e-3, 0);
    const double t_parallel = seconds_since(t0);
    std::printf("  parallel : %8.3f s   (speedup %.2fx)\n", t_parallel,
                t_parallel > 0.0 ? t_serial / t_parallel : 0.0);

    bool identical = serial.points.size() == parallel.points.size();
    if (identical) {
        for (std::size_t i = 0; i < serial.points.size(); ++i) {
            if (serial.points[i].x_max != parallel.points[i].x_max ||
                serial.points[i].bracket_invalid !=
                    parallel.points[i].bracket_invalid) {
                identical = false;
                break;
            }
        }
    }
    std::printf("  results  : %s\n", identical ? "bitwise identical" : "MISMATCH");
    return identical ? 0 : 1;
}
