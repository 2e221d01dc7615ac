// Times the two hot per-slice kernels, serial against OpenMP, and checks the
// results agree bitwise. Build and run:
//   cmake --build build --target bench_kernels && ./build/bench/bench_kernels
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "campussim/exposure.hpp"
#include "campussim/locomotion.hpp"
#include "campussim/rng.hpp"

using namespace campussim;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::vector<Agent> crowd(int n, Substream& rng) {
    std::vector<Agent> agents(n);
    for (int i = 0; i < n; ++i) {
        agents[i].id = i;
        // Two dozen room contexts plus the road plane.
        int context = static_cast<int>(rng.uniform_index(25));
        agents[i].pos = {context, rng.uniform(0.0, 60.0), rng.uniform(0.0, 60.0)};
        if (rng.uniform() < 0.1) {
            agents[i].infection.state = HealthState::Latent;
            agents[i].infection.days_carrying = 1 + static_cast<int>(rng.uniform_index(7));
        }
    }
    return agents;
}

void bench_exposure(int n, int iterations) {
    Substream rng(99, StreamId::Setup);
    std::vector<Agent> serial_agents = crowd(n, rng);
    std::vector<Agent> parallel_agents = serial_agents;
    InfectionParams params;

    auto t0 = std::chrono::steady_clock::now();
    for (int it = 0; it < iterations; ++it) {
        evaluate_exposure_slice(serial_agents, params, false, 60.0, nullptr);
    }
    double serial_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    for (int it = 0; it < iterations; ++it) {
        evaluate_exposure_slice(parallel_agents, params, true, 60.0, nullptr);
    }
    double parallel_ms = ms_since(t0);

    bool identical = true;
    for (int i = 0; i < n; ++i) {
        identical = identical && serial_agents[i].infection.p_inf_today ==
                                     parallel_agents[i].infection.p_inf_today;
    }
    std::printf("exposure     n=%-6d serial %8.2f ms  parallel %8.2f ms  speedup %.2fx  %s\n", n,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "bitwise-equal" : "MISMATCH");
}

void bench_locomotion(int n, int iterations) {
    RoadNetwork net({{1, {0, 0}}, {2, {2000, 0}}}, {{1, 2, 2000.0, 6.0}},
                    {{"a", {"a", 1, 0}}, {"b", {"b", 2, 0}}});
    LocomotionParams params;
    SpeedModel speeds;
    Substream rng(7, StreamId::Setup);

    std::vector<Agent> serial_agents(n), parallel_agents(n);
    std::vector<int> movers(n);
    for (int i = 0; i < n; ++i) {
        serial_agents[i].id = i;
        serial_agents[i].speed_mps = sample_speed(speeds, rng);
        serial_agents[i].path = make_active_path(net, {1, 2}, params, speeds, i);
        parallel_agents[i] = serial_agents[i];
        movers[i] = i;
    }

    auto t0 = std::chrono::steady_clock::now();
    for (int it = 0; it < iterations; ++it) {
        step_locomotion(serial_agents, movers, params, speeds, false);
    }
    double serial_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    for (int it = 0; it < iterations; ++it) {
        step_locomotion(parallel_agents, movers, params, speeds, true);
    }
    double parallel_ms = ms_since(t0);

    bool identical = true;
    for (int i = 0; i < n; ++i) {
        identical = identical &&
                    serial_agents[i].path.progress_m == parallel_agents[i].path.progress_m;
    }
    std::printf("locomotion   n=%-6d serial %8.2f ms  parallel %8.2f ms  speedup %.2fx  %s\n", n,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; both paths run serially\n");
#endif
    for (int n : {1000, 4000, 16000}) {
        bench_exposure(n, 50);
    }
    for (int n : {1000, 4000, 16000}) {
        bench_locomotion(n, 200);
    }
    return 0;
}
