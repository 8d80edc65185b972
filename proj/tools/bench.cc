// Compares the serial reference implementation against the OpenMP path for
// the batch workloads (Monte Carlo trials and RANSAC) and reports speedups.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "tripose/parallel.h"
#include "tripose/ransac.h"
#include "tripose/rng.h"
#include "tripose/simulation.h"

using namespace tripose;

namespace {

template <typename Fn>
double time_ms(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

bool batches_equal(const BatchResult& a, const BatchResult& b) {
    if (a.records.size() != b.records.size()) return false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const auto& ra = a.records[i];
        const auto& rb = b.records[i];
        if (ra.status != rb.status) return false;
        if (!ra.ok()) continue;
        if (ra.rotation_error_deg != rb.rotation_error_deg) return false;
        if (ra.translation_angle_deg != rb.translation_angle_deg) return false;
        if (ra.translation_ratio_error != rb.translation_ratio_error) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    int trials = 200;
    if (argc > 1) trials = std::atoi(argv[1]);

    SimConfig config;
    config.n_points = 4;
    config.n_lines = 4;
    config.noise_sigmas = {0.5, 1.0};
    config.trials = trials;
    config.seed = 7;

    std::printf("monte-carlo batch: %d trials x %zu sigmas, %d lines + %d points\n",
                config.trials, config.noise_sigmas.size(), config.n_lines, config.n_points);
    std::printf("hardware threads: %d\n\n", hardware_threads());

    config.threads = 1;
    BatchResult serial;
    const double t_serial = time_ms([&] { serial = run_batch(config); });
    std::printf("  serial reference: %8.1f ms\n", t_serial);

    config.threads = 0;
    BatchResult parallel;
    const double t_parallel = time_ms([&] { parallel = run_batch(config); });
    std::printf("  openmp          : %8.1f ms  (speedup %.2fx)\n", t_parallel,
                t_serial / t_parallel);
    std::printf("  results identical: %s\n\n", batches_equal(serial, parallel) ? "yes" : "NO");

    // RANSAC on one outlier-contaminated scene.
    SimConfig scene_config = config;
    scene_config.n_points = 20;
    scene_config.n_lines = 20;
    const Scene scene = generate_scene(scene_config, 0.5, derive_seed(11, 0));
    const Intrinsics K = scene_config.intrinsics();

    RansacConfig rc;
    rc.seed = 3;
    rc.max_iterations = 256;
    rc.confidence = 0.999999;  // keep the iteration count fixed for timing

    std::printf("ransac: %d iterations over %zu features\n", rc.max_iterations,
                scene.observations.feature_count());
    rc.threads = 1;
    RansacResult r_serial;
    const double r_t_serial =
        time_ms([&] { r_serial = estimate_ransac(scene.observations, scene.pose2, K, rc); });
    std::printf("  serial reference: %8.1f ms\n", r_t_serial);

    rc.threads = 0;
    RansacResult r_parallel;
    const double r_t_parallel =
        time_ms([&] { r_parallel = estimate_ransac(scene.observations, scene.pose2, K, rc); });
    const bool same_pose = (r_serial.pose.R - r_parallel.pose.R).norm() == 0.0 &&
                           (r_serial.pose.t - r_parallel.pose.t).norm() == 0.0 &&
                           r_serial.inlier_mask == r_parallel.inlier_mask;
    std::printf("  openmp          : %8.1f ms  (speedup %.2fx)\n", r_t_parallel,
                r_t_serial / r_t_parallel);
    std::printf("  results identical: %s\n", same_pose ? "yes" : "NO");
    return 0;
}
