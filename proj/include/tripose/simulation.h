#ifndef TRIPOSE_SIMULATION_H_
#define TRIPOSE_SIMULATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "tripose/correspondences.h"
#include "tripose/geometry.h"

namespace tripose {

enum class MotionKind { kLarge, kSmall };

struct SimConfig {
    int n_points = 4;
    int n_lines = 4;
    std::vector<double> noise_sigmas = {0.0};  // pixels
    int trials = 500;
    MotionKind motion = MotionKind::kLarge;
    double cube_side = 10.0;          // meters
    double camera_distance = 20.0;    // meters
    double small_motion_radius = 5.0; // meters
    int image_width = 640;
    int image_height = 480;
    double focal = 800.0;  // pixels
    std::uint64_t seed = 0;
    int threads = 1;  // 1: serial reference path; 0: OpenMP default

    Intrinsics intrinsics() const {
        return Intrinsics::simple(focal, image_width / 2.0, image_height / 2.0);
    }
};

// One synthetic scene: known second view, ground-truth third view, and the
// noisy 2D observations, all expressed relative to view 1.
struct Scene {
    CameraPose pose2;
    CameraPose pose3_gt;
    CorrespondenceSet observations;
    std::vector<Vec3> points3d;                    // view-1 frame
    std::vector<std::array<Vec3, 2>> segments3d;   // view-1 frame
};

Scene generate_scene(const SimConfig& config, double sigma_px, std::uint64_t trial_seed);

struct TrialRecord {
    double sigma = 0.0;
    double rotation_error_deg = 0.0;
    double translation_angle_deg = 0.0;
    double translation_ratio_error = 0.0;
    double solve_ms = 0.0;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

// Per-sigma aggregates over successful trials.
struct SigmaStats {
    double sigma = 0.0;
    int trials = 0;
    int failures = 0;
    double rot_q1 = 0.0, rot_median = 0.0, rot_mean = 0.0;
    double t_angle_q1 = 0.0, t_angle_median = 0.0, t_angle_mean = 0.0;
    double t_ratio_q1 = 0.0, t_ratio_median = 0.0, t_ratio_mean = 0.0;
    double mean_ms = 0.0;
};

struct BatchResult {
    std::vector<TrialRecord> records;  // trials-major: sigma index * trials + trial
    std::vector<SigmaStats> stats;
};

// Runs config.trials seeded trials per noise level and aggregates lower
// quartile / median / mean errors plus solve timing. Deterministic for a
// given config and seed regardless of thread count.
BatchResult run_batch(const SimConfig& config);

// Linearly interpolated percentile (q in [0,1]) of a sample.
double percentile(std::vector<double> values, double q);

// CSV emission; headers are part of the interface:
//   records:    sigma,rot_deg,t_angle_deg,t_ratio,ms,status
//   aggregates: sigma,trials,failures,rot_q1,rot_median,rot_mean,
//               t_angle_q1,t_angle_median,t_angle_mean,
//               t_ratio_q1,t_ratio_median,t_ratio_mean,mean_ms
std::string records_csv(const BatchResult& result);
std::string stats_csv(const BatchResult& result);

}  // namespace tripose

#endif  // TRIPOSE_SIMULATION_H_
