#include "tripose/simulation.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tripose/io_util.h"
#include "tripose/parallel.h"
#include "tripose/rng.h"
#include "tripose/solver.h"

namespace tripose {

namespace {

Vec3 random_in_cube(Rng& rng, double side) {
    const double h = side / 2.0;
    return Vec3(rng.uniform(-h, h), rng.uniform(-h, h), rng.uniform(-h, h));
}

Vec3 random_unit(Rng& rng) {
    Vec3 v;
    do {
        v = Vec3(rng.gauss(), rng.gauss(), rng.gauss());
    } while (v.norm() < 1e-9);
    return v.normalized();
}

// World-to-camera pose of a camera at `center` aimed at the origin.
CameraPose look_at_origin(const Vec3& center) {
    const Vec3 forward = (-center).normalized();
    Vec3 up(0.0, 0.0, 1.0);
    if (std::abs(forward.dot(up)) > 0.999) up = Vec3(0.0, 1.0, 0.0);
    const Vec3 right = up.cross(forward).normalized();
    const Vec3 down = forward.cross(right);
    Mat3 R;
    R.row(0) = right.transpose();
    R.row(1) = down.transpose();
    R.row(2) = forward.transpose();
    return CameraPose(R, -R * center);
}

struct WorldCameras {
    CameraPose cam1, cam2, cam3;  // world-to-camera
};

WorldCameras random_cameras(const SimConfig& config, Rng& rng) {
    WorldCameras w;
    const Vec3 c1 = random_unit(rng) * config.camera_distance;
    w.cam1 = look_at_origin(c1);
    auto place = [&]() -> Vec3 {
        if (config.motion == MotionKind::kLarge)
            return random_unit(rng) * config.camera_distance;
        Vec3 offset;
        do {
            offset = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                          rng.uniform(-1.0, 1.0)) * config.small_motion_radius;
        } while (offset.norm() > config.small_motion_radius || offset.norm() < 1e-6);
        return Vec3(c1 + offset);
    };
    w.cam2 = look_at_origin(place());
    w.cam3 = look_at_origin(place());
    return w;
}

bool visible(const SimConfig& config, const Intrinsics& K, const WorldCameras& cams,
             const Vec3& X_world, std::array<Vec2, 3>* pixels) {
    const CameraPose* cs[3] = {&cams.cam1, &cams.cam2, &cams.cam3};
    for (int v = 0; v < 3; ++v) {
        const Vec3 xc = cs[v]->apply(X_world);
        if (xc[2] <= 0.1) return false;
        const Vec2 px = K.to_pixel(HomPoint2(Vec3(xc)));
        if (px[0] < 0.0 || px[0] > config.image_width || px[1] < 0.0 ||
            px[1] > config.image_height)
            return false;
        (*pixels)[static_cast<std::size_t>(v)] = px;
    }
    return true;
}

constexpr int kResampleBudget = 10000;

}  // namespace

Scene generate_scene(const SimConfig& config, double sigma_px, std::uint64_t trial_seed) {
    Rng rng(trial_seed);
    const Intrinsics K = config.intrinsics();

    const WorldCameras cams = random_cameras(config, rng);

    Scene scene;
    scene.pose2 = cams.cam2.relative_to(cams.cam1);
    scene.pose3_gt = cams.cam3.relative_to(cams.cam1);

    auto to_view1 = [&](const Vec3& X_world) { return cams.cam1.apply(X_world); };

    // Points: uniform in the cube, visible in every view; out-of-frame
    // features are redrawn so the counts stay exact.
    std::vector<std::array<Vec2, 3>> point_pixels;
    for (int i = 0; i < config.n_points; ++i) {
        int budget = kResampleBudget;
        while (true) {
            if (budget-- == 0)
                throw SceneGenerationFailure("could not place a visible 3D point");
            const Vec3 X = random_in_cube(rng, config.cube_side);
            std::array<Vec2, 3> px;
            if (!visible(config, K, cams, X, &px)) continue;
            scene.points3d.push_back(to_view1(X));
            point_pixels.push_back(px);
            break;
        }
    }

    std::vector<std::array<std::array<Vec2, 3>, 2>> segment_pixels;
    for (int i = 0; i < config.n_lines; ++i) {
        int budget = kResampleBudget;
        while (true) {
            if (budget-- == 0)
                throw SceneGenerationFailure("could not place a visible 3D segment");
            const Vec3 A = random_in_cube(rng, config.cube_side);
            const Vec3 B = random_in_cube(rng, config.cube_side);
            if ((A - B).norm() < 1e-3) continue;
            std::array<Vec2, 3> pa, pb;
            if (!visible(config, K, cams, A, &pa) || !visible(config, K, cams, B, &pb))
                continue;
            scene.segments3d.push_back({to_view1(A), to_view1(B)});
            segment_pixels.push_back({pa, pb});
            break;
        }
    }

    // Noise goes on the pixel coordinates; calibrated features are derived
    // from the noisy measurements, exactly as a detector would produce them.
    auto noisy = [&](const Vec2& px) {
        return Vec2(px[0] + sigma_px * rng.gauss(), px[1] + sigma_px * rng.gauss());
    };

    for (const auto& px : point_pixels)
        scene.observations.points.push_back(
            make_point_triplet(noisy(px[0]), noisy(px[1]), noisy(px[2]), K));

    for (const auto& seg : segment_pixels) {
        std::array<Segment2, 3> segments = {
            Segment2(noisy(seg[0][0]), noisy(seg[1][0])),
            Segment2(noisy(seg[0][1]), noisy(seg[1][1])),
            Segment2(noisy(seg[0][2]), noisy(seg[1][2])),
        };
        scene.observations.lines.push_back(make_line_observation(segments, K));
    }
    return scene;
}

BatchResult run_batch(const SimConfig& config) {
    const Intrinsics K = config.intrinsics();
    const std::size_t n_sigmas = config.noise_sigmas.size();
    const std::size_t total = n_sigmas * static_cast<std::size_t>(config.trials);

    BatchResult result;
    result.records.resize(total);

    parallel_for(total, config.threads, [&](std::size_t idx) {
        const std::size_t si = idx / static_cast<std::size_t>(config.trials);
        const std::size_t trial = idx % static_cast<std::size_t>(config.trials);
        const double sigma = config.noise_sigmas[si];

        TrialRecord& rec = result.records[idx];
        rec.sigma = sigma;
        rec.rotation_error_deg = rec.translation_angle_deg = rec.translation_ratio_error =
            rec.solve_ms = std::numeric_limits<double>::quiet_NaN();
        try {
            const Scene scene = generate_scene(
                config, sigma, derive_seed(config.seed, (si << 32) | trial));

            const auto start = std::chrono::steady_clock::now();
            const EstimationResult est =
                solve_relative_pose(scene.observations, scene.pose2, K);
            const auto stop = std::chrono::steady_clock::now();

            rec.solve_ms = std::chrono::duration<double, std::milli>(stop - start).count();
            rec.rotation_error_deg = rotation_error_deg(est.pose.R, scene.pose3_gt.R);
            const TranslationError te = translation_error(est.pose.t, scene.pose3_gt.t);
            rec.translation_angle_deg = te.angle_deg;
            rec.translation_ratio_error = te.ratio_error;
        } catch (const SceneGenerationFailure&) {
            rec.status = "scene_failure";
        } catch (const InsufficientConstraints&) {
            rec.status = "insufficient_constraints";
        } catch (const NoCandidates&) {
            rec.status = "no_candidates";
        } catch (const NoValidPose&) {
            rec.status = "no_valid_pose";
        } catch (const ScoreUnavailable&) {
            rec.status = "score_unavailable";
        } catch (const Error&) {
            rec.status = "numerical_failure";
        }
    });

    for (std::size_t si = 0; si < n_sigmas; ++si) {
        SigmaStats st;
        st.sigma = config.noise_sigmas[si];
        st.trials = config.trials;
        std::vector<double> rot, t_angle, t_ratio;
        double ms_sum = 0.0;
        int ms_count = 0;
        for (int t = 0; t < config.trials; ++t) {
            const TrialRecord& rec =
                result.records[si * static_cast<std::size_t>(config.trials) +
                               static_cast<std::size_t>(t)];
            if (!rec.ok()) {
                ++st.failures;
                continue;
            }
            rot.push_back(rec.rotation_error_deg);
            t_angle.push_back(rec.translation_angle_deg);
            t_ratio.push_back(rec.translation_ratio_error);
            ms_sum += rec.solve_ms;
            ++ms_count;
        }
        if (!rot.empty()) {
            st.rot_q1 = percentile(rot, 0.25);
            st.rot_median = percentile(rot, 0.5);
            st.rot_mean = std::accumulate(rot.begin(), rot.end(), 0.0) /
                          static_cast<double>(rot.size());
            st.t_angle_q1 = percentile(t_angle, 0.25);
            st.t_angle_median = percentile(t_angle, 0.5);
            st.t_angle_mean = std::accumulate(t_angle.begin(), t_angle.end(), 0.0) /
                              static_cast<double>(t_angle.size());
            st.t_ratio_q1 = percentile(t_ratio, 0.25);
            st.t_ratio_median = percentile(t_ratio, 0.5);
            st.t_ratio_mean = std::accumulate(t_ratio.begin(), t_ratio.end(), 0.0) /
                              static_cast<double>(t_ratio.size());
            st.mean_ms = ms_sum / static_cast<double>(ms_count);
        }
        result.stats.push_back(st);
    }
    return result;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw Error("percentile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

std::string records_csv(const BatchResult& result) {
    std::ostringstream out;
    out << "sigma,rot_deg,t_angle_deg,t_ratio,ms,status\n";
    for (const auto& r : result.records) {
        out << format_double(r.sigma) << ',' << format_double(r.rotation_error_deg) << ','
            << format_double(r.translation_angle_deg) << ','
            << format_double(r.translation_ratio_error) << ',' << format_double(r.solve_ms)
            << ',' << r.status << '\n';
    }
    return out.str();
}

std::string stats_csv(const BatchResult& result) {
    std::ostringstream out;
    out << "sigma,trials,failures,rot_q1,rot_median,rot_mean,"
           "t_angle_q1,t_angle_median,t_angle_mean,"
           "t_ratio_q1,t_ratio_median,t_ratio_mean,mean_ms\n";
    for (const auto& s : result.stats) {
        out << format_double(s.sigma) << ',' << s.trials << ',' << s.failures << ','
            << format_double(s.rot_q1) << ',' << format_double(s.rot_median) << ','
            << format_double(s.rot_mean) << ',' << format_double(s.t_angle_q1) << ','
            << format_double(s.t_angle_median) << ',' << format_double(s.t_angle_mean) << ','
            << format_double(s.t_ratio_q1) << ',' << format_double(s.t_ratio_median) << ','
            << format_double(s.t_ratio_mean) << ',' << format_double(s.mean_ms) << '\n';
    }
    return out.str();
}

}  // namespace tripose
