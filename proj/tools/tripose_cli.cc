#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tripose/io_util.h"
#include "tripose/ransac.h"
#include "tripose/simulation.h"
#include "tripose/solver.h"
#include "tripose/vgg_dataset.h"

namespace {

using namespace tripose;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitParse = 2;
constexpr int kExitInsufficient = 3;
constexpr int kExitNoPose = 4;

// Correspondence file grammar (pixels, '#' starts a comment):
//   P u1 v1 u2 v2 u3 v3
//   L x1a y1a x1b y1b x2a y2a x2b y2b x3a y3a x3b y3b
CorrespondenceSet read_correspondences(const std::string& path, const Intrinsics& K) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open correspondence file: " + path);
    CorrespondenceSet set;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string kind;
        if (!(ss >> kind)) continue;
        auto want = [&](int n) {
            std::vector<double> v(static_cast<std::size_t>(n));
            for (double& x : v)
                if (!(ss >> x))
                    throw ParseError(path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(n) + " numbers");
            return v;
        };
        if (kind == "P") {
            const auto v = want(6);
            set.points.push_back(make_point_triplet(Vec2(v[0], v[1]), Vec2(v[2], v[3]),
                                                    Vec2(v[4], v[5]), K));
        } else if (kind == "L") {
            const auto v = want(12);
            std::array<Segment2, 3> segs = {Segment2(Vec2(v[0], v[1]), Vec2(v[2], v[3])),
                                            Segment2(Vec2(v[4], v[5]), Vec2(v[6], v[7])),
                                            Segment2(Vec2(v[8], v[9]), Vec2(v[10], v[11]))};
            set.lines.push_back(make_line_observation(segs, K));
        } else {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": record must start with P or L, got '" + kind + "'");
        }
    }
    return set;
}

// Key-value pose file ('#' comments):
//   K  k00 k01 k02 k10 k11 k12 k20 k21 k22   (row-major)
//   R0 r00 r01 r02 r10 r11 r12 r20 r21 r22   (row-major)
//   t0 x y z
struct KnownPoses {
    Intrinsics K = Intrinsics::simple(1.0, 0.0, 0.0);
    CameraPose pose2;
};

KnownPoses read_poses(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open poses file: " + path);
    bool have_k = false, have_r = false, have_t = false;
    Mat3 K, R0;
    Vec3 t0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        auto numbers = [&](int n, double* out) {
            for (int i = 0; i < n; ++i)
                if (!(ss >> out[i]))
                    throw ParseError(path + ":" + std::to_string(line_no) + ": key '" + key +
                                     "' expects " + std::to_string(n) + " numbers");
        };
        if (key == "K") {
            double v[9];
            numbers(9, v);
            K = Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v);
            have_k = true;
        } else if (key == "R0") {
            double v[9];
            numbers(9, v);
            R0 = Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v);
            have_r = true;
        } else if (key == "t0") {
            numbers(3, t0.data());
            have_t = true;
        } else {
            throw ParseError(path + ":" + std::to_string(line_no) + ": unknown key '" + key +
                             "'");
        }
    }
    if (!have_k || !have_r || !have_t)
        throw ParseError(path + ": needs all of K, R0, t0");
    KnownPoses poses;
    try {
        poses.K = Intrinsics(K);
        poses.pose2 = CameraPose(R0, t0);
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return poses;
}

void print_pose(const CameraPose& pose) {
    std::cout << "R:";
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) std::cout << ' ' << format_double(pose.R(r, c));
    std::cout << "\nt: " << format_double(pose.t[0]) << ' ' << format_double(pose.t[1]) << ' '
              << format_double(pose.t[2]) << '\n';
}

std::vector<std::pair<int, int>> parse_combos(const std::string& text) {
    std::vector<std::pair<int, int>> combos;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int lines = 0, points = 0;
        char l = 0, plus = 0, p = 0;
        std::istringstream is(item);
        if (!(is >> lines >> l >> plus >> points >> p) || l != 'L' || plus != '+' || p != 'P')
            throw ParseError("combo must look like '3L+3P', got '" + item + "'");
        combos.emplace_back(lines, points);
    }
    if (combos.empty()) throw ParseError("empty combo list");
    return combos;
}

int run_solve(const std::string& corr_path, const std::string& poses_path,
              const std::string& out_csv, bool use_ransac, RansacConfig ransac) {
    const KnownPoses known = read_poses(poses_path);
    const CorrespondenceSet set = read_correspondences(corr_path, known.K);

    CameraPose pose;
    double error_px = 0.0;
    int candidates = 0;
    std::string extra;
    if (use_ransac) {
        const RansacResult res = estimate_ransac(set, known.pose2, known.K, ransac);
        pose = res.pose;
        error_px = 0.0;
        std::size_t inliers = 0;
        for (bool b : res.inlier_mask) inliers += b;
        candidates = 1;
        const TriangulatedFeatures tri = triangulate_features(set, known.pose2);
        error_px = score(PoseCandidate{pose, {}, 0.0}, tri, set, known.K).combined;
        extra = "inliers: " + std::to_string(inliers) + "/" +
                std::to_string(res.inlier_mask.size()) +
                "\niterations: " + std::to_string(res.iterations_run) + "\n";
    } else {
        const EstimationResult est = solve_relative_pose(set, known.pose2, known.K);
        pose = est.pose;
        error_px = est.scored.combined;
        candidates = est.candidate_count;
        for (int idx : est.skipped_lines)
            std::cerr << "warning: skipped degenerate line triplet " << idx << "\n";
    }

    print_pose(pose);
    std::cout << "reprojection_error_px: " << format_double(error_px) << '\n';
    std::cout << "candidates: " << candidates << '\n' << extra;

    if (!out_csv.empty()) {
        std::ostringstream csv;
        csv << "r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz,error_px,candidates\n";
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) csv << format_double(pose.R(r, c)) << ',';
        csv << format_double(pose.t[0]) << ',' << format_double(pose.t[1]) << ','
            << format_double(pose.t[2]) << ',' << format_double(error_px) << ','
            << candidates << '\n';
        write_file_atomic(out_csv, csv.str());
    }
    return kExitOk;
}

int run_simulate(const SimConfig& config, const std::string& out_prefix) {
    std::cout << "simulation config: cube " << config.cube_side << " m, camera distance "
              << config.camera_distance << " m, image " << config.image_width << "x"
              << config.image_height << ", focal " << config.focal << " px, trials "
              << config.trials << ", motion "
              << (config.motion == MotionKind::kLarge ? "large" : "small")
              << " (small-motion radius " << config.small_motion_radius << " m), "
              << config.n_lines << " lines + " << config.n_points << " points, seed "
              << config.seed << "\n";

    const BatchResult result = run_batch(config);
    write_file_atomic(out_prefix + "_trials.csv", records_csv(result));
    write_file_atomic(out_prefix + "_stats.csv", stats_csv(result));

    for (const auto& s : result.stats)
        std::cout << "sigma " << s.sigma << ": rot q1 " << s.rot_q1 << " deg, median "
                  << s.rot_median << " deg, failures " << s.failures << "/" << s.trials
                  << "\n";
    std::cout << "wrote " << out_prefix << "_trials.csv and " << out_prefix
              << "_stats.csv\n";
    return kExitOk;
}

int run_evaluate(const EvalConfig& config, const std::string& out_prefix) {
    const SequenceData data = load_sequence(config.sequence_dir);
    const EvalResult result = evaluate_sequence(data, config);
    write_file_atomic(out_prefix + "_runs.csv", eval_runs_csv(result));
    write_file_atomic(out_prefix + "_stats.csv", eval_stats_csv(result));
    std::cout << eval_stats_csv(result);
    std::cout << "wrote " << out_prefix << "_runs.csv and " << out_prefix << "_stats.csv\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relative pose of a third camera view from mixed point and line "
                 "correspondences in three views"};
    app.require_subcommand(1);

    // solve
    auto* solve_cmd = app.add_subcommand(
        "solve", "Estimate the third-view pose from a correspondence file");
    std::string corr_path, poses_path, solve_out;
    bool use_ransac = false;
    RansacConfig ransac;
    solve_cmd->add_option("--correspondences", corr_path,
                          "Text file: 'P u1 v1 u2 v2 u3 v3' per point, 'L x1a y1a x1b y1b "
                          "x2a y2a x2b y2b x3a y3a x3b y3b' per segment (pixels)")
        ->required();
    solve_cmd->add_option("--poses", poses_path,
                          "Key-value file with K, R0, t0 (row-major)")
        ->required();
    solve_cmd->add_option("--out", solve_out, "Optional CSV output path");
    solve_cmd->add_flag("--ransac", use_ransac, "Robust hypothesize-and-test estimation");
    solve_cmd->add_option("--threshold", ransac.inlier_threshold_px,
                          "RANSAC inlier threshold in pixels")
        ->capture_default_str();
    solve_cmd->add_option("--sample-lines", ransac.sample_lines, "Lines per minimal sample")
        ->capture_default_str();
    solve_cmd->add_option("--sample-points", ransac.sample_points, "Points per minimal sample")
        ->capture_default_str();
    solve_cmd->add_option("--max-iterations", ransac.max_iterations, "RANSAC iteration cap")
        ->capture_default_str();
    solve_cmd->add_option("--confidence", ransac.confidence, "RANSAC confidence")
        ->capture_default_str();
    solve_cmd->add_option("--seed", ransac.seed, "RANSAC seed")->capture_default_str();
    solve_cmd->add_option("--threads", ransac.threads, "1 = serial, 0 = all cores")
        ->capture_default_str();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo synthetic evaluation");
    SimConfig sim;
    std::string sim_prefix = "sim";
    std::string sigmas_text = "0";
    std::string motion_text = "large";
    sim_cmd->add_option("--points", sim.n_points, "3D points per scene")->capture_default_str();
    sim_cmd->add_option("--lines", sim.n_lines, "3D segments per scene")->capture_default_str();
    sim_cmd->add_option("--sigmas", sigmas_text, "Comma list of pixel noise sigmas")
        ->capture_default_str();
    sim_cmd->add_option("--trials", sim.trials, "Trials per sigma")->capture_default_str();
    sim_cmd->add_option("--motion", motion_text, "large | small")->capture_default_str();
    sim_cmd->add_option("--cube-side", sim.cube_side, "Scene cube side, meters")
        ->capture_default_str();
    sim_cmd->add_option("--camera-distance", sim.camera_distance, "Camera distance, meters")
        ->capture_default_str();
    sim_cmd->add_option("--small-motion-radius", sim.small_motion_radius,
                        "Small-motion placement radius, meters")
        ->capture_default_str();
    sim_cmd->add_option("--width", sim.image_width, "Image width, pixels")
        ->capture_default_str();
    sim_cmd->add_option("--height", sim.image_height, "Image height, pixels")
        ->capture_default_str();
    sim_cmd->add_option("--focal", sim.focal, "Focal length, pixels")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
    sim_cmd->add_option("--threads", sim.threads, "1 = serial, 0 = all cores")
        ->capture_default_str();
    sim_cmd->add_option("--out-prefix", sim_prefix, "Output CSV prefix")
        ->capture_default_str();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Dataset evaluation (VGG multiview layout)");
    EvalConfig eval;
    std::string eval_prefix = "eval";
    std::string views_text = "0,1,2";
    std::string combos_text;
    eval_cmd->add_option("--dir", eval.sequence_dir, "Sequence directory")->required();
    eval_cmd->add_option("--views", views_text, "Three view indices, e.g. 0,1,2")
        ->capture_default_str();
    eval_cmd->add_option("--combos", combos_text,
                         "Comma list like 2L+2P,3L+3P (default: 2L+2P,2L+3P,2L+4P,3L+3P,"
                         "4L+2P,4L+4P,6L+6P,10L+10P)");
    eval_cmd->add_option("--runs", eval.runs, "Runs per combo")->capture_default_str();
    eval_cmd->add_option("--seed", eval.seed, "Base seed")->capture_default_str();
    eval_cmd->add_option("--threads", eval.threads, "1 = serial, 0 = all cores")
        ->capture_default_str();
    eval_cmd->add_option("--out-prefix", eval_prefix, "Output CSV prefix")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return run_solve(corr_path, poses_path, solve_out, use_ransac, ransac);
        if (sim_cmd->parsed()) {
            sim.noise_sigmas.clear();
            std::istringstream ss(sigmas_text);
            std::string item;
            while (std::getline(ss, item, ',')) sim.noise_sigmas.push_back(std::stod(item));
            if (sim.noise_sigmas.empty())
                throw ParseError("--sigmas needs at least one value");
            if (motion_text == "large") sim.motion = MotionKind::kLarge;
            else if (motion_text == "small") sim.motion = MotionKind::kSmall;
            else throw ParseError("--motion must be 'large' or 'small'");
            return run_simulate(sim, sim_prefix);
        }
        if (eval_cmd->parsed()) {
            std::istringstream ss(views_text);
            char comma;
            if (!(ss >> eval.views[0] >> comma >> eval.views[1] >> comma >> eval.views[2]))
                throw ParseError("--views must be three comma-separated indices");
            if (!combos_text.empty()) eval.combos = parse_combos(combos_text);
            return run_evaluate(eval, eval_prefix);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const MissingData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const InsufficientConstraints& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInsufficient;
    } catch (const InsufficientData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInsufficient;
    } catch (const NoValidPose& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoPose;
    } catch (const NoCandidates& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoPose;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
