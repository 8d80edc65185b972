// Acceptance suite: exercises every gate criterion end to end and prints one
// pass/fail line per criterion. Exits with the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "tripose/beta_solver.h"
#include "tripose/constraints.h"
#include "tripose/io_util.h"
#include "tripose/polynomial.h"
#include "tripose/ransac.h"
#include "tripose/rng.h"
#include "tripose/simulation.h"
#include "tripose/solver.h"
#include "tripose/translation.h"
#include "tripose/vgg_dataset.h"

using namespace tripose;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), detail.c_str());
    if (!pass) ++failures;
}

struct SolveOutcome {
    bool exact = false;
    double rot_deg = 0.0;
};

SolveOutcome solve_scene(const Scene& scene, const Intrinsics& K) {
    SolveOutcome out;
    try {
        const EstimationResult est = solve_relative_pose(scene.observations, scene.pose2, K);
        out.rot_deg = rotation_error_deg(est.pose.R, scene.pose3_gt.R);
        const double t_rel = (est.pose.t - scene.pose3_gt.t).norm() /
                             std::max(1e-12, scene.pose3_gt.t.norm());
        out.exact = out.rot_deg < 0.01 && t_rel < 1e-4;
    } catch (const Error&) {
        out.rot_deg = 180.0;
    }
    return out;
}

int exact_count(int n_points, int n_lines, int trials, std::uint64_t salt) {
    SimConfig config;
    config.n_points = n_points;
    config.n_lines = n_lines;
    const Intrinsics K = config.intrinsics();
    int exact = 0;
    for (int t = 0; t < trials; ++t) {
        const Scene scene = generate_scene(config, 0.0, derive_seed(salt, t));
        exact += solve_scene(scene, K).exact;
    }
    return exact;
}

void criterion1() {
    const int trials = 500;
    const int exact = exact_count(4, 4, trials, 1001);
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "%d/%d trials within 0.01 deg and 1e-4 relative translation", exact,
                  trials);
    report(1, "zero-noise exact recovery, 4 lines + 4 points", exact >= trials * 99 / 100,
           detail);
}

void criterion2() {
    const int trials = 500;
    const struct { int points, lines; } configs[] = {{3, 0}, {0, 6}, {2, 2}, {3, 3}};
    std::string detail;
    bool pass = true;
    for (const auto& c : configs) {
        const int exact = exact_count(c.points, c.lines, trials, 2000 + c.points * 10 + c.lines);
        const bool ok = exact >= trials * 99 / 100;
        pass = pass && ok;
        detail += std::to_string(c.points) + "P+" + std::to_string(c.lines) + "L " +
                  std::to_string(exact) + "/" + std::to_string(trials);
        if (c.points == 3 && c.lines == 0 && !ok)
            detail += " [unattainable: 3 points span a rank-6 system, kernel dim 6 > 4;"
                      " see decisions ledger]";
        detail += "; ";
    }
    report(2, "minimal-configuration coverage", pass, detail);
}

void criterion3() {
    SimConfig config;
    config.n_points = 4;
    config.n_lines = 4;
    config.trials = 500;
    config.noise_sigmas = {0.0, 0.5, 1.0, 1.5, 2.0};
    config.seed = 3001;
    config.threads = 0;
    const BatchResult small = run_batch(config);

    bool monotone = true;
    std::string q1s;
    for (std::size_t i = 0; i + 1 < small.stats.size(); ++i) {
        const double a = small.stats[i].rot_q1;
        const double b = small.stats[i + 1].rot_q1;
        // one inversion of at most 5% relative is tolerated
        if (b < a && (a - b) > 0.05 * a) monotone = false;
    }
    for (const auto& s : small.stats) q1s += format_double(s.rot_q1).substr(0, 8) + " ";

    SimConfig big = config;
    big.n_points = 8;
    big.n_lines = 8;
    big.noise_sigmas = {1.0};
    big.seed = 3002;
    const BatchResult large = run_batch(big);
    const double median_small = small.stats[2].rot_median;  // sigma = 1.0
    const double median_large = large.stats[0].rot_median;
    const bool redundancy = median_large <= median_small;

    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "q1 over sigma: %s; median 8+8 %.3f deg vs 4+4 %.3f deg at sigma 1",
                  q1s.c_str(), median_large, median_small);
    report(3, "noise monotonicity and feature redundancy", monotone && redundancy, detail);
}

void criterion4() {
    const int sizes[] = {4, 6, 8, 12, 16, 24, 32, 45};
    std::vector<double> log_n, log_ms;
    double mean_44 = 0.0;
    for (int size : sizes) {
        SimConfig config;
        config.n_points = size;
        config.n_lines = size;
        config.trials = 50;
        config.noise_sigmas = {0.5};
        config.seed = 4001;
        config.threads = 1;  // timing wants the serial path
        const BatchResult batch = run_batch(config);
        const double ms = batch.stats[0].mean_ms;
        if (size == 4) mean_44 = ms;
        log_n.push_back(std::log(2.0 * size));
        log_ms.push_back(std::log(ms));
    }
    const double n = static_cast<double>(log_n.size());
    const double sx = std::accumulate(log_n.begin(), log_n.end(), 0.0);
    const double sy = std::accumulate(log_ms.begin(), log_ms.end(), 0.0);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        sxx += log_n[i] * log_n[i];
        sxy += log_n[i] * log_ms[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "mean solve 4L+4P %.2f ms (bound 370); log-log slope %.2f over 8..90 "
                  "features (bound [0.7, 1.4])",
                  mean_44, slope);
    report(4, "runtime", mean_44 <= 370.0 && slope >= 0.7 && slope <= 1.4, detail);
}

void criterion5() {
    SimConfig config;
    config.n_points = 4;
    config.n_lines = 4;
    int ok = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        const Scene scene = generate_scene(config, 0.0, derive_seed(5001, t));
        const ConstraintSystem system = assemble(line_triplets(scene.observations),
                                                 scene.observations.points, scene.pose2);
        Eigen::JacobiSVD<MatX12> svd(system.C);
        const auto& sv = svd.singularValues();
        const Vec12 v = stack_pose(scene.pose3_gt.R, scene.pose3_gt.t);
        const bool good = sv[11] < 1e-9 * sv[0] && sv[10] > 1e-6 * sv[0] &&
                          (system.C * v).cwiseAbs().maxCoeff() < 1e-9;
        ok += good;
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%d/%d scenes with a clean 1-dim kernel", ok,
                  trials);
    report(5, "constraint-system spectral property", ok == trials, detail);
}

void criterion6() {
    Rng rng(6001);
    SimConfig config;
    config.n_points = 2;
    config.n_lines = 2;

    int recovered = 0;
    bool residuals_ok = true;
    const int bases = 100;
    for (int t = 0; t < bases; ++t) {
        const Scene scene = generate_scene(config, 0.0, derive_seed(6002, t));
        const Vec12 v = stack_pose(scene.pose3_gt.R, scene.pose3_gt.t);

        // orthonormal four-column basis containing v, built by Gram-Schmidt
        Eigen::Matrix<double, 12, Eigen::Dynamic> cols(12, 4);
        for (int c = 0; c < 3; ++c)
            for (int r = 0; r < 12; ++r) cols(r, c) = rng.gauss();
        cols.col(3) = v;
        for (int c = 0; c < 4; ++c) {
            for (int prev = 0; prev < c; ++prev)
                cols.col(c) -= cols.col(prev).dot(cols.col(c)) * cols.col(prev);
            cols.col(c).normalize();
        }
        NullBasis basis;
        basis.V = cols;
        basis.sigma.setZero();

        const Case4Diagnostics diag = case4_diagnostics(basis);
        const double bound = 1e-6 * (1.0 + diag.cost_derivative.max_abs_coeff());
        for (double r : diag.roots)
            if (std::abs(diag.cost_derivative.eval(r)) >= bound) residuals_ok = false;

        try {
            double best = 1e9;
            for (const auto& sol : solve_case4(basis)) {
                Vec12 rec = Vec12::Zero();
                for (int i = 0; i < 4; ++i) rec += sol.betas[static_cast<std::size_t>(i)] * cols.col(i);
                rec.normalize();
                const Vec12 target = v.normalized();
                best = std::min(best, std::min((rec - target).norm(), (rec + target).norm()));
            }
            if (best < 1e-5) ++recovered;
        } catch (const Error&) {
        }
    }

    // companion-matrix root finding against factored constructions
    Rng poly_rng(6003);
    int poly_ok = 0;
    int tested = 0;
    while (tested < 50) {
        std::vector<double> roots_true;
        for (int j = 0; j < 11; ++j) roots_true.push_back(poly_rng.uniform(-3.0, 3.0));
        std::sort(roots_true.begin(), roots_true.end());
        bool separated = true;
        for (std::size_t i = 1; i < roots_true.size(); ++i)
            if (roots_true[i] - roots_true[i - 1] < 0.05) separated = false;
        if (!separated) continue;
        ++tested;

        Poly p{1.0};
        for (double r : roots_true) p = p * Poly({-r, 1.0});
        const auto found = find_real_roots(p);
        bool match = found.size() == 11;
        if (match)
            for (std::size_t i = 0; i < found.size(); ++i)
                if (std::abs(found[i] - roots_true[i]) >= 1e-8) match = false;
        poly_ok += match;
    }

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "direction recovered %d/%d bases; root residuals %s; %d/50 factored "
                  "polynomials matched to 1e-8",
                  recovered, bases, residuals_ok ? "within bound" : "VIOLATED", poly_ok);
    report(6, "case-4 relinearization machinery", recovered == bases && residuals_ok && poly_ok == 50,
           detail);
}

void criterion7() {
    Rng rng(7001);
    SimConfig config;
    config.n_points = 3;
    config.n_lines = 3;

    int ortho_ok = 0;
    const int noisy_trials = 200;
    for (int t = 0; t < noisy_trials; ++t) {
        const Scene scene = generate_scene(config, 1.0, derive_seed(7002, t));
        const ConstraintSystem system = assemble(line_triplets(scene.observations),
                                                 scene.observations.points, scene.pose2);
        const Mat3 R = project_to_rotation(
            scene.pose3_gt.R + 1e-3 * Mat3::Random());
        try {
            const Vec3 t_est = solve_translation(system, R);
            const SplitSystem split = split_system(system);
            const Eigen::Matrix<double, 9, 1> r_vec =
                Eigen::Map<const Eigen::Matrix<double, 9, 1>>(R.data());
            const Vec3 gradient =
                split.B_t.transpose() * (split.A_r * r_vec + split.B_t * t_est);
            if (gradient.norm() < 1e-8 * system.C.norm()) ++ortho_ok;
        } catch (const Error&) {
        }
    }

    int exact_ok = 0;
    const int exact_trials = 200;
    for (int t = 0; t < exact_trials; ++t) {
        const int n = 14;
        Eigen::MatrixXd A(n, 9), B(n, 3);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < 9; ++c) A(r, c) = rng.gauss();
            for (int c = 0; c < 3; ++c) B(r, c) = rng.gauss();
        }
        Mat3 R = project_to_rotation(Mat3::Random());
        const Eigen::Matrix<double, 9, 1> r_vec =
            Eigen::Map<const Eigen::Matrix<double, 9, 1>>(R.data());
        const Vec3 t0(rng.gauss(), rng.gauss(), rng.gauss());
        const Eigen::VectorXd residual = A * r_vec + B * t0;
        A -= residual * r_vec.transpose() / r_vec.squaredNorm();

        ConstraintSystem system;
        system.C.resize(n, 12);
        system.C.leftCols<9>() = A;
        system.C.rightCols<3>() = B;
        if ((solve_translation(system, R) - t0).norm() <= 1e-10 * std::max(1.0, t0.norm()))
            ++exact_ok;
    }

    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "orthogonality %d/%d noisy systems; exact recovery %d/%d", ortho_ok,
                  noisy_trials, exact_ok, exact_trials);
    report(7, "translation solver", ortho_ok == noisy_trials && exact_ok == exact_trials,
           detail);
}

void criterion8() {
    SimConfig config;
    config.n_points = 20;
    config.n_lines = 20;
    const Intrinsics K = config.intrinsics();

    long tp = 0, fn = 0, fp = 0;
    std::vector<double> rot;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const Scene scene = generate_scene(config, 0.25, derive_seed(8001, t));
        Rng rng(derive_seed(8002, t));
        CorrespondenceSet set = scene.observations;
        std::vector<bool> outliers(set.points.size() + set.lines.size(), false);
        auto random_pixel = [&]() {
            return Vec2(rng.uniform(40.0, 600.0), rng.uniform(40.0, 440.0));
        };
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            if (rng.uniform() >= 0.3) continue;
            const Vec2 px = random_pixel();
            set.points[i].x3 = K.calibrate(HomPoint2(px[0], px[1]));
            outliers[i] = true;
        }
        for (std::size_t i = 0; i < set.lines.size(); ++i) {
            if (rng.uniform() >= 0.3) continue;
            const Segment2 seg(random_pixel(), random_pixel());
            set.lines[i].segments[2] = seg;
            set.lines[i].triplet.l3 = K.calibrate(seg.line());
            outliers[set.points.size() + i] = true;
        }

        RansacConfig rc;
        rc.seed = derive_seed(8003, t);
        rc.inlier_threshold_px = 16.0;
        rc.threads = 0;
        try {
            const RansacResult res = estimate_ransac(set, scene.pose2, K, rc);
            rot.push_back(rotation_error_deg(res.pose.R, scene.pose3_gt.R));
            for (std::size_t i = 0; i < outliers.size(); ++i) {
                if (!outliers[i] && res.inlier_mask[i]) ++tp;
                if (!outliers[i] && !res.inlier_mask[i]) ++fn;
                if (outliers[i] && res.inlier_mask[i]) ++fp;
            }
        } catch (const Error&) {
            rot.push_back(180.0);
        }
    }
    std::sort(rot.begin(), rot.end());
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double median = rot[rot.size() / 2];

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "recall %.3f, precision %.3f, median rotation %.3f deg "
                  "(30%% outliers, threshold 16 px, sigma 0.25 px)",
                  recall, precision, median);
    report(8, "ransac robustness", recall >= 0.95 && precision >= 0.95 && median < 1.0,
           detail);
}

void criterion9() {
    // real data when available, otherwise the format round-trip fixture
    std::string dir;
    if (const char* env = std::getenv("TRIPOSE_VGG_DIR")) dir = env;
    const bool fixture = dir.empty();
    if (fixture) {
        SimConfig config;
        config.n_points = 14;
        config.n_lines = 14;
        const Scene scene = generate_scene(config, 0.0, derive_seed(9001, 0));
        const Intrinsics K = config.intrinsics();

        SequenceData data;
        const CameraPose identity;
        const CameraPose* poses[3] = {&identity, &scene.pose2, &scene.pose3_gt};
        data.points_2d.resize(3);
        data.lines_2d.resize(3);
        for (int v = 0; v < 3; ++v) {
            Mat34 P;
            P.leftCols<3>() = K.K * poses[v]->R;
            P.col(3) = K.K * poses[v]->t;
            data.cameras.push_back(P);
        }
        for (std::size_t i = 0; i < scene.points3d.size(); ++i) {
            for (int v = 0; v < 3; ++v)
                data.points_2d[static_cast<std::size_t>(v)].push_back(
                    K.to_pixel(HomPoint2(Vec3(poses[v]->apply(scene.points3d[i])))));
            data.point_tracks.push_back(
                {static_cast<int>(i), static_cast<int>(i), static_cast<int>(i)});
        }
        for (std::size_t i = 0; i < scene.segments3d.size(); ++i) {
            for (int v = 0; v < 3; ++v)
                data.lines_2d[static_cast<std::size_t>(v)].push_back(
                    {K.to_pixel(HomPoint2(Vec3(poses[v]->apply(scene.segments3d[i][0])))),
                     K.to_pixel(HomPoint2(Vec3(poses[v]->apply(scene.segments3d[i][1]))))});
            data.line_tracks.push_back(
                {static_cast<int>(i), static_cast<int>(i), static_cast<int>(i)});
        }
        const fs::path tmp = fs::temp_directory_path() / "tripose_acceptance_seq";
        fs::remove_all(tmp);
        write_sequence(tmp.string(), "synth", data);
        dir = tmp.string();
    }

    try {
        const SequenceData loaded = load_sequence(dir);
        EvalConfig eval;
        eval.sequence_dir = dir;
        eval.runs = 100;
        eval.seed = 9002;
        eval.threads = 0;
        const EvalResult result = evaluate_sequence(loaded, eval);

        std::vector<double> rot_10;
        std::size_t ok_runs = 0;
        for (const auto& run : result.runs) {
            if (run.status == "ok") ++ok_runs;
            if (run.combo == "10L+10P" && run.status == "ok")
                rot_10.push_back(run.rotation_error_deg);
        }
        const double median = rot_10.empty() ? 1e9 : percentile(rot_10, 0.5);

        char detail[192];
        std::snprintf(detail, sizeof(detail),
                      "%s; all 8 combos executed, %zu/%zu runs ok; 10L+10P median "
                      "rotation %.4f deg (bound 2)",
                      fixture ? "format round-trip fixture" : dir.c_str(), ok_runs,
                      result.runs.size(), median);
        report(9, "dataset evaluation path", ok_runs == result.runs.size() && median <= 2.0,
               detail);
    } catch (const Error& e) {
        report(9, "dataset evaluation path", false, e.what());
    }
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("%d of 9 criteria failed\n", failures);
    return failures;
}
