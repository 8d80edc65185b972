#ifndef TRIPOSE_VGG_DATASET_H_
#define TRIPOSE_VGG_DATASET_H_

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tripose/correspondences.h"
#include "tripose/geometry.h"

namespace tripose {

// VGG multiview style sequence: whitespace-separated numeric text files.
//   *.P            one 3x4 projection matrix, three lines of four numbers
//   *.corners      per-view 2D points, one "x y" pair per line
//   *.lines        per-view 2D segments, one "x1 y1 x2 y2" per line
//   *nview-corners point track table, one row per track, one index per view
//   *nview-lines   line track table, same layout
// Track entries are indices into the view's feature file; "-1" or "*" marks
// a view where the feature was not observed.
struct SequenceData {
    std::vector<Mat34> cameras;
    std::vector<std::vector<Vec2>> points_2d;             // [view][point]
    std::vector<std::vector<std::array<Vec2, 2>>> lines_2d;  // [view][segment]
    std::vector<std::vector<int>> point_tracks;  // [track][view], -1 absent
    std::vector<std::vector<int>> line_tracks;

    std::size_t view_count() const { return cameras.size(); }
};

SequenceData load_sequence(const std::string& dir);

// Inverse of load_sequence, used for fixtures and round-trip checks.
void write_sequence(const std::string& dir, const std::string& prefix,
                    const SequenceData& data);

// K [R|t] factorization of a full projective camera; K upper-triangular with
// positive diagonal and K(2,2) = 1.
struct DecomposedCamera {
    Intrinsics intrinsics;
    CameraPose pose;
};
DecomposedCamera decompose_camera(const Mat34& P);

struct EvalConfig {
    std::string sequence_dir;
    std::array<int, 3> views = {0, 1, 2};
    // (lines, points) pairs; defaults follow the standard boxplot ladder.
    std::vector<std::pair<int, int>> combos = default_eval_combos();
    int runs = 100;
    std::uint64_t seed = 0;
    int threads = 1;

    static std::vector<std::pair<int, int>> default_eval_combos() {
        return {{2, 2}, {2, 3}, {2, 4}, {3, 3}, {4, 2}, {4, 4}, {6, 6}, {10, 10}};
    }
};

struct EvalRun {
    std::string combo;  // e.g. "2L+3P"
    int run = 0;
    double rotation_error_deg = 0.0;
    double translation_angle_deg = 0.0;
    double translation_ratio_error = 0.0;
    std::string status = "ok";
};

struct EvalResult {
    std::vector<EvalRun> runs;
};

// Estimates the third view against ground truth over seeded random feature
// subsets for every combination. Throws InsufficientData naming the combo
// that exceeds the available three-view tracks.
EvalResult evaluate_sequence(const SequenceData& data, const EvalConfig& config);

// CSV emission; headers are part of the interface:
//   runs:  combo,run,rot_deg,t_angle_deg,t_ratio,status
//   stats: combo,metric,q1,median,q3
std::string eval_runs_csv(const EvalResult& result);
std::string eval_stats_csv(const EvalResult& result);

}  // namespace tripose

#endif  // TRIPOSE_VGG_DATASET_H_
