#include "tripose/vgg_dataset.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "tripose/io_util.h"
#include "tripose/parallel.h"
#include "tripose/rng.h"
#include "tripose/simulation.h"
#include "tripose/solver.h"

namespace fs = std::filesystem;

namespace tripose {

namespace {

std::vector<std::string> sorted_files_with_suffix(const std::string& dir,
                                                  const std::string& suffix) {
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.size() > suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
            out.push_back(entry.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

double parse_double(const std::string& token, const std::string& file, int line_no) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &pos);
    } catch (const std::exception&) {
        throw ParseError(file + ":" + std::to_string(line_no) + ": bad numeric field '" +
                         token + "'");
    }
    if (pos != token.size())
        throw ParseError(file + ":" + std::to_string(line_no) + ": bad numeric field '" +
                         token + "'");
    return v;
}

// All non-empty lines tokenized on whitespace, with 1-based line numbers.
std::vector<std::pair<int, std::vector<std::string>>> read_token_lines(
    const std::string& file) {
    std::ifstream in(file);
    if (!in) throw MissingData("cannot open " + file);
    std::vector<std::pair<int, std::vector<std::string>>> lines;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (ss >> tok) tokens.push_back(tok);
        if (!tokens.empty()) lines.emplace_back(line_no, std::move(tokens));
    }
    return lines;
}

Mat34 read_camera(const std::string& file) {
    const auto lines = read_token_lines(file);
    if (lines.size() != 3)
        throw ParseError(file + ": expected 3 rows of a projection matrix, found " +
                         std::to_string(lines.size()));
    Mat34 P;
    for (int r = 0; r < 3; ++r) {
        const auto& [line_no, tokens] = lines[static_cast<std::size_t>(r)];
        if (tokens.size() != 4)
            throw ParseError(file + ":" + std::to_string(line_no) +
                             ": expected 4 numbers per row");
        for (int c = 0; c < 4; ++c)
            P(r, c) = parse_double(tokens[static_cast<std::size_t>(c)], file, line_no);
    }
    return P;
}

std::vector<Vec2> read_points(const std::string& file) {
    std::vector<Vec2> pts;
    for (const auto& [line_no, tokens] : read_token_lines(file)) {
        if (tokens.size() < 2)
            throw ParseError(file + ":" + std::to_string(line_no) +
                             ": expected at least 'x y'");
        pts.emplace_back(parse_double(tokens[0], file, line_no),
                         parse_double(tokens[1], file, line_no));
    }
    return pts;
}

std::vector<std::array<Vec2, 2>> read_segments(const std::string& file) {
    std::vector<std::array<Vec2, 2>> segs;
    for (const auto& [line_no, tokens] : read_token_lines(file)) {
        if (tokens.size() < 4)
            throw ParseError(file + ":" + std::to_string(line_no) +
                             ": expected 'x1 y1 x2 y2'");
        segs.push_back({Vec2(parse_double(tokens[0], file, line_no),
                             parse_double(tokens[1], file, line_no)),
                        Vec2(parse_double(tokens[2], file, line_no),
                             parse_double(tokens[3], file, line_no))});
    }
    return segs;
}

std::vector<std::vector<int>> read_tracks(const std::string& file, std::size_t views) {
    std::vector<std::vector<int>> tracks;
    for (const auto& [line_no, tokens] : read_token_lines(file)) {
        if (tokens.size() > views)
            throw ParseError(file + ":" + std::to_string(line_no) + ": track row has " +
                             std::to_string(tokens.size()) + " entries for " +
                             std::to_string(views) + " views");
        std::vector<int> row(views, -1);
        for (std::size_t v = 0; v < tokens.size(); ++v) {
            const std::string& tok = tokens[v];
            if (tok == "*" || tok == "-1") continue;
            const double val = parse_double(tok, file, line_no);
            if (val != std::floor(val) || val < 0)
                throw ParseError(file + ":" + std::to_string(line_no) +
                                 ": track index must be a non-negative integer");
            row[v] = static_cast<int>(val);
        }
        tracks.push_back(std::move(row));
    }
    return tracks;
}

void check_track_bounds(const std::vector<std::vector<int>>& tracks,
                        const std::vector<std::size_t>& per_view_counts,
                        const std::string& what) {
    for (std::size_t t = 0; t < tracks.size(); ++t)
        for (std::size_t v = 0; v < tracks[t].size(); ++v) {
            const int idx = tracks[t][v];
            if (idx >= 0 && static_cast<std::size_t>(idx) >= per_view_counts[v])
                throw ParseError(what + " track " + std::to_string(t) + " references index " +
                                 std::to_string(idx) + " beyond view " + std::to_string(v) +
                                 " feature count " + std::to_string(per_view_counts[v]));
        }
}

std::string combo_name(int lines, int points) {
    return std::to_string(lines) + "L+" + std::to_string(points) + "P";
}

}  // namespace

SequenceData load_sequence(const std::string& dir) {
    if (!fs::is_directory(dir)) throw MissingData("sequence directory not found: " + dir);

    const auto camera_files = sorted_files_with_suffix(dir, ".P");
    if (camera_files.empty()) throw MissingData("no camera (*.P) files in " + dir);

    SequenceData data;
    for (const auto& f : camera_files) data.cameras.push_back(read_camera(f));
    const std::size_t views = data.cameras.size();

    const auto corner_files = sorted_files_with_suffix(dir, ".corners");
    const auto line_files = sorted_files_with_suffix(dir, ".lines");
    // The track tables also end in "-corners"/"-lines"; keep only per-view
    // files, matched by count with the cameras.
    auto drop_tables = [](std::vector<std::string> files) {
        std::vector<std::string> kept;
        for (auto& f : files)
            if (f.find("nview") == std::string::npos) kept.push_back(std::move(f));
        return kept;
    };
    const auto per_view_corners = drop_tables(corner_files);
    const auto per_view_lines = drop_tables(line_files);

    if (!per_view_corners.empty() && per_view_corners.size() != views)
        throw MissingData("found " + std::to_string(per_view_corners.size()) +
                          " corners files for " + std::to_string(views) + " cameras");
    if (!per_view_lines.empty() && per_view_lines.size() != views)
        throw MissingData("found " + std::to_string(per_view_lines.size()) +
                          " lines files for " + std::to_string(views) + " cameras");

    for (const auto& f : per_view_corners) data.points_2d.push_back(read_points(f));
    for (const auto& f : per_view_lines) data.lines_2d.push_back(read_segments(f));
    data.points_2d.resize(views);
    data.lines_2d.resize(views);

    const auto corner_tables = sorted_files_with_suffix(dir, "nview-corners");
    const auto line_tables = sorted_files_with_suffix(dir, "nview-lines");
    if (!corner_tables.empty()) data.point_tracks = read_tracks(corner_tables.front(), views);
    if (!line_tables.empty()) data.line_tracks = read_tracks(line_tables.front(), views);

    std::vector<std::size_t> point_counts, line_counts;
    for (const auto& v : data.points_2d) point_counts.push_back(v.size());
    for (const auto& v : data.lines_2d) line_counts.push_back(v.size());
    check_track_bounds(data.point_tracks, point_counts, "point");
    check_track_bounds(data.line_tracks, line_counts, "line");
    return data;
}

void write_sequence(const std::string& dir, const std::string& prefix,
                    const SequenceData& data) {
    fs::create_directories(dir);
    auto view_tag = [](std::size_t v) {
        std::string s = std::to_string(v);
        return std::string(3 - std::min<std::size_t>(3, s.size()), '0') + s;
    };
    for (std::size_t v = 0; v < data.cameras.size(); ++v) {
        std::ostringstream out;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) out << (c ? " " : "") << format_double(data.cameras[v](r, c));
            out << '\n';
        }
        write_file_atomic(dir + "/" + prefix + "." + view_tag(v) + ".P", out.str());

        if (v < data.points_2d.size()) {
            std::ostringstream pts;
            for (const auto& p : data.points_2d[v])
                pts << format_double(p[0]) << ' ' << format_double(p[1]) << '\n';
            write_file_atomic(dir + "/" + prefix + "." + view_tag(v) + ".corners", pts.str());
        }
        if (v < data.lines_2d.size()) {
            std::ostringstream segs;
            for (const auto& s : data.lines_2d[v])
                segs << format_double(s[0][0]) << ' ' << format_double(s[0][1]) << ' '
                     << format_double(s[1][0]) << ' ' << format_double(s[1][1]) << '\n';
            write_file_atomic(dir + "/" + prefix + "." + view_tag(v) + ".lines", segs.str());
        }
    }
    auto write_tracks = [&](const std::vector<std::vector<int>>& tracks,
                            const std::string& name) {
        std::ostringstream out;
        for (const auto& row : tracks) {
            for (std::size_t v = 0; v < row.size(); ++v) {
                if (v) out << ' ';
                if (row[v] < 0) out << '*';
                else out << row[v];
            }
            out << '\n';
        }
        write_file_atomic(dir + "/" + prefix + "." + name, out.str());
    };
    write_tracks(data.point_tracks, "nview-corners");
    write_tracks(data.line_tracks, "nview-lines");
}

DecomposedCamera decompose_camera(const Mat34& P_in) {
    Mat34 P = P_in;
    const double det = P.leftCols<3>().determinant();
    if (std::abs(det) < 1e-12 * std::pow(P.leftCols<3>().norm(), 3))
        throw DegenerateConfiguration("projection matrix has a singular left 3x3 block");
    if (det < 0) P = -P;

    // RQ decomposition of the left 3x3 via QR of the flipped transpose.
    Mat3 flip = Mat3::Zero();
    flip(0, 2) = flip(1, 1) = flip(2, 0) = 1.0;
    const Mat3 M = P.leftCols<3>();
    Eigen::HouseholderQR<Mat3> qr((flip * M).transpose());
    Mat3 Qm = qr.householderQ();
    Mat3 Rm = qr.matrixQR().triangularView<Eigen::Upper>();

    Mat3 K = flip * Rm.transpose() * flip;
    Mat3 R = flip * Qm.transpose();

    // Positive diagonal; det(M) > 0 then guarantees det(R) = +1.
    Vec3 d;
    for (int i = 0; i < 3; ++i) d[i] = K(i, i) >= 0 ? 1.0 : -1.0;
    K = K * d.asDiagonal();
    R = d.asDiagonal() * R;

    const Vec3 t = K.inverse() * P.col(3);
    K /= K(2, 2);
    return DecomposedCamera{Intrinsics(K), CameraPose(project_to_rotation(R), t)};
}

EvalResult evaluate_sequence(const SequenceData& data, const EvalConfig& config) {
    const auto [vi, vj, vk] = std::tuple(config.views[0], config.views[1], config.views[2]);
    if (vi == vj || vj == vk || vi == vk)
        throw InsufficientData("evaluation views must be distinct");
    for (int v : {vi, vj, vk})
        if (v < 0 || static_cast<std::size_t>(v) >= data.view_count())
            throw InsufficientData("view index out of range: " + std::to_string(v));

    const DecomposedCamera cam1 = decompose_camera(data.cameras[static_cast<std::size_t>(vi)]);
    const DecomposedCamera cam2 = decompose_camera(data.cameras[static_cast<std::size_t>(vj)]);
    const DecomposedCamera cam3 = decompose_camera(data.cameras[static_cast<std::size_t>(vk)]);
    const CameraPose pose2 = cam2.pose.relative_to(cam1.pose);
    const CameraPose pose3_gt = cam3.pose.relative_to(cam1.pose);

    // Features observed in all three chosen views, pre-calibrated per view.
    std::vector<PointTriplet> point_pool;
    for (const auto& track : data.point_tracks) {
        const int a = track[static_cast<std::size_t>(vi)];
        const int b = track[static_cast<std::size_t>(vj)];
        const int c = track[static_cast<std::size_t>(vk)];
        if (a < 0 || b < 0 || c < 0) continue;
        const Vec2 p1 = data.points_2d[static_cast<std::size_t>(vi)][static_cast<std::size_t>(a)];
        const Vec2 p2 = data.points_2d[static_cast<std::size_t>(vj)][static_cast<std::size_t>(b)];
        const Vec2 p3 = data.points_2d[static_cast<std::size_t>(vk)][static_cast<std::size_t>(c)];
        point_pool.push_back(
            PointTriplet{cam1.intrinsics.calibrate(HomPoint2(p1[0], p1[1])),
                         cam2.intrinsics.calibrate(HomPoint2(p2[0], p2[1])),
                         cam3.intrinsics.calibrate(HomPoint2(p3[0], p3[1]))});
    }
    std::vector<LineObservation> line_pool;
    for (const auto& track : data.line_tracks) {
        const int a = track[static_cast<std::size_t>(vi)];
        const int b = track[static_cast<std::size_t>(vj)];
        const int c = track[static_cast<std::size_t>(vk)];
        if (a < 0 || b < 0 || c < 0) continue;
        const auto& s1 = data.lines_2d[static_cast<std::size_t>(vi)][static_cast<std::size_t>(a)];
        const auto& s2 = data.lines_2d[static_cast<std::size_t>(vj)][static_cast<std::size_t>(b)];
        const auto& s3 = data.lines_2d[static_cast<std::size_t>(vk)][static_cast<std::size_t>(c)];
        std::array<Segment2, 3> segs = {Segment2(s1[0], s1[1]), Segment2(s2[0], s2[1]),
                                        Segment2(s3[0], s3[1])};
        line_pool.push_back(LineObservation{
            LineTriplet{cam1.intrinsics.calibrate(segs[0].line()),
                        cam2.intrinsics.calibrate(segs[1].line()),
                        cam3.intrinsics.calibrate(segs[2].line())},
            segs});
    }

    for (const auto& [n_lines, n_points] : config.combos) {
        if (static_cast<std::size_t>(n_lines) > line_pool.size() ||
            static_cast<std::size_t>(n_points) > point_pool.size())
            throw InsufficientData("combo " + combo_name(n_lines, n_points) + " needs more " +
                                   "three-view tracks than available (" +
                                   std::to_string(line_pool.size()) + " lines, " +
                                   std::to_string(point_pool.size()) + " points)");
    }

    EvalResult result;
    result.runs.resize(config.combos.size() * static_cast<std::size_t>(config.runs));

    parallel_for(result.runs.size(), config.threads, [&](std::size_t idx) {
        const std::size_t combo_idx = idx / static_cast<std::size_t>(config.runs);
        const int run = static_cast<int>(idx % static_cast<std::size_t>(config.runs));
        const auto [n_lines, n_points] = config.combos[combo_idx];

        EvalRun& out = result.runs[idx];
        out.combo = combo_name(n_lines, n_points);
        out.run = run;
        out.rotation_error_deg = out.translation_angle_deg = out.translation_ratio_error =
            std::numeric_limits<double>::quiet_NaN();

        Rng rng(derive_seed(config.seed, (static_cast<std::uint64_t>(combo_idx) << 32) |
                                             static_cast<std::uint64_t>(run)));
        try {
            CorrespondenceSet sample;
            for (std::size_t i : rng.sample_without_replacement(
                     line_pool.size(), static_cast<std::size_t>(n_lines)))
                sample.lines.push_back(line_pool[i]);
            for (std::size_t i : rng.sample_without_replacement(
                     point_pool.size(), static_cast<std::size_t>(n_points)))
                sample.points.push_back(point_pool[i]);

            const EstimationResult est =
                solve_relative_pose(sample, pose2, cam3.intrinsics);
            out.rotation_error_deg = rotation_error_deg(est.pose.R, pose3_gt.R);
            const TranslationError te = translation_error(est.pose.t, pose3_gt.t);
            out.translation_angle_deg = te.angle_deg;
            out.translation_ratio_error = te.ratio_error;
        } catch (const Error&) {
            out.status = "failure";
        }
    });
    return result;
}

std::string eval_runs_csv(const EvalResult& result) {
    std::ostringstream out;
    out << "combo,run,rot_deg,t_angle_deg,t_ratio,status\n";
    for (const auto& r : result.runs)
        out << r.combo << ',' << r.run << ',' << format_double(r.rotation_error_deg) << ','
            << format_double(r.translation_angle_deg) << ','
            << format_double(r.translation_ratio_error) << ',' << r.status << '\n';
    return out.str();
}

std::string eval_stats_csv(const EvalResult& result) {
    // preserve first-seen combo order
    std::vector<std::string> order;
    std::map<std::string, std::array<std::vector<double>, 3>> samples;
    for (const auto& r : result.runs) {
        if (!samples.count(r.combo)) order.push_back(r.combo);
        auto& s = samples[r.combo];
        if (r.status != "ok") continue;
        s[0].push_back(r.rotation_error_deg);
        s[1].push_back(r.translation_angle_deg);
        s[2].push_back(r.translation_ratio_error);
    }

    std::ostringstream out;
    out << "combo,metric,q1,median,q3\n";
    const char* metric_names[3] = {"rot_deg", "t_angle_deg", "t_ratio"};
    for (const auto& combo : order) {
        const auto& s = samples[combo];
        for (int m = 0; m < 3; ++m) {
            const auto& vals = s[static_cast<std::size_t>(m)];
            out << combo << ',' << metric_names[m] << ',';
            if (vals.empty()) {
                out << "nan,nan,nan\n";
                continue;
            }
            out << format_double(percentile(vals, 0.25)) << ','
                << format_double(percentile(vals, 0.5)) << ','
                << format_double(percentile(vals, 0.75)) << '\n';
        }
    }
    return out.str();
}

}  // namespace tripose
