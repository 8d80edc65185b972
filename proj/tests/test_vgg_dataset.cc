#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "support/synthetic.h"
#include "tripose/rng.h"
#include "tripose/simulation.h"
#include "tripose/vgg_dataset.h"

using namespace tripose;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Synthetic three-view sequence in the dataset layout, built from a
// simulation scene (the library solver never sees this construction path).
SequenceData sequence_from_scene(const Scene& scene, const Intrinsics& K) {
    SequenceData data;
    const CameraPose identity;
    const CameraPose* poses[3] = {&identity, &scene.pose2, &scene.pose3_gt};
    for (int v = 0; v < 3; ++v) {
        Mat34 P;
        P.leftCols<3>() = K.K * poses[v]->R;
        P.col(3) = K.K * poses[v]->t;
        data.cameras.push_back(P);
    }

    data.points_2d.resize(3);
    data.lines_2d.resize(3);
    for (std::size_t i = 0; i < scene.points3d.size(); ++i) {
        for (int v = 0; v < 3; ++v)
            data.points_2d[static_cast<std::size_t>(v)].push_back(
                K.to_pixel(HomPoint2(Vec3(poses[v]->apply(scene.points3d[i])))));
        const int idx = static_cast<int>(i);
        data.point_tracks.push_back({idx, idx, idx});
    }
    for (std::size_t i = 0; i < scene.segments3d.size(); ++i) {
        for (int v = 0; v < 3; ++v) {
            const Vec2 a = K.to_pixel(HomPoint2(Vec3(poses[v]->apply(scene.segments3d[i][0]))));
            const Vec2 b = K.to_pixel(HomPoint2(Vec3(poses[v]->apply(scene.segments3d[i][1]))));
            data.lines_2d[static_cast<std::size_t>(v)].push_back({a, b});
        }
        const int idx = static_cast<int>(i);
        data.line_tracks.push_back({idx, idx, idx});
    }
    return data;
}

}  // namespace

TEST_CASE("sequence write and load round trip") {
    SimConfig config;
    config.n_points = 12;
    config.n_lines = 12;
    const Scene scene = generate_scene(config, 0.0, derive_seed(801, 0));
    const SequenceData data = sequence_from_scene(scene, config.intrinsics());

    const fs::path dir = fresh_dir("tripose_vgg_roundtrip");
    write_sequence(dir.string(), "synth", data);
    const SequenceData loaded = load_sequence(dir.string());

    REQUIRE(loaded.view_count() == 3);
    for (int v = 0; v < 3; ++v)
        CHECK((loaded.cameras[static_cast<std::size_t>(v)] -
               data.cameras[static_cast<std::size_t>(v)])
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    REQUIRE(loaded.point_tracks.size() == data.point_tracks.size());
    REQUIRE(loaded.line_tracks.size() == data.line_tracks.size());
    CHECK(loaded.points_2d[0].size() == data.points_2d[0].size());
    CHECK(loaded.lines_2d[2].size() == data.lines_2d[2].size());
}

TEST_CASE("camera decomposition recovers intrinsics and pose") {
    Rng rng(809);
    for (int trial = 0; trial < 20; ++trial) {
        Mat3 K = Mat3::Identity();
        K(0, 0) = rng.uniform(400.0, 1200.0);
        K(1, 1) = rng.uniform(400.0, 1200.0);
        K(0, 1) = rng.uniform(-5.0, 5.0);
        K(0, 2) = rng.uniform(200.0, 400.0);
        K(1, 2) = rng.uniform(150.0, 300.0);
        const Mat3 R = tripose::testing::random_rotation(rng);
        const Vec3 t(rng.gauss(), rng.gauss(), rng.gauss());

        Mat34 P;
        P.leftCols<3>() = K * R;
        P.col(3) = K * t;
        P *= rng.uniform(0.5, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);

        const DecomposedCamera cam = decompose_camera(P);
        CHECK((cam.intrinsics.K - K).cwiseAbs().maxCoeff() < 1e-8 * K(0, 0));
        CHECK((cam.pose.R - R).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((cam.pose.t - t).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, t.norm()));
        CHECK((cam.pose.R.transpose() * cam.pose.R - Mat3::Identity())
                  .cwiseAbs()
                  .maxCoeff() < 1e-6);
    }
}

TEST_CASE("malformed camera file is a ParseError naming the file") {
    const fs::path dir = fresh_dir("tripose_vgg_badcam");
    std::ofstream(dir / "x.000.P") << "1 0 0 0\n0 1 0 0\n";  // two rows only
    try {
        load_sequence(dir.string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("x.000.P") != std::string::npos);
    }
}

TEST_CASE("bad numeric field is a ParseError with file and line") {
    const fs::path dir = fresh_dir("tripose_vgg_badnum");
    std::ofstream(dir / "x.000.P") << "1 0 0 0\n0 oops 0 0\n0 0 1 0\n";
    try {
        load_sequence(dir.string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("x.000.P") != std::string::npos);
        CHECK(msg.find(":2") != std::string::npos);
        CHECK(msg.find("oops") != std::string::npos);
    }
}

TEST_CASE("missing cameras are MissingData") {
    const fs::path dir = fresh_dir("tripose_vgg_empty");
    CHECK_THROWS_AS(load_sequence(dir.string()), MissingData);
    CHECK_THROWS_AS(load_sequence((dir / "nonexistent").string()), MissingData);
}

TEST_CASE("out-of-bounds track index is a ParseError") {
    SimConfig config;
    config.n_points = 4;
    config.n_lines = 4;
    const Scene scene = generate_scene(config, 0.0, derive_seed(821, 0));
    SequenceData data = sequence_from_scene(scene, config.intrinsics());
    data.point_tracks.push_back({99, 0, 0});

    const fs::path dir = fresh_dir("tripose_vgg_oob");
    write_sequence(dir.string(), "synth", data);
    CHECK_THROWS_AS(load_sequence(dir.string()), ParseError);
}

TEST_CASE("absent markers and short rows are tolerated") {
    SimConfig config;
    config.n_points = 4;
    config.n_lines = 4;
    const Scene scene = generate_scene(config, 0.0, derive_seed(823, 0));
    const SequenceData data = sequence_from_scene(scene, config.intrinsics());
    const fs::path dir = fresh_dir("tripose_vgg_absent");
    write_sequence(dir.string(), "synth", data);
    // rewrite the track table mixing the two absent encodings and a short row
    std::ofstream(dir / "synth.nview-corners") << "0 0 0\n* 1 1\n2 -1 2\n3\n";
    const SequenceData loaded = load_sequence(dir.string());
    REQUIRE(loaded.point_tracks.size() == 4);
    CHECK(loaded.point_tracks[1][0] == -1);
    CHECK(loaded.point_tracks[2][1] == -1);
    CHECK(loaded.point_tracks[3][1] == -1);
    CHECK(loaded.point_tracks[3][2] == -1);
}

TEST_CASE("synthetic sequence evaluates end to end") {
    SimConfig config;
    config.n_points = 14;
    config.n_lines = 14;
    const Scene scene = generate_scene(config, 0.0, derive_seed(827, 0));
    const SequenceData data = sequence_from_scene(scene, config.intrinsics());

    EvalConfig eval;
    eval.combos = {{2, 2}, {3, 3}, {10, 10}};
    eval.runs = 5;
    eval.seed = 7;
    const EvalResult result = evaluate_sequence(data, eval);

    REQUIRE(result.runs.size() == 15);
    for (const auto& run : result.runs) {
        CHECK(run.status == "ok");
        CHECK(run.rotation_error_deg < 0.01);
        CHECK(run.translation_ratio_error < 1e-4);
    }

    // determinism: the same seed reproduces the CSV byte for byte
    const EvalResult again = evaluate_sequence(data, eval);
    CHECK(eval_runs_csv(result) == eval_runs_csv(again));

    const std::string stats = eval_stats_csv(result);
    CHECK(stats.find("combo,metric,q1,median,q3") == 0);
    CHECK(stats.find("2L+2P,rot_deg") != std::string::npos);
}

TEST_CASE("insufficient tracks raise InsufficientData naming the combo") {
    SimConfig config;
    config.n_points = 4;
    config.n_lines = 4;
    const Scene scene = generate_scene(config, 0.0, derive_seed(829, 0));
    const SequenceData data = sequence_from_scene(scene, config.intrinsics());

    EvalConfig eval;
    eval.combos = {{10, 10}};
    try {
        evaluate_sequence(data, eval);
        FAIL("expected InsufficientData");
    } catch (const InsufficientData& e) {
        CHECK(std::string(e.what()).find("10L+10P") != std::string::npos);
    }
}
