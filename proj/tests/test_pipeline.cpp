#include "doctest.h"

#include "topofeat/pipeline.hpp"
#include "topofeat/eval.hpp"
#include "topofeat/pointcloud.hpp"
#include "topofeat/rng.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace topofeat;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "topofeat_pipeline_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// rasterize an annulus sample into a grayscale image: one bright pixel per point
GrayImage annulus_image(std::size_t side, std::size_t n, std::uint64_t seed) {
    const PointCloud pc = sample_annulus(n, 0.5, 1.0, seed);
    GrayImage img;
    img.width = img.height = side;
    img.data.assign(side * side, 0.0);
    for (const Point2& p : pc.points) {
        const auto c = static_cast<std::size_t>((p.x + 1.2) / 2.4 * double(side));
        const auto r = static_cast<std::size_t>((p.y + 1.2) / 2.4 * double(side));
        if (r < side && c < side) img.data[r * side + c] = 1.0;
    }
    return img;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("resize silhouette feature of an annulus raster shows H1 signal") {
    const GrayImage img = annulus_image(128, 300, 5);
    TransformerConfig cfg; // Resize_silhouette defaults
    cfg.grid = 32;
    const FeatureRecord rec = extract_image(img, "annulus", cfg);
    CHECK(!rec.degenerate);
    CHECK(rec.rows == 2);
    CHECK(rec.cols == 200);
    REQUIRE(rec.values.size() == 400);
    double h1_mass = 0.0;
    for (std::size_t i = 200; i < 400; ++i) h1_mass += rec.values[i];
    CHECK(h1_mass > 0.0);
}

TEST_CASE("blank and degenerate images produce flagged zero records") {
    GrayImage blank;
    blank.width = blank.height = 16;
    blank.data.assign(256, 0.0);
    TransformerConfig cfg;
    cfg.grid = 8;
    const FeatureRecord rec = extract_image(blank, "blank", cfg);
    CHECK(rec.degenerate);
    CHECK(rec.values == std::vector<double>(400, 0.0));

    // collinear cloud: three bright cells in a row
    GrayImage line;
    line.width = line.height = 8;
    line.data.assign(64, 0.0);
    line.data[0] = line.data[1] = line.data[2] = 1.0;
    TransformerConfig cfg8;
    cfg8.grid = 8;
    const FeatureRecord rec2 = extract_image(line, "line", cfg8);
    CHECK(rec2.degenerate);

    TransformerConfig sig = cfg;
    sig.feature = FeatureKind::signature;
    const FeatureRecord rec3 = extract_image(blank, "blank", sig);
    CHECK(rec3.degenerate);
    CHECK(rec3.values.size() == 310);
}

TEST_CASE("extraction is deterministic") {
    const GrayImage img = annulus_image(64, 200, 6);
    TransformerConfig cfg;
    cfg.grid = 16;
    const FeatureRecord a = extract_image(img, "x", cfg);
    const FeatureRecord b = extract_image(img, "x", cfg);
    CHECK(a.values == b.values); // bitwise
}

TEST_CASE("feature shapes are pinned by the config") {
    const GrayImage img = annulus_image(64, 150, 8);
    TransformerConfig sil;
    sil.grid = 16;
    CHECK(extract_image(img, "s", sil).values.size() == 400);
    TransformerConfig sig;
    sig.grid = 16;
    sig.feature = FeatureKind::signature;
    CHECK(extract_image(img, "g", sig).values.size() == 310);
}

TEST_CASE("extract_batch over labeled subdirectories") {
    const fs::path dir = tmp_dir("batch");
    for (const std::string label : {"one", "two", "three"}) {
        fs::create_directories(dir / label);
        for (int i = 0; i < 4; ++i) {
            const GrayImage img = synth_blob_image(label == "one" ? 0 : label == "two" ? 1 : 2,
                                                   static_cast<std::size_t>(i), 99);
            write_pgm(img, dir / label / (label + "_" + std::to_string(i) + ".pgm"), 16);
        }
    }
    TransformerConfig cfg;
    const fs::path out = dir / "features.csv";
    const BatchResult res = extract_batch(dir, cfg, out, 2);
    CHECK(res.processed == 12);
    CHECK(res.failed == 0);

    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    std::stringstream hs(header);
    std::string col;
    std::size_t cols = 0;
    while (std::getline(hs, col, ',')) ++cols;
    CHECK(cols == 2 + 400);

    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        ids.push_back(line.substr(0, line.find(',')));
    }
    CHECK(ids.size() == 12);
    CHECK(std::is_sorted(ids.begin(), ids.end()));
}

TEST_CASE("extract_batch on an empty directory writes a header-only CSV") {
    const fs::path dir = tmp_dir("empty");
    const fs::path out = dir / "features.csv";
    const BatchResult res = extract_batch(dir, TransformerConfig{}, out, 1);
    CHECK(res.processed == 0);
    std::ifstream in(out);
    std::string header, rest;
    CHECK(std::getline(in, header));
    CHECK(!std::getline(in, rest));
}

TEST_CASE("extract_batch output is byte-identical across reruns and worker counts") {
    const fs::path dir = tmp_dir("det");
    for (int i = 0; i < 6; ++i)
        write_pgm(synth_blob_image(static_cast<std::size_t>(i % 3), static_cast<std::size_t>(i), 3),
                  dir / ("img_" + std::to_string(i) + ".pgm"), 16);
    TransformerConfig cfg;
    const fs::path out1 = dir / "a.csv", out2 = dir / "b.csv", out3 = dir / "c.csv";
    extract_batch(dir, cfg, out1, 1);
    extract_batch(dir, cfg, out2, 1);
    extract_batch(dir, cfg, out3, 8);
    const std::string a = file_bytes(out1);
    CHECK(a == file_bytes(out2));
    CHECK(a == file_bytes(out3));
    CHECK(!a.empty());
}

TEST_CASE("diagram helper reproduces the reference triangle in squared mode") {
    PointCloud pc;
    pc.points = {{0, 0}, {1, 2}, {3, 0}};
    const PersistenceDiagram dc = squared_view(diagram_for_cloud(pc, "cech", 2, kInf));
    std::stringstream ss;
    write_diagram(dc, ss);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    REQUIRE(lines.size() == 4);
    CHECK(lines[2] == "0 0 inf");

    REQUIRE(dc.pairs.size() == 4);
    CHECK(dc.pairs[0].death == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(dc.pairs[1].death == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(dc.pairs[3].birth == doctest::Approx(2.25).epsilon(1e-9));
    CHECK(dc.pairs[3].death == doctest::Approx(2.5).epsilon(1e-9));

    CHECK_THROWS_AS(diagram_for_cloud(pc, "nope", 2, kInf), std::invalid_argument);
}

TEST_CASE("two-point rips diagram has one finite death at the distance") {
    PointCloud pc;
    pc.points = {{0, 0}, {0, 2.5}};
    const PersistenceDiagram dg = diagram_for_cloud(pc, "rips", 2, kInf);
    REQUIRE(dg.pairs.size() == 2);
    CHECK(dg.pairs[0].death == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(!dg.pairs[1].finite());
}

TEST_CASE("resolve_workers respects the environment variable") {
    setenv("TOPOFEAT_THREADS", "3", 1);
    CHECK(resolve_workers(0) == 3);
    CHECK(resolve_workers(5) == 5);
    unsetenv("TOPOFEAT_THREADS");
    CHECK(resolve_workers(0) >= 1);
}
