#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "somgen/gray_image.hpp"
#include "somgen/manifest.hpp"
#include "somgen/png_io.hpp"
#include "somgen/rng.hpp"

using namespace somgen;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "somgen_raster_tests";
    fs::create_directories(dir);
    return dir;
}

GrayImage checkerboard(int w, int h) {
    GrayImage im;
    im.width = w;
    im.height = h;
    im.pixels.resize(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            im.pixels[static_cast<std::size_t>(y * w + x)] = ((x + y) % 2) ? 255 : 0;
    return im;
}

} // namespace

TEST_CASE("png round trip is pixel identical") {
    const fs::path path = temp_dir() / "rt.png";
    GrayImage im = checkerboard(256, 256);
    save_image(im, path.string());
    const GrayImage back = load_image(path.string());
    CHECK(back == im);

    GrayImage noisy;
    noisy.width = 64;
    noisy.height = 32;
    RngStream rng = RngStream::from_master(3, 0);
    noisy.pixels.resize(64 * 32);
    for (auto& p : noisy.pixels) p = static_cast<std::uint8_t>(rng.uniform_below(256));
    const fs::path p2 = temp_dir() / "noise.png";
    save_image(noisy, p2.string());
    CHECK(load_image(p2.string()) == noisy);
}

TEST_CASE("png writes are byte-stable for identical pixels") {
    const fs::path p1 = temp_dir() / "stable1.png";
    const fs::path p2 = temp_dir() / "stable2.png";
    GrayImage im = checkerboard(128, 128);
    save_image(im, p1.string());
    save_image(im, p2.string());
    // Compare raw bytes.
    auto slurp = [](const fs::path& p) {
        std::string data;
        FILE* f = std::fopen(p.string().c_str(), "rb");
        REQUIRE(f != nullptr);
        char buf[4096];
        std::size_t n;
        while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) data.append(buf, n);
        std::fclose(f);
        return data;
    };
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("load_image rejects wrong expectations and bad files") {
    const fs::path path = temp_dir() / "small.png";
    save_image(checkerboard(32, 32), path.string());
    CHECK_THROWS_WITH_AS(load_image(path.string(), ExpectedSize{256, 256}),
                         doctest::Contains("dimension"), std::runtime_error);
    CHECK_THROWS(load_image((temp_dir() / "missing.png").string()));

    // 16-bit grayscale input must be refused with a bit-depth message.
    const fs::path deep = temp_dir() / "deep.png";
    std::vector<std::int32_t> labels(16 * 16, 1234);
    save_label_png16(labels, 16, 16, deep.string());
    CHECK_THROWS_WITH_AS(load_image(deep.string()), doctest::Contains("bit depth"),
                         std::runtime_error);
}

TEST_CASE("16-bit label png round trip") {
    const fs::path path = temp_dir() / "labels.png";
    std::vector<std::int32_t> labels(64 * 48);
    for (std::size_t i = 0; i < labels.size(); ++i)
        labels[i] = static_cast<std::int32_t>((i * 7) % 65536);
    save_label_png16(labels, 64, 48, path.string());
    int w = 0, h = 0;
    const std::vector<std::int32_t> back = load_label_png16(path.string(), w, h);
    CHECK(w == 64);
    CHECK(h == 48);
    CHECK(back == labels);
}

TEST_CASE("tiling partitions the image exactly") {
    GrayImage im = checkerboard(256, 256);
    const TileGrid grid = split_tiles(im, 16);
    CHECK(grid.tiles_x == 16);
    CHECK(grid.tiles_y == 16);
    CHECK(grid.tiles.size() == 256);
    for (const TileView& t : grid.tiles) CHECK(t.size == 16);

    // Every pixel visited exactly once when walking all tiles.
    std::vector<int> visits(im.pixels.size(), 0);
    for (int ty = 0; ty < grid.tiles_y; ++ty) {
        for (int tx = 0; tx < grid.tiles_x; ++tx) {
            const TileView t = grid.tile(tx, ty);
            for (int y = 0; y < t.size; ++y)
                for (int x = 0; x < t.size; ++x) {
                    const int gx = t.x0 + x;
                    const int gy = t.y0 + y;
                    ++visits[static_cast<std::size_t>(gy * im.width + gx)];
                    CHECK(t.at(x, y) == im.at(gx, gy));
                }
        }
    }
    for (const int v : visits) CHECK(v == 1);

    const TileGrid blocks = split_tiles(im, 32);
    CHECK(blocks.tiles.size() == 64);
    CHECK_THROWS(split_tiles(im, 100));
}

TEST_CASE("manifest json round trip") {
    EnsembleManifest m;
    m.som_name = SomKind::flags;
    m.master_seed = 987654321;
    m.generation_params = {{"classes", {1, 2, 3}}, {"n", 12}};
    m.entries.push_back({"images/r000.png", 3, 11});
    m.entries.push_back({"images/r001.png", std::nullopt, 12});

    const fs::path path = temp_dir() / "manifest.json";
    m.save(path.string());
    const EnsembleManifest back = EnsembleManifest::load(path.string());
    CHECK(back.som_name == SomKind::flags);
    CHECK(back.master_seed == 987654321);
    CHECK(back.entries.size() == 2);
    CHECK(back.entries[0].class_label == 3);
    CHECK_FALSE(back.entries[1].class_label.has_value());
    CHECK(back.entries[1].seed == 12);
    CHECK(back.generation_params["n"] == 12);
}
