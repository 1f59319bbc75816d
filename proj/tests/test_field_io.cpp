#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "hessian/domain.hpp"
#include "hessian/field_io.hpp"

using namespace hessian;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "hessian_field_io_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("field dump round trip") {
    const auto g = make_ball(1, 1.0, 1.0 / 16);
    const auto u = ScalarField::sample(g, [](const Point& p) { return p[0] - 2.0 * p[1]; });
    const auto path = scratch("u.bin");
    write_field(path, u, {{"kind", "test"}});

    CHECK(fs::file_size(path) == 64 + u.size() * sizeof(double));
    std::ifstream raw(path, std::ios::binary);
    char magic[8];
    raw.read(magic, 8);
    CHECK(std::memcmp(magic, "HESSFLD1", 8) == 0);

    const auto d = read_field(path);
    CHECK(d.n == 1);
    CHECK(d.axes == 2);
    CHECK(d.counts[0] == static_cast<std::uint32_t>(g->side()));
    CHECK(d.counts[1] == static_cast<std::uint32_t>(g->side()));
    CHECK(d.counts[2] == 1);
    CHECK(d.counts[3] == 1);
    CHECK(d.h == g->h());
    REQUIRE(d.values.size() == u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (std::isnan(u[i])) CHECK(std::isnan(d.values[i]));
        else CHECK(d.values[i] == u[i]);
    }
    // the first node sits at the origin coordinate on every axis
    const auto p0 = g->coords(0);
    CHECK(d.origin == doctest::Approx(p0[0]));
    CHECK(d.origin == doctest::Approx(p0[1]));

    std::ifstream js(path.string() + ".json");
    const auto meta = nlohmann::json::parse(js);
    CHECK(meta["format"] == "HESSFLD1");
    CHECK(meta["n"] == 1);
    CHECK(meta["metadata"]["kind"] == "test");
    CHECK(meta["value_count"] == u.size());
}

TEST_CASE("field dump errors") {
    const auto bad = scratch("bad.bin");
    {
        std::ofstream os(bad, std::ios::binary);
        os << "NOTADUMP";
    }
    CHECK_THROWS_AS(read_field(bad), std::runtime_error);

    const auto g = make_ball(1, 1.0, 1.0 / 8);
    const auto path = scratch("short.bin");
    write_field(path, ScalarField(g, 1.0), {}, false);
    CHECK_FALSE(fs::exists(path.string() + ".json"));
    fs::resize_file(path, 64 + 8);
    CHECK_THROWS_AS(read_field(path), std::runtime_error);
    CHECK_THROWS_AS(read_field(scratch("missing.bin")), std::runtime_error);
}
