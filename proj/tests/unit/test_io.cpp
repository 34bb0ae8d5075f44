#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include "snls/io.hpp"

using namespace snls;

namespace {

std::string golden(const std::string& name) { return read_file(std::filesystem::path(SNLS_GOLDEN_DIR) / name); }

Axis fixed(double v) { return {v, v, 1}; }

}  // namespace

TEST(ComplexText, Parses) {
    EXPECT_EQ(parse_complex("1.0,0.0"), Complex(1.0, 0.0));
    EXPECT_EQ(parse_complex("0,-1"), Complex(0.0, -1.0));
    EXPECT_EQ(parse_complex(" -2.5 , 3e-1 "), Complex(-2.5, 0.3));
    EXPECT_EQ(parse_complex("2"), Complex(2.0, 0.0));
}

TEST(ComplexText, ErrorsNamePosition) {
    for (const char* bad : {"1,x", "a,0", "1,2,3", ""}) {
        try {
            parse_complex(bad);
            FAIL() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.reason(), "parse_error") << bad;
            EXPECT_NE(std::string(e.what()).find("position"), std::string::npos) << e.what();
        }
    }
}

TEST(Json, FloatsUseSeventeenDigits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    Json j;
    j["x"] = 0.1;
    j["n"] = 3;
    j["inf"] = json_number(std::numeric_limits<double>::infinity());
    j["list"] = Json::array({1.5, 2});
    EXPECT_EQ(dump_json(j), "{\n  \"x\": 0.10000000000000001,\n  \"n\": 3,\n  \"inf\": \"inf\",\n  \"list\": [1.5, 2]\n}\n");
}

TEST(Json, ConstantPackFields) {
    const auto j = to_json(constants(1.0, Complex(0.0, 1.0), 1.0));
    EXPECT_TRUE(j["B"].is_null());
    EXPECT_EQ(j["M0"].get<double>(), 64.0);
}

TEST(Config, ParsesEveryKey) {
    const auto cfg = parse_run_config(
        "# comment\n dim_N = 2\nr_inner=0.5\nr_outer = 3\nn_nodes=129\nm=0.3\na=1,0.5\nb = 0,1\ndelta=0.7\n"
        "source_kind=shell\nsource_params=0.1, 1, 1.5\ndamping=0.4\ntol=1e-8\nmax_iter=500\nsolver=newton\n");
    EXPECT_EQ(cfg.spec.domain.dim, 2);
    EXPECT_EQ(cfg.spec.domain.r_inner, 0.5);
    EXPECT_EQ(cfg.spec.domain.r_outer, 3.0);
    EXPECT_EQ(cfg.spec.n_nodes, 129u);
    EXPECT_EQ(cfg.spec.m, 0.3);
    EXPECT_EQ(cfg.spec.a, Complex(1.0, 0.5));
    EXPECT_EQ(cfg.spec.delta, 0.7);
    EXPECT_EQ(cfg.spec.source_params, (std::vector<double>{0.1, 1.0, 1.5}));
    EXPECT_EQ(cfg.opts.damping, 0.4);
    EXPECT_EQ(cfg.opts.max_iter, 500);
    EXPECT_EQ(cfg.solver, "newton");
    EXPECT_EQ(config_json(cfg)["a"], "1,0.5");
}

TEST(Config, Errors) {
    EXPECT_THROW(parse_run_config("colour = red\n"), Error);
    EXPECT_THROW(parse_run_config("m = half\n"), Error);
    EXPECT_THROW(parse_run_config("solver = jacobi\n"), Error);
    try {
        parse_run_config("m = 0.5\nno equals sign\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(FieldCsv, RoundTrip) {
    const auto mesh = build_mesh(annulus(2, 0.5, 1.5), 33);
    const auto u = sample(mesh, [](double r) { return std::polar(r, 1.0 / r); });
    const auto back = parse_field_csv(field_csv(u), 2);
    ASSERT_EQ(back.size(), u.size());
    for (std::size_t j = 0; j < u.size(); ++j) EXPECT_EQ(back.values[j], u.values[j]);
    EXPECT_THROW(parse_field_csv("r,u\n", 1), Error);
}

TEST(AtomicWrite, WritesAndReplaces) {
    const auto dir = std::filesystem::temp_directory_path() / "snls_io_test";
    std::filesystem::remove_all(dir);
    atomic_write(dir / "a.txt", "one");
    atomic_write(dir / "a.txt", "two");
    EXPECT_EQ(read_file(dir / "a.txt"), "two");
    EXPECT_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
    EXPECT_THROW(read_file(dir / "missing.txt"), Error);
    std::filesystem::remove_all(dir);
}

TEST(RegionGolden, MatchesIndependentOracle) {
    const Axis full{-2.0, 2.0, 21};
    struct Slice {
        const char* file;
        GridSpec grid;
    };
    const std::vector<Slice> slices = {
        {"region_b_a1.csv", {fixed(1.0), fixed(0.0), full, full, false}},
        {"region_b_a1p1i.csv", {fixed(1.0), fixed(1.0), full, full, false}},
        {"region_b_am1m1i.csv", {fixed(-1.0), fixed(-1.0), full, full, false}},
        {"region_a_b1.csv", {full, full, fixed(1.0), fixed(0.0), false}},
        {"region_a_b0.csv", {full, full, fixed(0.0), fixed(0.0), false}},
    };
    for (const auto& s : slices) EXPECT_EQ(region_csv(classify_region(s.grid)), golden(s.file)) << s.file;
}
