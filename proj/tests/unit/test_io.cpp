#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "realpos/io.hpp"

using namespace realpos;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    fs::path d = REALPOS_WORK_DIR;
    fs::create_directories(d);
    return d;
}

std::string write_matrix(const std::string& name, const CMatrix& m) {
    const auto p = (work_dir() / name).string();
    write_text_file(p, matrix_to_json(m).dump(2) + "\n");
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + REALPOS_CLI + "\" " + args + " > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "theta,h_theta,re,im");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST(Json, MatrixRoundTrip) {
    const CMatrix x = random_matrix(4, 17) * 1e-3 + random_accretive(4, 5);
    const CMatrix y = matrix_from_json(parse_json_text(matrix_to_json(x).dump(), "test"));
    EXPECT_EQ(max_abs_diff(x, y), 0.0);
}

TEST(Json, MalformedMatrices) {
    const auto bad = [](const std::string& text) { return matrix_from_json(parse_json_text(text, "test")); };
    EXPECT_THROW(bad("{"), InputError);
    EXPECT_THROW(bad(R"({"n": 2, "entries": [[[1,0],[0,0]]]})"), InputError);
    EXPECT_THROW(bad(R"({"n": 1, "entries": [[[1,0,3]]]})"), InputError);
    EXPECT_THROW(bad(R"({"n": 1, "entries": [["a"]]})"), InputError);
    EXPECT_THROW(bad(R"({"n": 1})"), InputError);
    EXPECT_NO_THROW(bad(R"({"n": 1, "entries": [[[1.5, -2]]]})"));
    EXPECT_THROW(read_matrix_file((work_dir() / "does_not_exist.json").string()), InputError);
}

TEST(Json, AlgebraAndMapRoundTrip) {
    const auto a = SubalgebraBasis::block_diagonal({1, 2});
    const auto b = algebra_from_json(algebra_to_json(a));
    EXPECT_EQ(b.dim(), a.dim());
    EXPECT_TRUE(span_equal(a.span(), b.span()));
    const auto t = transpose_map(2);
    const auto u = map_from_json(map_to_json(t));
    const CMatrix x = random_matrix(2, 3);
    EXPECT_LT(max_abs_diff(u.apply(x), x.transpose()), 1e-14);
}

TEST(Json, ReportNonFinite) {
    VerificationReport r;
    r.suite = "x";
    r.check("c", std::numeric_limits<double>::infinity(), 1.0);
    r.values["nan"] = std::nan("");
    const auto j = report_to_json(r);
    EXPECT_EQ(j["conditions"][0]["residual"], "Infinity");
    EXPECT_EQ(j["values"]["nan"], "NaN");
    EXPECT_FALSE(j["passed"].get<bool>());
}

TEST(Csv, Format) {
    const auto rows = parse_csv(boundary_csv(boundary(identity(2), 8)));
    ASSERT_EQ(rows.size(), 8u);
    for (const auto& r : rows) {
        ASSERT_EQ(r.size(), 4u);
        EXPECT_NEAR(r[2], 1.0, 1e-12);
        EXPECT_NEAR(r[3], 0.0, 1e-12);
    }
    EXPECT_EQ(format_g17(0.1), "0.10000000000000001");
}

TEST(Svg, Format) {
    const std::string s = boundary_svg(boundary(identity(2) + CMatrix(CMatrix::Identity(2, 2) * cplx(0, 1)), 16));
    EXPECT_EQ(s.rfind("<svg", 0), 0u);
    EXPECT_NE(s.find("width=\"800\""), std::string::npos);
    EXPECT_NE(s.find("<polygon"), std::string::npos);
    EXPECT_NE(s.find("<circle"), std::string::npos);
    EXPECT_NE(s.find("</svg>"), std::string::npos);
}

TEST(Cli, Nrange) {
    const auto id = write_matrix("id.json", identity(3));
    const auto csv = (work_dir() / "id.csv").string();
    ASSERT_EQ(run_cli("nrange " + id + " --csv " + csv), 0);
    for (const auto& r : parse_csv(read_text_file(csv))) {
        EXPECT_NEAR(r[2], 1.0, 1e-12);
        EXPECT_NEAR(r[3], 0.0, 1e-12);
    }

    CMatrix nil = CMatrix::Zero(2, 2);
    nil(0, 1) = 1.0;
    const auto np = write_matrix("nil.json", nil);
    const auto csv2 = (work_dir() / "nil.csv").string();
    const auto svg = (work_dir() / "nil.svg").string();
    ASSERT_EQ(run_cli("nrange " + np + " --angles 64 --csv " + csv2 + " --svg " + svg), 0);
    const auto rows = parse_csv(read_text_file(csv2));
    ASSERT_EQ(rows.size(), 64u);
    for (const auto& r : rows) {
        EXPECT_NEAR(std::hypot(r[2], r[3]), 0.5, 1e-12);
        EXPECT_NEAR(r[1], 0.5, 1e-12);
    }
    EXPECT_TRUE(fs::exists(svg));

    EXPECT_EQ(run_cli("nrange " + (work_dir() / "missing.json").string()), 2);
    const auto junk = (work_dir() / "junk.json").string();
    write_text_file(junk, "{\"n\": 2}");
    EXPECT_EQ(run_cli("nrange " + junk), 2);
}

TEST(Cli, Power) {
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const auto in = write_matrix("d49.json", d);
    const auto out = (work_dir() / "d49_root.json").string();
    const auto rep = (work_dir() / "d49_report.json").string();
    ASSERT_EQ(run_cli("power " + in + " --r 0.5 --method cross --out " + out + " --report " + rep), 0);
    CMatrix want = CMatrix::Zero(2, 2);
    want(0, 0) = 2.0;
    want(1, 1) = 3.0;
    EXPECT_LT(max_abs_diff(read_matrix_file(out), want), 1e-9);
    const auto j = parse_json_text(read_text_file(rep), "report");
    int deviations = 0;
    for (const auto& c : j["instances"][0]["conditions"]) {
        if (c["name"].get<std::string>().rfind("deviation ", 0) == 0) {
            ++deviations;
            EXPECT_LT(c["residual"].get<double>(), 1e-6);
        }
    }
    EXPECT_GE(deviations, 1);

    EXPECT_EQ(run_cli("power " + write_matrix("minus_i.json", -identity(2)) + " --r 0.5"), 4);
    EXPECT_EQ(run_cli("power " + in + " --r 1.5"), 2);
    EXPECT_EQ(run_cli("power " + in + " --r 0.5 --method nope"), 2);

    CMatrix jb(2, 2);
    jb << 1, 1, 0, 1;
    const auto jin = write_matrix("jordan.json", jb);
    const auto jout = (work_dir() / "jordan_root.json").string();
    const auto jrep = (work_dir() / "jordan_report.json").string();
    ASSERT_EQ(run_cli("power " + jin + " --r 0.5 --method balakrishnan --out " + jout + " --report " + jrep), 0);
    const CMatrix y = read_matrix_file(jout);
    EXPECT_LT(spectral_norm(y * y - jb), 1e-6);
    const auto jj = parse_json_text(read_text_file(jrep), "report");
    bool found = false;
    for (const auto& c : jj["instances"][0]["conditions"]) {
        if (c["name"] == "y^2 = x") {
            found = true;
            EXPECT_TRUE(c["passed"].get<bool>());
        }
    }
    EXPECT_TRUE(found);
}

TEST(Cli, Verify) {
    EXPECT_EQ(run_cli("verify chaccr --seed 7 --count 100 --n 4"), 0);
    EXPECT_EQ(run_cli("verify lump --seed 1 --count 1000 --n 3"), 0);
    const auto rep = (work_dir() / "rcp_transpose.json").string();
    ASSERT_EQ(run_cli("verify rcp --fixture transpose2 --report " + rep), 0);
    const auto j = parse_json_text(read_text_file(rep), "report");
    EXPECT_EQ(j["schema_version"], "1");
    bool witness = false;
    for (const auto& c : j["instances"][0]["conditions"]) {
        if (c["name"].get<std::string>().find("witness") != std::string::npos && c["passed"].get<bool>()) witness = true;
    }
    EXPECT_TRUE(witness);
    EXPECT_EQ(run_cli("verify nosuch"), 2);
    EXPECT_EQ(run_cli("verify chaccr --n 0"), 2);
    EXPECT_EQ(run_cli("verify chaccr --count x"), 2);
}

TEST(Cli, Random) {
    const auto a1 = (work_dir() / "acc1.json").string();
    const auto a2 = (work_dir() / "acc2.json").string();
    ASSERT_EQ(run_cli("random accretive --n 4 --seed 9 --out " + a1), 0);
    ASSERT_EQ(run_cli("random accretive --n 4 --seed 9 --out " + a2), 0);
    EXPECT_EQ(read_text_file(a1), read_text_file(a2));
    EXPECT_GE(abscissa(read_matrix_file(a1)), 0.0);

    const auto p = (work_dir() / "idem.json").string();
    ASSERT_EQ(run_cli("random idempotent --n 3 --seed 2 --out " + p), 0);
    const CMatrix q = read_matrix_file(p);
    EXPECT_LE(spectral_norm(q * q - q), 1e-12);
    // lossless re-parse
    EXPECT_EQ(matrix_to_json(q).dump(), parse_json_text(read_text_file(p), "idem").dump());

    const auto c = (work_dir() / "contr.json").string();
    ASSERT_EQ(run_cli("random contraction --n 3 --seed 4 --out " + c), 0);
    EXPECT_LE(spectral_norm(read_matrix_file(c)), 1.0 + 1e-12);

    const auto al = (work_dir() / "alg.json").string();
    ASSERT_EQ(run_cli("random algebra --n 4 --seed 3 --out " + al), 0);
    const auto alg = algebra_from_json(parse_json_text(read_text_file(al), "algebra"));
    EXPECT_LE(alg.closure_residual(), 1e-8);

    EXPECT_EQ(run_cli("random widget --n 3"), 2);
}
