#include "helitube/cli.hpp"
#include "helitube/errors.hpp"
#include "helitube/geometry.hpp"

#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace helitube;
using namespace helitube::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("helitube_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Csv {
    std::string header;
    std::vector<std::vector<double>> rows;
};

Csv read_csv(const fs::path& p) {
    std::ifstream in(p);
    Csv c;
    std::getline(in, c.header);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        c.rows.push_back(row);
    }
    return c;
}

RunConfig config_with(const Entries& e, const fs::path& out) {
    Entries all = e;
    all["out"] = out.string();
    return make_config(all);
}

// Runs the installed binary; returns its exit status.
int run_binary(const std::string& args) {
    const char* exe = std::getenv("HELITUBE_CLI");
    REQUIRE_MESSAGE(exe != nullptr, "HELITUBE_CLI must point at the helitube executable");
    const std::string cmd = std::string(exe) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config defaults and parsing") {
    const RunConfig d = make_config({});
    CHECK(d.kappa == 1.0);
    CHECK(d.tau == 1.0);
    CHECK(d.rho0 == 0.1);
    CHECK(d.n_s == 64);
    CHECK(d.n_phi == 64);
    CHECK(d.n_harmonics == 7);
    CHECK(d.kpath.count == 101);
    CHECK(d.kpath.start == 0.0);
    CHECK(d.kpath.end == -0.5);
    CHECK(d.kpath.n == 0.0);
    CHECK(d.eps_sweep.size() == 5);
    CHECK_FALSE(d.units.physical);
    CHECK(d.units.energy_scale() == 1.0);

    const RunConfig c = make_config({{"kappa", "0.5"},
                                     {"tau", "-2"},
                                     {"grid", "16x32"},
                                     {"harmonics", "5"},
                                     {"kpath", "0.1:-0.3:5"},
                                     {"transverse_n", "0.5"},
                                     {"eps_sweep", "0.01, 0.03"},
                                     {"units", "physical:9.1093837e-31"}});
    CHECK(c.tau == -2.0);
    CHECK(c.n_s == 16);
    CHECK(c.n_phi == 32);
    CHECK(c.n_harmonics == 5);
    CHECK(c.kpath.n == 0.5);
    const std::vector<double> ks = c.kpath.k_s_values();
    REQUIRE(ks.size() == 5);
    CHECK(ks.front() == 0.1);
    CHECK(ks.back() == -0.3);
    CHECK(ks[2] == doctest::Approx(-0.1));
    CHECK(c.eps_sweep == std::vector<double>{0.01, 0.03});
    CHECK(c.units.physical);
    const double hbar = 1.054571817e-34;
    CHECK(c.units.energy_scale() == doctest::Approx(hbar * hbar / (2 * 9.1093837e-31)));
    // Default path runs to the zone boundary -tau/2.
    CHECK(make_config({{"tau", "3"}}).kpath.end == -1.5);

    CHECK(make_config({{"tau", "0"}, {"s_period", "2"}}).s_period == 2.0);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(make_config({{"bogus", "1"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"kappa", "one"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"kappa", "1.0x"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"rho0", "nan"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"grid", "64"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"grid", "1x8"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"harmonics", "2"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"kpath", "0:1"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"eps_sweep", "0.5,1.0"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"units", "imperial"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"units", "physical:-1"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"tau", "0"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"rho0", "1.0"}}), ConfigError);
    CHECK_THROWS_AS(make_config({{"rho0", "-0.1"}}), ConfigError);
    CHECK_THROWS_AS(read_config_file("/nonexistent/helitube.cfg"), ConfigError);
}

TEST_CASE("config file") {
    const fs::path dir = scratch("config");
    std::ofstream(dir / "run.cfg") << "# thin tube\n"
                                      "kappa = 0.5   # trailing comment\n"
                                      "\n"
                                      "grid=8x16\n";
    const Entries e = read_config_file(dir / "run.cfg");
    CHECK(e.at("kappa") == "0.5");
    CHECK(e.at("grid") == "8x16");
    CHECK(e.size() == 2);

    std::ofstream(dir / "bad.cfg") << "kappa 0.5\n";
    CHECK_THROWS_AS(read_config_file(dir / "bad.cfg"), ConfigError);
}

TEST_CASE("number formatting and atomic writes") {
    CHECK(format_number(0.1) == "1.0000000000000001e-01");
    CHECK(format_number(25.25) == "2.5250000000000000e+01");
    CHECK(format_number(-0.0) == "-0.0000000000000000e+00");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");

    const fs::path dir = scratch("atomic");
    write_atomic(dir / "sub" / "f.txt", "first\n");
    write_atomic(dir / "sub" / "f.txt", "second\n");
    CHECK(slurp(dir / "sub" / "f.txt") == "second\n");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "sub")) ++files;
    CHECK(files == 1);
}

TEST_CASE("geometry command") {
    const fs::path dir = scratch("geometry");
    SUBCASE("straight tube") {
        REQUIRE(cmd_geometry(config_with({{"kappa", "0"}, {"grid", "8x12"}}, dir)) == Ok);
        const Csv c = read_csv(dir / "geometry.csv");
        CHECK(c.header == "s,phi,x,y,z,h,kappa1,kappa2,M,K");
        CHECK(c.rows.size() == 96);
        for (const auto& r : c.rows) CHECK(r[5] == 1.0);
    }
    SUBCASE("default parameters") {
        REQUIRE(cmd_geometry(config_with({{"grid", "16x16"}}, dir)) == Ok);
        const Csv c = read_csv(dir / "geometry.csv");
        CHECK(c.rows.size() == 256);
        const HelixSpec spec(1.0, 1.0, 0.1);
        for (const auto& r : c.rows) {
            CHECK(r[6] == doctest::Approx(10.0).epsilon(1e-15));
            CHECK(r[5] == doctest::Approx(metric_h(spec, r[0], r[1])).epsilon(1e-15));
            CHECK(r[8] == doctest::Approx(0.5 * (r[6] + r[7])).epsilon(1e-15));
            CHECK(r[9] == doctest::Approx(r[6] * r[7]).epsilon(1e-15));
        }
    }
}

TEST_CASE("potential command") {
    const fs::path dir = scratch("potential");
    SUBCASE("straight tube of unit radius") {
        REQUIRE(cmd_potential(config_with({{"kappa", "0"}, {"rho0", "1"}, {"grid", "8x8"}}, dir)) == Ok);
        const Csv c = read_csv(dir / "potential.csv");
        CHECK(c.header == "s,phi,v_curv,v_kin,v_eff");
        CHECK(c.rows.size() == 64);
        for (const auto& r : c.rows) CHECK(r[4] == -0.25);
    }
    SUBCASE("reflection symmetry of the grid") {
        const std::size_t n = 16;
        REQUIRE(cmd_potential(config_with({{"grid", "16x16"}}, dir)) == Ok);
        const Csv c = read_csv(dir / "potential.csv");
        REQUIRE(c.rows.size() == n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double v = c.rows[i * n + j][4];
                const double w = c.rows[((n - i) % n) * n + (n - j) % n][4];
                CHECK(std::abs(v - w) <= 1e-14 * std::abs(v));
            }
        }
    }
    SUBCASE("physical units scale energies only") {
        REQUIRE(cmd_potential(config_with({{"grid", "4x4"}}, dir)) == Ok);
        const Csv nat = read_csv(dir / "potential.csv");
        REQUIRE(cmd_potential(config_with({{"grid", "4x4"}, {"units", "physical:2e-30"}}, dir)) == Ok);
        const Csv phys = read_csv(dir / "potential.csv");
        const double scale = make_config({{"units", "physical:2e-30"}}).units.energy_scale();
        for (std::size_t p = 0; p < nat.rows.size(); ++p) {
            CHECK(phys.rows[p][0] == nat.rows[p][0]);
            CHECK(phys.rows[p][4] == doctest::Approx(scale * nat.rows[p][4]).epsilon(1e-15));
        }
    }
}

TEST_CASE("bands command") {
    const fs::path dir = scratch("bands");
    SUBCASE("free parabolas at eps = 0") {
        REQUIRE(cmd_bands(config_with({{"kappa", "0"}, {"grid", "16x32"}, {"kpath", "0:-0.5:11"}}, dir)) == Ok);
        const Csv c = read_csv(dir / "bands.csv");
        CHECK(c.header ==
              "k_s,n,E_twoband_1,E_twoband_2,E_oracle_pert_1,E_oracle_pert_2,E_oracle_full_1,E_oracle_full_2");
        REQUIRE(c.rows.size() == 11);
        const double a = 25.0;
        for (const auto& r : c.rows) {
            const double k = r[0];
            const double e0 = k * k - a;
            const double e1 = (k + 1.0) * (k + 1.0) + 100.0 - a;
            CHECK(r[2] == doctest::Approx(std::min(e0, e1)).epsilon(1e-15));
            CHECK(r[3] == doctest::Approx(std::max(e0, e1)).epsilon(1e-15));
        }
        const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
        CHECK(j["gap"]["two_band"].get<double>() == 0.0);
    }
    SUBCASE("default tube") {
        REQUIRE(cmd_bands(config_with({{"grid", "16x32"}, {"kpath", "0:-0.5:6"}}, dir)) == Ok);
        const std::string text = slurp(dir / "summary.json");
        CHECK(text.find("\"a\": 25.25") != std::string::npos);
        const auto j = nlohmann::json::parse(text);
        for (const char* key : {"units", "kappa", "tau", "rho0", "a", "epsilon", "grid", "n_harmonics", "path_points",
                                "zone_boundary", "gap", "agreement"}) {
            CHECK_MESSAGE(j.contains(key), key);
        }
        CHECK(j["path_points"].get<int>() == 6);
    }
    SUBCASE("gaps open at eps = 0.05") {
        REQUIRE(cmd_bands(config_with({{"rho0", "0.05"}, {"grid", "16x32"}, {"kpath", "0:-0.5:3"}}, dir)) == Ok);
        const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
        CHECK(j["epsilon"].get<double>() == 0.05);
        for (const char* m : {"two_band", "oracle_perturbed", "oracle_full"}) CHECK(j["gap"][m].get<double>() > 0.0);
        const Csv c = read_csv(dir / "bands.csv");
        for (const auto& r : c.rows) {
            for (std::size_t col = 2; col < 8; col += 2) CHECK(r[col] <= r[col + 1]);
        }
    }
    SUBCASE("zero torsion is rejected") {
        CHECK_THROWS_AS(cmd_bands(config_with({{"tau", "0"}, {"s_period", "1"}}, dir)), ConfigError);
    }
}

TEST_CASE("gap-scan command") {
    const fs::path dir = scratch("gapscan");
    SUBCASE("default sweep") {
        REQUIRE(cmd_gap_scan(config_with({{"grid", "16x32"}}, dir)) == Ok);
        const Csv c = read_csv(dir / "gapscan.csv");
        CHECK(c.header == "epsilon,gap_twoband,gap_oracle,ratio_to_eps_kappa2_over_4");
        REQUIRE(c.rows.size() == 5);
        for (const auto& r : c.rows) {
            CHECK(r[1] > 0.0);
            CHECK(r[2] > 0.0);
            CHECK(r[3] >= 0.5);
            CHECK(r[3] <= 2.0);
        }
        const auto j = nlohmann::json::parse(slurp(dir / "gapscan.json"));
        CHECK(j["r_squared"].get<double>() >= 0.999);
        CHECK(j["points"].get<int>() == 5);
        CHECK(j.contains("slope"));
        CHECK(j.contains("intercept"));
    }
    SUBCASE("single eps = 0 row") {
        REQUIRE(cmd_gap_scan(config_with({{"eps_sweep", "0"}}, dir)) == Ok);
        const Csv c = read_csv(dir / "gapscan.csv");
        REQUIRE(c.rows.size() == 1);
        CHECK(c.rows[0][1] == 0.0);
        CHECK(std::abs(c.rows[0][2]) <= 1e-12);
        CHECK(std::isnan(c.rows[0][3]));
    }
}

TEST_CASE("cylinder check") {
    const CylinderCheck r = run_cylinder_check(1.0, 1.0, 64, 64);
    CHECK(r.pass());
    REQUIRE(r.rows.size() == 4);
    for (const auto& row : r.rows) {
        CHECK(row.exact == row.n * row.n - 0.25);
        CHECK(row.raw.size() == 3);
        CHECK(row.extrapolated_rel_error <= 1e-6);
    }
    const fs::path dir = scratch("cylinder");
    CHECK(cmd_cylinder_check(config_with({{"kappa", "0"}, {"rho0", "1"}}, dir)) == Ok);
    const auto j = nlohmann::json::parse(slurp(dir / "cylinder.json"));
    CHECK(j.contains("pass"));
}

TEST_CASE("verify command") {
    const fs::path dir = scratch("verify");
    CHECK(cmd_verify(config_with({}, dir)) == Ok);
    const auto j = nlohmann::json::parse(slurp(dir / "verify.json"));
    CHECK(j["pass"].get<bool>());
    REQUIRE(j["checks"].size() == 6);
    for (const auto& ch : j["checks"]) {
        for (const char* key : {"name", "tolerance", "comparison", "measured", "pass", "grid"}) CHECK(ch.contains(key));
    }
    CHECK(cmd_verify(config_with({{"corrupt_vkin", "1e-3"}}, dir)) == VerifyFailed);
    const auto bad = nlohmann::json::parse(slurp(dir / "verify.json"));
    CHECK_FALSE(bad["pass"].get<bool>());
    CHECK_FALSE(bad["checks"][0]["pass"].get<bool>());
}

TEST_CASE("executable exit codes and determinism") {
    const fs::path dir = scratch("binary");
    const std::string out = " --out " + dir.string();
    CHECK(run_binary("--grid 8x8 geometry" + out) == 0);
    CHECK(fs::exists(dir / "geometry.csv"));
    CHECK(run_binary("--rho0 2 geometry" + out) == 2);
    CHECK(run_binary("--bogus 1 geometry" + out) == 2);
    CHECK(run_binary("--config /nonexistent.cfg geometry" + out) == 2);
    CHECK(run_binary("geometry --grid 8" + out) == 2);
    CHECK(run_binary("") == 2);
    CHECK(run_binary("--tau 0 --s-period 1 bands" + out) == 2);
    CHECK(run_binary("cylinder-check" + out) == 0);
    CHECK(run_binary("--rho0 1 cylinder-check" + out) == 2);
    CHECK(run_binary("--kappa 0 --rho0 1 cylinder-check" + out) == 0);
    CHECK(run_binary("--corrupt-vkin 1e-3 verify" + out) == 1);

    // Flags override the config file.
    std::ofstream(dir / "run.cfg") << "kappa = 0.5\ngrid = 16x32\nkpath = 0:-0.5:5\n";
    CHECK(run_binary("--config " + (dir / "run.cfg").string() + " --kappa 0.25 bands" + out) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(j["kappa"].get<double>() == 0.25);
    CHECK(j["grid"]["n_phi"].get<int>() == 32);

    const fs::path second = scratch("binary2");
    CHECK(run_binary("--grid 16x32 bands" + out) == 0);
    CHECK(run_binary("--grid 16x32 bands --out " + second.string()) == 0);
    CHECK(slurp(dir / "bands.csv") == slurp(second / "bands.csv"));
    CHECK(slurp(dir / "summary.json") == slurp(second / "summary.json"));
    CHECK_FALSE(slurp(dir / "bands.csv").empty());
}
