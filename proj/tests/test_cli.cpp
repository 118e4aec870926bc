#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path test_root() {
    static const fs::path root = [] {
        auto p = fs::temp_directory_path() /
                 ("paramosc_cli_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return root;
}

fs::path fresh_dir(const std::string& name) {
    static int counter = 0;
    const auto dir = test_root() / (name + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    return dir; // intentionally not created: the tool is expected to create it
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    const auto out_file = test_root() / "stdout.txt";
    const auto err_file = test_root() / "stderr.txt";
    const std::string cmd = std::string(CLI_BINARY_PATH) + " " + args + " > " +
                            out_file.string() + " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

struct Csv {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

Csv read_csv(const fs::path& p) {
    Csv csv;
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            csv.comments.push_back(line);
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header_seen) {
            csv.header = cells;
            header_seen = true;
        } else {
            std::vector<double> row;
            row.reserve(cells.size());
            for (const auto& c : cells) row.push_back(std::stod(c));
            csv.rows.push_back(std::move(row));
        }
    }
    return csv;
}

std::size_t file_count(const fs::path& dir) {
    if (!fs::exists(dir)) return 0;
    std::size_t n = 0;
    for (auto it = fs::directory_iterator(dir); it != fs::directory_iterator(); ++it) ++n;
    return n;
}

std::string csv_hash_comment(const Csv& csv) {
    for (const auto& c : csv.comments) {
        const auto pos = c.find("manifest_hash: ");
        if (pos != std::string::npos) return c.substr(pos + 15);
    }
    return {};
}

nlohmann::json read_manifest(const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

} // namespace

TEST_CASE("help and usage errors") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("entropy --help").exit_code == 0);
    CHECK(run_cli("").exit_code == 2);                       // a subcommand is required
    CHECK(run_cli("no-such-command").exit_code == 2);
    CHECK(run_cli("entropy --no-such-flag 1").exit_code == 2);
}

TEST_CASE("stability chart: file layout and classification content") {
    const auto dir = fresh_dir("chart");
    const auto r = run_cli("--out " + dir.string() +
                           " stability-chart --a 0:2 --b -0.5:0.5 --res 21");
    REQUIRE(r.exit_code == 0);

    const auto csv = read_csv(dir / "chart.csv");
    CHECK(csv.header == std::vector<std::string>{"a", "b", "stable", "imF"});
    REQUIRE(csv.rows.size() == 21 * 21);

    // Row-major in b: first row is (a_min, b_min), then a advances fastest.
    CHECK(csv.rows[0][0] == 0.0);
    CHECK(csv.rows[0][1] == -0.5);
    CHECK(csv.rows[1][0] == doctest::Approx(0.1));
    CHECK(csv.rows[1][1] == -0.5);

    int unstable = 0;
    bool tongue_cell = false;
    for (const auto& row : csv.rows) {
        CHECK((row[2] == 0.0 || row[2] == 1.0));
        CHECK(row[3] >= 0.0);
        if (row[2] == 0.0) {
            ++unstable;
            CHECK(row[3] > 0.0);
            // (1, 0.3) sits inside the first tongue.
            if (std::abs(row[0] - 1.0) < 1e-12 && std::abs(row[1] - 0.3) < 1e-12)
                tongue_cell = true;
        }
    }
    CHECK(unstable > 0);
    CHECK(unstable < static_cast<int>(csv.rows.size()));
    CHECK(tongue_cell);

    const auto manifest = read_manifest(dir);
    CHECK(manifest["subcommand"] == "stability-chart");
    CHECK(manifest["settings"]["resolution"] == 21);
    CHECK(manifest["manifest_hash"] == csv_hash_comment(csv));
}

TEST_CASE("stability chart: default ranges at resolution 200") {
    const auto dir = fresh_dir("chart200");
    const auto r = run_cli("--out " + dir.string() + " stability-chart --res 200");
    REQUIRE(r.exit_code == 0);
    const auto csv = read_csv(dir / "chart.csv");
    REQUIRE(csv.rows.size() == 200 * 200);

    // The first resonance tongue narrows toward (a, b) = (1, 0): every
    // unstable cell with |b| <= 0.15 lies within the widening wedge around
    // a = 1, and such cells exist on both drive signs.
    int near_axis = 0;
    for (const auto& row : csv.rows) {
        if (row[2] == 0.0 && std::abs(row[1]) <= 0.15) {
            ++near_axis;
            CHECK(row[0] > 1.0 - std::abs(row[1]) - 0.1);
            CHECK(row[0] < 1.0 + std::abs(row[1]) + 0.1);
        }
    }
    CHECK(near_axis > 0);
}

TEST_CASE("stability chart: invalid arguments write nothing") {
    const auto dir = fresh_dir("chart_bad");
    CHECK(run_cli("--out " + dir.string() + " stability-chart --res 1").exit_code == 2);
    CHECK(file_count(dir) == 0);
    CHECK(run_cli("--out " + dir.string() + " stability-chart --a 5:0").exit_code == 2);
    CHECK(run_cli("--out " + dir.string() + " stability-chart --a nonsense").exit_code == 2);
    CHECK(file_count(dir) == 0);
}

TEST_CASE("mode line: band structure along the g scan") {
    const auto dir = fresh_dir("line");
    const auto r = run_cli("--out " + dir.string() + " mode-line --samples 21");
    REQUIRE(r.exit_code == 0);

    const auto csv = read_csv(dir / "mode_line.csv");
    CHECK(csv.header ==
          std::vector<std::string>{"g", "a_minus", "b_minus", "reF_minus", "imF_minus",
                                   "stable_minus", "a_plus", "b_plus", "reF_plus",
                                   "imF_plus", "stable_plus"});
    REQUIRE(csv.rows.size() == 21);

    const int ig = csv.col("g"), ism = csv.col("stable_minus");
    const int iim = csv.col("imF_minus"), isp = csv.col("stable_plus");
    int runs = 0;
    bool covers_038 = false;
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        if (i > 0) CHECK(csv.rows[i][ig] > csv.rows[i - 1][ig]);
        CHECK(csv.rows[i][isp] == 1.0);
        const bool u = csv.rows[i][ism] == 0.0;
        if (u && (i == 0 || csv.rows[i - 1][ism] == 1.0)) ++runs;
        if (u && std::abs(csv.rows[i][ig] - 0.38) < 1e-9) covers_038 = true;
        if (u)
            CHECK(csv.rows[i][iim] > 0.0);
        else
            CHECK(csv.rows[i][iim] < 1e-9);
    }
    CHECK(runs == 1);
    CHECK(covers_038);
    CHECK(csv.rows.front()[ig] == 0.3);
    CHECK(csv.rows.back()[ig] == 0.5);
}

TEST_CASE("mode line: zero drive ratio never destabilizes below critical coupling") {
    const auto dir = fresh_dir("line0");
    const auto r = run_cli("--out " + dir.string() +
                           " mode-line --g 0.05:0.45 --samples 9 --delta-ratio 0");
    REQUIRE(r.exit_code == 0);
    const auto csv = read_csv(dir / "mode_line.csv");
    for (const auto& row : csv.rows) {
        CHECK(row[csv.col("stable_minus")] == 1.0);
        CHECK(row[csv.col("stable_plus")] == 1.0);
    }
}

TEST_CASE("entropy: driven default scenario") {
    const auto dir = fresh_dir("entropy");
    const auto r = run_cli("--out " + dir.string() + " entropy --samples 101");
    REQUIRE(r.exit_code == 0);

    const auto csv = read_csv(dir / "entropy.csv");
    CHECK(csv.header == std::vector<std::string>{"t", "L", "purity", "vN_entropy"});
    REQUIRE(csv.rows.size() == 101);
    CHECK(csv.rows.front()[0] == 0.0);
    CHECK(csv.rows.back()[0] == 50.0);
    for (const auto& row : csv.rows) {
        CHECK(row[1] >= 0.0);
        CHECK(row[1] < 1.0);
        CHECK(row[2] == doctest::Approx(1.0 - row[1]).epsilon(1e-12));
        CHECK(row[3] >= 0.0);
    }

    const auto aux = read_csv(dir / "aux.csv");
    CHECK(aux.header.size() == 13);
    REQUIRE(aux.rows.size() == 101);
    const int iwm = aux.col("wronskian_err_minus"), iwp = aux.col("wronskian_err_plus");
    const int ilm = aux.col("l_minus");
    for (const auto& row : aux.rows) {
        CHECK(row[iwm] <= 1e-8);
        CHECK(row[iwp] <= 1e-8);
        // l = sqrt(2)|B|, cross-checked against the B columns in the file.
        const double abs_b = std::hypot(row[1], row[2]);
        CHECK(row[ilm] == doctest::Approx(std::sqrt(2.0) * abs_b).epsilon(1e-12));
    }

    // Same manifest hash stamped into both files.
    CHECK(csv_hash_comment(csv) == csv_hash_comment(aux));
    CHECK(read_manifest(dir)["manifest_hash"] == csv_hash_comment(csv));
}

TEST_CASE("entropy: static coupling pins every row at 1 - sqrt(3)/2") {
    const auto dir = fresh_dir("entropy_static");
    const auto r = run_cli("--out " + dir.string() +
                           " entropy --g 0.4 --delta-g 0 --t-max 20 --samples 51");
    REQUIRE(r.exit_code == 0);
    const auto csv = read_csv(dir / "entropy.csv");
    const double expected = 1.0 - std::sqrt(3.0) / 2.0;
    for (const auto& row : csv.rows)
        CHECK(std::abs(row[1] - expected) < 1e-9);
}

TEST_CASE("entropy: uncoupled oscillators stay pure") {
    const auto dir = fresh_dir("entropy_free");
    const auto r = run_cli("--out " + dir.string() +
                           " entropy --g 0 --delta-g 0 --t-max 10 --samples 21");
    REQUIRE(r.exit_code == 0);
    const auto csv = read_csv(dir / "entropy.csv");
    for (const auto& row : csv.rows) {
        CHECK(std::abs(row[1]) < 1e-9);
        CHECK(row[3] == doctest::Approx(0.0).epsilon(1e-6));
    }
}

TEST_CASE("entropy: resonant drive raises the late-window mean") {
    const auto dir = fresh_dir("entropy_resonant");
    const auto r = run_cli("--out " + dir.string() +
                           " entropy --g 0.38 --delta-ratio 0.1 --t-max 50 --samples 501");
    REQUIRE(r.exit_code == 0);
    const auto csv = read_csv(dir / "entropy.csv");
    double early = 0.0, late = 0.0;
    int n_early = 0, n_late = 0;
    for (const auto& row : csv.rows) {
        if (row[0] <= 10.0) {
            early += row[1];
            ++n_early;
        }
        if (row[0] >= 40.0) {
            late += row[1];
            ++n_late;
        }
    }
    early /= n_early;
    late /= n_late;
    CHECK(late > early + 0.2);
    // Frozen window means for this configuration.
    CHECK(early == doctest::Approx(0.1479).epsilon(0.02));
    CHECK(late == doctest::Approx(0.6580).epsilon(0.02));
}

TEST_CASE("entropy: invalid arguments write nothing") {
    const auto dir = fresh_dir("entropy_bad");
    CHECK(run_cli("--out " + dir.string() + " entropy --t-max -5").exit_code == 2);
    CHECK(run_cli("--out " + dir.string() + " entropy --samples 1").exit_code == 2);
    CHECK(run_cli("--out " + dir.string() + " entropy --g 0.1 --delta-g 0.2").exit_code == 2);
    CHECK(run_cli("--fixed-step -0.1 --out " + dir.string() + " entropy").exit_code == 2);
    CHECK(file_count(dir) == 0);
}

TEST_CASE("wigner: one normalized grid file per requested time") {
    const auto dir = fresh_dir("wigner");
    const auto r = run_cli("--out " + dir.string() + " wigner --times 0,32 --res 41");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir / "wigner_t0.csv"));
    CHECK(fs::exists(dir / "wigner_t32.csv"));

    for (const char* name : {"wigner_t0.csv", "wigner_t32.csv"}) {
        const auto csv = read_csv(dir / name);
        CHECK(csv.header == std::vector<std::string>{"q", "p", "W"});
        REQUIRE(csv.rows.size() == 41 * 41);
        CHECK(csv.rows[0][0] == -8.0);
        CHECK(csv.rows[0][1] == -8.0);
        CHECK(csv.rows[1][0] == -8.0); // p advances fastest
        CHECK(csv.rows[1][1] == doctest::Approx(-7.6));
        const double cell = 0.4 * 0.4;
        double total = 0.0;
        for (const auto& row : csv.rows) total += row[2] * cell;
        CHECK(total == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("density: uncoupled scenario is exactly exchange-symmetric") {
    const auto dir = fresh_dir("density");
    const auto r = run_cli("--out " + dir.string() +
                           " density --g 0 --delta-g 0 --times 0 --res 31");
    REQUIRE(r.exit_code == 0);
    const auto csv = read_csv(dir / "density_t0.csv");
    REQUIRE(csv.rows.size() == 31 * 31);
    const auto value = [&](int i1, int i2) { return csv.rows[i1 * 31 + i2][2]; };
    for (int i1 = 0; i1 < 31; ++i1)
        for (int i2 = 0; i2 < i1; ++i2)
            CHECK(value(i1, i2) == value(i2, i1)); // exact, not approximate
}

TEST_CASE("general-check: conservation report and dual-path reduction") {
    const auto dir = fresh_dir("general");
    const auto r = run_cli("--out " + dir.string() + " general-check --periods 5");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("max constraint residual") != std::string::npos);
    CHECK(r.out.find("reduction deviation") != std::string::npos);

    const auto csv = read_csv(dir / "general.csv");
    CHECK(csv.header.size() == 12);
    REQUIRE(csv.rows.size() == 11); // t0 plus two landings per period
    for (const auto& row : csv.rows) {
        CHECK(row[csv.col("wc1_res")] <= 1e-8);
        CHECK(row[csv.col("wc2_res")] <= 1e-8);
        CHECK(row[csv.col("wc3_res")] <= 1e-8);
    }

    const auto manifest = read_manifest(dir);
    CHECK(manifest["settings"]["max_constraint_residual"].get<double>() <= 1e-8);
    CHECK(manifest["settings"]["reduction_max_deviation"].get<double>() <= 1e-8);
}

TEST_CASE("general-check: corrupted seed exits 3 and writes nothing") {
    const auto dir = fresh_dir("general_corrupt");
    const auto r = run_cli("--out " + dir.string() +
                           " general-check --periods 2 --corrupt-seed");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("numerical failure") != std::string::npos);
    CHECK(file_count(dir) == 0);
}

namespace {

std::string data_lines(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') out += line + "\n";
    return out;
}

} // namespace

TEST_CASE("fixed-step runs are byte-identical") {
    const std::string args = " entropy --t-max 20 --samples 51 --fixed-step 0.01";

    // Re-running the same manifest (identical settings and output directory)
    // reproduces every output file byte for byte.
    const auto d1 = fresh_dir("det1");
    REQUIRE(run_cli("--out " + d1.string() + args).exit_code == 0);
    const auto entropy1 = slurp(d1 / "entropy.csv");
    const auto aux1 = slurp(d1 / "aux.csv");
    const auto manifest1 = slurp(d1 / "manifest.json");
    REQUIRE(!entropy1.empty());
    fs::remove_all(d1);
    REQUIRE(run_cli("--out " + d1.string() + args).exit_code == 0);
    CHECK(slurp(d1 / "entropy.csv") == entropy1);
    CHECK(slurp(d1 / "aux.csv") == aux1);
    CHECK(slurp(d1 / "manifest.json") == manifest1);

    // A different output directory changes the manifest (and therefore its
    // hash comment) but never the numbers.
    const auto d2 = fresh_dir("det2");
    REQUIRE(run_cli("--out " + d2.string() + args).exit_code == 0);
    CHECK(data_lines(slurp(d2 / "entropy.csv")) == data_lines(entropy1));
    CHECK(data_lines(slurp(d2 / "aux.csv")) == data_lines(aux1));
}

TEST_CASE("config file: loading, overriding, and rejection") {
    const auto cfg_ok = test_root() / "scenario_ok.json";
    {
        std::ofstream out(cfg_ok);
        out << R"({"omega": 1.0, "g": 0.42, "delta_g": 0.021, "Omega": 1.3})";
    }
    const auto d1 = fresh_dir("config1");
    REQUIRE(run_cli("--config " + cfg_ok.string() + " --out " + d1.string() +
                    " entropy --t-max 10 --samples 11")
                .exit_code == 0);
    auto manifest = read_manifest(d1);
    CHECK(manifest["scenario"]["g"].get<double>() == 0.42);
    CHECK(manifest["scenario"]["delta_g"].get<double>() == 0.021);
    CHECK(manifest["scenario"]["Omega"].get<double>() == 1.3);

    // Command-line flags override the config file.
    const auto d2 = fresh_dir("config2");
    REQUIRE(run_cli("--config " + cfg_ok.string() + " --out " + d2.string() +
                    " entropy --g 0.44 --t-max 10 --samples 11")
                .exit_code == 0);
    CHECK(read_manifest(d2)["scenario"]["g"].get<double>() == 0.44);

    // Unknown keys and missing files are usage errors; nothing is written.
    const auto cfg_bad = test_root() / "scenario_bad.json";
    {
        std::ofstream out(cfg_bad);
        out << R"({"omega": 1.0, "coupling": 0.4})";
    }
    const auto d3 = fresh_dir("config3");
    CHECK(run_cli("--config " + cfg_bad.string() + " --out " + d3.string() +
                  " entropy")
              .exit_code == 2);
    CHECK(run_cli("--config /nonexistent/path.json --out " + d3.string() +
                  " entropy")
              .exit_code == 2);
    CHECK(file_count(d3) == 0);
}

TEST_CASE("time parsing rejects malformed lists and ranges") {
    const auto dir = fresh_dir("times_bad");
    CHECK(run_cli("--out " + dir.string() + " wigner --times 5,3").exit_code == 2);
    CHECK(run_cli("--out " + dir.string() + " wigner --times ,").exit_code == 2);
    CHECK(run_cli("--out " + dir.string() + " wigner --range 8:-8").exit_code == 2);
    CHECK(run_cli("--out " + dir.string() + " density --times -1").exit_code == 2);
    CHECK(file_count(dir) == 0);
}
