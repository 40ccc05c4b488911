#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "zenometry_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ZENOMETRY_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// the `# cfg ` block of an output file, in config-file syntax
std::string extract_config_block(const std::string& contents) {
    std::istringstream in(contents);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("# cfg ", 0) == 0) out += line.substr(6) + "\n";
    return out;
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& contents) {
    std::istringstream in(contents);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        rows.push_back(std::move(row));
    }
    return rows;
}

double note_value(const std::string& contents, const std::string& key) {
    std::istringstream in(contents);
    std::string line;
    const std::string prefix = "# note " + key + " = ";
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) return std::strtod(line.c_str() + prefix.size(), nullptr);
    FAIL("note not found: ", key);
    return 0.0;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("byte-identical reruns regardless of worker count") {
    const auto a = scratch_dir("det_a");
    const auto b = scratch_dir("det_b");
    REQUIRE(run_cli("ramsey --preset paper-n7 --seed 7 --workers 1 --out " + a.string()) == 0);
    REQUIRE(run_cli("ramsey --preset paper-n7 --seed 7 --workers 4 --out " + b.string()) == 0);
    for (const auto* name : {"ramsey_unentangled.csv", "ramsey_ghz.csv",
                             "ramsey_fit_unentangled.json", "ramsey_fit_ghz.json",
                             "ramsey_spectrum_ghz.csv"})
        CHECK(slurp(a / name) == slurp(b / name));
}

TEST_CASE("outputs regenerate byte-identically from their own config header") {
    const auto a = scratch_dir("regen_a");
    const auto b = scratch_dir("regen_b");
    REQUIRE(run_cli("ramsey --preset paper-n7 --seed 321 --out " + a.string()) == 0);
    const auto original = slurp(a / "ramsey_ghz.csv");
    const auto cfg_path = b / "echo.cfg";
    write_file(cfg_path, extract_config_block(original));
    REQUIRE(run_cli("ramsey --config " + cfg_path.string() + " --out " + b.string()) == 0);
    CHECK(slurp(b / "ramsey_ghz.csv") == original);
}

TEST_CASE("config errors exit with code 2") {
    const auto dir = scratch_dir("cfg_err");
    const auto bad = dir / "bad.cfg";
    write_file(bad, "lambdah = 1\n");
    CHECK(run_cli("spectrum --config " + bad.string() + " --out " + dir.string()) == 2);

    write_file(bad, "markovian = true\n");
    CHECK(run_cli("ramsey --config " + bad.string() + " --out " + dir.string()) == 2);

    CHECK(run_cli("spectrum --preset paper-n8 --out " + dir.string()) == 2);
    CHECK(run_cli("--out " + dir.string()) == 2);  // missing subcommand
}

TEST_CASE("nyquist violations exit with code 3") {
    const auto dir = scratch_dir("grid_err");
    const auto cfg = dir / "coarse.cfg";
    write_file(cfg, "grid_points = 21\n");  // dt = 0.06 ms > pi / (7 * 10)
    CHECK(run_cli("ramsey --config " + cfg.string() + " --out " + dir.string()) == 3);
}

TEST_CASE("oracle exit codes: pass, statistical fail, convention mismatch") {
    const auto dir = scratch_dir("oracle");
    const auto cfg = dir / "o.cfg";
    write_file(cfg, "noiseless = true\nprobe = ghz\n");
    CHECK(run_cli("oracle-check --config " + cfg.string() + " --out " + dir.string()) == 0);

    write_file(cfg, "samples = 2000\nprobe = ghz\ngrid_stop = 0.6\ngrid_points = 121\n");
    CHECK(run_cli("oracle-check --config " + cfg.string() + " --workers 2 --out " +
                  dir.string()) == 0);

    write_file(cfg, "samples = 2000\nprobe = ghz\ngrid_stop = 0.6\ngrid_points = 121\n"
                    "lindblad_factor_two = true\n");
    CHECK(run_cli("oracle-check --config " + cfg.string() + " --workers 2 --out " +
                  dir.string()) == 4);
}

TEST_CASE("spectrum: decoherence rows carry the calibrated quadratic law") {
    const auto dir = scratch_dir("spectrum");
    REQUIRE(run_cli("spectrum --out " + dir.string()) == 0);
    const auto rows = parse_csv_rows(slurp(dir / "spectrum_decoherence.csv"));
    REQUIRE(!rows.empty());
    CHECK(rows[0][0] == 0.0);  // t = 0 row present
    CHECK(rows[0][1] == 0.0);  // Gamma(0) = 0
    for (std::size_t k = 1; k < 40; ++k)
        CHECK(rows[k][3] == doctest::Approx(0.37).epsilon(0.02));

    const auto quiet = dir / "quiet.cfg";
    write_file(quiet, "noiseless = true\n");
    REQUIRE(run_cli("spectrum --config " + quiet.string() + " --out " + dir.string()) == 0);
    for (const auto& row : parse_csv_rows(slurp(dir / "spectrum_decoherence.csv")))
        CHECK(row[1] == 0.0);
}

TEST_CASE("scaling summaries expose the fitted exponents") {
    const auto dir = scratch_dir("scaling");
    REQUIRE(run_cli("scaling --preset paper-scaling --out " + dir.string()) == 0);
    const auto contents = slurp(dir / "scaling.csv");
    CHECK(note_value(contents, "colored_r_exponent") == doctest::Approx(0.25).epsilon(0.12));
    CHECK(note_value(contents, "colored_delta_e_exponent") ==
          doctest::Approx(-0.75).epsilon(0.05));
    CHECK(fs::exists(dir / "scaling_fig4.dat"));
    CHECK(fs::exists(dir / "scaling_fig4.gp"));

    REQUIRE(run_cli("scaling --preset noiseless-scaling --out " + dir.string()) == 0);
    const auto noiseless = slurp(dir / "scaling.csv");
    CHECK(note_value(noiseless, "noiseless_r_exponent") == doctest::Approx(0.5).epsilon(0.01));
    CHECK(note_value(noiseless, "noiseless_delta_e_exponent") ==
          doctest::Approx(-1.0).epsilon(0.01));

    const auto mk = dir / "markovian.cfg";
    write_file(mk, "markovian = true\n");
    REQUIRE(run_cli("scaling --config " + mk.string() + " --out " + dir.string()) == 0);
    const auto markovian = slurp(dir / "scaling.csv");
    CHECK(std::abs(note_value(markovian, "markovian_r_exponent")) < 0.05);
}

TEST_CASE("noiseless ramsey spectrum peaks at the n-fold fringe") {
    const auto dir = scratch_dir("fft");
    const auto cfg = dir / "quiet.cfg";
    write_file(cfg, "noiseless = true\nprobe = ghz\n");
    REQUIRE(run_cli("ramsey --config " + cfg.string() + " --out " + dir.string()) == 0);
    const auto rows = parse_csv_rows(slurp(dir / "ramsey_spectrum_ghz.csv"));
    REQUIRE(!rows.empty());
    std::size_t peak = 0;
    for (std::size_t k = 1; k < rows.size(); ++k)
        if (rows[k][1] > rows[peak][1]) peak = k;
    const double bin = 2.0 * 3.14159265358979 / 1.2;
    CHECK(std::abs(rows[peak][0] - 70.0) <= bin);
}

TEST_CASE("GHZ fit report carries the n-scaled envelope coefficient") {
    const auto dir = scratch_dir("envfit");
    REQUIRE(run_cli("ramsey --preset paper-n7 --out " + dir.string()) == 0);
    const auto json = slurp(dir / "ramsey_fit_ghz.json");
    const std::string key = "\"envelope_coefficient\": ";
    const auto pos = json.find(key);
    REQUIRE(pos != std::string::npos);
    const double coeff = std::strtod(json.c_str() + pos + key.size(), nullptr);
    // 7 * c with c ~ 0.370; m = 20 scatter is the experiment-scale spread
    CHECK(coeff > 2.2);
    CHECK(coeff < 3.0);
}

TEST_CASE("sensitivity emits curves plus optima with the n=7 ratio") {
    const auto dir = scratch_dir("sens");
    REQUIRE(run_cli("sensitivity --out " + dir.string()) == 0);
    const auto contents = slurp(dir / "sensitivity_optima.csv");
    CHECK(note_value(contents, "ratio") == doctest::Approx(1.627).epsilon(0.05));
    const auto rows = parse_csv_rows(slurp(dir / "sensitivity_optima.csv"));
    REQUIRE(rows.size() == 2);
    // optimal-time ratio t_u / t_e tracks sqrt(7)
    CHECK(rows[0][2] / rows[1][2] == doctest::Approx(std::sqrt(7.0)).epsilon(0.05));

    // n = 1: both probes share the same optimum
    const auto cfg = dir / "n1.cfg";
    write_file(cfg, "qubits = 1\n");
    REQUIRE(run_cli("sensitivity --config " + cfg.string() + " --out " + dir.string()) == 0);
    const auto n1 = parse_csv_rows(slurp(dir / "sensitivity_optima.csv"));
    REQUIRE(n1.size() == 2);
    CHECK(n1[0][2] == doctest::Approx(n1[1][2]).epsilon(1e-9));
    CHECK(n1[0][3] == doctest::Approx(n1[1][3]).epsilon(1e-9));

    // noiseless: curves only, no optima rows, still exit 0
    write_file(cfg, "noiseless = true\n");
    REQUIRE(run_cli("sensitivity --config " + cfg.string() + " --out " + dir.string()) == 0);
    CHECK(parse_csv_rows(slurp(dir / "sensitivity_optima.csv")).empty());
}

TEST_CASE("trajectory and slice dumps have the documented columns") {
    const auto dir = scratch_dir("dumps");
    const auto cfg = dir / "d.cfg";
    write_file(cfg, "samples = 2\nqubits = 2\nslices = 8\ngrid_points = 481\n"
                    "dump_trajectories = true\ndump_slices = true\n");
    REQUIRE(run_cli("ramsey --config " + cfg.string() + " --out " + dir.string()) == 0);
    const auto traj = slurp(dir / "trajectories.csv");
    CHECK(traj.find("sample_id,qubit_id,j,omega_j_rad_per_ms,amplitude_rad_per_ms,psi_rad") !=
          std::string::npos);
    CHECK(parse_csv_rows(traj).size() == 2u * 2u * 50u);
    const auto slices = slurp(dir / "slices.csv");
    CHECK(slices.find("sample_id,qubit_id,slice_index,theta_rad") != std::string::npos);
    CHECK(parse_csv_rows(slices).size() == 2u * 2u * 8u);
}

} // TEST_SUITE
