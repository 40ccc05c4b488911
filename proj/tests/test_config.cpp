#include "doctest.h"

#include <cstdlib>
#include <sstream>

#include "zenometry/config.hpp"

using namespace zenometry;

TEST_SUITE("config") {

TEST_CASE("serialization round-trips exactly") {
    RunConfig cfg;
    cfg.lambda = 1.7;
    cfg.omega_b = 0.0312345678901234567;
    cfg.alpha_z = 0.123456789012345678;
    cfg.n_range = {2, 5, 7};
    cfg.seed = 0xDEADBEEFCAFEBABEull;
    cfg.noiseless = true;
    const auto lines = serialize_config(cfg);
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    const auto parsed = parse_config_text(text);
    CHECK(serialize_config(parsed) == lines);
    CHECK(parsed.omega_b == cfg.omega_b);
    CHECK(parsed.alpha_z == cfg.alpha_z);
    CHECK(parsed.n_range == cfg.n_range);
    CHECK(parsed.seed == cfg.seed);
}

TEST_CASE("unknown keys and malformed lines are hard errors") {
    CHECK_THROWS_AS(parse_config_text("lambdah = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("lambda 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("lambda = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("probe = bell\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("noiseless = maybe\n"), ConfigError);
    // comments and blank lines are fine
    const auto cfg = parse_config_text("# a comment\n\nlambda = 2.5 # inline\n");
    CHECK(cfg.lambda == 2.5);
}

TEST_CASE("n_range accepts spans and lists") {
    CHECK(parse_config_text("n_range = 2..7\n").n_range == std::vector<int>{2, 3, 4, 5, 6, 7});
    CHECK(parse_config_text("n_range = 2, 4, 7\n").n_range == std::vector<int>{2, 4, 7});
    CHECK_THROWS_AS(parse_config_text("n_range = 7..2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("n_range = \n"), ConfigError);
}

TEST_CASE("presets") {
    const auto n7 = preset_config("paper-n7");
    CHECK(n7.qubits == 7);
    CHECK(n7.samples == 20);
    CHECK(n7.slices == 1000);
    const auto scaling = preset_config("paper-scaling");
    CHECK(scaling.n_range == std::vector<int>{2, 3, 4, 5, 6, 7});
    const auto fre = preset_config("noiseless-scaling");
    CHECK(fre.noiseless);
    CHECK_THROWS_AS(preset_config("paper-n8"), ConfigError);
}

TEST_CASE("model building honors amplitude precedence") {
    RunConfig cfg;
    const auto calibrated = build_noise_model(cfg);
    CHECK(calibrated.quadratic_coefficient() == doctest::Approx(0.37).epsilon(1e-12));

    cfg.alpha_z = 0.25;
    const auto explicit_alpha = build_noise_model(cfg);
    CHECK(explicit_alpha.alpha_z() == 0.25);

    cfg.noiseless = true;
    const auto silent = build_noise_model(cfg);
    CHECK(silent.alpha_z() == 0.0);
}

TEST_CASE("validation rejects unusable values") {
    RunConfig cfg;
    cfg.lambda = -1.0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.grid_points = 1;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.grid_start = 0.9;
    cfg.grid_stop = 0.5;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.samples = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("config hash tracks content") {
    RunConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 999;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("numeric rendering is lossless") {
    for (double v : {0.1, 1.0 / 3.0, 1e-17, 12345.6789012345678, 0.37, 2.0 * std::numbers::pi}) {
        const std::string s = format_full(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("csv table layout") {
    CsvTable t;
    t.add_comment("cfg lambda = 1");
    t.set_columns({"a", "b"});
    t.add_row({1.0, std::string("x")});
    t.add_row({0.5, static_cast<long long>(7)});
    std::ostringstream os;
    t.write(os);
    CHECK(os.str() == "# cfg lambda = 1\na,b\n1,x\n0.5,7\n");
    CHECK_THROWS_AS(t.add_row({1.0}), std::logic_error);
}

} // TEST_SUITE
