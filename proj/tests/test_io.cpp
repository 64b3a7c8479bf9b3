#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "twomode/errors.hpp"
#include "twomode/io.hpp"

using namespace twomode;

TEST_CASE("config parsing with unit-suffixed keys") {
    const std::string text = R"({
      "device": {"ej1_GHz": 11.0, "ej2_GHz": 11.0, "ec_GHz": 0.5, "ep_GHz": 0.2},
      "charge": {"ng_sigma": 0.25, "ng_delta": 0.15},
      "experiment": {"detuning_MHz": 3.5, "shots": 2500, "n_delays": 200,
                     "span_us": 20.0, "t2_us": 15.0},
      "seed": 7
    })";
    const RunConfig cfg = parse_config_text(text);
    CHECK(cfg.device.ej1 == doctest::Approx(11.0));
    CHECK(cfg.device.ec == doctest::Approx(0.5));
    CHECK(cfg.charge.ng_sigma() == doctest::Approx(0.25));
    CHECK(cfg.experiment.delays_us.size() == 200);
    CHECK(cfg.experiment.span_us() == doctest::Approx(20.0));
    CHECK(cfg.seed == 7);
    CHECK(!cfg.config_hash.empty());
}

TEST_CASE("unknown and unitless keys are rejected") {
    CHECK_THROWS_AS(parse_config_text(R"({"device": {"ej1": 11.0}})"),
                    InvalidParameterError);
    CHECK_THROWS_AS(parse_config_text(R"({"devise": {}})"), InvalidParameterError);
    CHECK_THROWS_AS(parse_config_text("not json"), InvalidParameterError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"experiment": {"span": 20.0}})"),
        InvalidParameterError);
}

TEST_CASE("capacitance inputs derive energies, and are exclusive") {
    const RunConfig cfg = parse_config_text(
        R"({"device": {"ej1_GHz": 11.0, "ej2_GHz": 11.0, "c_fF": 100.0, "cm_fF": 30.0}})");
    CHECK(cfg.device.ec == doctest::Approx(0.167324543544).epsilon(1e-9));
    CHECK(cfg.device.ep == doctest::Approx(0.0815707149778).epsilon(1e-9));
    CHECK_THROWS_AS(
        parse_config_text(
            R"({"device": {"ej1_GHz": 11.0, "c_fF": 100.0, "cm_fF": 30.0, "ec_GHz": 0.5}})"),
        InvalidParameterError);
}

TEST_CASE("config hash is stable and content-sensitive") {
    const std::string a = R"({"seed": 1})";
    const std::string b = R"({"seed": 2})";
    CHECK(parse_config_text(a).config_hash == parse_config_text(a).config_hash);
    CHECK(parse_config_text(a).config_hash != parse_config_text(b).config_hash);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("result bundle writes tables and metrics") {
    ResultBundle bundle;
    bundle.command = "unit";
    bundle.config_hash = "deadbeef";
    bundle.seed = 4;
    Table t{"sample", {"x_um", "value"}, {}};
    t.add_row({Table::num(1.5), Table::num(2.25)});
    bundle.tables.push_back(t);
    bundle.metrics["answer"] = 42.0;

    const std::string dir = "/tmp/twomode_test_bundle";
    std::filesystem::remove_all(dir);
    bundle.write(dir);
    std::ifstream tsv(dir + "/sample.tsv");
    REQUIRE(tsv.good());
    std::string header;
    std::getline(tsv, header);
    CHECK(header == "x_um\tvalue");
    std::ifstream mj(dir + "/metrics.json");
    std::string all((std::istreambuf_iterator<char>(mj)),
                    std::istreambuf_iterator<char>());
    CHECK(all.find("\"answer\"") != std::string::npos);
    CHECK(all.find("deadbeef") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("scenario config parses waypoints") {
    const std::string text = R"({
      "scenario": {"duration_min": 20.0, "cadence_min": 2.0, "eps_GHz": 0.004,
        "waypoints": [
          {"time_min": 0.0, "ng_sigma": 0.2, "ng_delta": 0.3},
          {"time_min": 20.0, "ng_sigma": 0.2, "ng_delta": 0.3}
        ]}
    })";
    const RunConfig cfg = parse_config_text(text);
    CHECK(!cfg.scenario.spatial);
    CHECK(cfg.scenario.waypoints.size() == 2);
    CHECK(cfg.scenario.eps == doctest::Approx(0.004));

    const std::string spatial = R"({
      "scenario": {"duration_min": 20.0, "cadence_min": 2.0, "spatial": true,
        "waypoints": [
          {"time_min": 0.0, "x_um": 150.0, "y_um": 80.0, "q_e": 1.0},
          {"time_min": 20.0, "x_um": 150.0, "y_um": 80.0, "q_e": 1.0}
        ]}
    })";
    CHECK(parse_config_text(spatial).scenario.spatial);
}
