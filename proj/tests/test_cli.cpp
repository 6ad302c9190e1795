#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "qusd/cli.hpp"
#include "test_helpers.hpp"

using namespace qusd;
using nlohmann::json;

namespace {

cli::RunConfig config_for(const std::string& command, const std::string& inline_json) {
  cli::RunConfig config;
  config.command = command;
  config.input = json::parse(inline_json);
  if (command == "sweep") config.format = "csv";
  return config;
}

const char* optimal_two_state_spec =
    R"({"type":"two_state","p_plus":0.5,"p_minus":0.5,)"
    R"("alpha":{"re":0.25,"im":0.0},"alpha_plus":{"re":0.5,"im":0.0}})";

struct BinaryResult {
  int exit_code;
  std::string output;
};

BinaryResult run_binary(const std::string& args) {
  const std::string out_path = "qusd_cli_test_output.tmp";
  const std::string command = std::string(QUSD_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(command.c_str());
  std::ifstream file(out_path, std::ios::binary);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  std::remove(out_path.c_str());
  return BinaryResult{WIFEXITED(status) ? WEXITSTATUS(status) : -1, buffer.str()};
}

std::vector<std::string> csv_rows(const std::string& payload) {
  std::vector<std::string> rows;
  std::istringstream stream(payload);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(line);
  }
  return rows;
}

}  // namespace

TEST_CASE("analyze reports the optimal two-state protocol") {
  cli::Outcome outcome = cli::run(config_for("analyze", optimal_two_state_spec));
  REQUIRE(outcome.exit_code == 0);
  json doc = json::parse(outcome.payload);
  CHECK(doc["schema"] == cli::schema_version);
  CHECK(doc["config"]["command"] == "analyze");
  CHECK(doc["success_probability"].get<double>() == doctest::Approx(0.75));
  CHECK(doc["separability"]["ppt"] == true);
  CHECK(doc["separability"]["consistent"] == true);
  CHECK(doc["left_zero_condition"]["zero_left_discord"] == true);
  CHECK(doc["discord"]["left"]["zero_certified"] == true);
  CHECK(doc["discord"]["left"]["discord"].get<double>() <= 1e-6);
  CHECK(doc["discord"]["right"]["zero_certified"] == false);
  CHECK(doc["discord"]["right"]["discord"].get<double>() > 1e-3);
  CHECK(doc["state"]["checksum"].get<std::string>().rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("analyze on the Bell fixture flags entanglement") {
  cli::Outcome outcome = cli::run(config_for("analyze", R"({"type":"bell"})"));
  REQUIRE(outcome.exit_code == 0);
  json doc = json::parse(outcome.payload);
  CHECK(doc["separability"]["ppt"] == false);
  CHECK(doc["separability"]["min_pt_eigenvalue"].get<double>() == doctest::Approx(-0.5));
  CHECK_FALSE(doc.contains("success_probability"));
}

TEST_CASE("validation failures exit with code 2") {
  SUBCASE("unknown spec type") {
    cli::Outcome outcome = cli::run(config_for("analyze", R"({"type":"w_state"})"));
    CHECK(outcome.exit_code == 2);
    json doc = json::parse(outcome.payload);
    CHECK(doc["error"]["kind"] == "invalid_argument");
  }
  SUBCASE("unknown fields are rejected") {
    cli::Outcome outcome = cli::run(config_for(
        "analyze", R"({"type":"bell","extra":1})"));
    CHECK(outcome.exit_code == 2);
    CHECK(json::parse(outcome.payload)["error"]["message"].get<std::string>().find("extra") !=
          std::string::npos);
  }
  SUBCASE("degenerate ensembles surface their kind") {
    cli::Outcome outcome = cli::run(config_for(
        "analyze",
        R"({"type":"two_state","p_plus":0.5,"p_minus":0.5,)"
        R"("alpha":{"re":0.25,"im":0.0},"alpha_plus":{"re":0.0,"im":0.0}})"));
    CHECK(outcome.exit_code == 2);
    CHECK(json::parse(outcome.payload)["error"]["kind"] == "degenerate_ensemble");
  }
  SUBCASE("unknown command") {
    cli::RunConfig config;
    config.command = "frobnicate";
    CHECK(cli::run(config).exit_code == 2);
  }
}

TEST_CASE("ppt command composes the verdict") {
  cli::Outcome outcome = cli::run(config_for("ppt", optimal_two_state_spec));
  REQUIRE(outcome.exit_code == 0);
  json doc = json::parse(outcome.payload);
  CHECK(doc["separability"]["closed_form_condition"] == true);
  CHECK(doc["separability"]["decomposition_terms"] == 2);
}

TEST_CASE("a tolerance loose enough to contradict PPT exits with 3") {
  // residual ~6e-4 in the closed-form condition: condition "holds" at
  // tol 1e-3 while the state is actually (slightly) entangled
  cli::RunConfig config = config_for(
      "ppt",
      R"({"type":"two_state","p_plus":0.5,"p_minus":0.5,)"
      R"("alpha":{"re":0.25,"im":0.001},"alpha_plus":{"re":0.5,"im":0.0}})");
  config.condition_tol = 1e-3;
  cli::Outcome outcome = cli::run(config);
  CHECK(outcome.exit_code == 3);
  CHECK(json::parse(outcome.payload)["error"]["kind"] == "internal_inconsistency");

  // at the default tolerance the same input is a plain entangled verdict
  cli::Outcome strict = cli::run(config_for(
      "ppt",
      R"({"type":"two_state","p_plus":0.5,"p_minus":0.5,)"
      R"("alpha":{"re":0.25,"im":0.001},"alpha_plus":{"re":0.5,"im":0.0}})"));
  REQUIRE(strict.exit_code == 0);
  json doc = json::parse(strict.payload);
  CHECK(doc["separability"]["ppt"] == false);
  CHECK(doc["separability"]["closed_form_condition"] == false);
}

TEST_CASE("optimal command reports the region and optimum") {
  cli::Outcome outcome = cli::run(config_for(
      "optimal",
      R"({"priors":[0.25,0.25,0.25,0.25],)"
      R"("overlaps":[{"re":0.25,"im":0.0},{"re":0.25,"im":0.0},{"re":0.25,"im":0.0}]})"));
  REQUIRE(outcome.exit_code == 0);
  json doc = json::parse(outcome.payload);
  CHECK(doc["optimum"]["region"] == "interior");
  CHECK(doc["optimum"]["p_opt"].get<double>() ==
        doctest::Approx(1.0 - 2.0 * std::sqrt(3.0) / 4.0 * 0.25));
}

TEST_CASE("gamma sweep endpoints and branch switch") {
  SUBCASE("d=2 over eleven points") {
    cli::Outcome outcome = cli::run(config_for(
        "sweep", R"({"sweep":"gamma","d":2,"start":0.0,"stop":1.0,"count":11})"));
    REQUIRE(outcome.exit_code == 0);
    CHECK(outcome.payload.rfind("# {", 0) == 0);  // config echo line
    auto rows = csv_rows(outcome.payload);
    REQUIRE(rows.size() == 12);  // header + 11 rows
    CHECK(rows[0] == "d,gamma,region,alpha1_opt,P_opt");
    CHECK(rows[1].rfind("2,0,", 0) == 0);
    CHECK(rows[1].substr(rows[1].rfind(',') + 1) == "1");
    CHECK(rows[11].substr(rows[11].rfind(',') + 1) == "0");
    for (const std::string& row : rows)
      CHECK(std::count(row.begin(), row.end(), ',') == 4);  // five columns throughout
  }
  SUBCASE("d=5 switches branch near 4^(-1/4)") {
    cli::Outcome outcome = cli::run(config_for(
        "sweep", R"({"sweep":"gamma","d":5,"start":0.0,"stop":1.0,"count":101})"));
    REQUIRE(outcome.exit_code == 0);
    const double boundary = std::pow(4.0, -0.25);
    for (const std::string& row : csv_rows(outcome.payload)) {
      if (row[0] == 'd') continue;
      std::istringstream fields(row);
      std::string d_field, gamma_field, region;
      std::getline(fields, d_field, ',');
      std::getline(fields, gamma_field, ',');
      std::getline(fields, region, ',');
      const double gamma = std::stod(gamma_field);
      if (gamma < boundary - 1e-9) CHECK(region == "interior");
      if (gamma > boundary + 1e-9) CHECK(region == "clamped_high");
    }
  }
  SUBCASE("invalid grids exit with 2") {
    CHECK(cli::run(config_for("sweep",
                              R"({"sweep":"gamma","d":2,"start":0.0,"stop":1.5,"count":5})"))
              .exit_code == 2);
    CHECK(cli::run(config_for("sweep",
                              R"({"sweep":"gamma","d":2,"start":0.0,"stop":1.0,"count":0})"))
              .exit_code == 2);
  }
}

TEST_CASE("alpha1 sweep maximum matches the optimal command") {
  const char* spec =
      R"({"sweep":"alpha1","priors":[0.4,0.3,0.3],)"
      R"("overlaps":[{"re":0.3,"im":0.0},{"re":0.2,"im":0.0}],)"
      R"("start":0.35,"stop":1.0,"count":2001})";
  cli::Outcome sweep = cli::run(config_for("sweep", spec));
  REQUIRE(sweep.exit_code == 0);
  double best = -1.0;
  for (const std::string& row : csv_rows(sweep.payload)) {
    if (row[0] == 'a') continue;
    best = std::max(best, std::stod(row.substr(row.find(',') + 1)));
  }
  cli::Outcome optimal = cli::run(config_for(
      "optimal",
      R"({"priors":[0.4,0.3,0.3],"overlaps":[{"re":0.3,"im":0.0},{"re":0.2,"im":0.0}]})"));
  const double p_opt = json::parse(optimal.payload)["optimum"]["p_opt"].get<double>();
  CHECK(std::abs(best - p_opt) <= 1e-6);
}

TEST_CASE("montecarlo is reproducible and statistically sound") {
  cli::RunConfig config = config_for(
      "montecarlo", std::string(R"({"ensemble":)") + optimal_two_state_spec +
                        R"(,"trials":1000000})");
  config.seed = 31337;
  cli::Outcome first = cli::run(config);
  REQUIRE(first.exit_code == 0);
  cli::Outcome second = cli::run(config);
  CHECK(first.payload == second.payload);

  json doc = json::parse(first.payload);
  const double frequency = doc["stats"]["frequency"].get<double>();
  const double p = doc["analytic_probability"].get<double>();
  CHECK(std::abs(frequency - p) <= 3.0 * std::sqrt(p * (1.0 - p) / 1e6));
  CHECK(doc["stats"]["misidentifications_given_success"] == 0);
  CHECK(doc["stats"]["seed"] == 31337);
  CHECK(doc["stats"]["rng"] == "mt19937_64/u53/splitmix64x16");

  SUBCASE("zero trials exits 2") {
    cli::RunConfig bad = config_for(
        "montecarlo",
        std::string(R"({"ensemble":)") + optimal_two_state_spec + R"(,"trials":0})");
    CHECK(cli::run(bad).exit_code == 2);
  }
}

TEST_CASE("every JSON document re-parses under the same schema") {
  for (const char* command : {"analyze", "discord", "ppt"}) {
    cli::Outcome outcome = cli::run(config_for(command, optimal_two_state_spec));
    REQUIRE(outcome.exit_code == 0);
    json doc = json::parse(outcome.payload);
    CHECK(doc["schema"] == cli::schema_version);
    CHECK(doc.contains("config"));
  }
}

TEST_CASE("state checksums are deterministic and sensitive") {
  DensityMatrix bell = testing::bell_phi_plus();
  const std::string a = cli::state_checksum(bell.mat());
  const std::string b = cli::state_checksum(bell.mat());
  CHECK(a == b);
  ComplexMatrix other = bell.mat();
  other(0, 0) += 1e-15;
  CHECK(cli::state_checksum(other) != a);
}

TEST_CASE("binary front end") {
  SUBCASE("analyze runs end to end") {
    BinaryResult result =
        run_binary(std::string("analyze --inline '") + optimal_two_state_spec + "'");
    CHECK(result.exit_code == 0);
    json doc = json::parse(result.output);
    CHECK(doc["separability"]["ppt"] == true);
  }
  SUBCASE("malformed JSON exits 2") {
    BinaryResult result = run_binary("analyze --inline '{\"type\":'");
    CHECK(result.exit_code == 2);
    CHECK(json::parse(result.output)["error"]["kind"] == "bad_input");
  }
  SUBCASE("montecarlo output bytes are identical for a fixed seed") {
    const std::string args = std::string("montecarlo --seed 11 --inline '{\"ensemble\":") +
                             optimal_two_state_spec + ",\"trials\":50000}'";
    BinaryResult first = run_binary(args);
    BinaryResult second = run_binary(args);
    CHECK(first.exit_code == 0);
    CHECK(first.output == second.output);
  }
  SUBCASE("grid override changes the sweep") {
    BinaryResult result = run_binary(
        "sweep --grid 0:1:5 --inline '{\"sweep\":\"gamma\",\"d\":3,"
        "\"start\":0,\"stop\":1,\"count\":2}'");
    CHECK(result.exit_code == 0);
    CHECK(csv_rows(result.output).size() == 6);  // header + 5 rows
  }
  SUBCASE("input file path works") {
    const std::string path = "qusd_cli_test_input.tmp.json";
    {
      std::ofstream file(path);
      file << optimal_two_state_spec;
    }
    BinaryResult result = run_binary("ppt --input " + path);
    std::remove(path.c_str());
    CHECK(result.exit_code == 0);
  }
}
