// Command-line front end: construction, correlation analysis, separability
// verdicts, optimal probabilities, sweeps, and Monte Carlo runs, with
// machine-readable output.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qusd/cli.hpp"

namespace {

struct CommonFlags {
  std::string input_path;
  std::string inline_json;
  std::string format;
  std::uint64_t seed = 1;
  std::string out;
  double tol = qusd::tol::condition_equality;
  std::string grid;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, const char* default_format) {
  flags.format = default_format;
  cmd->add_option("--input", flags.input_path, "Path to a JSON input spec");
  cmd->add_option("--inline", flags.inline_json, "Inline JSON input spec");
  cmd->add_option("--format", flags.format, "Output format: json or csv");
  cmd->add_option("--seed", flags.seed, "Random seed (montecarlo)");
  cmd->add_option("--out", flags.out, "Output path (default: stdout)");
  cmd->add_option("--tol", flags.tol, "Closed-form condition tolerance");
  cmd->add_option("--grid", flags.grid, "Sweep grid override start:stop:count");
}

int finish(const qusd::cli::Outcome& outcome, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << outcome.payload;
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
      std::cerr << "cannot open output path " << out_path << "\n";
      return 2;
    }
    file << outcome.payload;
  }
  return outcome.exit_code;
}

int run_command(const std::string& command, const CommonFlags& flags) {
  qusd::cli::RunConfig config;
  config.command = command;
  config.format = flags.format;
  config.seed = flags.seed;
  config.out = flags.out;
  config.condition_tol = flags.tol;
  config.grid = flags.grid;

  std::string text;
  if (!flags.inline_json.empty()) {
    text = flags.inline_json;
  } else if (!flags.input_path.empty()) {
    std::ifstream file(flags.input_path, std::ios::binary);
    if (!file) {
      qusd::cli::Outcome outcome{2, std::string("{\"error\":{\"kind\":\"bad_input\",\"message\":"
                                                "\"cannot read input file\"}}\n")};
      return finish(outcome, flags.out);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    text = buffer.str();
  } else {
    text = "{}";
  }

  try {
    config.input = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    nlohmann::json doc{{"schema", qusd::cli::schema_version},
                       {"error", {{"kind", "bad_input"}, {"message", e.what()}}}};
    return finish({2, doc.dump(2) + "\n"}, flags.out);
  }
  return finish(qusd::cli::run(config), flags.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assisted unambiguous state discrimination toolkit"};
  app.require_subcommand(1);

  const char* commands[] = {"analyze", "discord", "ppt", "optimal", "montecarlo", "sweep"};
  const char* blurbs[] = {
      "Full report: success probability, separability, discord, certificates",
      "Left/right discord reports and zero-discord certificates",
      "PPT verdict and closed-form separability condition",
      "Closed-form optimal success probability for given priors and overlaps",
      "Seeded Monte Carlo simulation of the protocol",
      "CSV sweep: optimal probability vs gamma, or P vs alpha1"};

  CommonFlags flags[6];
  for (int i = 0; i < 6; ++i) {
    CLI::App* cmd = app.add_subcommand(commands[i], blurbs[i]);
    add_common_flags(cmd, flags[i], i == 5 ? "csv" : "json");
  }

  CLI11_PARSE(app, argc, argv);

  for (int i = 0; i < 6; ++i)
    if (app.get_subcommand(commands[i])->parsed()) return run_command(commands[i], flags[i]);
  return 2;
}
