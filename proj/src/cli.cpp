#include "qusd/cli.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <optional>
#include <sstream>

#include "qusd/correlations.hpp"
#include "qusd/discrimination.hpp"
#include "qusd/ensembles.hpp"
#include "qusd/separability.hpp"

namespace qusd::cli {

using nlohmann::json;

namespace {

// ---- strict JSON helpers ----------------------------------------------

void check_fields(const json& j, std::initializer_list<const char*> allowed, const char* context) {
  if (!j.is_object()) throw InvalidArgumentError(std::string(context) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw InvalidArgumentError("unknown field \"" + item.key() + "\" in " + context);
  }
}

const json& require(const json& j, const char* key, const char* context) {
  auto it = j.find(key);
  if (it == j.end())
    throw InvalidArgumentError(std::string("missing field \"") + key + "\" in " + context);
  return *it;
}

double require_number(const json& j, const char* key, const char* context) {
  const json& v = require(j, key, context);
  if (!v.is_number())
    throw InvalidArgumentError(std::string("field \"") + key + "\" in " + context +
                               " must be a number");
  return v.get<double>();
}

Complex parse_complex(const json& j, const char* context) {
  check_fields(j, {"re", "im"}, context);
  return Complex(require_number(j, "re", context), require_number(j, "im", context));
}

json complex_to_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

RealVector parse_real_vector(const json& j, const char* context) {
  if (!j.is_array()) throw InvalidArgumentError(std::string(context) + " must be an array");
  RealVector out(j.size());
  Eigen::Index k = 0;
  for (const json& v : j) {
    if (!v.is_number())
      throw InvalidArgumentError(std::string(context) + " must contain numbers only");
    out[k++] = v.get<double>();
  }
  return out;
}

ComplexVector parse_complex_vector(const json& j, const char* context) {
  if (!j.is_array()) throw InvalidArgumentError(std::string(context) + " must be an array");
  ComplexVector out(j.size());
  Eigen::Index k = 0;
  for (const json& v : j) out[k++] = parse_complex(v, context);
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- input specs --------------------------------------------------------

struct ParsedInput {
  std::optional<ProtocolState> protocol;
  std::optional<DensityMatrix> fixture;  // bell test state
};

DensityMatrix bell_state() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
  return DensityMatrix(std::move(m), 2, 2);
}

ParsedInput parse_state_spec(const json& spec) {
  if (!spec.is_object()) throw InvalidArgumentError("input spec must be a JSON object");
  const json& type = require(spec, "type", "input spec");
  if (!type.is_string()) throw InvalidArgumentError("input spec \"type\" must be a string");
  const std::string kind = type.get<std::string>();
  if (kind == "two_state") {
    check_fields(spec, {"type", "p_plus", "p_minus", "alpha", "alpha_plus"}, "two_state spec");
    return ParsedInput{build_two_state(require_number(spec, "p_plus", "two_state spec"),
                                       require_number(spec, "p_minus", "two_state spec"),
                                       parse_complex(require(spec, "alpha", "two_state spec"),
                                                     "two_state alpha"),
                                       parse_complex(require(spec, "alpha_plus", "two_state spec"),
                                                     "two_state alpha_plus")),
                       std::nullopt};
  }
  if (kind == "d_state") {
    check_fields(spec, {"type", "priors", "alphas"}, "d_state spec");
    return ParsedInput{build_d_state(parse_real_vector(require(spec, "priors", "d_state spec"),
                                                       "d_state priors"),
                                     parse_complex_vector(require(spec, "alphas", "d_state spec"),
                                                          "d_state alphas")),
                       std::nullopt};
  }
  if (kind == "bell") {
    check_fields(spec, {"type"}, "bell spec");
    return ParsedInput{std::nullopt, bell_state()};
  }
  throw InvalidArgumentError("unknown input spec type \"" + kind + "\"");
}

// ---- serialization ------------------------------------------------------

json config_echo(const RunConfig& config) {
  return json{{"command", config.command},
              {"input", config.input},
              {"format", config.format},
              {"seed", config.seed},
              {"out", config.out.empty() ? "-" : config.out},
              {"tol", config.condition_tol},
              {"grid", config.grid.empty() ? json() : json(config.grid)}};
}

json state_summary(const DensityMatrix& rho) {
  return json{{"sys_dim", rho.sys_dim()},
              {"anc_dim", rho.anc_dim()},
              {"checksum", state_checksum(rho.mat())}};
}

const char* side_name(Side side) { return side == Side::left ? "left" : "right"; }

json discord_side_report(const DensityMatrix& rho, Side side) {
  try {
    const DiscordReport report = discord(rho, side);
    return json{{"side", side_name(side)},
                {"optimized", true},
                {"discord", report.discord},
                {"mutual_information", report.mutual_info},
                {"argmin_basis",
                 json{{"subsystem", side_name(report.argmin_basis.subsystem)},
                      {"dim", report.argmin_basis.dim},
                      {"angles", report.argmin_basis.angles}}},
                {"optimizer_evals", report.optimizer_evals},
                {"zero_certified", report.zero_certified},
                {"commutator_residual", report.commutator_residual}};
  } catch (const UnsupportedDimensionError& e) {
    const CommutatorCertificate certificate = zero_discord_certify(rho, side);
    return json{{"side", side_name(side)},
                {"optimized", false},
                {"reason", e.what()},
                {"zero_certified", certificate.zero_discord},
                {"commutator_residual", certificate.residual}};
  }
}

json separability_report(const SeparabilityVerdict& verdict) {
  return json{{"ppt", verdict.ppt},
              {"min_pt_eigenvalue", verdict.min_pt_eigenvalue},
              {"closed_form_condition", verdict.closed_form_condition},
              {"condition_residual", verdict.condition_residual},
              {"decomposition_terms",
               verdict.decomposition ? json(verdict.decomposition->terms.size()) : json()},
              {"consistent", verdict.consistent}};
}

json left_zero_report(const LeftZeroReport& report) {
  return json{{"balanced", report.balanced},
              {"balance_residual", report.balance_residual},
              {"separable_condition", report.separable_condition},
              {"separability_residual", report.separability_residual},
              {"zero_left_discord", report.zero_left_discord}};
}

json document_base(const RunConfig& config) {
  return json{{"schema", schema_version},
              {"command", config.command},
              {"config", config_echo(config)}};
}

void require_json_format(const RunConfig& config) {
  if (config.format != "json")
    throw InvalidArgumentError("command \"" + config.command + "\" emits JSON only");
}

// Surfaces a violated protocol-family invariant loudly (exit code 3).
void check_consistency(const SeparabilityVerdict& verdict) {
  if (!verdict.consistent)
    throw InconsistencyError(
        "closed-form separability condition holds (residual " +
        format_double(verdict.condition_residual) + ") but the partial transpose has eigenvalue " +
        format_double(verdict.min_pt_eigenvalue));
}

struct GridSpec {
  double start;
  double stop;
  long count;
};

GridSpec resolve_grid(const RunConfig& config, const json& spec, const char* context) {
  GridSpec grid{};
  if (!config.grid.empty()) {
    double start = 0.0, stop = 0.0;
    long count = 0;
    if (std::sscanf(config.grid.c_str(), "%lf:%lf:%ld", &start, &stop, &count) != 3)
      throw InvalidArgumentError("--grid expects start:stop:count");
    grid = GridSpec{start, stop, count};
  } else {
    grid.start = require_number(spec, "start", context);
    grid.stop = require_number(spec, "stop", context);
    const json& count = require(spec, "count", context);
    if (!count.is_number_integer())
      throw InvalidArgumentError("sweep count must be an integer");
    grid.count = count.get<long>();
  }
  if (grid.count < 1) throw InvalidArgumentError("sweep count must be at least 1");
  if (!(grid.start >= 0.0 && grid.start <= grid.stop && grid.stop <= 1.0))
    throw InvalidArgumentError("sweep grid bounds must satisfy 0 <= start <= stop <= 1");
  return grid;
}

double grid_point(const GridSpec& grid, long k) {
  if (grid.count == 1) return grid.start;
  return grid.start + (grid.stop - grid.start) * static_cast<double>(k) /
                          static_cast<double>(grid.count - 1);
}

}  // namespace

std::string state_checksum(const ComplexMatrix& m) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](double value) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(value));
    std::memcpy(&bits, &value, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      hash ^= (bits >> (8 * b)) & 0xffULL;
      hash *= 0x100000001b3ULL;
    }
  };
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      mix(m(r, c).real());
      mix(m(r, c).imag());
    }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016" PRIx64, hash);
  return buf;
}

json run_analyze(const RunConfig& config) {
  require_json_format(config);
  const ParsedInput input = parse_state_spec(config.input);
  json doc = document_base(config);
  const DensityMatrix& rho = input.protocol ? input.protocol->rho : *input.fixture;
  doc["state"] = state_summary(rho);
  if (input.protocol) {
    const ProtocolState& state = *input.protocol;
    doc["success_probability"] = success_probability(state.ensemble);
    const SeparabilityVerdict verdict = analyze_separability(state, config.condition_tol);
    check_consistency(verdict);
    doc["separability"] = separability_report(verdict);
    doc["left_zero_condition"] =
        left_zero_report(left_zero_condition_closed_form(state.ensemble, config.condition_tol));
  } else {
    const PptResult ppt = ppt_test(rho);
    doc["separability"] = json{{"ppt", ppt.ppt}, {"min_pt_eigenvalue", ppt.min_eigenvalue}};
  }
  doc["discord"] = json{{"left", discord_side_report(rho, Side::left)},
                        {"right", discord_side_report(rho, Side::right)}};
  return doc;
}

json run_discord(const RunConfig& config) {
  require_json_format(config);
  const ParsedInput input = parse_state_spec(config.input);
  const DensityMatrix& rho = input.protocol ? input.protocol->rho : *input.fixture;
  json doc = document_base(config);
  doc["state"] = state_summary(rho);
  doc["discord"] = json{{"left", discord_side_report(rho, Side::left)},
                        {"right", discord_side_report(rho, Side::right)}};
  if (input.protocol)
    doc["left_zero_condition"] = left_zero_report(
        left_zero_condition_closed_form(input.protocol->ensemble, config.condition_tol));
  return doc;
}

json run_ppt(const RunConfig& config) {
  require_json_format(config);
  const ParsedInput input = parse_state_spec(config.input);
  json doc = document_base(config);
  if (input.protocol) {
    doc["state"] = state_summary(input.protocol->rho);
    const SeparabilityVerdict verdict = analyze_separability(*input.protocol, config.condition_tol);
    check_consistency(verdict);
    doc["separability"] = separability_report(verdict);
  } else {
    doc["state"] = state_summary(*input.fixture);
    const PptResult ppt = ppt_test(*input.fixture);
    doc["separability"] = json{{"ppt", ppt.ppt}, {"min_pt_eigenvalue", ppt.min_eigenvalue}};
  }
  return doc;
}

json run_optimal(const RunConfig& config) {
  require_json_format(config);
  check_fields(config.input, {"priors", "overlaps"}, "optimal spec");
  const OptimizationInput input = make_optimization_input(
      parse_real_vector(require(config.input, "priors", "optimal spec"), "optimal priors"),
      parse_complex_vector(require(config.input, "overlaps", "optimal spec"), "optimal overlaps"));
  const OptimumReport report = optimal_probability(input);
  json overlaps = json::array();
  for (Eigen::Index j = 0; j < input.overlaps.size(); ++j)
    overlaps.push_back(complex_to_json(input.overlaps[j]));
  json doc = document_base(config);
  doc["input"] = json{{"priors", std::vector<double>(input.priors.begin(), input.priors.end())},
                      {"overlaps", overlaps}};
  doc["optimum"] = json{{"region", to_string(report.region)},
                        {"alpha1_opt", report.alpha1_opt},
                        {"p_opt", report.p_opt},
                        {"alpha_bar", report.alpha_bar}};
  return doc;
}

json run_montecarlo(const RunConfig& config) {
  require_json_format(config);
  check_fields(config.input, {"ensemble", "trials"}, "montecarlo spec");
  const ParsedInput input =
      parse_state_spec(require(config.input, "ensemble", "montecarlo spec"));
  if (!input.protocol)
    throw InvalidArgumentError("montecarlo needs a protocol ensemble, not a fixture");
  const json& trials_field = require(config.input, "trials", "montecarlo spec");
  if (!trials_field.is_number_integer() || trials_field.get<long long>() < 1)
    throw InvalidArgumentError("trials must be a positive integer");
  const std::uint64_t trials = trials_field.get<std::uint64_t>();
  const TrialStats stats = run_monte_carlo(*input.protocol, trials, config.seed);
  json doc = document_base(config);
  doc["state"] = state_summary(input.protocol->rho);
  doc["analytic_probability"] = success_probability(input.protocol->ensemble);
  doc["stats"] = json{{"trials", stats.trials},
                      {"successes", stats.successes},
                      {"misidentifications_given_success", stats.misidentifications_given_success},
                      {"frequency", stats.frequency},
                      {"std_error", stats.std_error},
                      {"seed", stats.seed},
                      {"rng", stats.rng}};
  return doc;
}

std::string run_sweep(const RunConfig& config) {
  if (config.format != "csv" && config.format != "json")
    throw InvalidArgumentError("sweep emits csv or json");
  const json& spec = config.input;
  const json& kind_field = require(spec, "sweep", "sweep spec");
  if (!kind_field.is_string()) throw InvalidArgumentError("sweep kind must be a string");
  const std::string kind = kind_field.get<std::string>();

  std::ostringstream csv;
  json rows = json::array();
  if (kind == "gamma") {
    check_fields(spec, {"sweep", "d", "start", "stop", "count"}, "gamma sweep spec");
    const json& d_field = require(spec, "d", "gamma sweep spec");
    if (!d_field.is_number_integer() || d_field.get<long>() < 2)
      throw InvalidArgumentError("gamma sweep needs integer d >= 2");
    const Eigen::Index d = d_field.get<Eigen::Index>();
    const GridSpec grid = resolve_grid(config, spec, "gamma sweep spec");
    csv << "d,gamma,region,alpha1_opt,P_opt\n";
    for (long k = 0; k < grid.count; ++k) {
      const double gamma = grid_point(grid, k);
      const OptimizationInput input = make_optimization_input(
          RealVector::Constant(d, 1.0 / static_cast<double>(d)),
          ComplexVector::Constant(d - 1, Complex(gamma * gamma, 0.0)));
      const OptimumReport report = optimal_probability(input);
      csv << d << ',' << format_double(gamma) << ',' << to_string(report.region) << ','
          << format_double(report.alpha1_opt) << ',' << format_double(report.p_opt) << '\n';
      rows.push_back(json{{"d", d},
                          {"gamma", gamma},
                          {"region", to_string(report.region)},
                          {"alpha1_opt", report.alpha1_opt},
                          {"P_opt", report.p_opt}});
    }
  } else if (kind == "alpha1") {
    check_fields(spec, {"sweep", "priors", "overlaps", "start", "stop", "count"},
                 "alpha1 sweep spec");
    const OptimizationInput input = make_optimization_input(
        parse_real_vector(require(spec, "priors", "alpha1 sweep spec"), "alpha1 sweep priors"),
        parse_complex_vector(require(spec, "overlaps", "alpha1 sweep spec"),
                             "alpha1 sweep overlaps"));
    const GridSpec grid = resolve_grid(config, spec, "alpha1 sweep spec");
    csv << "alpha1,P\n";
    for (long k = 0; k < grid.count; ++k) {
      const double alpha1 = grid_point(grid, k);
      const double p = success_probability_parameterized(alpha1, input);
      csv << format_double(alpha1) << ',' << format_double(p) << '\n';
      rows.push_back(json{{"alpha1", alpha1}, {"P", p}});
    }
  } else {
    throw InvalidArgumentError("unknown sweep kind \"" + kind + "\"");
  }

  if (config.format == "json") {
    json doc = document_base(config);
    doc["rows"] = rows;
    return doc.dump(2) + "\n";
  }
  return "# " + document_base(config).dump() + "\n" + csv.str();
}

Outcome run(const RunConfig& config) {
  try {
    if (config.command == "analyze") return {0, run_analyze(config).dump(2) + "\n"};
    if (config.command == "discord") return {0, run_discord(config).dump(2) + "\n"};
    if (config.command == "ppt") return {0, run_ppt(config).dump(2) + "\n"};
    if (config.command == "optimal") return {0, run_optimal(config).dump(2) + "\n"};
    if (config.command == "montecarlo") return {0, run_montecarlo(config).dump(2) + "\n"};
    if (config.command == "sweep") return {0, run_sweep(config)};
    throw InvalidArgumentError("unknown command \"" + config.command + "\"");
  } catch (const Error& e) {
    const int code = e.kind() == "internal_inconsistency" ? 3 : 2;
    json doc{{"schema", schema_version},
             {"error", json{{"kind", e.kind()}, {"message", e.what()}}}};
    return {code, doc.dump(2) + "\n"};
  } catch (const std::exception& e) {
    json doc{{"schema", schema_version},
             {"error", json{{"kind", "error"}, {"message", e.what()}}}};
    return {2, doc.dump(2) + "\n"};
  }
}

}  // namespace qusd::cli
