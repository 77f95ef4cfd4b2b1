#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hstrn/monte_carlo.hpp"
#include "hstrn/secrecy_metrics.hpp"
#include "hstrn/series_control.hpp"

namespace hstrn::experiment {

class spec_parse_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SweepVar { rho_b, rho_s, rho_e, phi_c };
enum class OutputFormat { csv, json };

/// One experiment: a fixed scenario, a sweep, and the methods to run.
/// Parsed from a sectioned key = value spec file.
struct ExperimentSpec {
  std::string metric = "sopm";

  SweepVar sweep_var = SweepVar::rho_b;
  double sweep_start = 10.0;
  double sweep_stop = 10.0;
  double sweep_step = 5.0;
  bool sweep_db = true;

  // first hop; shadowing_case 0 means the explicit triple below is used
  int shadowing_case = 1;
  double p_s = 0.063, m_s = 0.739, xi_s = 0.0009;
  double rho_s_db = 10.0;

  double alpha_b = 2.0, mu_b = 1.0, rho_b_db = 10.0;
  double alpha_e = 2.0, mu_e = 1.0, rho_e_db = -10.0;

  int relays = 5, users = 5, eves = 5;
  double phi_c = 0.5;

  bool use_closed_form = false;
  bool use_quadrature = true;
  bool use_monte_carlo = true;

  std::uint64_t mc_trials = 1'000'000;
  std::uint64_t seed = 1;
  mc::SimMode mode = mc::SimMode::paper_independent;
  int workers = 1;

  SeriesControl series;

  std::string out_path = "out.csv";
  OutputFormat format = OutputFormat::csv;
};

ExperimentSpec parse_spec_text(const std::string& text);
ExperimentSpec parse_spec_file(const std::string& path);

/// Scenario with the sweep variable forced to `value` (dB for SNR sweeps
/// unless the sweep is linear; linear for phi_c).
metrics::SecrecyConfig config_at(const ExperimentSpec& spec, double value);

/// Fixed-point scenario (no sweep applied).
metrics::SecrecyConfig base_config(const ExperimentSpec& spec);

std::vector<double> sweep_grid(const ExperimentSpec& spec);

struct ResultRow {
  double sweep_value = 0.0;
  std::optional<double> closed_form;
  std::optional<double> quadrature;
  std::optional<double> monte_carlo;
  std::optional<double> mc_se;
  long closed_terms = 0;
  double closed_tail = 0.0;
};

std::vector<ResultRow> run_rows(const ExperimentSpec& spec);

std::string render_csv(const ExperimentSpec& spec, const std::vector<ResultRow>& rows,
                       std::uint64_t spec_hash);
std::string render_json(const ExperimentSpec& spec, const std::vector<ResultRow>& rows,
                        std::uint64_t spec_hash);

/// Runs the sweep and writes the output file. Returns the rendered text.
std::string run_to_file(const ExperimentSpec& spec, std::uint64_t spec_hash);

struct CompareGate {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool skipped = false;
  std::string skip_reason;
  bool pass = true;
};

struct CompareReport {
  // per metric: [closed_form, quadrature, monte_carlo] where computed
  std::vector<std::string> lines;
  std::vector<CompareGate> gates;
  bool all_pass = true;
  std::string text() const;
};

/// closed-form vs quadrature vs Monte-Carlo at the spec's fixed scenario.
CompareReport run_compare(const ExperimentSpec& spec);

std::uint64_t fnv1a64(const std::string& bytes);
double db_to_linear(double db);

std::string format_number(double v);  // 9 significant digits

}  // namespace hstrn::experiment
