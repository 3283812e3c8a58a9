#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tramp/solve.hpp"

namespace tramp {

/// Runs task(0..n-1) on up to `workers` threads.  Results must be written to
/// per-index slots; the first exception is rethrown after all threads join.
void parallel_for(int n, int workers, const std::function<void(int)>& task);

struct ShipIndicators {
  int ship = 0;
  double cargo_quant = 0.0;    // spot tonnes served
  double ballast_days = 0.0;   // idle days sailed in ballast
  double port_days = 0.0;      // idle days at port
  double ballast_ratio = 0.0;  // ballast_days / (ballast_days + port_days)
  double avg_speed = 0.0;      // knots, weighted by round-trip distance
  double co2_emission = 0.0;   // CII numerator including prior emissions [g]
  bool no_idle_time = false;   // ballast_ratio was defined as 0
};

/// Indicators of one scenario, or the probability-weighted expectation when
/// `scenario` is empty.
struct IndicatorReport {
  std::optional<int> scenario;
  std::vector<ShipIndicators> ships;
  double cargo_quant = 0.0;
  double ballast_ratio = 0.0;
  double avg_speed = 0.0;
  double co2_emission = 0.0;
  double total_profit = 0.0;  // -objective [USD]
  std::vector<std::string> flags;
};

IndicatorReport compute_indicators(const DeploymentPlan& plan, const ModelSpec& model,
                                   std::optional<int> scenario = std::nullopt);
/// Rebuilds the model the result was solved against.  Requires a plan.
IndicatorReport compute_indicators(const SolveResult& result, std::optional<int> scenario = std::nullopt);

nlohmann::json to_json(const IndicatorReport& report);

struct ParadoxInputs {
  double m0 = 0.0;           // baseline annual emissions [g]
  double d0 = 0.0;           // baseline annual distance [nmile]
  double p = 0.0;            // tightening fraction
  double eps_laden = 0.0;    // [g/nmile]
  double eps_ballast = 0.0;  // [g/nmile]
  double eps_port = 0.0;     // [g/h]
  double speed = 0.0;        // [nmile/h]
  double capacity = 0.0;     // [t]
  double cii0 = 0.0;         // baseline standard [g/(t*nmile)]; <= 0 means m0 / (capacity * d0)
  bool fixed_laden_task = true;

  double baseline_cii() const;
  double target_cii() const { return (1.0 - p) * baseline_cii(); }
};

struct ParadoxDelta {
  double delta_distance = 0.0;    // [nmile]
  double emission_increase = 0.0;  // [g]
};

/// Flags for A1 rate ordering, A2 ballast versus port intensity, A3 fixed
/// laden task and A4 feasible standard.
std::array<bool, 4> check_paradox_assumptions(const ParadoxInputs& in);

/// Extra ballast distance that restores compliance after tightening by p, and
/// the resulting emission increase.  Throws std::domain_error naming the
/// failing condition.
ParadoxDelta paradox_delta(const ParadoxInputs& in);

/// Supply CII after sailing `delta` extra ballast miles in place of port time.
double paradox_adjusted_cii(const ParadoxInputs& in, double delta);

struct ParadoxCell {
  double standard = 0.0;
  double emission_level = 1.0;
  SolveStatus status = SolveStatus::error;
  bool feasible = false;
  double total_profit = 0.0;
  double co2_emission = 0.0;
  double ballast_days = 0.0;
  bool paradox = false;           // a looser standard at this level emits less
  double emission_increase = 0.0;  // largest increase over a looser standard [g]
};

struct ParadoxReport {
  std::vector<double> standards;
  std::vector<double> emission_levels;
  std::vector<ParadoxCell> cells;  // level-major, then standard in input order
  double flag_threshold = 1e-3;

  const ParadoxCell& cell(std::size_t level, std::size_t standard) const;
  int paradox_count() const;
};

/// Copy of the instance with every operational emission rate scaled by
/// `level`; prior emissions stay as recorded.
InstanceData scale_emissions(const InstanceData& instance, double level);
InstanceData with_cii_standard(const InstanceData& instance, double standard);

struct ParadoxOptions {
  SolverOptions solver;
  bool heuristic = false;
  HeuristicOptions heuristic_options;
  int workers = 1;
};

/// Supply-based solves over the grid of standards and emission levels.
ParadoxReport run_paradox_experiment(const InstanceData& instance, const ScenarioSet& scenarios,
                                     const std::vector<double>& standards,
                                     const std::vector<double>& emission_levels, const ParadoxOptions& options = {});

nlohmann::json to_json(const ParadoxReport& report);
std::string paradox_csv(const ParadoxReport& report);

struct InfoValueReport {
  int scenario_count = 0;
  SolveStatus rp_status = SolveStatus::error;
  double rp = 0.0;  // profits [USD]
  double ws = 0.0;
  std::optional<double> ems;
  std::optional<double> evpi;
  std::optional<double> vss;
  std::vector<double> probabilities;
  std::vector<double> ws_by_scenario;
  std::vector<double> ems_by_scenario;
  std::vector<bool> ems_cii_relaxed;   // elastic CII slack was needed
  std::vector<bool> ems_infeasible;    // recourse infeasible even with slack
  bool mean_value_infeasible = false;
  double gap_slack = 0.0;  // 2 * gap * profit scale
  std::vector<std::string> notes;
};

InfoValueReport compute_value_of_information(std::shared_ptr<const InstanceData> instance,
                                             std::shared_ptr<const ScenarioSet> scenarios, CiiMode mode,
                                             const SolverOptions& options = {}, int workers = 1);

nlohmann::json to_json(const InfoValueReport& report);
std::string voi_csv(const InfoValueReport& report);

struct BenchmarkCase {
  int lanes = 0;
  std::uint64_t seed = 0;
  SolveStatus exact_status = SolveStatus::error;
  SolveStatus heuristic_status = SolveStatus::error;
  double exact_cost = 0.0;
  double exact_revenue = 0.0;
  double heuristic_cost = 0.0;
  double heuristic_revenue = 0.0;
  double exact_time = 0.0;
  double heuristic_time = 0.0;
  int exact_routes = 0;
  int heuristic_routes = 0;
  std::optional<double> deviation;
  std::optional<double> ratio_error;
};

struct BenchmarkRow {
  int lanes = 0;
  std::vector<double> deviations;
  WilcoxonResult wilcoxon;
  bool rejected = false;  // H0 median <= threshold rejected at alpha
  double mean_exact_time = 0.0;
  double mean_heuristic_time = 0.0;
};

struct BenchmarkOptions {
  std::vector<int> lane_counts{2, 3, 4, 5};
  int reps = 10;
  std::uint64_t seed = 0;
  GenerationDims dims;
  GenerationRanges ranges;
  int base_scenarios = 0;  // 0 keeps all thirteen; otherwise the first n, renormalized
  CiiMode mode = CiiMode::none;
  SolverOptions solver;
  HeuristicOptions heuristic;
  double threshold = 0.05;
  double alpha = 0.05;
  int workers = 1;
};

struct BenchmarkReport {
  std::vector<BenchmarkCase> cases;
  std::vector<BenchmarkRow> rows;
  double threshold = 0.05;
  double alpha = 0.05;
};

/// Seed of case `rep` at lane count `lanes`.
std::uint64_t benchmark_seed(std::uint64_t base, int lanes, int rep);

/// First n scenarios of a set with probabilities rescaled to sum to one.
ScenarioSet truncate_scenarios(const ScenarioSet& set, int n);

BenchmarkReport run_heuristic_benchmark(const BenchmarkOptions& options);

/// Wall times vary between runs; leave them out for byte-stable artifacts.
nlohmann::json to_json(const BenchmarkReport& report, bool include_timing = true);
std::string benchmark_csv(const BenchmarkReport& report, bool include_timing = true);
std::string wilcoxon_csv(const BenchmarkReport& report);

}  // namespace tramp
