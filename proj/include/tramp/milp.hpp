#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace tramp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Minimize c'x + offset subject to row_lb <= Ax <= row_ub and column bounds.
/// Rows are stored compressed by row.
struct MilpProblem {
  std::vector<double> obj;
  double obj_offset = 0.0;
  std::vector<double> col_lb;
  std::vector<double> col_ub;
  std::vector<char> is_integer;
  std::vector<std::string> col_names;

  std::vector<int> row_start{0};
  std::vector<int> row_index;
  std::vector<double> row_value;
  std::vector<double> row_lb;
  std::vector<double> row_ub;
  std::vector<std::string> row_names;

  int num_cols() const { return static_cast<int>(obj.size()); }
  int num_rows() const { return static_cast<int>(row_lb.size()); }

  int add_col(double cost, double lb, double ub, bool integer, std::string name = {});
  int add_row(const std::vector<std::pair<int, double>>& terms, double lb, double ub,
              std::string name = {});

  /// Largest bound or row violation of x, and largest integrality violation.
  double max_violation(const std::vector<double>& x) const;
  double max_integrality_violation(const std::vector<double>& x) const;
  double objective_value(const std::vector<double>& x) const;
};

namespace lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit, time_limit, numerical_error };

const char* to_string(Status s);

enum class VarStatus : std::uint8_t { basic, at_lower, at_upper, at_zero };

struct Options {
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  double pivot_tol = 1e-9;
  long max_iterations = 5'000'000;
  int refactor_interval = 64;
  bool scaling = true;
  bool perturb = true;
};

class DualSimplexImpl;

/// Bounded dual simplex on the computational form [A -I][x; s] = 0 with the
/// row activities s carrying the row bounds.  Structural columns with infinite
/// bounds are boxed artificially; a solution resting on such a box is reported
/// as unbounded.  A primal phase cleans up dual infeasibilities left after
/// removing the cost perturbation.
class DualSimplex {
 public:
  explicit DualSimplex(const MilpProblem& problem, const Options& options = {});
  ~DualSimplex();
  DualSimplex(DualSimplex&&) noexcept;
  DualSimplex& operator=(DualSimplex&&) noexcept;

  void set_col_bounds(int col, double lb, double ub);
  double col_lower(int col) const;
  double col_upper(int col) const;

  Status solve(double time_limit_seconds = kInf);

  double objective() const;
  std::vector<double> col_values() const;
  /// Reduced costs in problem units; zero for basic columns.
  std::vector<double> reduced_costs() const;
  std::vector<VarStatus> basis() const;
  /// Falls back to the slack basis when the given one is singular.
  void load_basis(const std::vector<VarStatus>& basis);
  long iterations() const;

 private:
  std::unique_ptr<DualSimplexImpl> impl_;
};

}  // namespace lp

enum class MilpStatus { optimal, infeasible, unbounded, time_limit, node_limit, error };

const char* to_string(MilpStatus s);

struct BnbOptions {
  double rel_gap = 1e-6;
  double abs_gap = 1e-9;
  double time_limit = kInf;
  long node_limit = 50'000'000;
  double integrality_tol = 1e-6;
  // Branching picks the most fractional column among those with the highest
  // priority; empty means all equal.
  std::vector<int> priority;
  bool reduced_cost_fixing = true;
  lp::Options lp;
};

struct BnbResult {
  MilpStatus status = MilpStatus::error;
  bool has_solution = false;
  std::vector<double> x;
  double objective = kInf;
  double bound = -kInf;
  long nodes = 0;
  long lp_iterations = 0;
  double wall_time = 0.0;
};

/// LP-based branch-and-bound: best-bound node selection with depth-first
/// plunging from each selected node, most-fractional branching.
BnbResult solve_milp(const MilpProblem& problem, const BnbOptions& options = {});

/// Solves the LP relaxation only.
BnbResult solve_lp_relaxation(const MilpProblem& problem, const lp::Options& options = {});

}  // namespace tramp
