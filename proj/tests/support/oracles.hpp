#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "tramp/milp.hpp"
#include "tramp/model.hpp"

namespace oracle {

/// Exhaustive search over every integer assignment that survives row activity
/// propagation; each leaf solves the LP over the continuous columns.
struct EnumerationResult {
  bool feasible = false;
  double objective = tramp::kInf;
  std::vector<double> x;
  long leaves = 0;
  long lp_solves = 0;
  bool leaf_limit_hit = false;
};

EnumerationResult enumerate_milp(const tramp::MilpProblem& p, long leaf_limit = 5'000'000);

/// Enumerates every basis of a small LP in standard inequality form
/// min c'x, Ax <= b, 0 <= x <= u by solving each square subsystem.
struct VertexResult {
  bool feasible = false;
  double objective = tramp::kInf;
};
VertexResult enumerate_vertices(const tramp::MilpProblem& p);

/// Directed cycles of distinct lanes up to c_max, each as its canonical
/// rotation with the smallest lane first.
std::set<std::vector<int>> brute_force_cycles(int num_lanes, int c_max);

/// One-sided signed-rank p-value by listing all 2^n sign vectors.
double wilcoxon_enumerated_p(const std::vector<double>& deviations, double threshold);

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
  Fraction() = default;
  Fraction(std::int64_t n, std::int64_t d = 1);
  Fraction operator+(const Fraction& o) const;
  Fraction operator-(const Fraction& o) const;
  Fraction operator*(const Fraction& o) const;
  Fraction operator/(const Fraction& o) const;
  bool operator==(const Fraction& o) const { return num == o.num && den == o.den; }
};

/// Correlations of the direction codes with equal weights, in exact
/// arithmetic.  Requires equal variances, where the correlation is rational.
std::vector<std::vector<Fraction>> rational_correlations(const std::vector<std::vector<int>>& codes);

/// Annual CII inequality chain for every ship and scenario of a plan.
/// Each step may exceed the next by rel_tol relative plus abs_tonnes tonnes on every lane.
bool cii_chain_holds(const tramp::DeploymentPlan& plan, const tramp::InstanceData& instance, int scenarios,
                     double rel_tol = 1e-9, double abs_tonnes = 1e-6);

/// Per ship and stage: number of undirected transfer edges times two, and
/// number of routes used.  Stage -1 is P-1, otherwise the scenario index.
struct TransitionCount {
  int ship = 0;
  int stage = -1;
  double transfer_sum = 0.0;
  int routes_used = 0;
};
std::vector<TransitionCount> transition_counts(const tramp::DeploymentPlan& plan, const tramp::ModelSpec& model);

}  // namespace oracle
