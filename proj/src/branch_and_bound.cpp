#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <limits>
#include <queue>

#include "tramp/milp.hpp"

namespace tramp {

const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::optimal:
      return "optimal";
    case MilpStatus::infeasible:
      return "infeasible";
    case MilpStatus::unbounded:
      return "unbounded";
    case MilpStatus::time_limit:
      return "time_limit";
    case MilpStatus::node_limit:
      return "node_limit";
    case MilpStatus::error:
      break;
  }
  return "error";
}

namespace {

using Clock = std::chrono::steady_clock;

struct BoundChange {
  int col;
  double lb;
  double ub;
};

struct Node {
  double bound = -kInf;
  std::vector<BoundChange> changes;
  std::vector<lp::VarStatus> basis;
  int depth = 0;
  long id = 0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

class Search {
 public:
  Search(const MilpProblem& p, const BnbOptions& o) : p_(p), o_(o), lp_(p, o.lp) {
    root_lb_ = p.col_lb;
    root_ub_ = p.col_ub;
    for (int j = 0; j < p.num_cols(); ++j) {
      if (!p.is_integer[j]) continue;
      if (std::isfinite(root_lb_[j])) root_lb_[j] = std::ceil(root_lb_[j] - o.integrality_tol);
      if (std::isfinite(root_ub_[j])) root_ub_[j] = std::floor(root_ub_[j] + o.integrality_tol);
    }
    applied_lb_ = root_lb_;
    applied_ub_ = root_ub_;
    for (int j = 0; j < p.num_cols(); ++j) lp_.set_col_bounds(j, root_lb_[j], root_ub_[j]);
  }

  BnbResult run();

 private:
  const MilpProblem& p_;
  BnbOptions o_;
  lp::DualSimplex lp_;
  std::optional<lp::DualSimplex> polish_;
  std::vector<double> root_lb_, root_ub_;
  std::vector<double> applied_lb_, applied_ub_;
  std::vector<int> touched_;
  Clock::time_point start_ = Clock::now();
  BnbResult result_;
  double incumbent_ = kInf;
  long next_id_ = 1;

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  double cutoff() const {
    if (!std::isfinite(incumbent_)) return kInf;
    return incumbent_ - std::max(o_.abs_gap, o_.rel_gap * std::max(1.0, std::abs(incumbent_)));
  }
  void set_bounds(int j, double lb, double ub) {
    if (applied_lb_[j] == lb && applied_ub_[j] == ub) return;
    if (applied_lb_[j] == root_lb_[j] && applied_ub_[j] == root_ub_[j]) touched_.push_back(j);
    applied_lb_[j] = lb;
    applied_ub_[j] = ub;
    lp_.set_col_bounds(j, lb, ub);
  }
  void apply(const std::vector<BoundChange>& changes) {
    std::vector<int> old;
    old.swap(touched_);
    for (int j : old) {
      applied_lb_[j] = root_lb_[j];
      applied_ub_[j] = root_ub_[j];
      lp_.set_col_bounds(j, root_lb_[j], root_ub_[j]);
    }
    for (const auto& c : changes) set_bounds(c.col, c.lb, c.ub);
  }
  void offer(const std::vector<double>& x, double obj);
  void fix_by_reduced_cost(const std::vector<double>& x, double obj, std::vector<BoundChange>& changes);
};

// Tightens integer columns whose reduced cost proves that moving them away
// from their current bound cannot beat the incumbent.  Valid for the subtree.
void Search::fix_by_reduced_cost(const std::vector<double>& x, double obj, std::vector<BoundChange>& changes) {
  const double room = cutoff() - obj;
  if (!(room >= 0.0)) return;
  const std::vector<double> d = lp_.reduced_costs();
  for (int j = 0; j < p_.num_cols(); ++j) {
    if (!p_.is_integer[j] || d[j] == 0.0) continue;
    const double lb = applied_lb_[j];
    const double ub = applied_ub_[j];
    if (lb == ub) continue;
    if (d[j] > 0.0 && std::abs(x[j] - lb) <= o_.integrality_tol) {
      const double new_ub = lb + std::floor(room / d[j] + o_.integrality_tol);
      if (new_ub < ub) {
        changes.push_back({j, lb, new_ub});
        set_bounds(j, lb, new_ub);
      }
    } else if (d[j] < 0.0 && std::isfinite(ub) && std::abs(x[j] - ub) <= o_.integrality_tol) {
      const double new_lb = ub - std::floor(room / -d[j] + o_.integrality_tol);
      if (new_lb > lb) {
        changes.push_back({j, new_lb, ub});
        set_bounds(j, new_lb, ub);
      }
    }
  }
}

void Search::offer(const std::vector<double>& x, double obj) {
  std::vector<double> rounded = x;
  for (int j = 0; j < p_.num_cols(); ++j) {
    if (p_.is_integer[j]) rounded[j] = std::round(x[j]);
  }
  if (!polish_) {
    lp::Options po = o_.lp;
    polish_.emplace(p_, po);
  }
  for (int j = 0; j < p_.num_cols(); ++j) {
    if (p_.is_integer[j]) {
      polish_->set_col_bounds(j, rounded[j], rounded[j]);
    } else {
      polish_->set_col_bounds(j, p_.col_lb[j], p_.col_ub[j]);
    }
  }
  std::vector<double> cand = rounded;
  double value = obj;
  const double remaining = o_.time_limit - elapsed();
  if (polish_->solve(std::max(remaining, 1.0)) == lp::Status::optimal) {
    cand = polish_->col_values();
    for (int j = 0; j < p_.num_cols(); ++j) {
      if (p_.is_integer[j]) cand[j] = rounded[j];
    }
    value = p_.objective_value(cand);
  } else {
    value = p_.objective_value(cand);
  }
  if (p_.max_violation(cand) > 1e-5) return;
  if (value < incumbent_) {
    incumbent_ = value;
    result_.x = std::move(cand);
    result_.objective = value;
    result_.has_solution = true;
  }
}

BnbResult Search::run() {
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push(Node{});
  bool stopped = false;
  MilpStatus stop_status = MilpStatus::optimal;
  double stop_bound = kInf;

  while (!open.empty() && !stopped) {
    Node node = open.top();
    open.pop();
    if (node.bound >= cutoff()) continue;
    apply(node.changes);
    if (!node.basis.empty()) lp_.load_basis(node.basis);
    std::vector<BoundChange> changes = std::move(node.changes);
    int depth = node.depth;
    double parent_bound = node.bound;

    while (true) {
      if (elapsed() >= o_.time_limit) {
        stopped = true;
        stop_status = MilpStatus::time_limit;
        stop_bound = parent_bound;
        break;
      }
      if (result_.nodes >= o_.node_limit) {
        stopped = true;
        stop_status = MilpStatus::node_limit;
        stop_bound = parent_bound;
        break;
      }
      ++result_.nodes;
      const long before = lp_.iterations();
      const lp::Status st = lp_.solve(o_.time_limit - elapsed());
      result_.lp_iterations += lp_.iterations() - before;
      if (st == lp::Status::time_limit) {
        stopped = true;
        stop_status = MilpStatus::time_limit;
        stop_bound = parent_bound;
        break;
      }
      if (st == lp::Status::infeasible) break;
      if (st == lp::Status::unbounded) {
        if (depth == 0) {
          result_.status = MilpStatus::unbounded;
          result_.wall_time = elapsed();
          return result_;
        }
        break;
      }
      if (st != lp::Status::optimal) {
        if (depth == 0) {
          result_.status = MilpStatus::error;
          result_.wall_time = elapsed();
          return result_;
        }
        break;
      }
      const double obj = lp_.objective();
      if (obj >= cutoff()) break;
      const std::vector<double> x = lp_.col_values();
      if (o_.reduced_cost_fixing && std::isfinite(cutoff())) fix_by_reduced_cost(x, obj, changes);

      int branch = -1;
      double most = o_.integrality_tol;
      int best_prio = std::numeric_limits<int>::min();
      for (int j = 0; j < p_.num_cols(); ++j) {
        if (!p_.is_integer[j]) continue;
        const double f = x[j] - std::floor(x[j]);
        const double dist = std::min(f, 1.0 - f);
        if (dist <= o_.integrality_tol) continue;
        const int prio = o_.priority.empty() ? 0 : o_.priority[j];
        if (prio > best_prio || (prio == best_prio && dist > most)) {
          best_prio = prio;
          most = dist;
          branch = j;
        }
      }
      if (branch < 0) {
        offer(x, obj);
        break;
      }

      const double v = x[branch];
      const double down_ub = std::floor(v);
      const double up_lb = std::ceil(v);
      const bool dive_up = v - down_ub >= 0.5;
      const BoundChange down{branch, applied_lb_[branch], down_ub};
      const BoundChange up{branch, up_lb, applied_ub_[branch]};

      Node sibling;
      sibling.bound = obj;
      sibling.changes = changes;
      sibling.changes.push_back(dive_up ? down : up);
      sibling.basis = lp_.basis();
      sibling.depth = depth + 1;
      sibling.id = next_id_++;
      open.push(std::move(sibling));

      const BoundChange dive = dive_up ? up : down;
      changes.push_back(dive);
      set_bounds(dive.col, dive.lb, dive.ub);
      ++depth;
      parent_bound = obj;
    }
  }

  result_.wall_time = elapsed();
  if (stopped) {
    double bound = stop_bound;
    while (!open.empty()) {
      bound = std::min(bound, open.top().bound);
      open.pop();
    }
    result_.bound = std::min(bound, incumbent_);
    result_.status = stop_status;
    return result_;
  }
  if (result_.has_solution) {
    result_.status = MilpStatus::optimal;
    result_.bound = result_.objective;
  } else {
    result_.status = MilpStatus::infeasible;
    result_.bound = kInf;
  }
  return result_;
}

}  // namespace

BnbResult solve_milp(const MilpProblem& problem, const BnbOptions& options) {
  Search search(problem, options);
  return search.run();
}

BnbResult solve_lp_relaxation(const MilpProblem& problem, const lp::Options& options) {
  const auto start = Clock::now();
  BnbResult r;
  lp::DualSimplex lp(problem, options);
  const lp::Status st = lp.solve();
  r.lp_iterations = lp.iterations();
  r.nodes = 1;
  switch (st) {
    case lp::Status::optimal:
      r.status = MilpStatus::optimal;
      r.has_solution = true;
      r.x = lp.col_values();
      r.objective = lp.objective();
      r.bound = r.objective;
      break;
    case lp::Status::infeasible:
      r.status = MilpStatus::infeasible;
      break;
    case lp::Status::unbounded:
      r.status = MilpStatus::unbounded;
      break;
    case lp::Status::time_limit:
      r.status = MilpStatus::time_limit;
      break;
    default:
      r.status = MilpStatus::error;
      break;
  }
  r.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

}  // namespace tramp
