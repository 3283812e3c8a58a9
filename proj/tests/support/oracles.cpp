#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace oracle {

using tramp::kInf;
using tramp::MilpProblem;

namespace {

constexpr double kTol = 1e-9;

struct Activity {
  double lo = 0.0;
  double hi = 0.0;
  int lo_inf = 0;
  int hi_inf = 0;
};

// Returns false on proven infeasibility; tightens integer bounds in place.
bool propagate(const MilpProblem& p, std::vector<double>& lb, std::vector<double>& ub) {
  for (int pass = 0; pass < 50; ++pass) {
    bool changed = false;
    for (int i = 0; i < p.num_rows(); ++i) {
      Activity a;
      for (int q = p.row_start[i]; q < p.row_start[i + 1]; ++q) {
        const int j = p.row_index[q];
        const double c = p.row_value[q];
        const double lo = c > 0 ? c * lb[j] : c * ub[j];
        const double hi = c > 0 ? c * ub[j] : c * lb[j];
        if (std::isinf(lo)) ++a.lo_inf; else a.lo += lo;
        if (std::isinf(hi)) ++a.hi_inf; else a.hi += hi;
      }
      const double scale = std::max(1.0, std::max(std::abs(p.row_lb[i]) * (std::isfinite(p.row_lb[i]) ? 1 : 0),
                                                  std::abs(p.row_ub[i]) * (std::isfinite(p.row_ub[i]) ? 1 : 0)));
      if (a.lo_inf == 0 && a.lo > p.row_ub[i] + 1e-7 * scale) return false;
      if (a.hi_inf == 0 && a.hi < p.row_lb[i] - 1e-7 * scale) return false;
      for (int q = p.row_start[i]; q < p.row_start[i + 1]; ++q) {
        const int j = p.row_index[q];
        if (!p.is_integer[j] || lb[j] == ub[j]) continue;
        const double c = p.row_value[q];
        const double own_lo = c > 0 ? c * lb[j] : c * ub[j];
        const double own_hi = c > 0 ? c * ub[j] : c * lb[j];
        double rest_lo = kInf, rest_hi = kInf;
        if (a.lo_inf == 0) rest_lo = a.lo - own_lo;
        else if (a.lo_inf == 1 && std::isinf(own_lo)) rest_lo = a.lo;
        if (a.hi_inf == 0) rest_hi = a.hi - own_hi;
        else if (a.hi_inf == 1 && std::isinf(own_hi)) rest_hi = a.hi;
        if (std::isfinite(p.row_ub[i]) && std::isfinite(rest_lo)) {
          const double lim = (p.row_ub[i] - rest_lo) / c;
          if (c > 0) {
            const double nu = std::floor(lim + 1e-6);
            if (nu < ub[j]) { ub[j] = nu; changed = true; }
          } else {
            const double nl = std::ceil(lim - 1e-6);
            if (nl > lb[j]) { lb[j] = nl; changed = true; }
          }
        }
        if (std::isfinite(p.row_lb[i]) && std::isfinite(rest_hi)) {
          const double lim = (p.row_lb[i] - rest_hi) / c;
          if (c > 0) {
            const double nl = std::ceil(lim - 1e-6);
            if (nl > lb[j]) { lb[j] = nl; changed = true; }
          } else {
            const double nu = std::floor(lim + 1e-6);
            if (nu < ub[j]) { ub[j] = nu; changed = true; }
          }
        }
        if (lb[j] > ub[j]) return false;
      }
    }
    if (!changed) break;
  }
  return true;
}

}  // namespace

EnumerationResult enumerate_milp(const MilpProblem& p, long leaf_limit) {
  EnumerationResult out;
  std::vector<int> order;
  for (int j = 0; j < p.num_cols(); ++j) {
    if (!p.is_integer[j]) continue;
    if (!std::isfinite(p.col_lb[j]) || !std::isfinite(p.col_ub[j])) {
      throw std::invalid_argument("enumeration needs finite integer bounds");
    }
    order.push_back(j);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return (p.col_ub[a] - p.col_lb[a] <= 1) > (p.col_ub[b] - p.col_lb[b] <= 1);
  });
  std::vector<double> lb = p.col_lb, ub = p.col_ub;
  for (int j : order) {
    lb[j] = std::ceil(lb[j] - kTol);
    ub[j] = std::floor(ub[j] + kTol);
  }
  tramp::lp::Options lo;
  lo.perturb = false;
  tramp::lp::DualSimplex lp(p, lo);

  std::function<void(std::size_t, std::vector<double>, std::vector<double>)> dfs =
      [&](std::size_t pos, std::vector<double> l, std::vector<double> u) {
        if (out.leaf_limit_hit) return;
        if (!propagate(p, l, u)) return;
        while (pos < order.size() && l[order[pos]] == u[order[pos]]) ++pos;
        if (pos == order.size()) {
          if (++out.leaves > leaf_limit) {
            out.leaf_limit_hit = true;
            return;
          }
          for (int j = 0; j < p.num_cols(); ++j) {
            if (p.is_integer[j]) lp.set_col_bounds(j, l[j], u[j]);
          }
          ++out.lp_solves;
          if (lp.solve() != tramp::lp::Status::optimal) return;
          const double obj = lp.objective();
          if (obj < out.objective) {
            out.objective = obj;
            out.x = lp.col_values();
            out.feasible = true;
          }
          return;
        }
        const int j = order[pos];
        for (double v = l[j]; v <= u[j]; v += 1.0) {
          auto l2 = l, u2 = u;
          l2[j] = u2[j] = v;
          dfs(pos + 1, std::move(l2), std::move(u2));
        }
      };
  dfs(0, lb, ub);
  return out;
}

VertexResult enumerate_vertices(const MilpProblem& p) {
  const int n = p.num_cols();
  const int m = p.num_rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  for (int i = 0; i < m; ++i) {
    for (int q = p.row_start[i]; q < p.row_start[i + 1]; ++q) a(i, p.row_index[q]) += p.row_value[q];
  }
  // Candidate active constraints: (normal vector, value).
  std::vector<std::pair<Eigen::VectorXd, double>> cands;
  for (int i = 0; i < m; ++i) {
    if (std::isfinite(p.row_lb[i])) cands.emplace_back(a.row(i).transpose(), p.row_lb[i]);
    if (std::isfinite(p.row_ub[i]) && p.row_ub[i] != p.row_lb[i]) cands.emplace_back(a.row(i).transpose(), p.row_ub[i]);
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(j) = 1.0;
    if (std::isfinite(p.col_lb[j])) cands.emplace_back(e, p.col_lb[j]);
    if (std::isfinite(p.col_ub[j]) && p.col_ub[j] != p.col_lb[j]) cands.emplace_back(e, p.col_ub[j]);
  }
  VertexResult out;
  const int k = static_cast<int>(cands.size());
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd s(n, n);
      Eigen::VectorXd rhs(n);
      for (int r = 0; r < n; ++r) {
        s.row(r) = cands[pick[r]].first.transpose();
        rhs(r) = cands[pick[r]].second;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(rhs);
      std::vector<double> xv(x.data(), x.data() + n);
      if (p.max_violation(xv) > 1e-7) return;
      const double obj = p.objective_value(xv);
      if (obj < out.objective) out.objective = obj;
      out.feasible = true;
      return;
    }
    for (int c = start; c < k; ++c) {
      pick[depth] = c;
      rec(c + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

std::set<std::vector<int>> brute_force_cycles(int num_lanes, int c_max) {
  std::set<std::vector<int>> out;
  std::vector<int> seq;
  std::vector<char> used(num_lanes, 0);
  std::function<void()> rec = [&] {
    if (!seq.empty()) {
      auto rot = seq;
      std::rotate(rot.begin(), std::min_element(rot.begin(), rot.end()), rot.end());
      out.insert(rot);
    }
    if (static_cast<int>(seq.size()) == c_max) return;
    for (int i = 0; i < num_lanes; ++i) {
      if (used[i]) continue;
      used[i] = 1;
      seq.push_back(i);
      rec();
      seq.pop_back();
      used[i] = 0;
    }
  };
  rec();
  return out;
}

double wilcoxon_enumerated_p(const std::vector<double>& deviations, double threshold) {
  std::vector<double> diffs;
  for (double d : deviations) {
    const double x = std::round((d - threshold) * 1e12) / 1e12;
    if (x != 0.0) diffs.push_back(x);
  }
  const int n = static_cast<int>(diffs.size());
  if (n == 0) return 1.0;
  if (n > 20) throw std::invalid_argument("too many differences to enumerate");
  std::vector<double> ranks(n);
  for (int a = 0; a < n; ++a) {
    int below = 0, equal = 0;
    for (int b = 0; b < n; ++b) {
      if (std::abs(diffs[b]) < std::abs(diffs[a])) ++below;
      if (std::abs(diffs[b]) == std::abs(diffs[a])) ++equal;
    }
    ranks[a] = below + (equal + 1) / 2.0;
  }
  double observed = 0.0;
  for (int a = 0; a < n; ++a) {
    if (diffs[a] > 0) observed += ranks[a];
  }
  long hits = 0;
  for (long mask = 0; mask < (1L << n); ++mask) {
    double w = 0.0;
    for (int a = 0; a < n; ++a) {
      if (mask >> a & 1) w += ranks[a];
    }
    if (w >= observed - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(1L << n);
}

Fraction::Fraction(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

Fraction Fraction::operator+(const Fraction& o) const { return {num * o.den + o.num * den, den * o.den}; }
Fraction Fraction::operator-(const Fraction& o) const { return {num * o.den - o.num * den, den * o.den}; }
Fraction Fraction::operator*(const Fraction& o) const { return {num * o.num, den * o.den}; }
Fraction Fraction::operator/(const Fraction& o) const { return {num * o.den, den * o.num}; }

std::vector<std::vector<Fraction>> rational_correlations(const std::vector<std::vector<int>>& codes) {
  const int n = static_cast<int>(codes.size());
  const int f = static_cast<int>(codes.at(0).size());
  std::vector<Fraction> mean(f);
  for (int a = 0; a < f; ++a) {
    Fraction s;
    for (const auto& row : codes) s = s + Fraction(row[a]);
    mean[a] = s / Fraction(n);
  }
  std::vector<std::vector<Fraction>> cov(f, std::vector<Fraction>(f));
  for (int a = 0; a < f; ++a) {
    for (int b = 0; b < f; ++b) {
      Fraction s;
      for (const auto& row : codes) s = s + (Fraction(row[a]) - mean[a]) * (Fraction(row[b]) - mean[b]);
      cov[a][b] = s / Fraction(n);
    }
  }
  std::vector<std::vector<Fraction>> corr(f, std::vector<Fraction>(f));
  for (int a = 0; a < f; ++a) {
    for (int b = 0; b < f; ++b) {
      if (!(cov[a][a] == cov[b][b])) throw std::domain_error("unequal variances give an irrational correlation");
      corr[a][b] = cov[a][b] / cov[a][a];
    }
  }
  return corr;
}

bool cii_chain_holds(const tramp::DeploymentPlan& plan, const tramp::InstanceData& inst, int scenarios,
                     double rel_tol, double abs_tonnes) {
  using namespace tramp;
  double lane_sum = 0.0;
  for (const auto& lane : inst.lanes) lane_sum += lane.laden_distance;
  const double slack = abs_tonnes * lane_sum;
  for (std::size_t vi = 0; vi < inst.ships.size(); ++vi) {
    const int v = static_cast<int>(vi);
    const auto& ship = inst.ships[v];
    const double cap = ship.total_capacity();
    for (int s = 0; s < scenarios; ++s) {
      std::vector<double> trips(inst.lanes.size(), 0.0), tonnes(inst.lanes.size(), 0.0);
      double total = 0.0;
      for (int r : ship.sailable_routes) {
        for (std::size_t e = 0; e < ship.speeds.size(); ++e) {
          const int ee = static_cast<int>(e);
          const double x = plan.get(var::x_p1(v, r, ee)) + plan.get(var::x_p2(v, r, ee, s));
          total += x * inst.routes[r].total_length;
          for (int i : inst.routes[r].lane_sequence) trips[i] += x;
          for (int r2 : ship.sailable_routes) {
            if (r2 == r) continue;
            const double d = inst.transfer(v, r, r2, ee).transfer_distance;
            total += d * (plan.get(var::y11(v, r, r2, ee)) + plan.get(var::y21(v, r, r2, ee, s)));
            total += 0.5 * d * (plan.get(var::y12(v, r, r2, ee)) + plan.get(var::y22(v, r, r2, ee, s)));
          }
        }
      }
      total += ship.ballast_distance_per_day *
               (plan.get(var::t_ballast_p1(v)) + plan.get(var::t_ballast_p2(v, s)));
      double work = 0.0, laden = 0.0, qmax = 0.0;
      for (std::size_t i = 0; i < inst.lanes.size(); ++i) {
        const int ii = static_cast<int>(i);
        for (int k = 0; k < inst.num_types(); ++k) {
          for (int c : inst.lanes[i].contracts_served) {
            tonnes[i] += plan.get(var::qC_p1(v, ii, k, c)) + plan.get(var::qC_p2(v, ii, k, c, s));
          }
          tonnes[i] += plan.get(var::qSP_p1(v, ii, k)) + plan.get(var::qSP_p2(v, ii, k, s));
        }
        work += inst.lanes[i].laden_distance * tonnes[i];
        laden += inst.lanes[i].laden_distance * trips[i];
        if (trips[i] > 0) qmax = std::max(qmax, tonnes[i] / trips[i]);
      }
      const double chain[4] = {work, qmax * laden, cap * laden, cap * total};
      for (int q = 0; q < 3; ++q) {
        if (chain[q] > chain[q + 1] + rel_tol * std::max(1.0, std::abs(chain[q + 1])) + slack) return false;
      }
    }
  }
  return true;
}

std::vector<TransitionCount> transition_counts(const tramp::DeploymentPlan& plan, const tramp::ModelSpec& model) {
  using namespace tramp;
  const auto& inst = *model.instance;
  std::vector<TransitionCount> out;
  const int ns = static_cast<int>(model.scenarios->size());
  for (std::size_t vi = 0; vi < inst.ships.size(); ++vi) {
    const int v = static_cast<int>(vi);
    const auto& ship = inst.ships[v];
    for (int stage = -1; stage < ns; ++stage) {
      TransitionCount t;
      t.ship = v;
      t.stage = stage;
      for (int r : ship.sailable_routes) {
        const double used = stage < 0 ? plan.get(var::y1(v, r)) : plan.get(var::y2(v, r, stage));
        if (used > 0.5) ++t.routes_used;
        for (int r2 : ship.sailable_routes) {
          for (std::size_t e = 0; e < ship.speeds.size(); ++e) {
            const int ee = static_cast<int>(e);
            t.transfer_sum += stage < 0 ? plan.get(var::y12(v, r, r2, ee)) : plan.get(var::y22(v, r, r2, ee, stage));
          }
        }
      }
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace oracle
