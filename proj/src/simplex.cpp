#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "tramp/milp.hpp"

namespace tramp {

int MilpProblem::add_col(double cost, double lb, double ub, bool integer, std::string name) {
  obj.push_back(cost);
  col_lb.push_back(lb);
  col_ub.push_back(ub);
  is_integer.push_back(integer ? 1 : 0);
  col_names.push_back(std::move(name));
  return static_cast<int>(obj.size()) - 1;
}

int MilpProblem::add_row(const std::vector<std::pair<int, double>>& terms, double lb, double ub,
                         std::string name) {
  auto sorted = terms;
  std::sort(sorted.begin(), sorted.end());
  std::size_t out = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k].first < 0 || sorted[k].first >= num_cols()) {
      throw std::out_of_range("add_row: column index out of range");
    }
    if (out > 0 && sorted[out - 1].first == sorted[k].first) {
      sorted[out - 1].second += sorted[k].second;
    } else {
      sorted[out++] = sorted[k];
    }
  }
  sorted.resize(out);
  for (const auto& [j, a] : sorted) {
    if (a == 0.0) continue;
    row_index.push_back(j);
    row_value.push_back(a);
  }
  row_start.push_back(static_cast<int>(row_index.size()));
  row_lb.push_back(lb);
  row_ub.push_back(ub);
  row_names.push_back(std::move(name));
  return num_rows() - 1;
}

double MilpProblem::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_cols(); ++j) {
    worst = std::max(worst, col_lb[j] - x[j]);
    worst = std::max(worst, x[j] - col_ub[j]);
  }
  for (int i = 0; i < num_rows(); ++i) {
    double act = 0.0;
    for (int k = row_start[i]; k < row_start[i + 1]; ++k) act += row_value[k] * x[row_index[k]];
    worst = std::max(worst, row_lb[i] - act);
    worst = std::max(worst, act - row_ub[i]);
  }
  return worst;
}

double MilpProblem::max_integrality_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_cols(); ++j) {
    if (is_integer[j]) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  }
  return worst;
}

double MilpProblem::objective_value(const std::vector<double>& x) const {
  double v = obj_offset;
  for (int j = 0; j < num_cols(); ++j) v += obj[j] * x[j];
  return v;
}

namespace lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::unbounded:
      return "unbounded";
    case Status::iteration_limit:
      return "iteration_limit";
    case Status::time_limit:
      return "time_limit";
    case Status::numerical_error:
      break;
  }
  return "numerical_error";
}

namespace {

constexpr double kArtificialBox = 1e9;

double pow2_round(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) return 1.0;
  return std::exp2(std::round(std::log2(s)));
}

using Clock = std::chrono::steady_clock;

}  // namespace

class DualSimplexImpl {
 public:
  DualSimplexImpl(const MilpProblem& p, const Options& o);

  void set_col_bounds(int col, double lb, double ub);
  Status solve(double time_limit);
  double objective() const;
  std::vector<double> col_values() const;
  std::vector<double> reduced_costs() const;
  std::vector<VarStatus> basis() const { return status_; }
  void load_basis(const std::vector<VarStatus>& basis);

  double orig_lb(int j) const { return orig_lb_[j]; }
  double orig_ub(int j) const { return orig_ub_[j]; }
  long iterations() const { return iterations_; }

 private:
  struct Eta {
    int p = 0;
    double pivot = 1.0;
    std::vector<int> idx;
    std::vector<double> val;
  };

  int n_ = 0;
  int m_ = 0;
  Options opt_;
  double offset_ = 0.0;
  std::vector<double> orig_cost_;
  std::vector<double> orig_lb_, orig_ub_;

  std::vector<double> col_scale_, row_scale_;
  double obj_scale_ = 1.0;
  std::vector<int> cs_start_, cs_row_;
  std::vector<double> cs_val_;
  std::vector<int> rs_start_, rs_col_;
  std::vector<double> rs_val_;

  std::vector<double> cost_true_, cost_;
  std::vector<double> lb_, ub_;
  std::vector<char> artificial_;  // structural whose box is artificial on some side

  std::vector<double> x_, d_;
  std::vector<VarStatus> status_;
  std::vector<int> head_, pos_;
  std::vector<double> weight_;

  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  bool factored_ = false;
  long iterations_ = 0;
  Clock::time_point deadline_;
  bool has_deadline_ = false;

  void compute_scaling(const MilpProblem& p);
  void slack_basis();
  bool refactor();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  void load_column(int j, Eigen::VectorXd& v) const;
  void add_column(int j, double mult, Eigen::VectorXd& v) const;
  void compute_primal();
  void compute_duals();
  void compute_row(const Eigen::VectorXd& rho, std::vector<double>& alpha) const;
  double dual_infeasibility(int j) const;
  bool real_boxed(int j) const;
  int flip_dual_infeasible();
  void perturb_costs();
  void place_nonbasic(int j);
  void push_eta(int r, const Eigen::VectorXd& col);
  void pivot(int r, int q, VarStatus leaving_status, double leaving_value);
  bool time_up() const { return has_deadline_ && Clock::now() > deadline_; }
  Status dual_phase();
  Status primal_phase();
  bool primal_feasible() const;
  bool dual_feasible() const;
  void release_artificial();
};

DualSimplexImpl::DualSimplexImpl(const MilpProblem& p, const Options& o) : opt_(o) {
  n_ = p.num_cols();
  m_ = p.num_rows();
  offset_ = p.obj_offset;
  orig_cost_ = p.obj;
  orig_lb_ = p.col_lb;
  orig_ub_ = p.col_ub;
  compute_scaling(p);

  // Column-wise copy of the scaled matrix.
  std::vector<int> count(n_, 0);
  for (int k = 0; k < static_cast<int>(p.row_index.size()); ++k) ++count[p.row_index[k]];
  cs_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) cs_start_[j + 1] = cs_start_[j] + count[j];
  cs_row_.assign(p.row_index.size(), 0);
  cs_val_.assign(p.row_index.size(), 0.0);
  std::vector<int> fill(cs_start_.begin(), cs_start_.end() - 1);
  rs_start_ = p.row_start;
  rs_col_ = p.row_index;
  rs_val_.assign(p.row_value.size(), 0.0);
  for (int i = 0; i < m_; ++i) {
    for (int k = p.row_start[i]; k < p.row_start[i + 1]; ++k) {
      const int j = p.row_index[k];
      const double a = row_scale_[i] * p.row_value[k] * col_scale_[j];
      rs_val_[k] = a;
      cs_row_[fill[j]] = i;
      cs_val_[fill[j]++] = a;
    }
  }

  double cmax = 0.0;
  for (int j = 0; j < n_; ++j) cmax = std::max(cmax, std::abs(p.obj[j] * col_scale_[j]));
  obj_scale_ = opt_.scaling && cmax > 0.0 ? pow2_round(1.0 / cmax) : 1.0;
  cost_true_.assign(n_ + m_, 0.0);
  for (int j = 0; j < n_; ++j) cost_true_[j] = p.obj[j] * col_scale_[j] * obj_scale_;
  cost_ = cost_true_;

  lb_.assign(n_ + m_, 0.0);
  ub_.assign(n_ + m_, 0.0);
  artificial_.assign(n_, 0);
  for (int j = 0; j < n_; ++j) set_col_bounds(j, p.col_lb[j], p.col_ub[j]);
  for (int i = 0; i < m_; ++i) {
    lb_[n_ + i] = std::isfinite(p.row_lb[i]) ? p.row_lb[i] * row_scale_[i] : -kInf;
    ub_[n_ + i] = std::isfinite(p.row_ub[i]) ? p.row_ub[i] * row_scale_[i] : kInf;
  }
  x_.assign(n_ + m_, 0.0);
  d_.assign(n_ + m_, 0.0);
  status_.assign(n_ + m_, VarStatus::at_lower);
  pos_.assign(n_ + m_, -1);
  head_.assign(m_, 0);
  weight_.assign(m_, 1.0);
  slack_basis();
}

void DualSimplexImpl::compute_scaling(const MilpProblem& p) {
  col_scale_.assign(n_, 1.0);
  row_scale_.assign(m_, 1.0);
  if (!opt_.scaling) return;
  for (int pass = 0; pass < 6; ++pass) {
    for (int i = 0; i < m_; ++i) {
      double lo = kInf, hi = 0.0;
      for (int k = p.row_start[i]; k < p.row_start[i + 1]; ++k) {
        const double a = std::abs(p.row_value[k] * col_scale_[p.row_index[k]]);
        if (a == 0.0) continue;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
      if (hi > 0.0) row_scale_[i] = 1.0 / std::sqrt(lo * hi);
    }
    std::vector<double> lo(n_, kInf), hi(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      for (int k = p.row_start[i]; k < p.row_start[i + 1]; ++k) {
        const double a = std::abs(p.row_value[k] * row_scale_[i]);
        if (a == 0.0) continue;
        const int j = p.row_index[k];
        lo[j] = std::min(lo[j], a);
        hi[j] = std::max(hi[j], a);
      }
    }
    for (int j = 0; j < n_; ++j) {
      if (p.is_integer[j]) continue;
      if (hi[j] > 0.0) col_scale_[j] = 1.0 / std::sqrt(lo[j] * hi[j]);
    }
  }
  for (auto& s : row_scale_) s = pow2_round(s);
  for (auto& s : col_scale_) s = pow2_round(s);
}

void DualSimplexImpl::set_col_bounds(int j, double lb, double ub) {
  orig_lb_[j] = lb;
  orig_ub_[j] = ub;
  artificial_[j] = 0;
  if (std::isfinite(lb)) {
    lb_[j] = lb / col_scale_[j];
  } else {
    lb_[j] = -kArtificialBox;
    artificial_[j] = 1;
  }
  if (std::isfinite(ub)) {
    ub_[j] = ub / col_scale_[j];
  } else {
    ub_[j] = kArtificialBox;
    artificial_[j] = 1;
  }
  if (!status_.empty() && status_[j] != VarStatus::basic) place_nonbasic(j);
}

void DualSimplexImpl::place_nonbasic(int j) {
  if (status_[j] == VarStatus::at_zero) {
    if (std::isfinite(lb_[j]) || std::isfinite(ub_[j])) status_[j] = VarStatus::at_lower;
  }
  if (status_[j] == VarStatus::at_lower && !std::isfinite(lb_[j])) {
    status_[j] = std::isfinite(ub_[j]) ? VarStatus::at_upper : VarStatus::at_zero;
  }
  if (status_[j] == VarStatus::at_upper && !std::isfinite(ub_[j])) {
    status_[j] = std::isfinite(lb_[j]) ? VarStatus::at_lower : VarStatus::at_zero;
  }
  switch (status_[j]) {
    case VarStatus::at_lower:
      x_[j] = lb_[j];
      break;
    case VarStatus::at_upper:
      x_[j] = ub_[j];
      break;
    case VarStatus::at_zero:
      x_[j] = 0.0;
      break;
    case VarStatus::basic:
      break;
  }
}

void DualSimplexImpl::slack_basis() {
  for (int j = 0; j < n_; ++j) {
    status_[j] = cost_true_[j] >= 0.0 ? VarStatus::at_lower : VarStatus::at_upper;
    pos_[j] = -1;
    place_nonbasic(j);
  }
  for (int i = 0; i < m_; ++i) {
    status_[n_ + i] = VarStatus::basic;
    head_[i] = n_ + i;
    pos_[n_ + i] = i;
  }
  std::fill(weight_.begin(), weight_.end(), 1.0);
  factored_ = false;
}

void DualSimplexImpl::load_basis(const std::vector<VarStatus>& basis) {
  if (static_cast<int>(basis.size()) != n_ + m_) throw std::invalid_argument("load_basis: size mismatch");
  int count = 0;
  for (auto s : basis) count += s == VarStatus::basic ? 1 : 0;
  if (count != m_) {
    slack_basis();
    return;
  }
  status_ = basis;
  int p = 0;
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == VarStatus::basic) {
      head_[p] = j;
      pos_[j] = p++;
    } else {
      pos_[j] = -1;
      place_nonbasic(j);
    }
  }
  std::fill(weight_.begin(), weight_.end(), 1.0);
  if (!refactor()) slack_basis();
}

bool DualSimplexImpl::refactor() {
  etas_.clear();
  factored_ = false;
  if (m_ == 0) {
    factored_ = true;
    return true;
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (int p = 0; p < m_; ++p) {
    const int j = head_[p];
    if (j >= n_) {
      trip.emplace_back(j - n_, p, -1.0);
    } else {
      for (int k = cs_start_[j]; k < cs_start_[j + 1]; ++k) trip.emplace_back(cs_row_[k], p, cs_val_[k]);
    }
  }
  Eigen::SparseMatrix<double> b(m_, m_);
  b.setFromTriplets(trip.begin(), trip.end());
  b.makeCompressed();
  lu_.analyzePattern(b);
  lu_.factorize(b);
  if (lu_.info() != Eigen::Success) return false;
  factored_ = true;
  return true;
}

void DualSimplexImpl::ftran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  v = lu_.solve(v);
  for (const auto& e : etas_) {
    const double yp = v[e.p] / e.pivot;
    if (yp != 0.0) {
      for (std::size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * yp;
    }
    v[e.p] = yp;
  }
}

void DualSimplexImpl::btran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->p];
    for (std::size_t k = 0; k < it->idx.size(); ++k) s -= it->val[k] * v[it->idx[k]];
    v[it->p] = s / it->pivot;
  }
  Eigen::VectorXd w = lu_.transpose().solve(v);
  v = w;
}

void DualSimplexImpl::load_column(int j, Eigen::VectorXd& v) const {
  v.setZero(m_);
  add_column(j, 1.0, v);
}

void DualSimplexImpl::add_column(int j, double mult, Eigen::VectorXd& v) const {
  if (j >= n_) {
    v[j - n_] -= mult;
    return;
  }
  for (int k = cs_start_[j]; k < cs_start_[j + 1]; ++k) v[cs_row_[k]] += mult * cs_val_[k];
}

void DualSimplexImpl::compute_primal() {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == VarStatus::basic || x_[j] == 0.0) continue;
    add_column(j, -x_[j], rhs);
  }
  ftran(rhs);
  for (int p = 0; p < m_; ++p) x_[head_[p]] = rhs[p];
}

void DualSimplexImpl::compute_duals() {
  Eigen::VectorXd y(m_);
  for (int p = 0; p < m_; ++p) y[p] = cost_[head_[p]];
  btran(y);
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == VarStatus::basic) {
      d_[j] = 0.0;
      continue;
    }
    double s = cost_[j];
    for (int k = cs_start_[j]; k < cs_start_[j + 1]; ++k) s -= cs_val_[k] * y[cs_row_[k]];
    d_[j] = s;
  }
  for (int i = 0; i < m_; ++i) d_[n_ + i] = status_[n_ + i] == VarStatus::basic ? 0.0 : y[i];
}

void DualSimplexImpl::compute_row(const Eigen::VectorXd& rho, std::vector<double>& alpha) const {
  std::fill(alpha.begin(), alpha.end(), 0.0);
  for (int i = 0; i < m_; ++i) {
    const double r = rho[i];
    if (r == 0.0) continue;
    for (int k = rs_start_[i]; k < rs_start_[i + 1]; ++k) alpha[rs_col_[k]] += r * rs_val_[k];
    alpha[n_ + i] = -r;
  }
}

double DualSimplexImpl::dual_infeasibility(int j) const {
  if (lb_[j] == ub_[j]) return 0.0;
  switch (status_[j]) {
    case VarStatus::at_lower:
      return std::max(0.0, -d_[j]);
    case VarStatus::at_upper:
      return std::max(0.0, d_[j]);
    case VarStatus::at_zero:
      return std::abs(d_[j]);
    case VarStatus::basic:
      break;
  }
  return 0.0;
}

bool DualSimplexImpl::real_boxed(int j) const {
  if (j < n_ && artificial_[j]) return false;
  return std::isfinite(lb_[j]) && std::isfinite(ub_[j]);
}

int DualSimplexImpl::flip_dual_infeasible() {
  int flips = 0;
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == VarStatus::basic) continue;
    if (dual_infeasibility(j) <= opt_.dual_tol) continue;
    if (!real_boxed(j) && !(j < n_ && artificial_[j])) continue;
    if (status_[j] == VarStatus::at_lower && std::isfinite(ub_[j])) {
      status_[j] = VarStatus::at_upper;
      x_[j] = ub_[j];
      ++flips;
    } else if (status_[j] == VarStatus::at_upper && std::isfinite(lb_[j])) {
      status_[j] = VarStatus::at_lower;
      x_[j] = lb_[j];
      ++flips;
    }
  }
  return flips;
}

void DualSimplexImpl::perturb_costs() {
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == VarStatus::basic || lb_[j] == ub_[j]) continue;
    // Deterministic pseudo-random magnitude per column.
    std::uint64_t h = static_cast<std::uint64_t>(j) * 0x9e3779b97f4a7c15ULL;
    h ^= h >> 29;
    const double u = static_cast<double>(h % 1000) / 1000.0;
    const double eps = 5e-7 * (1.0 + std::abs(cost_true_[j])) * (1.0 + u);
    if (status_[j] == VarStatus::at_lower) {
      cost_[j] += eps;
      d_[j] += eps;
    } else if (status_[j] == VarStatus::at_upper) {
      cost_[j] -= eps;
      d_[j] -= eps;
    }
  }
}

void DualSimplexImpl::push_eta(int r, const Eigen::VectorXd& col) {
  Eta e;
  e.p = r;
  e.pivot = col[r];
  for (int p = 0; p < m_; ++p) {
    if (p != r && col[p] != 0.0) {
      e.idx.push_back(p);
      e.val.push_back(col[p]);
    }
  }
  etas_.push_back(std::move(e));
}

void DualSimplexImpl::pivot(int r, int q, VarStatus leaving_status, double leaving_value) {
  const int jr = head_[r];
  x_[jr] = leaving_value;
  status_[jr] = leaving_status;
  pos_[jr] = -1;
  head_[r] = q;
  pos_[q] = r;
  status_[q] = VarStatus::basic;
  d_[q] = 0.0;
}

bool DualSimplexImpl::primal_feasible() const {
  for (int p = 0; p < m_; ++p) {
    const int j = head_[p];
    if (x_[j] < lb_[j] - opt_.primal_tol || x_[j] > ub_[j] + opt_.primal_tol) return false;
  }
  return true;
}

bool DualSimplexImpl::dual_feasible() const {
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] != VarStatus::basic && dual_infeasibility(j) > opt_.dual_tol) return false;
  }
  return true;
}

Status DualSimplexImpl::dual_phase() {
  Eigen::VectorXd rho(m_), col(m_), tau(m_), flipv(m_);
  std::vector<double> alpha(n_ + m_, 0.0);
  struct Cand {
    int j;
    double ratio;
    double absa;
  };
  std::vector<Cand> cands;
  std::vector<int> flips;
  long degenerate = 0;
  bool bland = false;
  bool fresh = true;  // factorization rebuilt since the last pivot
  long local = 0;

  while (true) {
    if (++local % 32 == 0 && time_up()) return Status::time_limit;
    if (iterations_ >= opt_.max_iterations) return Status::iteration_limit;
    if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
      if (!refactor()) return Status::numerical_error;
      compute_primal();
      compute_duals();
      if (flip_dual_infeasible() > 0) compute_primal();
      fresh = true;
    }

    int r = -1;
    double best = 0.0;
    for (int p = 0; p < m_; ++p) {
      const int j = head_[p];
      double inf = 0.0;
      if (x_[j] < lb_[j] - opt_.primal_tol) {
        inf = lb_[j] - x_[j];
      } else if (x_[j] > ub_[j] + opt_.primal_tol) {
        inf = x_[j] - ub_[j];
      }
      if (inf <= 0.0) continue;
      if (bland) {
        if (r < 0 || j < head_[r]) r = p;
      } else {
        const double score = inf * inf / weight_[p];
        if (score > best) {
          best = score;
          r = p;
        }
      }
    }
    if (r < 0) return Status::optimal;

    const int jr = head_[r];
    const double s = x_[jr] > ub_[jr] ? 1.0 : -1.0;
    const double bound = s > 0 ? ub_[jr] : lb_[jr];
    double slope = std::abs(x_[jr] - bound);

    rho.setZero();
    rho[r] = 1.0;
    btran(rho);
    compute_row(rho, alpha);

    cands.clear();
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == VarStatus::basic || lb_[j] == ub_[j]) continue;
      const double a = alpha[j];
      if (std::abs(a) < opt_.pivot_tol) continue;
      const double sa = s * a;
      double dv = 0.0;
      if (status_[j] == VarStatus::at_lower) {
        if (sa <= 0.0) continue;
        dv = std::max(d_[j], 0.0);
      } else if (status_[j] == VarStatus::at_upper) {
        if (sa >= 0.0) continue;
        dv = std::max(-d_[j], 0.0);
      } else {
        dv = std::abs(d_[j]);
      }
      cands.push_back(Cand{j, dv / std::abs(a), std::abs(a)});
    }
    if (cands.empty()) {
      if (!fresh) {
        if (!refactor()) return Status::numerical_error;
        compute_primal();
        compute_duals();
        fresh = true;
        continue;
      }
      return Status::infeasible;
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      return a.ratio < b.ratio || (a.ratio == b.ratio && a.j < b.j);
    });

    flips.clear();
    int q = -1;
    std::size_t k = 0;
    while (k < cands.size()) {
      double tmax = kInf;
      std::size_t end = k;
      while (end < cands.size() && cands[end].ratio <= tmax) {
        if (!bland) tmax = std::min(tmax, cands[end].ratio + opt_.dual_tol / cands[end].absa);
        else tmax = cands[k].ratio;
        ++end;
      }
      double drop = 0.0;
      for (std::size_t g = k; g < end; ++g) {
        const int j = cands[g].j;
        const double range = real_boxed(j) ? ub_[j] - lb_[j] : kInf;
        drop += cands[g].absa * range;
      }
      if (!bland && std::isfinite(drop) && slope - drop > opt_.primal_tol) {
        for (std::size_t g = k; g < end; ++g) flips.push_back(cands[g].j);
        slope -= drop;
        k = end;
        continue;
      }
      double big = -1.0;
      for (std::size_t g = k; g < end; ++g) {
        const bool better = bland ? (q < 0 || cands[g].j < q) : cands[g].absa > big;
        if (better) {
          big = cands[g].absa;
          q = cands[g].j;
        }
      }
      break;
    }
    if (q < 0) {
      if (!fresh) {
        if (!refactor()) return Status::numerical_error;
        compute_primal();
        compute_duals();
        fresh = true;
        continue;
      }
      return Status::infeasible;
    }

    load_column(q, col);
    ftran(col);
    const double arq = col[r];
    if (std::abs(arq) < opt_.pivot_tol ||
        std::abs(arq - alpha[q]) > 1e-6 * (1.0 + std::abs(arq))) {
      if (!fresh) {
        if (!refactor()) return Status::numerical_error;
        compute_primal();
        compute_duals();
        if (flip_dual_infeasible() > 0) compute_primal();
        fresh = true;
        continue;
      }
      if (std::abs(arq) < opt_.pivot_tol) return Status::numerical_error;
    }

    tau = rho;
    ftran(tau);
    const double wr = rho.squaredNorm();

    const double theta_d = d_[q] / alpha[q];
    if (theta_d != 0.0) {
      for (int j = 0; j < n_ + m_; ++j) {
        if (status_[j] != VarStatus::basic && alpha[j] != 0.0) d_[j] -= theta_d * alpha[j];
      }
    }
    d_[jr] = -theta_d;
    d_[q] = 0.0;

    if (!flips.empty()) {
      flipv.setZero();
      for (int j : flips) {
        const double old = x_[j];
        if (status_[j] == VarStatus::at_lower) {
          status_[j] = VarStatus::at_upper;
          x_[j] = ub_[j];
        } else {
          status_[j] = VarStatus::at_lower;
          x_[j] = lb_[j];
        }
        add_column(j, x_[j] - old, flipv);
      }
      ftran(flipv);
      for (int p = 0; p < m_; ++p) x_[head_[p]] -= flipv[p];
    }

    const double theta_p = (x_[jr] - bound) / arq;
    for (int p = 0; p < m_; ++p) {
      if (col[p] != 0.0) x_[head_[p]] -= theta_p * col[p];
    }
    x_[q] += theta_p;

    for (int p = 0; p < m_; ++p) {
      if (p == r || col[p] == 0.0) continue;
      const double ratio = col[p] / arq;
      weight_[p] = std::max(weight_[p] + ratio * (ratio * wr - 2.0 * tau[p]), 1e-10);
    }
    weight_[r] = std::max(wr / (arq * arq), 1e-10);

    const double xq = x_[q];
    pivot(r, q, s > 0 ? VarStatus::at_upper : VarStatus::at_lower, bound);
    x_[q] = xq;
    push_eta(r, col);
    ++iterations_;
    fresh = false;

    if (std::abs(theta_d) < 1e-12) {
      if (++degenerate > 400) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

Status DualSimplexImpl::primal_phase() {
  Eigen::VectorXd rho(m_), col(m_);
  std::vector<double> alpha(n_ + m_, 0.0);
  long degenerate = 0;
  bool bland = false;
  long local = 0;
  while (true) {
    if (++local % 32 == 0 && time_up()) return Status::time_limit;
    if (iterations_ >= opt_.max_iterations) return Status::iteration_limit;
    if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
      if (!refactor()) return Status::numerical_error;
      compute_primal();
      compute_duals();
    }

    int q = -1;
    double best = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == VarStatus::basic) continue;
      const double inf = dual_infeasibility(j);
      if (inf <= opt_.dual_tol) continue;
      if (bland) {
        q = j;
        break;
      }
      if (inf > best) {
        best = inf;
        q = j;
      }
    }
    if (q < 0) return Status::optimal;

    double dir = 1.0;
    if (status_[q] == VarStatus::at_upper) dir = -1.0;
    if (status_[q] == VarStatus::at_zero) dir = d_[q] < 0.0 ? 1.0 : -1.0;

    load_column(q, col);
    ftran(col);

    double tmax = kInf;
    for (int p = 0; p < m_; ++p) {
      const double a = dir * col[p];
      const int j = head_[p];
      if (a > opt_.pivot_tol && std::isfinite(lb_[j])) {
        tmax = std::min(tmax, (x_[j] - lb_[j] + opt_.primal_tol) / a);
      } else if (a < -opt_.pivot_tol && std::isfinite(ub_[j])) {
        tmax = std::min(tmax, (ub_[j] - x_[j] + opt_.primal_tol) / -a);
      }
    }
    int r = -1;
    double tr = kInf;
    double big = 0.0;
    for (int p = 0; p < m_; ++p) {
      const double a = dir * col[p];
      const int j = head_[p];
      double t = kInf;
      if (a > opt_.pivot_tol && std::isfinite(lb_[j])) {
        t = std::max(0.0, (x_[j] - lb_[j]) / a);
      } else if (a < -opt_.pivot_tol && std::isfinite(ub_[j])) {
        t = std::max(0.0, (ub_[j] - x_[j]) / -a);
      }
      if (t <= tmax) {
        const bool better = bland ? (r < 0 || j < head_[r]) : std::abs(a) > big;
        if (better) {
          big = std::abs(a);
          r = p;
          tr = t;
        }
      }
    }
    const double range = std::isfinite(lb_[q]) && std::isfinite(ub_[q]) ? ub_[q] - lb_[q] : kInf;
    if (r < 0 && !std::isfinite(range)) return Status::unbounded;

    if (range <= tr) {
      for (int p = 0; p < m_; ++p) x_[head_[p]] -= dir * range * col[p];
      if (status_[q] == VarStatus::at_lower) {
        status_[q] = VarStatus::at_upper;
        x_[q] = ub_[q];
      } else {
        status_[q] = VarStatus::at_lower;
        x_[q] = lb_[q];
      }
      ++iterations_;
      continue;
    }

    const int jr = head_[r];
    const double a = dir * col[r];
    const double theta = dir * tr;
    for (int p = 0; p < m_; ++p) {
      if (col[p] != 0.0) x_[head_[p]] -= theta * col[p];
    }
    x_[q] += theta;

    rho.setZero();
    rho[r] = 1.0;
    btran(rho);
    compute_row(rho, alpha);
    const double theta_d = d_[q] / col[r];
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] != VarStatus::basic && alpha[j] != 0.0) d_[j] -= theta_d * alpha[j];
    }
    d_[jr] = -theta_d;

    const double xq = x_[q];
    const bool to_lower = a > 0.0;
    pivot(r, q, to_lower ? VarStatus::at_lower : VarStatus::at_upper, to_lower ? lb_[jr] : ub_[jr]);
    x_[q] = xq;
    push_eta(r, col);
    weight_[r] = 1.0;
    ++iterations_;

    if (tr < 1e-12) {
      if (++degenerate > 400) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

Status DualSimplexImpl::solve(double time_limit) {
  has_deadline_ = std::isfinite(time_limit);
  if (has_deadline_) {
    deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double>(std::max(0.0, time_limit)));
  }
  if (!factored_ && !refactor()) {
    slack_basis();
    if (!refactor()) return Status::numerical_error;
  }
  cost_ = cost_true_;
  compute_primal();
  compute_duals();
  if (flip_dual_infeasible() > 0) compute_primal();

  for (int round = 0; round < 8; ++round) {
    const bool perturbed = opt_.perturb && round == 0;
    if (perturbed) perturb_costs();
    Status st = dual_phase();
    if (perturbed || st != Status::optimal) {
      cost_ = cost_true_;
      if (st == Status::optimal || st == Status::infeasible) {
        // keep going below
      }
    }
    if (st == Status::numerical_error) {
      slack_basis();
      if (!refactor()) return Status::numerical_error;
      compute_primal();
      compute_duals();
      if (flip_dual_infeasible() > 0) compute_primal();
      continue;
    }
    if (st != Status::optimal) return st;

    if (!refactor()) return Status::numerical_error;
    compute_primal();
    compute_duals();
    if (!primal_feasible()) continue;
    if (!dual_feasible()) {
      st = primal_phase();
      if (st == Status::numerical_error) continue;
      if (st != Status::optimal) return st;
      if (!refactor()) return Status::numerical_error;
      compute_primal();
      compute_duals();
      if (!primal_feasible()) continue;
      if (!dual_feasible()) continue;
    }
    release_artificial();
    for (int j = 0; j < n_; ++j) {
      if (artificial_[j] && std::abs(x_[j]) >= 0.5 * kArtificialBox) return Status::unbounded;
    }
    return Status::optimal;
  }
  return Status::numerical_error;
}

// Moves nonbasic columns resting on an artificial box with zero reduced cost
// back toward a finite value; the objective does not change.
void DualSimplexImpl::release_artificial() {
  Eigen::VectorXd col(m_);
  for (int pass = 0; pass < 2 * n_ + 1; ++pass) {
    int q = -1;
    for (int j = 0; j < n_; ++j) {
      if (artificial_[j] && status_[j] != VarStatus::basic && std::abs(x_[j]) >= 0.5 * kArtificialBox &&
          std::abs(d_[j]) <= opt_.dual_tol) {
        q = j;
        break;
      }
    }
    if (q < 0) return;
    const bool at_art_lower = x_[q] < 0.0;
    double target = 0.0;
    if (at_art_lower && orig_ub_[q] < 0.0) target = ub_[q];
    if (!at_art_lower && orig_lb_[q] > 0.0) target = lb_[q];
    const double dir = target > x_[q] ? 1.0 : -1.0;
    const double full = std::abs(target - x_[q]);
    load_column(q, col);
    ftran(col);
    int r = -1;
    double tr = full;
    for (int p = 0; p < m_; ++p) {
      const double a = dir * col[p];
      const int j = head_[p];
      double t = kInf;
      if (a > opt_.pivot_tol && std::isfinite(lb_[j])) {
        t = std::max(0.0, (x_[j] - lb_[j]) / a);
      } else if (a < -opt_.pivot_tol && std::isfinite(ub_[j])) {
        t = std::max(0.0, (ub_[j] - x_[j]) / -a);
      }
      if (t < tr) {
        tr = t;
        r = p;
      }
    }
    for (int p = 0; p < m_; ++p) {
      if (col[p] != 0.0) x_[head_[p]] -= dir * tr * col[p];
    }
    x_[q] += dir * tr;
    if (r < 0) {
      status_[q] = target == 0.0 ? VarStatus::at_zero : (target == lb_[q] ? VarStatus::at_lower : VarStatus::at_upper);
      x_[q] = target;
      continue;
    }
    const int jr = head_[r];
    const bool to_lower = dir * col[r] > 0.0;
    const double xq = x_[q];
    pivot(r, q, to_lower ? VarStatus::at_lower : VarStatus::at_upper, to_lower ? lb_[jr] : ub_[jr]);
    x_[q] = xq;
    push_eta(r, col);
    if (!refactor()) return;
    compute_primal();
    compute_duals();
  }
}

double DualSimplexImpl::objective() const {
  double v = offset_;
  for (int j = 0; j < n_; ++j) v += orig_cost_[j] * x_[j] * col_scale_[j];
  return v;
}

std::vector<double> DualSimplexImpl::reduced_costs() const {
  std::vector<double> out(n_);
  for (int j = 0; j < n_; ++j) {
    out[j] = status_[j] == VarStatus::basic ? 0.0 : d_[j] / (col_scale_[j] * obj_scale_);
  }
  return out;
}

std::vector<double> DualSimplexImpl::col_values() const {
  std::vector<double> out(n_);
  for (int j = 0; j < n_; ++j) out[j] = x_[j] * col_scale_[j];
  return out;
}

DualSimplex::DualSimplex(const MilpProblem& problem, const Options& options)
    : impl_(std::make_unique<DualSimplexImpl>(problem, options)) {}
DualSimplex::~DualSimplex() = default;
DualSimplex::DualSimplex(DualSimplex&&) noexcept = default;
DualSimplex& DualSimplex::operator=(DualSimplex&&) noexcept = default;

void DualSimplex::set_col_bounds(int col, double lb, double ub) { impl_->set_col_bounds(col, lb, ub); }
double DualSimplex::col_lower(int col) const { return impl_->orig_lb(col); }
double DualSimplex::col_upper(int col) const { return impl_->orig_ub(col); }
Status DualSimplex::solve(double time_limit_seconds) { return impl_->solve(time_limit_seconds); }
double DualSimplex::objective() const { return impl_->objective(); }
std::vector<double> DualSimplex::col_values() const { return impl_->col_values(); }
std::vector<double> DualSimplex::reduced_costs() const { return impl_->reduced_costs(); }
std::vector<VarStatus> DualSimplex::basis() const { return impl_->basis(); }
void DualSimplex::load_basis(const std::vector<VarStatus>& basis) { impl_->load_basis(basis); }
long DualSimplex::iterations() const { return impl_->iterations(); }

}  // namespace lp
}  // namespace tramp
