#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ricci/error.hpp"

namespace ricci {

/// Balanced discrete transport instance: move `mu` (over rows) onto `nu`
/// (over columns) at the per-unit costs in `cost`.
template <class Scalar = double>
struct TransportProblem {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector mu;
  Vector nu;
  Matrix cost;
};

template <class Scalar = double>
struct TransportPlan {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Matrix theta;
  Scalar total_cost = 0;
  /// Dual certificate: row_potential[i] + col_potential[j] <= cost(i, j)
  /// everywhere, with equality on the basic cells.
  Vector row_potential;
  Vector col_potential;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> basis;
  std::size_t pivots = 0;
};

/// Tolerance on |sum(mu) - 1| and |sum(nu) - 1|.
template <class Scalar>
constexpr Scalar mass_tolerance() {
  return std::max<Scalar>(Scalar(1e-12), Scalar(1000) * std::numeric_limits<Scalar>::epsilon());
}

namespace detail {

template <class Scalar>
void validate(const TransportProblem<Scalar>& p) {
  if (p.cost.rows() != p.mu.size() || p.cost.cols() != p.nu.size())
    throw Error(ErrorCode::InvalidParams, "cost matrix shape does not match the measures");
  if (p.mu.size() == 0 || p.nu.size() == 0)
    throw Error(ErrorCode::MassImbalance, "empty measure");
  if ((p.mu.array() < 0).any() || (p.nu.array() < 0).any() || !p.mu.allFinite() || !p.nu.allFinite())
    throw Error(ErrorCode::MassImbalance, "masses must be finite and non-negative");
  if (!p.cost.allFinite() || (p.cost.array() < 0).any())
    throw Error(ErrorCode::InvalidParams, "costs must be finite and non-negative");
  const Scalar tol = mass_tolerance<Scalar>();
  using std::abs;
  if (abs(p.mu.sum() - Scalar(1)) > tol || abs(p.nu.sum() - Scalar(1)) > tol)
    throw Error(ErrorCode::MassImbalance, "measures must each sum to 1");
}

/// Transportation simplex over a spanning-tree basis.
///
/// Starts from the least-cost rule, prices with MODI potentials, and enters
/// the most negative reduced cost. After a run of degenerate (zero-step)
/// pivots it switches to Bland's rule, lowest cell index entering and
/// lowest cell index leaving, until the objective moves again; Bland's rule
/// cannot cycle, so the method terminates.
template <class Scalar>
class TransportationSimplex {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  TransportationSimplex(const Matrix& cost, const Vector& supply, const Vector& demand)
      : cost_(cost), supply_(supply), demand_(demand), m_(cost.rows()), n_(cost.cols()) {
    const Scalar max_cost = cost.size() ? cost.maxCoeff() : Scalar(0);
    cost_tol_ = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * std::max(max_cost, Scalar(1e-300));
    flow_tol_ = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
  }

  void run() {
    initial_basis();
    const std::size_t pivot_limit = 100000 + 50 * static_cast<std::size_t>(m_ * n_);
    std::size_t degenerate_streak = 0;
    for (;;) {
      compute_potentials();
      const bool bland = degenerate_streak >= kBlandAfter;
      const auto entering = price(bland);
      if (!entering) break;
      if (++pivots_ > pivot_limit)
        throw Error(ErrorCode::InvalidParams, "transport simplex exceeded its pivot limit");
      const Scalar step = pivot(entering->first, entering->second);
      degenerate_streak = step <= flow_tol_ ? degenerate_streak + 1 : 0;
    }
    compute_potentials();
  }

  Eigen::Index rows() const { return m_; }
  Eigen::Index cols() const { return n_; }
  std::size_t pivots() const { return pivots_; }
  const std::vector<Eigen::Index>& cell_row() const { return cell_row_; }
  const std::vector<Eigen::Index>& cell_col() const { return cell_col_; }
  const std::vector<Scalar>& flow() const { return flow_; }
  const Vector& u() const { return u_; }
  const Vector& v() const { return v_; }

 private:
  static constexpr std::size_t kBlandAfter = 8;

  Eigen::Index node_of_col(Eigen::Index j) const { return m_ + j; }

  void add_cell(std::size_t slot, Eigen::Index i, Eigen::Index j, Scalar x) {
    cell_row_[slot] = i;
    cell_col_[slot] = j;
    flow_[slot] = x;
    tree_[static_cast<std::size_t>(i)].push_back(slot);
    tree_[static_cast<std::size_t>(node_of_col(j))].push_back(slot);
  }

  void unlink(std::size_t slot) {
    for (Eigen::Index node : {cell_row_[slot], node_of_col(cell_col_[slot])}) {
      auto& adj = tree_[static_cast<std::size_t>(node)];
      adj.erase(std::find(adj.begin(), adj.end(), slot));
    }
  }

  // Least-cost rule. Every assignment crosses out exactly one line (the
  // last crosses two), so the m+n-1 cells form a spanning tree.
  void initial_basis() {
    const std::size_t basis_size = static_cast<std::size_t>(m_ + n_ - 1);
    cell_row_.assign(basis_size, 0);
    cell_col_.assign(basis_size, 0);
    flow_.assign(basis_size, Scalar(0));
    tree_.assign(static_cast<std::size_t>(m_ + n_), {});

    std::vector<Eigen::Index> order(static_cast<std::size_t>(m_ * n_));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return cost_(a / n_, a % n_) < cost_(b / n_, b % n_);
    });

    Vector a = supply_, b = demand_;
    std::vector<bool> row_done(static_cast<std::size_t>(m_), false), col_done(static_cast<std::size_t>(n_), false);
    Eigen::Index rows_left = m_, cols_left = n_;
    std::size_t slot = 0;
    for (Eigen::Index cell : order) {
      const Eigen::Index i = cell / n_, j = cell % n_;
      if (row_done[static_cast<std::size_t>(i)] || col_done[static_cast<std::size_t>(j)]) continue;
      const Scalar x = std::min(a[i], b[j]);
      add_cell(slot++, i, j, x);
      a[i] -= x;
      b[j] -= x;
      if (rows_left == 1 && cols_left == 1) break;
      if ((a[i] <= b[j] && rows_left > 1) || cols_left == 1) {
        row_done[static_cast<std::size_t>(i)] = true;
        --rows_left;
      } else {
        col_done[static_cast<std::size_t>(j)] = true;
        --cols_left;
      }
    }
  }

  void compute_potentials() {
    u_.setZero(m_);
    v_.setZero(n_);
    std::vector<bool> known(static_cast<std::size_t>(m_ + n_), false);
    std::vector<Eigen::Index> stack{0};
    known[0] = true;
    while (!stack.empty()) {
      const Eigen::Index node = stack.back();
      stack.pop_back();
      for (std::size_t slot : tree_[static_cast<std::size_t>(node)]) {
        const Eigen::Index i = cell_row_[slot], j = cell_col_[slot];
        const Scalar c = cost_(i, j);
        if (node < m_) {
          if (known[static_cast<std::size_t>(node_of_col(j))]) continue;
          v_[j] = c - u_[i];
          known[static_cast<std::size_t>(node_of_col(j))] = true;
          stack.push_back(node_of_col(j));
        } else {
          if (known[static_cast<std::size_t>(i)]) continue;
          u_[i] = c - v_[j];
          known[static_cast<std::size_t>(i)] = true;
          stack.push_back(i);
        }
      }
    }
  }

  std::optional<std::pair<Eigen::Index, Eigen::Index>> price(bool bland) const {
    Scalar best = -cost_tol_;
    std::optional<std::pair<Eigen::Index, Eigen::Index>> entering;
    for (Eigen::Index i = 0; i < m_; ++i) {
      for (Eigen::Index j = 0; j < n_; ++j) {
        const Scalar r = cost_(i, j) - u_[i] - v_[j];
        if (r < best) {
          entering = {i, j};
          if (bland) return entering;
          best = r;
        }
      }
    }
    return entering;
  }

  // Adds cell (i, j) to the basis, pushing flow around the unique cycle it
  // closes; returns the step length.
  Scalar pivot(Eigen::Index i, Eigen::Index j) {
    const std::size_t nodes = static_cast<std::size_t>(m_ + n_);
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> via(nodes, kNone);
    std::vector<bool> seen(nodes, false);
    std::vector<Eigen::Index> stack{i};
    seen[static_cast<std::size_t>(i)] = true;
    const Eigen::Index target = node_of_col(j);
    while (!stack.empty() && !seen[static_cast<std::size_t>(target)]) {
      const Eigen::Index node = stack.back();
      stack.pop_back();
      for (std::size_t slot : tree_[static_cast<std::size_t>(node)]) {
        const Eigen::Index next = node < m_ ? node_of_col(cell_col_[slot]) : cell_row_[slot];
        if (seen[static_cast<std::size_t>(next)]) continue;
        seen[static_cast<std::size_t>(next)] = true;
        via[static_cast<std::size_t>(next)] = slot;
        stack.push_back(next);
      }
    }

    // Walk back from column j; cells alternate -, +, -, ... starting there.
    std::vector<std::size_t> minus, plus;
    Eigen::Index node = target;
    bool sign_minus = true;
    while (node != i) {
      const std::size_t slot = via[static_cast<std::size_t>(node)];
      (sign_minus ? minus : plus).push_back(slot);
      sign_minus = !sign_minus;
      node = node < m_ ? node_of_col(cell_col_[slot]) : cell_row_[slot];
    }

    std::size_t leaving = minus.front();
    auto cell_index = [&](std::size_t slot) { return cell_row_[slot] * n_ + cell_col_[slot]; };
    for (std::size_t slot : minus) {
      if (flow_[slot] < flow_[leaving] ||
          (flow_[slot] == flow_[leaving] && cell_index(slot) < cell_index(leaving)))
        leaving = slot;
    }
    const Scalar step = std::max(flow_[leaving], Scalar(0));
    for (std::size_t slot : minus) flow_[slot] -= step;
    for (std::size_t slot : plus) flow_[slot] += step;

    unlink(leaving);
    add_cell(leaving, i, j, step);
    return step;
  }

  const Matrix& cost_;
  const Vector& supply_;
  const Vector& demand_;
  Eigen::Index m_, n_;
  Scalar cost_tol_, flow_tol_;
  std::vector<Eigen::Index> cell_row_, cell_col_;
  std::vector<Scalar> flow_;
  std::vector<std::vector<std::size_t>> tree_;
  Vector u_, v_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

/// Exact optimal transport plan. Zero-mass rows and columns are dropped
/// before solving; the plan is returned in the original indexing together
/// with dual potentials for every row and column.
template <class Scalar>
TransportPlan<Scalar> solve(const TransportProblem<Scalar>& p) {
  using Vector = typename TransportProblem<Scalar>::Vector;
  using Matrix = typename TransportProblem<Scalar>::Matrix;
  detail::validate(p);

  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < p.mu.size(); ++i)
    if (p.mu[i] > 0) rows.push_back(i);
  for (Eigen::Index j = 0; j < p.nu.size(); ++j)
    if (p.nu[j] > 0) cols.push_back(j);

  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(cols.size());
  Matrix cost(m, n);
  Vector supply(m), demand(n);
  for (Eigen::Index a = 0; a < m; ++a) {
    supply[a] = p.mu[rows[static_cast<std::size_t>(a)]];
    for (Eigen::Index b = 0; b < n; ++b)
      cost(a, b) = p.cost(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
  }
  for (Eigen::Index b = 0; b < n; ++b) demand[b] = p.nu[cols[static_cast<std::size_t>(b)]];

  detail::TransportationSimplex<Scalar> simplex(cost, supply, demand);
  simplex.run();

  TransportPlan<Scalar> plan;
  plan.theta = Matrix::Zero(p.mu.size(), p.nu.size());
  plan.pivots = simplex.pivots();
  Scalar total = 0;
  for (std::size_t k = 0; k < simplex.flow().size(); ++k) {
    const Eigen::Index i = rows[static_cast<std::size_t>(simplex.cell_row()[k])];
    const Eigen::Index j = cols[static_cast<std::size_t>(simplex.cell_col()[k])];
    const Scalar x = std::max(simplex.flow()[k], Scalar(0));
    plan.theta(i, j) = x;
    plan.basis.emplace_back(i, j);
    total += x * p.cost(i, j);
  }
  plan.total_cost = total;

  // Extend the potentials to dropped rows/columns so the certificate covers
  // the full matrix.
  constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();
  plan.row_potential = Vector::Constant(p.mu.size(), kInf);
  plan.col_potential = Vector::Constant(p.nu.size(), kInf);
  for (Eigen::Index a = 0; a < m; ++a) plan.row_potential[rows[static_cast<std::size_t>(a)]] = simplex.u()[a];
  for (Eigen::Index b = 0; b < n; ++b) plan.col_potential[cols[static_cast<std::size_t>(b)]] = simplex.v()[b];
  for (Eigen::Index i = 0; i < p.mu.size(); ++i) {
    if (plan.row_potential[i] != kInf) continue;
    Scalar best = kInf;
    for (Eigen::Index b = 0; b < n; ++b) {
      const Eigen::Index j = cols[static_cast<std::size_t>(b)];
      best = std::min(best, p.cost(i, j) - plan.col_potential[j]);
    }
    plan.row_potential[i] = best;
  }
  for (Eigen::Index j = 0; j < p.nu.size(); ++j) {
    if (plan.col_potential[j] != kInf) continue;
    Scalar best = kInf;
    for (Eigen::Index i = 0; i < p.mu.size(); ++i) best = std::min(best, p.cost(i, j) - plan.row_potential[i]);
    plan.col_potential[j] = best;
  }
  return plan;
}

/// Largest violation of the optimality certificate: dual infeasibility
/// max(u_i + v_j - c_ij) over all cells, complementary slackness
/// |u_i + v_j - c_ij| on cells carrying flow, and conservation residuals.
template <class Scalar>
Scalar certificate_violation(const TransportProblem<Scalar>& p, const TransportPlan<Scalar>& plan) {
  Scalar worst = 0;
  using std::abs;
  for (Eigen::Index i = 0; i < p.mu.size(); ++i) {
    for (Eigen::Index j = 0; j < p.nu.size(); ++j) {
      const Scalar slack = plan.row_potential[i] + plan.col_potential[j] - p.cost(i, j);
      worst = std::max(worst, slack);
      if (plan.theta(i, j) > 0) worst = std::max(worst, abs(slack));
    }
  }
  worst = std::max(worst, (plan.theta.rowwise().sum() - p.mu).cwiseAbs().maxCoeff());
  worst = std::max(worst, (plan.theta.colwise().sum().transpose() - p.nu).cwiseAbs().maxCoeff());
  return worst;
}

/// Optimal cost by enumerating every spanning-tree basis of the
/// transportation polytope (the optimum is attained at a vertex). Independent
/// of solve(); limited to m, n <= 4. Throws OracleTooLarge.
inline double oracle_cost(const TransportProblem<double>& p) {
  detail::validate(p);
  const auto m = static_cast<int>(p.mu.size());
  const auto n = static_cast<int>(p.nu.size());
  if (m > 4 || n > 4) throw Error(ErrorCode::OracleTooLarge, "oracle_cost supports at most 4x4");

  const int cells = m * n;
  const int basis_size = m + n - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> chosen;
  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    if (std::popcount(mask) != basis_size) continue;
    chosen.clear();
    for (int c = 0; c < cells; ++c)
      if (mask & (1u << c)) chosen.push_back(c);

    // Acyclic with m+n-1 edges <=> spanning tree.
    std::vector<int> parent(static_cast<std::size_t>(m + n));
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
      return x;
    };
    bool tree = true;
    for (int c : chosen) {
      const int a = root(c / n), b = root(m + c % n);
      if (a == b) {
        tree = false;
        break;
      }
      parent[static_cast<std::size_t>(a)] = b;
    }
    if (!tree) continue;

    // Peel leaves: a leaf node's only cell carries its remaining mass.
    std::vector<double> mass(static_cast<std::size_t>(m + n));
    for (int i = 0; i < m; ++i) mass[static_cast<std::size_t>(i)] = p.mu[i];
    for (int j = 0; j < n; ++j) mass[static_cast<std::size_t>(m + j)] = p.nu[j];
    std::vector<bool> used(chosen.size(), false);
    std::vector<int> degree(static_cast<std::size_t>(m + n), 0);
    for (int c : chosen) {
      ++degree[static_cast<std::size_t>(c / n)];
      ++degree[static_cast<std::size_t>(m + c % n)];
    }
    double cost = 0;
    bool feasible = true;
    for (std::size_t round = 0; round < chosen.size(); ++round) {
      std::size_t pick = chosen.size();
      int leaf = -1;
      for (std::size_t k = 0; k < chosen.size() && pick == chosen.size(); ++k) {
        if (used[k]) continue;
        const int r = chosen[k] / n, col = m + chosen[k] % n;
        if (degree[static_cast<std::size_t>(r)] == 1) {
          pick = k;
          leaf = r;
        } else if (degree[static_cast<std::size_t>(col)] == 1) {
          pick = k;
          leaf = col;
        }
      }
      const int r = chosen[pick] / n, col = m + chosen[pick] % n;
      const int other = leaf == r ? col : r;
      const double x = mass[static_cast<std::size_t>(leaf)];
      if (x < -1e-12) {
        feasible = false;
        break;
      }
      mass[static_cast<std::size_t>(other)] -= x;
      mass[static_cast<std::size_t>(leaf)] = 0;
      used[pick] = true;
      --degree[static_cast<std::size_t>(r)];
      --degree[static_cast<std::size_t>(col)];
      cost += x * p.cost(r, col - m);
    }
    if (feasible) best = std::min(best, cost);
  }
  return best;
}

}  // namespace ricci
