#include "aqua/controller/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "aqua/errors.hpp"

namespace aqua::controller {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double term(double demand, double resource) {
  if (demand == 0.0) return 0.0;
  if (resource <= 0.0) return kInf;
  return demand / resource;
}

void check_tasks(std::span<const offload::ComputeTask> tasks) {
  if (tasks.empty()) throw ConfigurationError("allocation needs at least one user");
  for (const auto& t : tasks) t.validate();
}

void check_capacity(const Capacity& cap) {
  if (!std::isfinite(cap.radio_total) || cap.radio_total < 0.0 ||
      !std::isfinite(cap.cloud_total) || cap.cloud_total < 0.0) {
    throw ConfigurationError("capacities must be finite and >= 0");
  }
}

/// Scales `v` so that it sums to at most `cap`, using as much of it as
/// rounding allows.
/// Steps every entry down one ulp at a time until the sum is within `cap`.
void trim_to_capacity(std::vector<double>& v, double cap) {
  for (;;) {
    double sum = 0.0;
    for (double x : v) sum += x;
    if (sum <= cap) return;
    for (double& x : v) x = std::nextafter(x, 0.0);
  }
}

void fit_to_capacity(std::vector<double>& v, double cap) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (sum <= 0.0) return;
  for (double& x : v) x = cap * (x / sum);
  trim_to_capacity(v, cap);
}

// ---- grid oracle -----------------------------------------------------------

struct Grid {
  int steps;
  double radio;
  double cloud;

  double r(int k) const { return static_cast<double>(k) * radio / steps; }
  double f(int k) const { return static_cast<double>(k) * cloud / steps; }
};

/// Min sum_i w_i / (k_i * unit) over sum k_i <= steps, lexicographically
/// smallest argmin. Returns the per-user step counts (empty if infeasible).
std::vector<int> grid_min_sum(const std::vector<double>& w, int steps,
                              const std::function<double(int)>& resource) {
  const std::size_t n = w.size();
  const auto width = static_cast<std::size_t>(steps) + 1;
  // suf[i][b]: best value for users i.. with budget b.
  std::vector<double> suf((n + 1) * width, 0.0);
  auto at = [&](std::size_t i, int b) -> double& { return suf[i * width + static_cast<std::size_t>(b)]; };
  for (std::size_t i = n; i-- > 0;) {
    for (int b = 0; b <= steps; ++b) {
      double best = kInf;
      for (int k = 0; k <= b; ++k) {
        best = std::min(best, term(w[i], resource(k)) + at(i + 1, b - k));
      }
      at(i, b) = best;
    }
  }
  if (!std::isfinite(at(0, steps))) return {};
  std::vector<int> ks(n);
  int budget = steps;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = at(i, budget);
    for (int k = 0; k <= budget; ++k) {
      if (term(w[i], resource(k)) + at(i + 1, budget - k) == target) {
        ks[i] = k;
        break;
      }
    }
    budget -= ks[i];
  }
  return ks;
}

class MinMaxGrid {
 public:
  MinMaxGrid(std::span<const offload::ComputeTask> tasks, const Grid& grid)
      : tasks_(tasks), grid_(grid), width_(static_cast<std::size_t>(grid.steps) + 1) {}

  double g(std::size_t i, int kr, int kf) const {
    return term(tasks_[i].uncached_bits(), grid_.r(kr)) + term(tasks_[i].instructions, grid_.f(kf));
  }

  /// Smallest kf with g(i, kr, kf) <= T, or steps + 1 if none.
  int min_cloud_steps(std::size_t i, int kr, double T) const {
    if (g(i, kr, grid_.steps) > T) return grid_.steps + 1;
    int lo = -1, hi = grid_.steps;  // g(hi) <= T
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (g(i, kr, mid) <= T) hi = mid; else lo = mid;
    }
    return hi;
  }

  /// Fills need_[i][b] = min cloud steps for users i.. under radio budget b.
  bool feasible(double T) {
    const std::size_t n = tasks_.size();
    const int S = grid_.steps;
    const int none = S + 1;
    need_.assign((n + 1) * width_, 0);
    kf_.assign(n * width_, none);
    for (std::size_t i = 0; i < n; ++i) {
      for (int kr = 0; kr <= S; ++kr) kf_[i * width_ + static_cast<std::size_t>(kr)] = min_cloud_steps(i, kr, T);
    }
    for (std::size_t i = n; i-- > 0;) {
      for (int b = 0; b <= S; ++b) {
        int best = none;
        for (int kr = 0; kr <= b; ++kr) {
          const int kf = kf_[i * width_ + static_cast<std::size_t>(kr)];
          const int rest = need(i + 1, b - kr);
          if (kf > S || rest > S) continue;
          best = std::min(best, std::min(kf + rest, none));
        }
        need_[i * width_ + static_cast<std::size_t>(b)] = best;
      }
    }
    return need(0, S) <= S;
  }

  /// Lexicographically smallest point meeting the target of the last
  /// successful feasible() call.
  std::vector<std::pair<int, int>> reconstruct() const {
    const std::size_t n = tasks_.size();
    const int S = grid_.steps;
    std::vector<std::pair<int, int>> out(n);
    int br = S, bf = S;
    for (std::size_t i = 0; i < n; ++i) {
      for (int kr = 0; kr <= br; ++kr) {
        const int kf = kf_[i * width_ + static_cast<std::size_t>(kr)];
        if (kf > bf) continue;
        const int rest = need(i + 1, br - kr);
        if (rest <= bf - kf) {
          out[i] = {kr, kf};
          br -= kr;
          bf -= kf;
          break;
        }
      }
    }
    return out;
  }

 private:
  int need(std::size_t i, int b) const { return need_[i * width_ + static_cast<std::size_t>(b)]; }

  std::span<const offload::ComputeTask> tasks_;
  Grid grid_;
  std::size_t width_;
  std::vector<int> need_;
  std::vector<int> kf_;
};

// ---- continuous heuristic --------------------------------------------------

struct Aggregates {
  double radio_demand = 0.0;  // sum B_i
  double cloud_demand = 0.0;  // sum F_i
  double coupling = 0.0;      // sum sqrt(B_i F_i)
};

Aggregates aggregate(std::span<const offload::ComputeTask> tasks) {
  Aggregates a;
  for (const auto& t : tasks) {
    a.radio_demand += t.uncached_bits();
    a.cloud_demand += t.instructions;
    a.coupling += std::sqrt(t.uncached_bits() * t.instructions);
  }
  return a;
}

/// Interval of s = sqrt(lambda) for which target T fits both capacities.
/// Empty (lo > hi) when infeasible.
std::pair<double, double> price_interval(const Aggregates& a, const Capacity& cap, double T) {
  const double radio_slack = cap.radio_total * T - a.radio_demand;
  const double cloud_slack = cap.cloud_total * T - a.cloud_demand;
  if (a.coupling == 0.0) {
    if (radio_slack >= 0.0 && cloud_slack >= 0.0) return {1.0, 1.0};
    return {1.0, 0.0};
  }
  if (radio_slack <= 0.0 || cloud_slack <= 0.0) return {1.0, 0.0};
  return {a.coupling / cloud_slack, radio_slack / a.coupling};
}

AllocationPlan min_max_heuristic(std::span<const offload::ComputeTask> tasks, const Capacity& cap) {
  const Aggregates a = aggregate(tasks);
  const double lower = std::max(term(a.radio_demand, cap.radio_total),
                                term(a.cloud_demand, cap.cloud_total));
  // Serving all radio demand first and then all cloud demand always fits
  // (Cauchy-Schwarz: Q^2 <= sum B * sum F).
  double hi = term(a.radio_demand, cap.radio_total) + term(a.cloud_demand, cap.cloud_total);
  double lo = lower;
  auto feasible = [&](double T) {
    auto [s_lo, s_hi] = price_interval(a, cap, T);
    return s_lo <= s_hi;
  };
  if (feasible(lo)) hi = lo;
  for (int it = 0; it < 2000 && hi > lo; ++it) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    (feasible(mid) ? hi : lo) = mid;
  }

  const double T = hi;
  std::vector<double> r(tasks.size(), 0.0), f(tasks.size(), 0.0);
  if (T > 0.0) {
    auto [s_lo, s_hi] = price_interval(a, cap, T);
    const double s = a.coupling == 0.0 ? 1.0 : std::sqrt(s_lo * s_hi);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const double B = tasks[i].uncached_bits();
      const double F = tasks[i].instructions;
      if (B > 0.0 && F > 0.0) {
        const double sb = std::sqrt(B), sf = std::sqrt(F);
        r[i] = sb * (sb + s * sf) / T;
        f[i] = sf * (sb / s + sf) / T;
      } else if (B > 0.0) {
        r[i] = B / T;
      } else if (F > 0.0) {
        f[i] = F / T;
      }
    }
  }
  fit_to_capacity(r, cap.radio_total);
  fit_to_capacity(f, cap.cloud_total);

  AllocationPlan plan;
  plan.objective = Objective::MinMaxTime;
  for (std::size_t i = 0; i < tasks.size(); ++i) plan.users.push_back({{}, r[i], f[i]});
  return plan;
}

AllocationPlan min_sum_heuristic(std::span<const offload::ComputeTask> tasks, const Capacity& cap) {
  std::vector<double> r, f;
  for (const auto& t : tasks) {
    r.push_back(std::sqrt(t.uncached_bits()));
    f.push_back(std::sqrt(t.instructions));
  }
  fit_to_capacity(r, cap.radio_total);
  fit_to_capacity(f, cap.cloud_total);
  AllocationPlan plan;
  plan.objective = Objective::MinSumTime;
  for (std::size_t i = 0; i < tasks.size(); ++i) plan.users.push_back({{}, r[i], f[i]});
  return plan;
}

}  // namespace

std::string_view objective_name(Objective o) noexcept {
  return o == Objective::MinSumTime ? "min_sum_time" : "min_max_time";
}

Objective parse_objective(std::string_view name) {
  if (name == "min_sum_time" || name == "MinSumTime") return Objective::MinSumTime;
  if (name == "min_max_time" || name == "MinMaxTime") return Objective::MinMaxTime;
  throw ConfigurationError("unknown objective '" + std::string(name) +
                           "' (expected min_sum_time or min_max_time)");
}

void Capacity::validate() const {
  if (!std::isfinite(radio_total) || radio_total <= 0.0) {
    throw ConfigurationError("radio_total must be finite and > 0");
  }
  if (!std::isfinite(cloud_total) || cloud_total <= 0.0) {
    throw ConfigurationError("cloud_total must be finite and > 0");
  }
}

double user_time(const offload::ComputeTask& task, double rate, double cpu) {
  return term(task.uncached_bits(), rate) + term(task.instructions, cpu);
}

double evaluate(std::span<const offload::ComputeTask> tasks,
                std::span<const UserAllocation> allocation, Objective objective) {
  if (tasks.size() != allocation.size()) {
    throw ConfigurationError("plan and task list differ in length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const double t = user_time(tasks[i], allocation[i].rate, allocation[i].cpu);
    acc = objective == Objective::MinSumTime ? acc + t : std::max(acc, t);
  }
  return acc;
}

bool is_feasible(std::span<const offload::ComputeTask> tasks, const AllocationPlan& plan,
                 const Capacity& cap) {
  if (tasks.size() != plan.users.size()) return false;
  double r = 0.0, f = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& u = plan.users[i];
    if (!(u.rate >= 0.0) || !(u.cpu >= 0.0)) return false;
    if (tasks[i].uncached_bits() > 0.0 && !(u.rate > 0.0)) return false;
    if (tasks[i].instructions > 0.0 && !(u.cpu > 0.0)) return false;
    r += u.rate;
    f += u.cpu;
  }
  return r <= cap.radio_total && f <= cap.cloud_total;
}

AllocationPlan allocate_bruteforce(std::span<const offload::ComputeTask> tasks, const Capacity& cap,
                                   Objective objective, int grid_steps) {
  check_tasks(tasks);
  if (tasks.size() > kOracleMaxUsers) {
    throw TooLargeForOracle("grid oracle handles at most 4 users, got " +
                            std::to_string(tasks.size()));
  }
  if (grid_steps < 2) throw ConfigurationError("grid_steps must be >= 2");
  check_capacity(cap);
  const Grid grid{grid_steps, cap.radio_total, cap.cloud_total};

  AllocationPlan plan;
  plan.objective = objective;
  plan.users.resize(tasks.size());

  if (objective == Objective::MinSumTime) {
    std::vector<double> b, F;
    for (const auto& t : tasks) {
      b.push_back(t.uncached_bits());
      F.push_back(t.instructions);
    }
    const auto kr = grid_min_sum(b, grid_steps, [&](int k) { return grid.r(k); });
    const auto kf = grid_min_sum(F, grid_steps, [&](int k) { return grid.f(k); });
    if (kr.empty() || kf.empty()) throw Infeasible("no grid point serves every user");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      plan.users[i].rate = grid.r(kr[i]);
      plan.users[i].cpu = grid.f(kf[i]);
    }
  } else {
    MinMaxGrid search(tasks, grid);
    double hi = std::numeric_limits<double>::max();
    if (!search.feasible(hi)) throw Infeasible("no grid point serves every user");
    // Start from the equal split when it is finite.
    {
      const int share = grid_steps / static_cast<int>(tasks.size());
      double eq = 0.0;
      for (std::size_t i = 0; i < tasks.size(); ++i) eq = std::max(eq, search.g(i, share, share));
      if (std::isfinite(eq)) hi = eq;
    }
    double lo = 0.0;
    if (search.feasible(lo)) {
      hi = lo;
    } else {
      for (;;) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        (search.feasible(mid) ? hi : lo) = mid;
      }
    }
    search.feasible(hi);
    const auto point = search.reconstruct();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      plan.users[i].rate = grid.r(point[i].first);
      plan.users[i].cpu = grid.f(point[i].second);
    }
  }
  // k * R / steps summed over a full budget can round past R.
  std::vector<double> r, f;
  for (const auto& u : plan.users) {
    r.push_back(u.rate);
    f.push_back(u.cpu);
  }
  trim_to_capacity(r, cap.radio_total);
  trim_to_capacity(f, cap.cloud_total);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    plan.users[i].rate = r[i];
    plan.users[i].cpu = f[i];
  }
  plan.objective_value = evaluate(tasks, plan.users, objective);
  return plan;
}

AllocationPlan allocate_heuristic(std::span<const offload::ComputeTask> tasks, const Capacity& cap,
                                  Objective objective) {
  check_tasks(tasks);
  check_capacity(cap);
  const Aggregates a = aggregate(tasks);
  if (a.radio_demand > 0.0 && cap.radio_total == 0.0) {
    throw Infeasible("users need radio capacity but radio_total is 0");
  }
  if (a.cloud_demand > 0.0 && cap.cloud_total == 0.0) {
    throw Infeasible("users need cloud capacity but cloud_total is 0");
  }
  AllocationPlan plan = objective == Objective::MinSumTime ? min_sum_heuristic(tasks, cap)
                                                           : min_max_heuristic(tasks, cap);
  plan.objective_value = evaluate(tasks, plan.users, objective);
  return plan;
}

}  // namespace aqua::controller
