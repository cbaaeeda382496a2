#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aqua/offload/offload.hpp"

namespace aqua::controller {

enum class Objective { MinSumTime, MinMaxTime };

std::string_view objective_name(Objective o) noexcept;
Objective parse_objective(std::string_view name);

/// Aggregate radio (bits/s) and cloud (instructions/s) capacity to share.
struct Capacity {
  double radio_total = 0.0;
  double cloud_total = 0.0;

  /// Throws ConfigurationError unless both are finite and > 0.
  void validate() const;
};

struct UserAllocation {
  std::string user;
  double rate = 0.0;  // r_i, bits/s
  double cpu = 0.0;   // f_i, instructions/s
};

struct AllocationPlan {
  std::vector<UserAllocation> users;
  Objective objective = Objective::MinSumTime;
  double objective_value = 0.0;  // seconds
};

/// Per-user completion time (D - S)/r + F/f. A term with zero demand is 0
/// whatever its resource; a term with demand and no resource is +inf.
double user_time(const offload::ComputeTask& task, double rate, double cpu);

/// Sum or max of user_time over the plan.
double evaluate(std::span<const offload::ComputeTask> tasks,
                std::span<const UserAllocation> allocation, Objective objective);

/// Capacity sums within bounds and demand-carrying users hold a positive share.
bool is_feasible(std::span<const offload::ComputeTask> tasks, const AllocationPlan& plan,
                 const Capacity& cap);

inline constexpr std::size_t kOracleMaxUsers = 4;

/// Exact optimum over the grid r_i = k * R / steps, f_i = m * F_cap / steps
/// with sum k <= steps and sum m <= steps.
///
/// The search is exhaustive in effect but not in enumeration order: MinSum
/// separates per resource and is solved by a dynamic program over users and
/// budget; MinMax bisects the target time over doubles and checks each
/// target with a knapsack-style DP (min cloud steps for a given radio budget).
/// Returned values are lowered by a few ulps where the grid sums round past
/// a capacity. Ties are broken towards the lexicographically smallest
/// (r_1, f_1, r_2, f_2, ...). Throws TooLargeForOracle above four users and
/// Infeasible when no grid point serves every demand.
AllocationPlan allocate_bruteforce(std::span<const offload::ComputeTask> tasks, const Capacity& cap,
                                   Objective objective, int grid_steps);

/// Continuous allocation.
///
/// MinSum: r_i proportional to sqrt(D_i - S_i) and f_i to sqrt(F_i), the
/// minimiser of sum B_i / r_i under sum r_i = R, per resource.
/// MinMax: bisection on the common completion time T. For a fixed T, a user
/// splitting T into transfer time t and compute time T - t traces a convex
/// (radio, cloud) frontier; pricing cloud at lambda relative to radio gives
/// t_i = T sqrt(B_i) / (sqrt(B_i) + sqrt(lambda F_i)), so total usage is
///   radio = (sum B + s Q) / T,   cloud = (sum F + Q / s) / T,
/// with s = sqrt(lambda) and Q = sum sqrt(B_i F_i). T is feasible iff some
/// s > 0 satisfies both capacity bounds.
///
/// Leftover capacity is spread proportionally so the plan uses all of R and
/// F_cap where any user has demand. Throws Infeasible if a resource with
/// demand has zero capacity.
AllocationPlan allocate_heuristic(std::span<const offload::ComputeTask> tasks, const Capacity& cap,
                                  Objective objective);

}  // namespace aqua::controller
