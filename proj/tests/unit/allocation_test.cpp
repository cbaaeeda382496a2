#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "aqua/controller/allocation.hpp"
#include "aqua/errors.hpp"

namespace {

using namespace aqua::controller;
using aqua::offload::ComputeTask;

constexpr Objective kBoth[] = {Objective::MinSumTime, Objective::MinMaxTime};

double sum_rate(const AllocationPlan& p) {
  double s = 0.0;
  for (const auto& u : p.users) s += u.rate;
  return s;
}
double sum_cpu(const AllocationPlan& p) {
  double s = 0.0;
  for (const auto& u : p.users) s += u.cpu;
  return s;
}

/// Closed-form optimum of the continuous min-max problem.
double min_max_closed_form(const std::vector<ComputeTask>& tasks, const Capacity& cap) {
  double B = 0, F = 0, Q = 0;
  for (const auto& t : tasks) {
    B += t.uncached_bits();
    F += t.instructions;
    Q += std::sqrt(t.uncached_bits() * t.instructions);
  }
  const double R = cap.radio_total, C = cap.cloud_total;
  const double a = R * F + C * B;
  const double d = R * F - C * B;
  return (a + std::sqrt(d * d + 4.0 * R * C * Q * Q)) / (2.0 * R * C);
}

std::vector<ComputeTask> random_tasks(std::mt19937_64& gen, std::size_t n, bool allow_zero) {
  std::uniform_real_distribution<double> u(1e5, 1e7), coin(0.0, 1.0);
  std::vector<ComputeTask> out;
  for (std::size_t i = 0; i < n; ++i) {
    double D = u(gen), F = u(gen) * 100.0;
    if (allow_zero && coin(gen) < 0.15) D = 0.0;
    else if (allow_zero && coin(gen) < 0.15) F = 0.0;
    out.push_back({D, 0.0, F});
  }
  return out;
}

/// Literal enumeration of every grid point, lexicographic tie-break.
AllocationPlan enumerate_grid(const std::vector<ComputeTask>& tasks, const Capacity& cap,
                              Objective obj, int steps) {
  const std::size_t n = tasks.size();
  std::vector<int> k(2 * n, 0);
  std::vector<int> best_k;
  double best = INFINITY;
  std::function<void(std::size_t, int, int)> rec = [&](std::size_t pos, int left_r, int left_f) {
    if (pos == 2 * n) {
      std::vector<UserAllocation> alloc(n);
      for (std::size_t i = 0; i < n; ++i) {
        alloc[i].rate = k[2 * i] * cap.radio_total / steps;
        alloc[i].cpu = k[2 * i + 1] * cap.cloud_total / steps;
      }
      const double v = evaluate(tasks, alloc, obj);
      if (v < best) {  // enumeration is lexicographic, so first minimum wins
        best = v;
        best_k = k;
      }
      return;
    }
    const bool radio = pos % 2 == 0;
    const int left = radio ? left_r : left_f;
    for (int x = 0; x <= left; ++x) {
      k[pos] = x;
      rec(pos + 1, radio ? left_r - x : left_r, radio ? left_f : left_f - x);
    }
  };
  rec(0, steps, steps);
  AllocationPlan p;
  p.objective = obj;
  p.objective_value = best;
  if (best_k.empty() || !std::isfinite(best)) return p;
  for (std::size_t i = 0; i < n; ++i) {
    p.users.push_back({{}, best_k[2 * i] * cap.radio_total / steps,
                       best_k[2 * i + 1] * cap.cloud_total / steps});
  }
  return p;
}

TEST(Objective, ParseAndName) {
  EXPECT_EQ(parse_objective("min_sum_time"), Objective::MinSumTime);
  EXPECT_EQ(parse_objective("MinMaxTime"), Objective::MinMaxTime);
  EXPECT_EQ(objective_name(Objective::MinMaxTime), "min_max_time");
  EXPECT_THROW(parse_objective("fastest"), aqua::ConfigurationError);
}

TEST(Capacity, RejectsNonPositive) {
  EXPECT_THROW((Capacity{0.0, 1.0}.validate()), aqua::ConfigurationError);
  EXPECT_THROW((Capacity{1.0, INFINITY}.validate()), aqua::ConfigurationError);
  EXPECT_NO_THROW((Capacity{1.0, 1.0}.validate()));
}

TEST(UserTime, ZeroDemandAndZeroResource) {
  EXPECT_EQ(user_time({0, 0, 0}, 0.0, 0.0), 0.0);
  EXPECT_TRUE(std::isinf(user_time({8, 0, 0}, 0.0, 1.0)));
  EXPECT_DOUBLE_EQ(user_time({8e6, 0, 4e9}, 1e6, 2e9), 10.0);
}

TEST(BruteForce, IdenticalTasksMinMaxSplitEvenly) {
  const std::vector<ComputeTask> t(2, ComputeTask{8e6, 0, 4e9});
  const Capacity cap{2e6, 4e9};
  const auto p = allocate_bruteforce(t, cap, Objective::MinMaxTime, 200);
  for (const auto& u : p.users) {
    EXPECT_DOUBLE_EQ(u.rate, 1e6);
    EXPECT_DOUBLE_EQ(u.cpu, 2e9);
  }
  EXPECT_DOUBLE_EQ(p.objective_value, 10.0);
}

TEST(BruteForce, SingleUserTakesEverything) {
  const std::vector<ComputeTask> t{{8e6, 1e6, 3e9}};
  const Capacity cap{7e6, 3e9};
  for (auto obj : kBoth) {
    const auto b = allocate_bruteforce(t, cap, obj, 200);
    EXPECT_EQ(b.users[0].rate, cap.radio_total);
    EXPECT_EQ(b.users[0].cpu, cap.cloud_total);
    const auto h = allocate_heuristic(t, cap, obj);
    EXPECT_EQ(h.users[0].rate, cap.radio_total);
    EXPECT_EQ(h.users[0].cpu, cap.cloud_total);
    EXPECT_EQ(h.objective_value, b.objective_value);
  }
}

TEST(BruteForce, SeparatedDemandsGetWholeResources) {
  const std::vector<ComputeTask> t{{8e6, 0, 0}, {0, 0, 1e9}};
  const auto p = allocate_bruteforce(t, {1e7, 1e10}, Objective::MinSumTime, 200);
  EXPECT_EQ(p.users[0].rate, 1e7);
  EXPECT_EQ(p.users[0].cpu, 0.0);
  EXPECT_EQ(p.users[1].rate, 0.0);
  EXPECT_EQ(p.users[1].cpu, 1e10);
  EXPECT_DOUBLE_EQ(p.objective_value, 0.8 + 0.1);
}

TEST(BruteForce, AgreesWithLiteralEnumeration) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const int steps = 4 + trial % 5;
    auto tasks = random_tasks(gen, n, true);
    const Capacity cap{1e7, 1e9};
    for (auto obj : kBoth) {
      const auto ref = enumerate_grid(tasks, cap, obj, steps);
      const auto got = allocate_bruteforce(tasks, cap, obj, steps);
      ASSERT_EQ(got.users.size(), ref.users.size());
      EXPECT_NEAR(got.objective_value, ref.objective_value, 1e-12 * ref.objective_value)
          << "trial " << trial << " " << objective_name(obj);
      if (obj == Objective::MinMaxTime) {
        // Max is exact arithmetic on each term, so ties resolve identically.
        for (std::size_t i = 0; i < n; ++i) {
          EXPECT_EQ(got.users[i].rate, ref.users[i].rate) << "trial " << trial;
          EXPECT_EQ(got.users[i].cpu, ref.users[i].cpu) << "trial " << trial;
        }
      }
    }
  }
}

TEST(BruteForce, LexicographicTieBreak) {
  // Two radio-only users on a three-step grid: (1, 1), (1, 2) and (2, 1) all
  // reach the optimal max of 1 s; (1, 1) is lexicographically smallest.
  const std::vector<ComputeTask> t(2, ComputeTask{1e6, 0, 0});
  const auto p = allocate_bruteforce(t, {3e6, 1e9}, Objective::MinMaxTime, 3);
  EXPECT_DOUBLE_EQ(p.objective_value, 1.0);
  EXPECT_DOUBLE_EQ(p.users[0].rate, 1e6);
  EXPECT_DOUBLE_EQ(p.users[1].rate, 1e6);
  EXPECT_EQ(p.users[0].cpu, 0.0);
}

TEST(BruteForce, Errors) {
  const std::vector<ComputeTask> five(5, ComputeTask{1, 0, 1});
  EXPECT_THROW(allocate_bruteforce(five, {1, 1}, Objective::MinSumTime, 10),
               aqua::TooLargeForOracle);
  const std::vector<ComputeTask> three(3, ComputeTask{1, 0, 0});
  EXPECT_THROW(allocate_bruteforce(three, {1, 1}, Objective::MinSumTime, 2), aqua::Infeasible);
  EXPECT_THROW(allocate_bruteforce(three, {1, 1}, Objective::MinMaxTime, 2), aqua::Infeasible);
  EXPECT_THROW(allocate_bruteforce(three, {1, 1}, Objective::MinSumTime, 1),
               aqua::ConfigurationError);
}

TEST(Heuristic, SquareRootSplit) {
  const std::vector<ComputeTask> t{{1e6, 0, 0}, {4e6, 0, 0}};
  const Capacity cap{3e6, 1e9};
  const auto h = allocate_heuristic(t, cap, Objective::MinSumTime);
  EXPECT_NEAR(h.users[1].rate / h.users[0].rate, 2.0, 1e-12);
  const auto b = allocate_bruteforce(t, cap, Objective::MinSumTime, 200);
  const double cell = cap.radio_total / 200;
  EXPECT_LE(std::abs(b.users[0].rate - h.users[0].rate), cell);
  EXPECT_LE(std::abs(b.users[1].rate - h.users[1].rate), cell);
}

TEST(Heuristic, IdenticalUsersFinishTogether) {
  const std::vector<ComputeTask> t(2, ComputeTask{5e6, 1e6, 7e9});
  const auto h = allocate_heuristic(t, {3e6, 5e9}, Objective::MinMaxTime);
  EXPECT_NEAR(user_time(t[0], h.users[0].rate, h.users[0].cpu),
              user_time(t[1], h.users[1].rate, h.users[1].cpu), 1e-9);
}

TEST(Heuristic, MinMaxMatchesClosedForm) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> cap_d(1e6, 1e8);
  for (int trial = 0; trial < 500; ++trial) {
    const auto tasks = random_tasks(gen, 1 + trial % 8, false);
    const Capacity cap{cap_d(gen), cap_d(gen) * 100.0};
    const auto h = allocate_heuristic(tasks, cap, Objective::MinMaxTime);
    const double ref = min_max_closed_form(tasks, cap);
    EXPECT_NEAR(h.objective_value, ref, 1e-9 * ref) << "trial " << trial;
    ASSERT_TRUE(is_feasible(tasks, h, cap));
  }
}

TEST(Heuristic, WithinOnePercentOfGridOptimum) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 40; ++trial) {
    const auto tasks = random_tasks(gen, 2 + trial % 3, false);
    const Capacity cap{2e7, 5e9};
    for (auto obj : kBoth) {
      const auto h = allocate_heuristic(tasks, cap, obj);
      const auto b = allocate_bruteforce(tasks, cap, obj, 200);
      EXPECT_TRUE(is_feasible(tasks, h, cap));
      EXPECT_TRUE(is_feasible(tasks, b, cap));
      EXPECT_LE(h.objective_value, b.objective_value * (1 + 1e-12));
      EXPECT_LE(std::abs(h.objective_value - b.objective_value), 0.01 * b.objective_value);
    }
  }
}

TEST(Heuristic, AlwaysFeasibleIncludingZeroDemands) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> cap_d(1.0, 1e10);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto tasks = random_tasks(gen, 1 + trial % 12, true);
    const Capacity cap{cap_d(gen), cap_d(gen)};
    for (auto obj : kBoth) {
      const auto h = allocate_heuristic(tasks, cap, obj);
      ASSERT_TRUE(is_feasible(tasks, h, cap)) << "trial " << trial;
      ASSERT_LE(sum_rate(h), cap.radio_total);
      ASSERT_LE(sum_cpu(h), cap.cloud_total);
      ASSERT_TRUE(std::isfinite(h.objective_value));
    }
  }
}

TEST(Heuristic, AllZeroDemandCostsNothing) {
  const std::vector<ComputeTask> t(3, ComputeTask{0, 0, 0});
  for (auto obj : kBoth) EXPECT_EQ(allocate_heuristic(t, {1, 1}, obj).objective_value, 0.0);
}

TEST(Allocation, ScaleEquivariance) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tasks = random_tasks(gen, 2 + trial % 3, false);
    const Capacity cap{1e7, 1e9};
    const double c = scale(gen);
    std::vector<ComputeTask> scaled;
    for (const auto& t : tasks) scaled.push_back({t.data_total * c, 0.0, t.instructions * c});
    const Capacity cap_c{cap.radio_total * c, cap.cloud_total * c};
    for (auto obj : kBoth) {
      const auto a = allocate_heuristic(tasks, cap, obj);
      const auto b = allocate_heuristic(scaled, cap_c, obj);
      EXPECT_NEAR(b.objective_value, a.objective_value, 1e-9 * a.objective_value);
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        EXPECT_NEAR(b.users[i].rate, c * a.users[i].rate, 1e-9 * c * a.users[i].rate);
        EXPECT_NEAR(b.users[i].cpu, c * a.users[i].cpu, 1e-9 * c * a.users[i].cpu);
      }
    }
  }
}

TEST(Allocation, GridScaleEquivariance) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto tasks = random_tasks(gen, 2 + trial % 2, false);
    // Power-of-two scaling is exact in binary floating point.
    const double c = std::ldexp(1.0, trial % 7 - 3);
    std::vector<ComputeTask> scaled;
    for (const auto& t : tasks) scaled.push_back({t.data_total * c, 0.0, t.instructions * c});
    for (auto obj : kBoth) {
      const auto a = allocate_bruteforce(tasks, {1e7, 1e9}, obj, 50);
      const auto b = allocate_bruteforce(scaled, {1e7 * c, 1e9 * c}, obj, 50);
      EXPECT_EQ(a.objective_value, b.objective_value);
      for (std::size_t i = 0; i < tasks.size(); ++i) EXPECT_EQ(b.users[i].rate, c * a.users[i].rate);
    }
  }
}

TEST(Allocation, MoreRadioNeverHurts) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> grow(1.0, 4.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto tasks = random_tasks(gen, 1 + trial % 4, true);
    const Capacity cap{1e7, 1e9};
    const Capacity more{cap.radio_total * grow(gen), cap.cloud_total};
    for (auto obj : kBoth) {
      EXPECT_LE(allocate_heuristic(tasks, more, obj).objective_value,
                allocate_heuristic(tasks, cap, obj).objective_value * (1 + 1e-12));
    }
    if (trial % 10 == 0) {
      // On the grid, doubling R refines every rate point, so the optimum cannot rise.
      const Capacity dbl{2e7, 1e9};
      for (auto obj : kBoth) {
        EXPECT_LE(allocate_bruteforce(tasks, dbl, obj, 40).objective_value,
                  allocate_bruteforce(tasks, cap, obj, 40).objective_value);
      }
    }
  }
}

}  // namespace

namespace {

TEST(BruteForce, GridPlansNeverExceedCapacity) {
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<double> cap_d(1.0, 1e10);
  for (int trial = 0; trial < 300; ++trial) {
    const auto tasks = random_tasks(gen, 1 + trial % 4, false);
    const Capacity cap{cap_d(gen), cap_d(gen)};
    for (auto obj : kBoth) {
      const auto p = allocate_bruteforce(tasks, cap, obj, 7 + trial % 50);
      ASSERT_TRUE(is_feasible(tasks, p, cap)) << "trial " << trial;
    }
  }
}

}  // namespace
