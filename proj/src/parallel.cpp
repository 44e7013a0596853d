#include "gbt/parallel.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <queue>

namespace gbt {

Mode parse_mode(std::string_view name) {
  if (name == "seq" || name == "sequential") return Mode::sequential;
  if (name == "flat") return Mode::flat;
  if (name == "dyn" || name == "dynamic") return Mode::dynamic;
  throw InputError("unknown execution mode '" + std::string(name) + "' (seq|flat|dyn)");
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::sequential: return "seq";
    case Mode::flat: return "flat";
    case Mode::dynamic: return "dyn";
  }
  return "?";
}

void ExecPlan::validate() const {
  if (workers == 0) throw InputError("workers must be >= 1");
  if (split_threshold == 0) throw InputError("split_threshold must be >= 1");
  if (memory_budget != 0 && per_ray_bytes != 0 && memory_budget < per_ray_bytes) {
    throw InputError("memory budget " + std::to_string(memory_budget) +
                     " B cannot hold one ray of " + std::to_string(per_ray_bytes) + " B");
  }
}

std::size_t ChunkPlan::total() const {
  return std::accumulate(chunk_sizes.begin(), chunk_sizes.end(), std::size_t{0});
}

ChunkPlan plan_chunks(std::size_t total_rays, std::size_t memory_budget,
                      std::size_t per_ray_bytes) {
  if (per_ray_bytes == 0) throw InputError("per-ray size must be positive");
  const std::size_t cap = memory_budget / per_ray_bytes;
  if (cap == 0) {
    throw InputError("memory budget " + std::to_string(memory_budget) +
                     " B is too small for one ray of " + std::to_string(per_ray_bytes) + " B");
  }
  ChunkPlan plan;
  for (std::size_t left = total_rays; left > 0;) {
    const std::size_t n = std::min(cap, left);
    plan.chunk_sizes.push_back(n);
    left -= n;
  }
  return plan;
}

ChunkPlan single_chunk(std::size_t total_rays) {
  ChunkPlan plan;
  if (total_rays > 0) plan.chunk_sizes.push_back(total_rays);
  return plan;
}

ChunkPlan explicit_chunks(std::vector<std::size_t> sizes, std::size_t total_rays) {
  ChunkPlan plan{std::move(sizes)};
  if (plan.total() != total_rays ||
      std::find(plan.chunk_sizes.begin(), plan.chunk_sizes.end(), 0) != plan.chunk_sizes.end()) {
    throw InputError("chunk sizes must be positive and sum to " + std::to_string(total_rays));
  }
  return plan;
}

PhaseTimings measure(double rt_seconds, double gbs_seconds, double total_seconds,
                     std::optional<double> baseline_total) {
  PhaseTimings t;
  t.rt_seconds = rt_seconds;
  t.gbs_seconds = gbs_seconds;
  t.total_seconds = std::max(total_seconds, rt_seconds + gbs_seconds);
  if (t.total_seconds > 0.0) {
    t.rt_share = rt_seconds / t.total_seconds;
    t.gbs_share = gbs_seconds / t.total_seconds;
  }
  if (baseline_total && t.total_seconds > 0.0) t.speedup_vs_baseline = *baseline_total / t.total_seconds;
  return t;
}

std::vector<Range> block_partition(std::size_t n, std::size_t parts) {
  if (parts == 0) parts = 1;
  std::vector<Range> blocks(parts);
  const std::size_t base = n / parts;
  const std::size_t extra = n % parts;
  std::size_t at = 0;
  for (std::size_t i = 0; i < parts; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    blocks[i] = {at, at + len};
    at += len;
  }
  return blocks;
}

double list_schedule_makespan(std::span<const double> piece_costs, std::size_t workers) {
  std::priority_queue<double, std::vector<double>, std::greater<>> free_at;
  for (std::size_t w = 0; w < std::max<std::size_t>(workers, 1); ++w) free_at.push(0.0);
  double makespan = 0.0;
  for (double c : piece_costs) {
    const double start = free_at.top();
    free_at.pop();
    free_at.push(start + c);
    makespan = std::max(makespan, start + c);
  }
  return makespan;
}

double block_makespan(std::span<const double> task_costs, std::size_t workers) {
  double makespan = 0.0;
  for (const Range& r : block_partition(task_costs.size(), workers)) {
    double sum = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) sum += task_costs[i];
    makespan = std::max(makespan, sum);
  }
  return makespan;
}

SkewedWorkload::SkewedWorkload(std::vector<std::size_t> items_per_task, std::size_t spin)
    : items_(std::move(items_per_task)), spin_(spin), results_(items_.size(), 0.0) {}

std::vector<std::size_t> SkewedWorkload::skewed_counts(std::size_t n_tasks, std::size_t base,
                                                       std::size_t heavy_factor,
                                                       std::size_t heavy_every,
                                                       std::size_t heavy_offset) {
  std::vector<std::size_t> counts(n_tasks, base);
  for (std::size_t t = 0; t < n_tasks; ++t) {
    if (heavy_every > 0 && t % heavy_every == heavy_offset) counts[t] = base * heavy_factor;
  }
  return counts;
}

double SkewedWorkload::term(std::size_t t, std::size_t item) const {
  double x = 1.0 + 1e-3 * static_cast<double>(t % 97) + 1e-6 * static_cast<double>(item % 1013);
  for (std::size_t k = 0; k < spin_; ++k) x = std::sqrt(x + 0.5) * 0.75 + 0.25;
  return x;
}

std::size_t SkewedWorkload::accumulate(std::size_t t, std::size_t b, std::size_t e) {
  double acc = results_[t];
  for (std::size_t i = b; i < e; ++i) acc += term(t, i);
  results_[t] = acc;
  return e - b;
}

std::size_t SkewedWorkload::evaluate(std::size_t t, std::size_t b, std::size_t e,
                                     std::span<double> out) const {
  for (std::size_t i = b; i < e; ++i) out[i - b] = term(t, i);
  return e - b;
}

void SkewedWorkload::fold(std::size_t t, std::span<const double> terms) {
  double acc = results_[t];
  for (double x : terms) acc += x;
  results_[t] = acc;
}

void SkewedWorkload::reset() { std::fill(results_.begin(), results_.end(), 0.0); }

}  // namespace gbt
