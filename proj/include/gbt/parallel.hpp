#pragma once

// Execution plans: sequential reference, flat static partition and dynamic
// task splitting, plus the chunk planner that bounds per-batch memory.

#include "gbt/error.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gbt {

enum class Mode { sequential, flat, dynamic };

// Accepts seq|sequential|flat|dyn|dynamic. Throws InputError otherwise.
Mode parse_mode(std::string_view name);
std::string_view mode_name(Mode mode);

inline constexpr std::size_t kDefaultSplitThreshold = 4096;

struct ExecPlan {
  Mode mode = Mode::sequential;
  std::size_t workers = 1;
  std::size_t split_threshold = kDefaultSplitThreshold;
  std::size_t memory_budget = 0;  // bytes; 0 = unbounded (one chunk)
  std::size_t per_ray_bytes = 0;  // 0 = measure from one traced ray

  // Throws InputError when workers or split_threshold is zero, or when a
  // budget is given that cannot hold a single ray.
  void validate() const;
};

struct ChunkPlan {
  std::vector<std::size_t> chunk_sizes;

  std::size_t n_chunks() const { return chunk_sizes.size(); }
  std::size_t total() const;
};

// Greedy chunks of cap = floor(budget / per_ray_bytes); the last takes the
// remainder. Throws InputError if per_ray_bytes is 0 or the cap is 0.
ChunkPlan plan_chunks(std::size_t total_rays, std::size_t memory_budget,
                      std::size_t per_ray_bytes);

// A single chunk holding every ray.
ChunkPlan single_chunk(std::size_t total_rays);

// Chunks of the given sizes, checked to cover total_rays exactly.
ChunkPlan explicit_chunks(std::vector<std::size_t> sizes, std::size_t total_rays);

struct PhaseTimings {
  double rt_seconds = 0.0;
  double gbs_seconds = 0.0;
  double total_seconds = 0.0;
  double rt_share = 0.0;
  double gbs_share = 0.0;
  double speedup_vs_baseline = 1.0;
};

// Shares from the phase times; speedup = baseline_total / total when given.
PhaseTimings measure(double rt_seconds, double gbs_seconds, double total_seconds,
                     std::optional<double> baseline_total = std::nullopt);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const Range&) const = default;
};

// Contiguous blocks, the first n % parts one element longer.
std::vector<Range> block_partition(std::size_t n, std::size_t parts);

// Collects the first exception thrown inside a parallel region so it can be
// rethrown on the calling thread.
class ErrorSlot {
 public:
  template <typename F>
  void guard(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

// Static block partition of [0, n) over the team; body(begin, end) runs once
// per thread on its own block.
template <typename Body>
void run_flat(std::size_t n, std::size_t workers, Body&& body) {
  ErrorSlot errors;
#pragma omp parallel num_threads(static_cast<int>(workers))
  {
    const auto blocks = block_partition(n, static_cast<std::size_t>(omp_get_num_threads()));
    const Range r = blocks[static_cast<std::size_t>(omp_get_thread_num())];
    if (r.size() > 0) errors.guard([&] { body(r.begin, r.end); });
  }
  errors.rethrow();
}

// One schedulable unit of dynamic work. A batch covers whole tasks
// [task_begin, task_end); a split piece covers items [item_begin, item_end)
// of the single task task_begin.
struct Piece {
  std::size_t task_begin = 0;
  std::size_t task_end = 0;
  std::size_t item_begin = 0;
  std::size_t item_end = 0;
  std::size_t cost = 0;
  bool split = false;
};

// Decomposition used by run_dynamic. Light tasks are batched in index order
// until a batch reaches the threshold; a task costing more than the
// threshold is halved recursively over its items until every piece is at or
// below it. cost(t) and items(t) describe task t.
template <typename CostFn, typename ItemsFn>
std::vector<Piece> decompose(std::size_t n_tasks, std::size_t threshold, CostFn&& cost,
                             ItemsFn&& items) {
  std::vector<Piece> pieces;
  Piece batch;
  bool open = false;
  const auto close_batch = [&] {
    if (open) pieces.push_back(batch);
    open = false;
  };
  for (std::size_t t = 0; t < n_tasks; ++t) {
    const std::size_t c = cost(t);
    const std::size_t n = items(t);
    if (c > threshold && n > 1) {
      close_batch();
      // Halve [0, n) until each piece's share of the cost fits.
      std::vector<Range> stack{{0, n}};
      std::vector<Piece> split;
      while (!stack.empty()) {
        const Range r = stack.back();
        stack.pop_back();
        const std::size_t rc = (c * r.size() + n - 1) / n;
        if (rc > threshold && r.size() > 1) {
          const std::size_t mid = r.begin + r.size() / 2;
          stack.push_back({mid, r.end});
          stack.push_back({r.begin, mid});
        } else {
          split.push_back({t, t + 1, r.begin, r.end, rc, true});
        }
      }
      pieces.insert(pieces.end(), split.begin(), split.end());
      continue;
    }
    if (!open) {
      batch = {t, t, 0, 0, 0, false};
      open = true;
    }
    batch.task_end = t + 1;
    batch.cost += c;
    if (batch.cost >= threshold) close_batch();
  }
  close_batch();
  return pieces;
}

// Makespan of greedy list scheduling: pieces in order, each to the worker
// that frees up first. Models how an idle worker takes the next pending task.
double list_schedule_makespan(std::span<const double> piece_costs, std::size_t workers);

// Makespan of the flat block partition for per-task costs.
double block_makespan(std::span<const double> task_costs, std::size_t workers);

// Ordered-reduction work for run_dynamic:
//   std::size_t tasks() const
//   std::size_t items(std::size_t task) const
//   std::size_t cost(std::size_t task) const
//   std::size_t stride() const                        terms per item
//   std::size_t accumulate(task, item_begin, item_end)  fold items directly
//   std::size_t evaluate(task, item_begin, item_end, std::span<Term> out)
//   void fold(task, std::span<const Term> terms)     terms in item order
// Folding evaluated terms in item order must give the same bits as
// accumulate over the same items. accumulate/evaluate return work counts.
template <typename W>
concept OrderedWork = requires(W w, const W cw, std::size_t i, std::span<typename W::Term> out,
                               std::span<const typename W::Term> in) {
  { cw.tasks() } -> std::convertible_to<std::size_t>;
  { cw.items(i) } -> std::convertible_to<std::size_t>;
  { cw.cost(i) } -> std::convertible_to<std::size_t>;
  { cw.stride() } -> std::convertible_to<std::size_t>;
  { w.accumulate(i, i, i) } -> std::convertible_to<std::size_t>;
  { w.evaluate(i, i, i, out) } -> std::convertible_to<std::size_t>;
  w.fold(i, in);
};

struct DynamicStats {
  std::size_t pieces = 0;
  std::size_t split_tasks = 0;
  std::size_t work = 0;  // sum of accumulate/evaluate return values
};

// Runs every task to completion over a worker team. Light tasks run in
// batches; each heavy task spawns one child task per split piece, each
// writing its terms into a slice of a task-local buffer, and the parent folds
// the buffer in item order once all children finish. Idle workers pick up
// pending pieces from the runtime's task pool.
template <OrderedWork W>
DynamicStats run_dynamic(W& work, std::size_t workers, std::size_t split_threshold) {
  using Term = typename W::Term;
  const std::size_t n_tasks = work.tasks();
  const std::vector<Piece> pieces = decompose(
      n_tasks, split_threshold, [&](std::size_t t) { return work.cost(t); },
      [&](std::size_t t) { return work.items(t); });

  DynamicStats stats;
  stats.pieces = pieces.size();
  std::atomic<std::size_t> total_work{0};
  ErrorSlot errors;
  const std::size_t stride = work.stride();

#pragma omp parallel num_threads(static_cast<int>(workers))
#pragma omp single
  {
    std::size_t p = 0;
    while (p < pieces.size()) {
      const Piece head = pieces[p];
      if (!head.split) {
#pragma omp task firstprivate(head) shared(work, total_work, errors)
        errors.guard([&] {
          std::size_t done = 0;
          for (std::size_t t = head.task_begin; t < head.task_end; ++t) {
            done += work.accumulate(t, 0, work.items(t));
          }
          total_work.fetch_add(done, std::memory_order_relaxed);
        });
        ++p;
        continue;
      }
      // Consecutive split pieces of one task.
      std::size_t q = p;
      while (q < pieces.size() && pieces[q].split && pieces[q].task_begin == head.task_begin) ++q;
      ++stats.split_tasks;
      const std::size_t first = p;
      const std::size_t last = q;
      const std::size_t task = head.task_begin;
#pragma omp task firstprivate(first, last, task) shared(work, total_work, errors, pieces)
      {
        std::vector<Term> buffer(work.items(task) * stride);
        for (std::size_t k = first; k < last; ++k) {
          const Piece piece = pieces[k];
#pragma omp task firstprivate(piece) shared(work, total_work, errors, buffer)
          errors.guard([&] {
            std::span<Term> out(buffer.data() + piece.item_begin * stride,
                                (piece.item_end - piece.item_begin) * stride);
            total_work.fetch_add(work.evaluate(piece.task_begin, piece.item_begin,
                                               piece.item_end, out),
                                 std::memory_order_relaxed);
          });
        }
#pragma omp taskwait
        errors.guard([&] { work.fold(task, std::span<const Term>(buffer)); });
      }
      p = q;
    }
  }
  errors.rethrow();
  stats.work = total_work.load();
  return stats;
}

// Synthetic GBS-like workload with controlled skew: task t owns items(t)
// items, each a fixed amount of floating-point work producing one term.
class SkewedWorkload {
 public:
  using Term = double;

  // Item counts per task; spin is the inner iteration count per item.
  SkewedWorkload(std::vector<std::size_t> items_per_task, std::size_t spin);

  // base items for every task, heavy_factor x base for tasks where
  // index % heavy_every == heavy_offset.
  static std::vector<std::size_t> skewed_counts(std::size_t n_tasks, std::size_t base,
                                                std::size_t heavy_factor,
                                                std::size_t heavy_every,
                                                std::size_t heavy_offset = 0);

  std::size_t tasks() const { return items_.size(); }
  std::size_t items(std::size_t t) const { return items_[t]; }
  std::size_t cost(std::size_t t) const { return items_[t]; }
  std::size_t stride() const { return 1; }
  std::size_t accumulate(std::size_t t, std::size_t b, std::size_t e);
  std::size_t evaluate(std::size_t t, std::size_t b, std::size_t e, std::span<double> out) const;
  void fold(std::size_t t, std::span<const double> terms);

  void reset();
  const std::vector<double>& results() const { return results_; }
  double term(std::size_t t, std::size_t item) const;

 private:
  std::vector<std::size_t> items_;
  std::size_t spin_;
  std::vector<double> results_;
};

}  // namespace gbt
