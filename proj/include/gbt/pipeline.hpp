#pragma once

// Two-phase RT -> GBS pipeline, run chunk by chunk under an execution plan.

#include "gbt/beamtrace.hpp"
#include "gbt/gbs.hpp"
#include "gbt/parallel.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace gbt {

struct PipelineInput {
  const Scene* scene = nullptr;
  SourceSpec source;
  LaunchGrid grid;
  TraceConfig trace;
  Atmosphere atmosphere;
  std::vector<Vec3> observers;
  double phi_scale = 1.0;
  bool cutoff = true;
  // Called after each chunk's RT phase with the chunk's paths and the global
  // index of its first ray; excluded from the phase timings.
  std::function<void(std::span<const BeamPath>, std::size_t)> inspect;
};

struct PipelineResult {
  FieldResult field;
  PhaseTimings timings;
  ChunkPlan chunks;
  std::size_t rays = 0;
  std::size_t per_ray_bytes = 0;
  std::size_t evaluations = 0;  // beam terms evaluated, cutoff skips excluded
  std::size_t reflections = 0;  // summed over every traced beam
};

// 1.5 x the serialized size of the first launch ray's traced path.
std::size_t measure_per_ray_bytes(const PipelineInput& in);

// Chunk plan for the input under `plan` (memory budget, measured ray size).
ChunkPlan chunk_plan_for(const PipelineInput& in, const ExecPlan& plan,
                         std::size_t* per_ray_bytes = nullptr);

// Traces the launch rays [begin, end) under the plan's mode.
std::vector<BeamPath> trace_rays(const PipelineInput& in, std::span<const LaunchRay> rays,
                                 const ExecPlan& plan);

// Per chunk: RT over the chunk's rays, then GBS accumulating into running
// per-(observer, frequency) sums in global beam order; SPL at the end.
// `chunks` overrides the planner when given. Bit-identical field across
// modes, worker counts and chunkings.
PipelineResult run_pipeline(const PipelineInput& in, const ExecPlan& plan,
                            std::optional<ChunkPlan> chunks = std::nullopt,
                            std::optional<double> baseline_total = std::nullopt);

// Traces the full launch grid in free field (no scene) for calibration.
std::vector<BeamPath> trace_free_field(const SourceSpec& source, const LaunchGrid& grid,
                                       const TraceConfig& cfg, const Atmosphere& atmosphere);

}  // namespace gbt
