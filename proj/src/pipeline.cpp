#include "gbt/pipeline.hpp"

#include <cmath>
#include <numbers>

namespace gbt {

namespace {

// GBS over one chunk of beams, observers as tasks and beams as items.
class GbsWork {
 public:
  using Term = Complex;

  GbsWork(std::span<const Vec3> observers, std::span<const BeamPath> paths,
          std::span<const double> omegas, const GbsParams& params, std::span<Complex> acc)
      : observers_(observers), paths_(paths), omegas_(omegas), params_(params), acc_(acc) {}

  std::size_t tasks() const { return observers_.size(); }
  std::size_t items(std::size_t) const { return paths_.size(); }
  std::size_t cost(std::size_t) const { return paths_.size() * omegas_.size(); }
  std::size_t stride() const { return omegas_.size(); }

  std::size_t accumulate(std::size_t o, std::size_t b, std::size_t e) {
    const std::size_t nf = omegas_.size();
    std::span<Complex> acc = acc_.subspan(o * nf, nf);
    std::size_t evaluated = 0;
    for (std::size_t i = b; i < e; ++i) {
      evaluated += accumulate_beam(observers_[o], paths_[i], omegas_, params_, acc);
    }
    return evaluated;
  }

  std::size_t evaluate(std::size_t o, std::size_t b, std::size_t e, std::span<Complex> out) const {
    const std::size_t nf = omegas_.size();
    std::size_t evaluated = 0;
    for (std::size_t i = b; i < e; ++i) {
      evaluated += evaluate_beam(observers_[o], paths_[i], omegas_, params_,
                                 out.subspan((i - b) * nf, nf));
    }
    return evaluated;
  }

  void fold(std::size_t o, std::span<const Complex> terms) {
    const std::size_t nf = omegas_.size();
    std::span<Complex> acc = acc_.subspan(o * nf, nf);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (terms[k] != Complex(0.0, 0.0)) acc[k % nf] += terms[k];
    }
  }

 private:
  std::span<const Vec3> observers_;
  std::span<const BeamPath> paths_;
  std::span<const double> omegas_;
  GbsParams params_;
  std::span<Complex> acc_;
};

const Scene& empty_scene() {
  static const Scene scene;
  return scene;
}

}  // namespace

std::size_t measure_per_ray_bytes(const PipelineInput& in) {
  const auto rays = launch_directions(in.grid);
  const Scene& scene = in.scene ? *in.scene : empty_scene();
  const BeamPath path = trace(scene, in.source, rays.front(), in.trace, in.atmosphere);
  const std::size_t bytes = serialize(path).size();
  return bytes + (bytes + 1) / 2;
}

ChunkPlan chunk_plan_for(const PipelineInput& in, const ExecPlan& plan,
                         std::size_t* per_ray_bytes) {
  const std::size_t total = in.grid.ray_count();
  std::size_t bytes = plan.per_ray_bytes;
  if (bytes == 0) bytes = measure_per_ray_bytes(in);
  if (per_ray_bytes) *per_ray_bytes = bytes;
  if (plan.memory_budget == 0) return single_chunk(total);
  return plan_chunks(total, plan.memory_budget, bytes);
}

std::vector<BeamPath> trace_rays(const PipelineInput& in, std::span<const LaunchRay> rays,
                                 const ExecPlan& plan) {
  const Scene& scene = in.scene ? *in.scene : empty_scene();
  std::vector<BeamPath> paths(rays.size());
  const auto body = [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      paths[i] = trace(scene, in.source, rays[i], in.trace, in.atmosphere);
    }
  };
  // Tracing cost is nearly uniform per ray, so dynamic mode shares the flat
  // partition for RT and differs only in GBS.
  if (plan.mode == Mode::sequential) {
    body(0, rays.size());
  } else {
    run_flat(rays.size(), plan.workers, body);
  }
  return paths;
}

PipelineResult run_pipeline(const PipelineInput& in, const ExecPlan& plan,
                            std::optional<ChunkPlan> chunks,
                            std::optional<double> baseline_total) {
  plan.validate();
  if (in.observers.empty()) throw InputError("observer set is empty");
  if (in.source.frequencies_hz.empty()) throw InputError("no frequencies given");
  for (double f : in.source.frequencies_hz) {
    if (!(f > 0.0)) throw InputError("frequencies must be positive");
  }

  const Stopwatch total_clock;
  PipelineResult result;
  const std::vector<LaunchRay> rays = launch_directions(in.grid);
  result.rays = rays.size();
  if (chunks) {
    result.chunks = explicit_chunks(chunks->chunk_sizes, rays.size());
    result.per_ray_bytes = plan.per_ray_bytes;
  } else {
    result.chunks = chunk_plan_for(in, plan, &result.per_ray_bytes);
  }

  std::vector<double> omegas;
  for (double f : in.source.frequencies_hz) omegas.push_back(2.0 * std::numbers::pi * f);
  const std::size_t n_obs = in.observers.size();
  const std::size_t nf = omegas.size();
  std::vector<Complex> acc(n_obs * nf, Complex(0.0, 0.0));
  const GbsParams params{in.phi_scale, in.cutoff};

  double rt_seconds = 0.0;
  double gbs_seconds = 0.0;
  std::size_t offset = 0;
  for (std::size_t chunk : result.chunks.chunk_sizes) {
    const Stopwatch rt_clock;
    const std::vector<BeamPath> paths =
        trace_rays(in, std::span<const LaunchRay>(rays).subspan(offset, chunk), plan);
    rt_seconds += rt_clock.seconds();
    for (const auto& p : paths) result.reflections += p.n_reflections;
    if (in.inspect) in.inspect(paths, offset);

    const Stopwatch gbs_clock;
    GbsWork work(in.observers, paths, omegas, params, acc);
    switch (plan.mode) {
      case Mode::sequential:
        for (std::size_t o = 0; o < n_obs; ++o) result.evaluations += work.accumulate(o, 0, paths.size());
        break;
      case Mode::flat: {
        std::atomic<std::size_t> evaluated{0};
        run_flat(n_obs, plan.workers, [&](std::size_t b, std::size_t e) {
          std::size_t local = 0;
          for (std::size_t o = b; o < e; ++o) local += work.accumulate(o, 0, paths.size());
          evaluated.fetch_add(local, std::memory_order_relaxed);
        });
        result.evaluations += evaluated.load();
        break;
      }
      case Mode::dynamic:
        result.evaluations += run_dynamic(work, plan.workers, plan.split_threshold).work;
        break;
    }
    gbs_seconds += gbs_clock.seconds();
    offset += chunk;
  }

  FieldResult& field = result.field;
  field.observers = in.observers;
  field.frequencies_hz = in.source.frequencies_hz;
  field.calibration = in.phi_scale;
  field.pressure = std::move(acc);
  field.spl_db.resize(field.pressure.size());
  for (std::size_t i = 0; i < field.pressure.size(); ++i) field.spl_db[i] = spl(field.pressure[i]);

  result.timings = measure(rt_seconds, gbs_seconds, total_clock.seconds(), baseline_total);
  return result;
}

std::vector<BeamPath> trace_free_field(const SourceSpec& source, const LaunchGrid& grid,
                                       const TraceConfig& cfg, const Atmosphere& atmosphere) {
  PipelineInput in;
  in.source = source;
  in.grid = grid;
  in.trace = cfg;
  in.atmosphere = atmosphere;
  const auto rays = launch_directions(grid);
  return trace_rays(in, rays, ExecPlan{});
}

}  // namespace gbt
