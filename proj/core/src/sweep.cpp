#include "rebalance/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace rebalance {

namespace {

const char* point_status(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "OPT";
    case SolveStatus::Infeasible: return "NF";
    case SolveStatus::Unbounded: return "UNB";
    case SolveStatus::Limit: return "LIM";
  }
  return "?";
}

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::vector<SweepPoint> run_sweep(const Instance& base, const SweepOptions& options) {
  std::vector<SweepPoint> points(options.values.size());
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto work = [&] {
    for (size_t k = next.fetch_add(1); k < options.values.size(); k = next.fetch_add(1)) {
      try {
        const double value = options.values[k];
        Instance inst = base;
        if (options.kind == SweepKind::StationCapacity) {
          for (Station& s : inst.stations) s.capacity = static_cast<int>(std::llround(value));
        } else {
          std::fill(inst.service_rate.begin(), inst.service_rate.end(), value);
        }
        const MilpModel model = assemble_model(inst, options.mode);
        const MilpResult res = solve_milp(model, options.bnb);
        SweepPoint& p = points[k];
        p.param_value = value;
        p.mode = options.mode;
        p.status = res.status;
        p.objective = res.objective;
        p.wall_seconds = res.wall_seconds;
        p.gap = res.status == SolveStatus::Optimal ? 0.0 : std::fabs(res.objective - res.bound);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  const size_t workers = std::max<size_t>(
      1, std::min<size_t>(static_cast<size_t>(std::max(options.threads, 1)), options.values.size()));
  std::vector<std::thread> pool;
  for (size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return points;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string csv = "param_value,mode,status,Z,wall_seconds,gap\n";
  for (const SweepPoint& p : points) {
    csv += fmt(p.param_value, "%.10g");
    csv += p.mode == Mode::Myopic ? ",myopic," : ",non-myopic,";
    csv += point_status(p.status);
    csv += ',';
    if (p.status == SolveStatus::Optimal || p.status == SolveStatus::Limit)
      csv += fmt(p.objective, "%.10g");
    csv += ',';
    csv += fmt(p.wall_seconds, "%.3f");
    csv += ',';
    csv += fmt(p.gap, "%.3g");
    csv += '\n';
  }
  return csv;
}

}  // namespace rebalance
