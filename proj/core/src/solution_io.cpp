#include "rebalance/solution_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace rebalance {

SolutionRecord make_record(const MilpModel& model, const MilpResult& result, Mode mode,
                           const std::string& method, double nonzero_tol) {
  SolutionRecord rec;
  rec.mode = mode == Mode::Myopic ? "myopic" : "non-myopic";
  rec.method = method;
  rec.status = solve_status_name(result.status);
  rec.objective = std::isfinite(result.objective) ? result.objective : 0.0;
  rec.bound = std::isfinite(result.bound) ? result.bound : 0.0;
  rec.wall_seconds = result.wall_seconds;
  rec.nodes_explored = result.nodes_explored;
  for (size_t c = 0; c < result.x.size(); ++c)
    if (std::fabs(result.x[c]) > nonzero_tol)
      rec.nonzeros.emplace_back(model.col_name(static_cast<int>(c)), result.x[c]);
  return rec;
}

void write_solution(std::ostream& out, const SolutionRecord& record) {
  nlohmann::ordered_json doc;
  doc["mode"] = record.mode;
  doc["method"] = record.method;
  doc["status"] = record.status;
  doc["objective"] = record.objective;
  doc["bound"] = record.bound;
  doc["wall_seconds"] = record.wall_seconds;
  doc["nodes_explored"] = record.nodes_explored;
  nlohmann::ordered_json vars = nlohmann::ordered_json::object();
  for (const auto& [name, value] : record.nonzeros) vars[name] = value;
  doc["nonzeros"] = std::move(vars);
  out << doc.dump(2) << "\n";
}

SolutionRecord read_solution(std::istream& in) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::parse(in);
  SolutionRecord rec;
  rec.mode = doc.at("mode").get<std::string>();
  rec.method = doc.at("method").get<std::string>();
  rec.status = doc.at("status").get<std::string>();
  rec.objective = doc.at("objective").get<double>();
  rec.bound = doc.at("bound").get<double>();
  rec.wall_seconds = doc.at("wall_seconds").get<double>();
  rec.nodes_explored = doc.at("nodes_explored").get<long long>();
  for (const auto& [name, value] : doc.at("nonzeros").items())
    rec.nonzeros.emplace_back(name, value.get<double>());
  return rec;
}

void save_solution_file(const std::string& path, const SolutionRecord& record) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_solution(out, record);
}

SolutionRecord load_solution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_solution(in);
}

}  // namespace rebalance
