#include "fishpath/io.hpp"

#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "fishpath/errors.hpp"

namespace fishpath::io {

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

std::string trajectories_csv(const sde::PathEnsemble& e) {
  std::string out = kTrajectoryHeader;
  out += '\n';
  for (std::size_t p = 0; p < e.n_paths; ++p) {
    const auto& t = e.paths[p];
    for (std::size_t step = 0; step <= e.n_steps; ++step) {
      const std::string time = format_double(e.time(step));
      for (std::size_t i = 0; i < e.n_fish; ++i) {
        const std::size_t k = step * e.n_fish + i;
        out += fmt::format("{},{},{},{},{},{},{}\n", p, step, time, i, format_double(t.positions[k]),
                           format_double(t.velocities[k]), format_double(t.controls[k]));
      }
    }
  }
  return out;
}

std::string grid_csv(const ValueGrid& g) {
  std::string out = kGridHeader;
  out += '\n';
  for (std::size_t i = 0; i < g.x.n; ++i) {
    for (std::size_t j = 0; j < g.v.n; ++j) {
      out += fmt::format("{},{},{}\n", format_double(g.x.at(i)), format_double(g.v.at(j)),
                         format_double(g(i, j)));
    }
  }
  return out;
}

Json grid_header(const ValueGrid& g) {
  Json j;
  j["axes"] = {{"x", {{"lo", g.x.lo}, {"hi", g.x.hi}, {"n", g.x.n}}},
               {"v", {{"lo", g.v.lo}, {"hi", g.v.hi}, {"n", g.v.n}}}};
  j["time"] = g.time;
  j["tag"] = to_string(g.tag);
  return j;
}

ValueGrid read_grid(const std::string& csv, const Json& header) {
  auto axis = [&](const char* name) {
    const auto& a = header.at("axes").at(name);
    return Axis{a.at("lo").get<double>(), a.at("hi").get<double>(), a.at("n").get<std::size_t>()};
  };
  ValueGrid g(axis("x"), axis("v"), header.at("time").get<double>(),
              grid_tag_from_string(header.at("tag").get<std::string>()));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  require(line == kGridHeader, "grid CSV has an unexpected header");
  std::size_t k = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    require(k < g.size(), "grid CSV has more rows than its axes allow");
    const auto last = line.rfind(',');
    g.values[k++] = std::stod(line.substr(last + 1));
  }
  require(k == g.size(), "grid CSV has fewer rows than its axes require");
  return g;
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  if (!std::filesystem::exists(root_)) {
    std::filesystem::create_directories(root_);
    created_root_ = true;
  }
}

std::filesystem::path OutputDir::write_text(const std::string& name, const std::string& text) {
  const auto path = root_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  written_.push_back(path);
  out << text;
  if (!out) throw std::runtime_error(fmt::format("write to {} failed", path.string()));
  return path;
}

std::filesystem::path OutputDir::write_json(const std::string& name, const Json& value) {
  return write_text(name, value.dump(2) + "\n");
}

void OutputDir::remove_written() {
  std::error_code ec;
  for (const auto& p : written_) std::filesystem::remove(p, ec);
  written_.clear();
  if (created_root_ && std::filesystem::is_empty(root_, ec)) std::filesystem::remove(root_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json case_report_json(const strategy::CaseReport& report) {
  Json path = Json::array();
  for (const auto& p : report.path) path.push_back({{"parameter", p.parameter}, {"u_star", p.u_star}});
  Json j = {{"name", report.name}, {"path", path}, {"monotonicity", report.monotonicity},
            {"limit", report.limit}};
  if (report.printed_limit) j["printed_limit"] = *report.printed_limit;
  j["max_scaling_error"] = report.max_scaling_error;
  j["note"] = report.note;
  return j;
}

}  // namespace fishpath::io
