#include "hess/export.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "hess/error.hpp"

namespace hess {

namespace {

std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(path + ":" + std::to_string(line) + ": invalid number '" + s + "'");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string cell_csv(const ScenarioReport& report) {
  std::ostringstream os;
  os << "time_s,entity,mean_c,max_c,min_c\n";
  std::vector<std::size_t> order(report.entities.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.entities[a].entity < report.entities[b].entity;
  });
  const std::size_t samples = report.entities.empty() ? 0 : report.entities.front().samples.size();
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t e : order) {
      const auto& sample = report.entities[e].samples.at(s);
      os << fixed6(sample.time) << ',' << report.entities[e].entity << ',' << fixed6(sample.mean_c)
         << ',' << fixed6(sample.max_c) << ',' << fixed6(sample.min_c) << '\n';
    }
  }
  return os.str();
}

void write_cell_csv(const ScenarioReport& report, const std::string& path) {
  write_text_file(path, cell_csv(report));
}

std::vector<CellCsvRow> read_cell_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "time_s,entity,mean_c,max_c,min_c") {
    throw ValidationError(path + ": unexpected CSV header");
  }
  std::vector<CellCsvRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5) {
      throw ValidationError(path + ":" + std::to_string(number) + ": expected 5 columns");
    }
    rows.push_back({to_double(cells[0], path, number), cells[1], to_double(cells[2], path, number),
                    to_double(cells[3], path, number), to_double(cells[4], path, number)});
  }
  return rows;
}

std::string sweep_csv(const std::vector<ScenarioReport>& reports) {
  std::vector<std::string> entities;
  for (const auto& r : reports) {
    for (const auto& e : r.entities) {
      if (std::find(entities.begin(), entities.end(), e.entity) == entities.end()) {
        entities.push_back(e.entity);
      }
    }
  }
  std::sort(entities.begin(), entities.end());
  std::ostringstream os;
  os << "pem_voltage_v,c_rate,time_s";
  for (const auto& e : entities) os << ',' << e << "_c";
  os << '\n';
  for (const auto& r : reports) {
    os << (r.meta.pem_voltage ? fixed6(*r.meta.pem_voltage) : std::string()) << ','
       << fixed6(r.meta.c_rate) << ',';
    os << (r.entities.empty() ? fixed6(0.0) : fixed6(r.entities.front().final().time));
    for (const auto& e : entities) {
      os << ',';
      if (const auto* series = r.find(e)) os << fixed6(series->final().mean_c);
    }
    os << '\n';
  }
  return os.str();
}

void write_sweep_csv(const std::vector<ScenarioReport>& reports, const std::string& path) {
  write_text_file(path, sweep_csv(reports));
}

void write_field_dump(const VoxelGrid& grid, const std::string& path, double time) {
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\n";
  os << "temperature_c t=" << fixed6(time) << " s\n";
  os << "ASCII\n";
  os << "DATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << grid.dims[0] << ' ' << grid.dims[1] << ' ' << grid.dims[2] << '\n';
  const Vec3 first = grid.voxel_center(0, 0, 0);
  os << std::setprecision(17);
  os << "ORIGIN " << first.x << ' ' << first.y << ' ' << first.z << '\n';
  os << "SPACING " << grid.spacing << ' ' << grid.spacing << ' ' << grid.spacing << '\n';
  os << "POINT_DATA " << grid.size() << '\n';
  os << "SCALARS temperature_c double 1\n";
  os << "LOOKUP_TABLE default\n";
  os << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << kelvin_to_celsius(grid.temperature[i]) << '\n';
  }
  write_text_file(path, os.str());
}

FieldDump read_field_dump(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  FieldDump dump;
  std::size_t points = 0;
  bool in_data = false;
  auto bad = [&](const std::string& what) { return ValidationError(path + ": " + what); };
  while (!in_data && std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "DIMENSIONS") {
      ls >> dump.dims[0] >> dump.dims[1] >> dump.dims[2];
    } else if (key == "ORIGIN") {
      ls >> dump.origin.x >> dump.origin.y >> dump.origin.z;
    } else if (key == "SPACING") {
      double sy = 0.0, sz = 0.0;
      ls >> dump.spacing >> sy >> sz;
      if (sy != dump.spacing || sz != dump.spacing) throw bad("non-uniform spacing");
    } else if (key == "POINT_DATA") {
      ls >> points;
    } else if (key == "SCALARS") {
      std::string name;
      ls >> name;
      if (name != "temperature_c") throw bad("expected scalar field temperature_c");
    } else if (key == "LOOKUP_TABLE") {
      in_data = true;
    }
    const bool numeric = key == "DIMENSIONS" || key == "ORIGIN" || key == "SPACING" || key == "POINT_DATA";
    if (numeric && ls.fail()) throw bad("malformed " + key + " line");
  }
  if (!in_data) throw bad("missing LOOKUP_TABLE");
  const std::size_t expected = static_cast<std::size_t>(dump.dims[0]) * dump.dims[1] * dump.dims[2];
  if (points != expected) throw bad("POINT_DATA does not match DIMENSIONS");
  dump.temperature_c.reserve(points);
  double v = 0.0;
  while (in >> v) dump.temperature_c.push_back(v);
  if (dump.temperature_c.size() != points) throw bad("scalar count does not match POINT_DATA");
  return dump;
}

}  // namespace hess
