#pragma once

// Minimal legacy-ASCII unstructured-grid reader used to check written files.

#include <array>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

struct VtkGrid {
  std::vector<std::array<double, 3>> points;
  std::vector<std::vector<long>> cells;
  std::vector<int> cell_types;
  std::map<std::string, std::vector<double>> point_data;
  std::map<std::string, int> components;
};

inline VtkGrid read_vtk(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("# vtk DataFile", 0) != 0) throw std::runtime_error("not a legacy VTK file");
  std::getline(in, line);
  std::string word;
  in >> word;
  if (word != "ASCII") throw std::runtime_error("not ASCII");
  VtkGrid g;
  long n_points = 0;
  while (in >> word) {
    if (word == "DATASET") {
      in >> word;
    } else if (word == "POINTS") {
      in >> n_points >> word;
      g.points.resize(static_cast<std::size_t>(n_points));
      for (auto& p : g.points) in >> p[0] >> p[1] >> p[2];
    } else if (word == "CELLS") {
      long n = 0, total = 0;
      in >> n >> total;
      g.cells.resize(static_cast<std::size_t>(n));
      for (auto& c : g.cells) {
        long k = 0;
        in >> k;
        c.resize(static_cast<std::size_t>(k));
        for (long& v : c) in >> v;
      }
    } else if (word == "CELL_TYPES") {
      long n = 0;
      in >> n;
      g.cell_types.resize(static_cast<std::size_t>(n));
      for (int& t : g.cell_types) in >> t;
    } else if (word == "POINT_DATA") {
      in >> n_points;
    } else if (word == "VECTORS" || word == "SCALARS") {
      const bool vec = word == "VECTORS";
      std::string name, type;
      in >> name >> type;
      int comps = 3;
      if (!vec) {
        in >> comps;
        in >> word >> word;  // LOOKUP_TABLE default
      }
      auto& data = g.point_data[name];
      data.resize(static_cast<std::size_t>(n_points * comps));
      for (double& v : data) in >> v;
      g.components[name] = comps;
    } else {
      throw std::runtime_error("unexpected token " + word);
    }
  }
  return g;
}
