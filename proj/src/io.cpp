#include "flexoiga/io.hpp"

#include "flexoiga/error.hpp"

#include <cstdio>
#include <fstream>

namespace flexoiga {

void Table::add_row(std::vector<Cell> row) {
  require(row.size() == header.size(), ErrorKind::InvalidArgument, "row width does not match table header");
  rows.push_back(std::move(row));
}

int Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  fail(ErrorKind::InvalidArgument, "no column named '" + name + "'");
}

std::vector<double> Table::column(const std::string& name) const {
  const int c = column_index(name);
  std::vector<double> out;
  for (const auto& r : rows) {
    const auto* v = std::get_if<double>(&r[static_cast<std::size_t>(c)]);
    require(v != nullptr, ErrorKind::InvalidArgument, "column '" + name + "' is not numeric");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::string> Table::text_column(const std::string& name) const {
  const int c = column_index(name);
  std::vector<std::string> out;
  for (const auto& r : rows) {
    const Cell& cell = r[static_cast<std::size_t>(c)];
    if (const auto* s = std::get_if<std::string>(&cell)) {
      out.push_back(*s);
    } else {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(cell));
      out.emplace_back(buf);
    }
  }
  return out;
}

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const auto* v = std::get_if<double>(&row[i])) {
        std::snprintf(buf, sizeof buf, "%.17e", *v);
        out += buf;
      } else {
        out += std::get<std::string>(row[i]);
      }
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Table& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), ErrorKind::IoError, "cannot open '" + path + "' for writing");
  f << format_csv(table);
  require(f.good(), ErrorKind::IoError, "failed writing '" + path + "'");
}

void write_vtk(const SolutionField& sol, const MultiPatchMesh& mesh, const std::string& path, int samples) {
  require(samples >= 1, ErrorKind::InvalidArgument, "VTK sampling density must be >= 1");
  const int per_side = samples + 1;
  const int np = mesh.num_patches();
  const long n_points = static_cast<long>(np) * per_side * per_side;
  const long n_cells = static_cast<long>(np) * samples * samples;

  struct PointData {
    Vec2 x, u;
    double phi, eps11, E2;
  };
  std::vector<PointData> pts;
  pts.reserve(static_cast<std::size_t>(n_points));
  for (int p = 0; p < np; ++p) {
    const NurbsPatch& patch = mesh.patch(p);
    for (int j = 0; j < per_side; ++j) {
      for (int i = 0; i < per_side; ++i) {
        const double xi = static_cast<double>(i) / samples, eta = static_cast<double>(j) / samples;
        const PhysicalBasis pb = patch.physical_basis(xi, eta, 1);
        PointData d{pb.map.x, Vec2::Zero(), 0.0, 0.0, 0.0};
        for (int a = 0; a < pb.size(); ++a) {
          const int g = mesh.node(p, pb.indices[a]);
          d.u += pb.R(a) * sol.node_u(g);
          d.phi += pb.R(a) * sol.phi(g);
          d.eps11 += pb.dR(a, 0) * sol.u(2 * g);
          d.E2 -= pb.dR(a, 1) * sol.phi(g);
        }
        pts.push_back(d);
      }
    }
  }

  std::FILE* f = std::fopen(path.c_str(), "wb");
  require(f != nullptr, ErrorKind::IoError, "cannot open '" + path + "' for writing");
  std::fprintf(f, "# vtk DataFile Version 3.0\nflexoiga solution\nASCII\nDATASET UNSTRUCTURED_GRID\n");
  std::fprintf(f, "POINTS %ld double\n", n_points);
  for (const auto& d : pts) std::fprintf(f, "%.17g %.17g 0\n", d.x.x(), d.x.y());
  std::fprintf(f, "CELLS %ld %ld\n", n_cells, 5 * n_cells);
  for (int p = 0; p < np; ++p) {
    const long base = static_cast<long>(p) * per_side * per_side;
    for (int j = 0; j < samples; ++j) {
      for (int i = 0; i < samples; ++i) {
        const long v0 = base + j * per_side + i;
        std::fprintf(f, "4 %ld %ld %ld %ld\n", v0, v0 + 1, v0 + 1 + per_side, v0 + per_side);
      }
    }
  }
  std::fprintf(f, "CELL_TYPES %ld\n", n_cells);
  for (long c = 0; c < n_cells; ++c) std::fprintf(f, "9\n");
  std::fprintf(f, "POINT_DATA %ld\nVECTORS u double\n", n_points);
  for (const auto& d : pts) std::fprintf(f, "%.17g %.17g 0\n", d.u.x(), d.u.y());
  std::fprintf(f, "SCALARS phi double 1\nLOOKUP_TABLE default\n");
  for (const auto& d : pts) std::fprintf(f, "%.17g\n", d.phi);
  std::fprintf(f, "SCALARS eps11 double 1\nLOOKUP_TABLE default\n");
  for (const auto& d : pts) std::fprintf(f, "%.17g\n", d.eps11);
  std::fprintf(f, "SCALARS E2 double 1\nLOOKUP_TABLE default\n");
  for (const auto& d : pts) std::fprintf(f, "%.17g\n", d.E2);
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  require(ok, ErrorKind::IoError, "failed writing '" + path + "'");
}

}  // namespace flexoiga
