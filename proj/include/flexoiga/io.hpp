#pragma once

#include "flexoiga/solve.hpp"

#include <string>
#include <variant>
#include <vector>

namespace flexoiga {

using Cell = std::variant<double, std::string>;

/// Column-named result table, one row per run.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  /// Numeric column by name; throws invalid-argument if absent or non-numeric.
  std::vector<double> column(const std::string& name) const;
  std::vector<std::string> text_column(const std::string& name) const;
  int column_index(const std::string& name) const;
};

/// Numbers as %.17e, comma separated, header first.
std::string format_csv(const Table& table);
void write_csv(const Table& table, const std::string& path);

/// Legacy ASCII unstructured grid of VTK_QUAD cells, samples x samples quads per
/// patch, with point arrays u (padded to 3), phi, eps11 and E2.
void write_vtk(const SolutionField& sol, const MultiPatchMesh& mesh, const std::string& path, int samples = 8);

}  // namespace flexoiga
