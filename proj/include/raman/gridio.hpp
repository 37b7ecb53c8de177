#pragma once
#include <complex>
#include <string>
#include <vector>

namespace raman {

struct GridAxis {
  std::string name;
  std::string unit;
  std::vector<double> values;
};

// Dense 2D table, row-major: data[i * cols.values.size() + j] belongs to
// rows.values[i], cols.values[j].
struct Grid2D {
  GridAxis rows;
  GridAxis cols;
  std::vector<double> data;

  double& at(size_t i, size_t j) { return data[i * cols.values.size() + j]; }
  double at(size_t i, size_t j) const { return data[i * cols.values.size() + j]; }
};

// CSV layout (stable, round-trips at full double precision):
//   # grid <rows.name> [<rows.unit>] x <cols.name> [<cols.unit>]
//   ,<col value>,<col value>,...
//   <row value>,<datum>,<datum>,...
void write_grid_csv(const Grid2D& g, const std::string& path);
Grid2D read_grid_csv(const std::string& path);

// Binary layout, for plot tooling that should not reparse text:
//   line 1: "rgrid-bin 1"
//   line 2: "<rows.name> [<rows.unit>] x <cols.name> [<cols.unit>]"
//   line 3: "<nrows> <ncols> <nchan>"   (nchan 1 = real, 2 = re/im pairs)
// followed by raw little-endian IEEE 754 doubles: row axis values, column
// axis values, then the table row-major (channel index fastest).
void write_grid_bin(const Grid2D& g, const std::string& path);
Grid2D read_grid_bin(const std::string& path);

// Complex-valued kernel samples on the same axes, one sample per line:
//   # kernel <rows.name> [<rows.unit>], <cols.name> [<cols.unit>], re, im
//   <row value>,<col value>,<re>,<im>
void write_kernel_csv(const GridAxis& rows, const GridAxis& cols,
                      const std::vector<std::complex<double>>& data,
                      const std::string& path);

} // namespace raman
