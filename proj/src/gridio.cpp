#include "raman/gridio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace raman {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// std::stod throws on subnormals (underflow sets ERANGE); strtod keeps them
double parse_double(const std::string& s) {
  const char* p = s.c_str();
  char* end = nullptr;
  double v = std::strtod(p, &end);
  if (end == p)
    throw std::runtime_error("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

} // namespace

void write_grid_csv(const Grid2D& g, const std::string& path) {
  if (g.data.size() != g.rows.values.size() * g.cols.values.size())
    throw std::invalid_argument("grid data size does not match its axes");
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("cannot open " + path + " for writing");
  f << "# grid " << g.rows.name << " [" << g.rows.unit << "] x " << g.cols.name << " ["
    << g.cols.unit << "]\n";
  for (double c : g.cols.values)
    f << ',' << fmt(c);
  f << '\n';
  for (size_t i = 0; i < g.rows.values.size(); ++i) {
    f << fmt(g.rows.values[i]);
    for (size_t j = 0; j < g.cols.values.size(); ++j)
      f << ',' << fmt(g.at(i, j));
    f << '\n';
  }
  if (!f)
    throw std::runtime_error("write failed for " + path);
}

void write_grid_bin(const Grid2D& g, const std::string& path) {
  if (g.data.size() != g.rows.values.size() * g.cols.values.size())
    throw std::invalid_argument("grid data size does not match its axes");
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot open " + path + " for writing");
  f << "rgrid-bin 1\n";
  f << g.rows.name << " [" << g.rows.unit << "] x " << g.cols.name << " [" << g.cols.unit
    << "]\n";
  f << g.rows.values.size() << ' ' << g.cols.values.size() << " 1\n";
  auto put = [&](const std::vector<double>& v) {
    f.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  put(g.rows.values);
  put(g.cols.values);
  put(g.data);
  if (!f)
    throw std::runtime_error("write failed for " + path);
}

Grid2D read_grid_bin(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != "rgrid-bin 1")
    throw std::runtime_error(path + ": not an rgrid-bin file");
  Grid2D g;
  if (!std::getline(f, line))
    throw std::runtime_error(path + ": missing axis description line");
  {
    auto sep = line.find("] x ");
    if (sep == std::string::npos)
      throw std::runtime_error(path + ": malformed axis description");
    auto parse_axis = [&](const std::string& s, GridAxis& ax) {
      auto lb = s.find(" [");
      auto rb = s.find(']', lb == std::string::npos ? 0 : lb);
      if (lb == std::string::npos || rb == std::string::npos)
        throw std::runtime_error(path + ": malformed axis description '" + s + "'");
      ax.name = s.substr(0, lb);
      ax.unit = s.substr(lb + 2, rb - lb - 2);
    };
    parse_axis(line.substr(0, sep + 1), g.rows);
    parse_axis(line.substr(sep + 4), g.cols);
  }
  size_t nr = 0, nc = 0, nchan = 0;
  if (!std::getline(f, line))
    throw std::runtime_error(path + ": missing dimension line");
  {
    std::istringstream ss(line);
    if (!(ss >> nr >> nc >> nchan))
      throw std::runtime_error(path + ": malformed dimension line");
  }
  if (nchan != 1)
    throw std::runtime_error(path + ": expected a real grid (nchan 1), got nchan " +
                             std::to_string(nchan));
  auto get = [&](std::vector<double>& v, size_t n) {
    v.resize(n);
    f.read(reinterpret_cast<char*>(v.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
    if (static_cast<size_t>(f.gcount()) != n * sizeof(double))
      throw std::runtime_error(path + ": truncated data block");
  };
  get(g.rows.values, nr);
  get(g.cols.values, nc);
  get(g.data, nr * nc);
  return g;
}

void write_kernel_csv(const GridAxis& rows, const GridAxis& cols,
                      const std::vector<std::complex<double>>& data,
                      const std::string& path) {
  if (data.size() != rows.values.size() * cols.values.size())
    throw std::invalid_argument("kernel data size does not match its axes");
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("cannot open " + path + " for writing");
  f << "# kernel " << rows.name << " [" << rows.unit << "], " << cols.name << " ["
    << cols.unit << "], re, im\n";
  for (size_t i = 0; i < rows.values.size(); ++i)
    for (size_t j = 0; j < cols.values.size(); ++j) {
      const auto& v = data[i * cols.values.size() + j];
      f << fmt(rows.values[i]) << ',' << fmt(cols.values[j]) << ',' << fmt(v.real())
        << ',' << fmt(v.imag()) << '\n';
    }
  if (!f)
    throw std::runtime_error("write failed for " + path);
}

Grid2D read_grid_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw std::runtime_error("cannot open " + path);
  Grid2D g;
  std::string line;
  if (!std::getline(f, line) || line.rfind("# grid ", 0) != 0)
    throw std::runtime_error(path + ": missing grid header line");
  {
    // "# grid <rname> [<runit>] x <cname> [<cunit>]"
    std::string rest = line.substr(7);
    auto parse_axis = [&](const std::string& s, GridAxis& ax) {
      auto lb = s.find(" [");
      auto rb = s.find(']', lb == std::string::npos ? 0 : lb);
      if (lb == std::string::npos || rb == std::string::npos)
        throw std::runtime_error(path + ": malformed axis description '" + s + "'");
      ax.name = s.substr(0, lb);
      ax.unit = s.substr(lb + 2, rb - lb - 2);
    };
    auto sep = rest.find("] x ");
    if (sep == std::string::npos)
      throw std::runtime_error(path + ": malformed grid header");
    parse_axis(rest.substr(0, sep + 1), g.rows);
    parse_axis(rest.substr(sep + 4), g.cols);
  }
  if (!std::getline(f, line))
    throw std::runtime_error(path + ": missing column axis row");
  {
    auto cells = split_csv(line);
    for (size_t j = 1; j < cells.size(); ++j)
      g.cols.values.push_back(parse_double(cells[j]));
  }
  while (std::getline(f, line)) {
    if (line.empty())
      continue;
    auto cells = split_csv(line);
    if (cells.size() != g.cols.values.size() + 1)
      throw std::runtime_error(path + ": row with wrong cell count");
    g.rows.values.push_back(parse_double(cells[0]));
    for (size_t j = 1; j < cells.size(); ++j)
      g.data.push_back(parse_double(cells[j]));
  }
  return g;
}

} // namespace raman
