#include "rarevel/macro_field.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rarevel {

void MacroField::validate() const {
  if (ni <= 0 || nj <= 0 || nk <= 0) throw InputError("macro field: empty dims");
  if (vel_dim < 1 || vel_dim > 3) throw InputError("macro field: bad velocity dimension");
  if (static_cast<std::size_t>(cell_count()) != cells.size())
    throw InputError("macro field: dims product does not match cell count");
  for (int c = 0; c < cell_count(); ++c) {
    const auto& p = cells[c];
    if (!(p.rho > 0.0) || !(p.T > 0.0)) {
      const int i = c % ni;
      const int j = (c / ni) % nj;
      const int k = c / (ni * nj);
      throw InputError("macro field: invalid state at cell (" + std::to_string(i) + "," +
                       std::to_string(j) + (nk > 1 ? "," + std::to_string(k) : "") + ")");
    }
  }
}

MacroField load_macro_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open macro-field file: " + path);

  MacroField field;
  std::string line;
  long line_no = 0;
  bool have_dims = false;
  std::size_t expected = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ss(line);
    if (!have_dims) {
      std::string kw;
      ss >> kw;
      if (kw != "dims") throw ParseError("macro-field file must start with a dims header", line_no);
      std::vector<int> dims;
      int d;
      while (ss >> d) dims.push_back(d);
      if (dims.size() < 2 || dims.size() > 3)
        throw ParseError("dims header needs 2 or 3 extents", line_no);
      field.ni = dims[0];
      field.nj = dims[1];
      field.nk = dims.size() == 3 ? dims[2] : 1;
      field.vel_dim = dims.size() == 3 ? 3 : 2;
      if (field.ni <= 0 || field.nj <= 0 || field.nk <= 0)
        throw ParseError("dims must be positive", line_no);
      expected = static_cast<std::size_t>(field.cell_count());
      field.cells.reserve(expected);
      field.centroids.reserve(expected);
      have_dims = true;
      continue;
    }
    const int sd = field.vel_dim; // spatial coords match velocity components
    Vec3 x{}, u{};
    PrimitiveState p;
    bool ok = true;
    for (int a = 0; a < sd && ok; ++a) ok = static_cast<bool>(ss >> x[a]);
    if (ok) ok = static_cast<bool>(ss >> p.rho);
    for (int a = 0; a < sd && ok; ++a) ok = static_cast<bool>(ss >> u[a]);
    if (ok) ok = static_cast<bool>(ss >> p.T);
    if (!ok) throw ParseError("malformed cell record", line_no);
    p.u = u;
    if (!(p.rho > 0.0) || !(p.T > 0.0)) {
      const std::size_t c = field.cells.size();
      const int i = static_cast<int>(c % field.ni);
      const int j = static_cast<int>((c / field.ni) % field.nj);
      throw ParseError("invalid state (rho or T not positive) at cell (" + std::to_string(i) +
                           "," + std::to_string(j) + ")",
                       line_no);
    }
    field.cells.push_back(p);
    field.centroids.push_back(x);
    if (field.cells.size() > expected) throw ParseError("more cell records than dims allow", line_no);
  }
  if (!have_dims) throw ParseError("empty macro-field file", line_no);
  if (field.cells.size() != expected)
    throw InputError("macro-field file " + path + ": expected " + std::to_string(expected) +
                     " cells, got " + std::to_string(field.cells.size()));
  field.validate();
  return field;
}

void save_macro_field(const MacroField& field, const std::string& path,
                      const std::string& header_comment) {
  field.validate();
  std::ofstream out(path);
  if (!out) throw InputError("cannot write macro-field file: " + path);
  if (!header_comment.empty()) {
    std::istringstream ss(header_comment);
    std::string l;
    while (std::getline(ss, l)) out << "# " << l << "\n";
  }
  out << "dims " << field.ni << " " << field.nj;
  if (field.vel_dim == 3) out << " " << field.nk;
  out << "\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  const int sd = field.vel_dim;
  for (int c = 0; c < field.cell_count(); ++c) {
    const Vec3 x = field.centroids.empty() ? Vec3{} : field.centroids[c];
    for (int a = 0; a < sd; ++a) {
      put(x[a]);
      out << " ";
    }
    put(field.cells[c].rho);
    for (int a = 0; a < sd; ++a) {
      out << " ";
      put(field.cells[c].u[a]);
    }
    out << " ";
    put(field.cells[c].T);
    out << "\n";
  }
}

} // namespace rarevel
