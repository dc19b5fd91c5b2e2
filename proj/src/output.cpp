#include "rarevel/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rarevel {

void write_vtk_fields(const MacroField& field, const GasModel& gas, const std::string& path) {
  field.validate();
  std::ofstream out(path);
  if (!out) throw InputError("cannot write VTK file: " + path);
  char buf[128];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.9e", v);
    out << buf;
  };
  const int n = field.cell_count();
  out << "# vtk DataFile Version 3.0\nmacroscopic fields\nASCII\nDATASET STRUCTURED_GRID\n";
  out << "DIMENSIONS " << field.ni << " " << field.nj << " " << field.nk << "\n";
  out << "POINTS " << n << " double\n";
  for (int c = 0; c < n; ++c) {
    const Vec3 x = field.centroids.empty() ? Vec3{} : field.centroids[c];
    num(x[0]);
    out << " ";
    num(x[1]);
    out << " ";
    num(field.vel_dim == 3 ? x[2] : 0.0);
    out << "\n";
  }
  out << "POINT_DATA " << n << "\n";
  out << "SCALARS rho double 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < n; ++c) {
    num(field.cells[c].rho);
    out << "\n";
  }
  out << "VECTORS u double\n";
  for (int c = 0; c < n; ++c) {
    num(field.cells[c].u[0]);
    out << " ";
    num(field.cells[c].u[1]);
    out << " ";
    num(field.vel_dim == 3 ? field.cells[c].u[2] : 0.0);
    out << "\n";
  }
  out << "SCALARS T double 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < n; ++c) {
    num(field.cells[c].T);
    out << "\n";
  }
  out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < n; ++c) {
    num(field.cells[c].rho * gas.R * field.cells[c].T);
    out << "\n";
  }
}

void write_wall_flux_csv(const std::vector<WallFluxSample>& flux, const std::string& param_name,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write wall-flux file: " + path);
  std::vector<WallFluxSample> rows = flux;
  std::sort(rows.begin(), rows.end(),
            [](const WallFluxSample& a, const WallFluxSample& b) { return a.param < b.param; });
  out << (param_name == "theta_deg" ? "theta_deg" : param_name) << ",x,y,q_n_W_per_m2\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    out << buf;
  };
  for (const auto& r : rows) {
    num(r.param);
    out << ",";
    num(r.x);
    out << ",";
    num(r.y);
    out << ",";
    num(r.q_n);
    out << "\n";
  }
}

void write_residual_csv(const std::vector<double>& residuals, const std::vector<double>& dts,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write residual file: " + path);
  out << "iter,residual,dt\n";
  char buf[64];
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    out << (k + 1) << ",";
    std::snprintf(buf, sizeof(buf), "%.12g", residuals[k]);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.12g", k < dts.size() ? dts[k] : 0.0);
    out << buf << "\n";
  }
}

namespace {

struct Profile {
  std::vector<double> s, q;
};

Profile read_flux_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open wall-flux file: " + path);
  Profile p;
  std::string line;
  long line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (...) {
        throw ParseError("malformed wall-flux row in " + path, line_no);
      }
    }
    if (vals.size() != 4) throw ParseError("wall-flux row needs 4 columns in " + path, line_no);
    p.s.push_back(vals[0]);
    p.q.push_back(vals[3]);
  }
  if (p.s.empty()) throw InputError("wall-flux file has no data rows: " + path);
  return p;
}

double interp(const Profile& p, double s) {
  const auto it = std::lower_bound(p.s.begin(), p.s.end(), s);
  if (it == p.s.begin()) return p.q.front();
  if (it == p.s.end()) return p.q.back();
  const std::size_t h = static_cast<std::size_t>(it - p.s.begin());
  const double t = (s - p.s[h - 1]) / (p.s[h] - p.s[h - 1]);
  return p.q[h - 1] * (1.0 - t) + p.q[h] * t;
}

} // namespace

FluxComparison compare_flux_files(const std::string& path_a, const std::string& path_b) {
  const Profile a = read_flux_csv(path_a);
  const Profile b = read_flux_csv(path_b);

  bool same_sampling = a.s.size() == b.s.size();
  if (same_sampling)
    for (std::size_t k = 0; k < a.s.size(); ++k)
      same_sampling = same_sampling && std::abs(a.s[k] - b.s[k]) < 1e-9 * (1.0 + std::abs(a.s[k]));

  FluxComparison r;
  double ref_max = 0.0, ref_l2 = 0.0, diff_l2 = 0.0, diff_max = 0.0;
  const double lo = std::max(a.s.front(), b.s.front());
  const double hi = std::min(a.s.back(), b.s.back());
  for (std::size_t k = 0; k < a.s.size(); ++k) {
    if (!same_sampling && (a.s[k] < lo || a.s[k] > hi)) continue;
    const double qa = a.q[k];
    const double qb = same_sampling ? b.q[k] : interp(b, a.s[k]);
    ref_max = std::max(ref_max, std::abs(qa));
    diff_max = std::max(diff_max, std::abs(qa - qb));
    ref_l2 += qa * qa;
    diff_l2 += (qa - qb) * (qa - qb);
    ++r.samples;
  }
  if (r.samples == 0) throw InputError("flux profiles do not overlap");
  r.max_rel = ref_max > 0.0 ? diff_max / ref_max : 0.0;
  r.l2_rel = ref_l2 > 0.0 ? std::sqrt(diff_l2 / ref_l2) : 0.0;
  return r;
}

} // namespace rarevel
