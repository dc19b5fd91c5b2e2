#include "rarevel/space_mesh.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace rarevel {

void SpaceMesh2D::build_metrics() {
  if (ni < 1 || nj < 1 || xn.size() != static_cast<std::size_t>((ni + 1) * (nj + 1)))
    throw InputError("space mesh: inconsistent dimensions");
  area.assign(static_cast<std::size_t>(ni) * nj, 0.0);
  inx.assign(static_cast<std::size_t>(ni + 1) * nj, 0.0);
  iny.assign(static_cast<std::size_t>(ni + 1) * nj, 0.0);
  jnx.assign(static_cast<std::size_t>(ni) * (nj + 1), 0.0);
  jny.assign(static_cast<std::size_t>(ni) * (nj + 1), 0.0);

  // i-face between cells (i-1,j) and (i,j): edge node(i,j) -> node(i,j+1),
  // normal rotated to point towards +i.
  for (int i = 0; i <= ni; ++i)
    for (int j = 0; j < nj; ++j) {
      const double ex = xn[node(i, j + 1)] - xn[node(i, j)];
      const double ey = yn[node(i, j + 1)] - yn[node(i, j)];
      inx[iface(i, j)] = ey;
      iny[iface(i, j)] = -ex;
    }
  // j-face between cells (i,j-1) and (i,j): edge node(i,j) -> node(i+1,j),
  // normal towards +j.
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j <= nj; ++j) {
      const double ex = xn[node(i + 1, j)] - xn[node(i, j)];
      const double ey = yn[node(i + 1, j)] - yn[node(i, j)];
      jnx[jface(i, j)] = -ey;
      jny[jface(i, j)] = ex;
    }
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      const std::size_t n00 = node(i, j), n10 = node(i + 1, j), n11 = node(i + 1, j + 1),
                        n01 = node(i, j + 1);
      const double a = 0.5 * ((xn[n00] * yn[n10] - xn[n10] * yn[n00]) +
                              (xn[n10] * yn[n11] - xn[n11] * yn[n10]) +
                              (xn[n11] * yn[n01] - xn[n01] * yn[n11]) +
                              (xn[n01] * yn[n00] - xn[n00] * yn[n01]));
      if (!(a > 0.0))
        throw InputError("space mesh: non-positive cell area at (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
      area[cell(i, j)] = a;
      const double cx = inx[iface(i + 1, j)] - inx[iface(i, j)] + jnx[jface(i, j + 1)] - jnx[jface(i, j)];
      const double cy = iny[iface(i + 1, j)] - iny[iface(i, j)] + jny[jface(i, j + 1)] - jny[jface(i, j)];
      double perim = 0.0;
      perim += std::abs(inx[iface(i, j)]) + std::abs(iny[iface(i, j)]);
      perim += std::abs(inx[iface(i + 1, j)]) + std::abs(iny[iface(i + 1, j)]);
      perim += std::abs(jnx[jface(i, j)]) + std::abs(jny[jface(i, j)]);
      perim += std::abs(jnx[jface(i, j + 1)]) + std::abs(jny[jface(i, j + 1)]);
      if (std::abs(cx) > 1e-12 * perim || std::abs(cy) > 1e-12 * perim)
        throw InputError("space mesh: cell normals do not close at (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
    }
}

namespace {

// first-cell-height -> geometric ratio for n cells over length L
double stretch_ratio(double h0, double L, int n) {
  if (h0 <= 0.0 || h0 * n >= L) return 1.0;
  double r_lo = 1.0, r_hi = 2.0;
  auto len = [&](double r) { return h0 * (std::pow(r, n) - 1.0) / (r - 1.0); };
  while (len(r_hi) < L) r_hi *= 1.5;
  for (int it = 0; it < 200; ++it) {
    const double r = 0.5 * (r_lo + r_hi);
    if (len(r) < L)
      r_lo = r;
    else
      r_hi = r;
  }
  return 0.5 * (r_lo + r_hi);
}

} // namespace

SpaceMesh2D annulus_sector_mesh(int ni, int nj, double r_inner, double r_outer, double theta0_deg,
                                double theta1_deg, double first_cell) {
  if (ni < 1 || nj < 1) throw InputError("annulus mesh: need at least one cell per direction");
  if (!(r_outer > r_inner) || !(r_inner > 0.0)) throw InputError("annulus mesh: bad radii");
  SpaceMesh2D mesh;
  mesh.ni = ni;
  mesh.nj = nj;
  mesh.xn.resize(static_cast<std::size_t>(ni + 1) * (nj + 1));
  mesh.yn.resize(static_cast<std::size_t>(ni + 1) * (nj + 1));

  std::vector<double> r(ni + 1);
  const double L = r_outer - r_inner;
  const double ratio = stretch_ratio(first_cell, L, ni);
  if (ratio == 1.0) {
    for (int i = 0; i <= ni; ++i) r[i] = r_inner + L * i / ni;
  } else {
    const double h0 = L * (ratio - 1.0) / (std::pow(ratio, ni) - 1.0);
    r[0] = r_inner;
    double h = h0;
    for (int i = 1; i <= ni; ++i) {
      r[i] = r[i - 1] + h;
      h *= ratio;
    }
    r[ni] = r_outer;
  }
  for (int i = 0; i <= ni; ++i)
    for (int j = 0; j <= nj; ++j) {
      const double th = (theta0_deg + (theta1_deg - theta0_deg) * j / nj) * M_PI / 180.0;
      mesh.xn[mesh.node(i, j)] = r[i] * std::cos(th);
      mesh.yn[mesh.node(i, j)] = r[i] * std::sin(th);
    }
  mesh.build_metrics();

  // angle from the stagnation point (the ray opposite the oncoming flow,
  // at 180 degrees) per wall cell
  mesh.wall_param.resize(nj);
  mesh.wall_param_name = "theta_deg";
  for (int j = 0; j < nj; ++j) {
    const double th = theta0_deg + (theta1_deg - theta0_deg) * (j + 0.5) / nj;
    mesh.wall_param[j] = 180.0 - th;
  }
  return mesh;
}

SpaceMesh2D rectangle_mesh(int ni, int nj, double x0, double x1, double y0, double y1) {
  if (ni < 1 || nj < 1) throw InputError("rectangle mesh: need at least one cell per direction");
  SpaceMesh2D mesh;
  mesh.ni = ni;
  mesh.nj = nj;
  mesh.xn.resize(static_cast<std::size_t>(ni + 1) * (nj + 1));
  mesh.yn.resize(static_cast<std::size_t>(ni + 1) * (nj + 1));
  for (int i = 0; i <= ni; ++i)
    for (int j = 0; j <= nj; ++j) {
      mesh.xn[mesh.node(i, j)] = (x0 * (ni - i) + x1 * i) / ni;
      mesh.yn[mesh.node(i, j)] = (y0 * (nj - j) + y1 * j) / nj;
    }
  mesh.build_metrics();
  mesh.wall_param.resize(nj);
  for (int j = 0; j < nj; ++j)
    mesh.wall_param[j] = 0.5 * (mesh.yn[mesh.node(0, j)] + mesh.yn[mesh.node(0, j + 1)]);
  mesh.wall_param_name = "s_m";
  return mesh;
}

void write_mesh_json(const SpaceMesh2D& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write mesh file: " + path);
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  out << "{\n  \"ni\": " << mesh.ni << ",\n  \"nj\": " << mesh.nj << ",\n  \"nodes\": [";
  for (std::size_t n = 0; n < mesh.xn.size(); ++n) {
    if (n) out << ",";
    if (n % 4 == 0) out << "\n    ";
    out << "[";
    num(mesh.xn[n]);
    out << ",";
    num(mesh.yn[n]);
    out << "]";
  }
  out << "\n  ],\n  \"wall_param_name\": \"" << mesh.wall_param_name << "\",\n  \"wall_param\": [";
  for (std::size_t j = 0; j < mesh.wall_param.size(); ++j) {
    if (j) out << ",";
    num(mesh.wall_param[j]);
  }
  out << "]\n}\n";
}

SpaceMesh2D read_mesh_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mesh file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("mesh file ") + path + ": " + e.what(), 0);
  }
  SpaceMesh2D mesh;
  try {
    mesh.ni = j.at("ni").get<int>();
    mesh.nj = j.at("nj").get<int>();
    const auto& nodes = j.at("nodes");
    mesh.xn.reserve(nodes.size());
    mesh.yn.reserve(nodes.size());
    for (const auto& nd : nodes) {
      mesh.xn.push_back(nd.at(0).get<double>());
      mesh.yn.push_back(nd.at(1).get<double>());
    }
    mesh.wall_param_name = j.value("wall_param_name", std::string("s_m"));
    if (j.contains("wall_param"))
      for (const auto& w : j.at("wall_param")) mesh.wall_param.push_back(w.get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("mesh file ") + path + ": " + e.what(), 0);
  }
  mesh.build_metrics();
  return mesh;
}

} // namespace rarevel
