#include "rarevel/grid_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace rarevel {

namespace {

struct JsonWriter {
  std::ofstream out;
  char buf[64];

  explicit JsonWriter(const std::string& path) : out(path) {
    if (!out) throw InputError("cannot write grid file: " + path);
  }
  void num(double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  }
  void vec(const Vec3& v, int dim) {
    out << "[";
    for (int a = 0; a < dim; ++a) {
      if (a) out << ",";
      num(v[a]);
    }
    out << "]";
  }
};

} // namespace

void write_grid_json(const AmrVelocityGrid& grid, const std::string& path) {
  JsonWriter w(path);
  auto& out = w.out;
  out << "{\n";
  out << "  \"coordinate_system\": \"" << to_string(grid.coord) << "\",\n";
  out << "  \"dim\": " << grid.dim << ",\n";
  out << "  \"root_bounds\": {\"lo\": ";
  w.vec({grid.root_lo[0], grid.root_lo[1], grid.root_lo[2]}, grid.dim);
  out << ", \"hi\": ";
  w.vec({grid.root_hi[0], grid.root_hi[1], grid.root_hi[2]}, grid.dim);
  out << "},\n";
  out << "  \"mode\": \"" << to_string(grid.mode) << "\",\n";
  if (grid.coord == CoordSystem::cylindrical) {
    out << "  \"n_omega\": " << grid.n_omega << ",\n";
    out << "  \"d_omega\": ";
    w.num(grid.d_omega);
    out << ",\n";
  }
  out << "  \"leaves\": [";
  for (std::size_t i = 0; i < grid.leaves.size(); ++i) {
    if (i) out << ",";
    out << "\n    {\"center\": ";
    w.vec(grid.leaf_center(grid.leaves[i]), grid.dim);
    out << ", \"half_width\": ";
    w.vec(grid.leaf_half_width(grid.leaves[i]), grid.dim);
    out << ", \"level\": " << grid.leaves[i].level << "}";
  }
  out << (grid.leaves.empty() ? "],\n" : "\n  ],\n");
  out << "  \"points\": [";
  for (std::size_t q = 0; q < grid.points.size(); ++q) {
    if (q) out << ",";
    if (q % 4 == 0) out << "\n    ";
    w.vec(grid.points[q], grid.dim);
  }
  out << (grid.points.empty() ? "],\n" : "\n  ],\n");
  out << "  \"weights\": [";
  for (std::size_t q = 0; q < grid.weights.size(); ++q) {
    if (q) out << ",";
    if (q % 8 == 0) out << "\n    ";
    w.num(grid.weights[q]);
  }
  out << (grid.weights.empty() ? "]" : "\n  ]");
  if (grid.symmetry_axis >= 0) {
    out << ",\n  \"symmetry_axis\": " << grid.symmetry_axis << ",\n";
    out << "  \"symmetry_pairing\": [";
    for (std::size_t q = 0; q < grid.pairing.size(); ++q) {
      if (q) out << ",";
      if (q % 16 == 0) out << "\n    ";
      out << grid.pairing[q];
    }
    out << (grid.pairing.empty() ? "]" : "\n  ]");
  }
  out << "\n}\n";
  if (!out) throw InputError("failed writing grid file: " + path);
}

AmrVelocityGrid read_grid_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open grid file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("grid file ") + path + ": " + e.what(), 0);
  }

  AmrVelocityGrid grid;
  try {
    const std::string cs = j.at("coordinate_system").get<std::string>();
    if (cs == "cartesian")
      grid.coord = CoordSystem::cartesian;
    else if (cs == "cylindrical")
      grid.coord = CoordSystem::cylindrical;
    else
      throw InputError("grid file: unknown coordinate_system '" + cs + "'");
    grid.dim = j.at("dim").get<int>();
    if (grid.dim < 1 || grid.dim > 3) throw InputError("grid file: bad dim");
    const auto& rb = j.at("root_bounds");
    for (int a = 0; a < grid.dim; ++a) {
      grid.root_lo[a] = rb.at("lo").at(a).get<double>();
      grid.root_hi[a] = rb.at("hi").at(a).get<double>();
    }
    const std::string mode = j.at("mode").get<std::string>();
    grid.mode = mode == "q1" ? QuadMode::q1 : mode == "p0" ? QuadMode::p0 : QuadMode::none;
    if (grid.coord == CoordSystem::cylindrical) {
      grid.n_omega = j.at("n_omega").get<int>();
      grid.d_omega = j.at("d_omega").get<double>();
    }

    // Rebuild the integer lattice from leaf levels: dyadic grids use
    // den = 2^max_level scaled ticks, uniform grids one tick per cell.
    const auto& jleaves = j.at("leaves");
    int max_level = 0;
    for (const auto& jl : jleaves) max_level = std::max(max_level, jl.at("level").get<int>());
    std::array<double, 3> span{};
    for (int a = 0; a < grid.dim; ++a) span[a] = grid.root_hi[a] - grid.root_lo[a];
    for (int a = 0; a < grid.dim; ++a) {
      if (jleaves.empty()) {
        grid.den[a] = 1;
        continue;
      }
      double hw_min = std::numeric_limits<double>::infinity();
      for (const auto& jl : jleaves) hw_min = std::min(hw_min, jl.at("half_width").at(a).get<double>());
      grid.den[a] = std::llround(span[a] / (2.0 * hw_min));
    }
    if (grid.coord == CoordSystem::cylindrical) grid.den[2] = grid.n_omega;
    for (const auto& jl : jleaves) {
      GridLeaf c;
      c.level = jl.at("level").get<int>();
      for (int a = 0; a < grid.dim; ++a) {
        const double ctr = jl.at("center").at(a).get<double>();
        const double hw = jl.at("half_width").at(a).get<double>();
        c.lo[a] = std::llround((ctr - hw - grid.root_lo[a]) / span[a] * grid.den[a]);
        c.size[a] = std::llround(2.0 * hw / span[a] * grid.den[a]);
        if (c.size[a] < 1) throw InputError("grid file: degenerate leaf");
      }
      grid.leaves.push_back(c);
    }

    for (const auto& jp : j.at("points")) {
      Vec3 p{};
      for (int a = 0; a < grid.dim; ++a) p[a] = jp.at(a).get<double>();
      grid.points.push_back(p);
    }
    for (const auto& jw : j.at("weights")) grid.weights.push_back(jw.get<double>());
    if (grid.points.size() != grid.weights.size())
      throw InputError("grid file: points/weights length mismatch");

    if (j.contains("symmetry_pairing")) {
      grid.symmetry_axis = j.value("symmetry_axis", 0);
      for (const auto& jq : j.at("symmetry_pairing"))
        grid.pairing.push_back(jq.get<std::int32_t>());
      if (grid.pairing.size() != grid.points.size())
        throw InputError("grid file: pairing length mismatch");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("grid file ") + path + ": " + e.what(), 0);
  }
  return grid;
}

} // namespace rarevel
