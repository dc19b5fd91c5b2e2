#pragma once

#include <string>
#include <vector>

#include "rarevel/kinetic.hpp"

namespace rarevel {

/// Structured-mesh array of primitive states, the grid-generation input and
/// solver initialization. Cells are stored row-major with i fastest.
/// vel_dim is the number of velocity components per cell; for axisymmetric
/// fields the second component is the radial velocity u_r.
struct MacroField {
  int ni = 0, nj = 1, nk = 1;
  int vel_dim = 2;
  std::vector<PrimitiveState> cells;
  std::vector<Vec3> centroids; ///< optional, empty when absent

  int cell_count() const { return ni * nj * nk; }
  std::size_t index(int i, int j, int k = 0) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(ni) * (static_cast<std::size_t>(j) +
                                           static_cast<std::size_t>(nj) * k);
  }

  void validate() const;
};

/// Text format: header `dims i_max j_max [k_max]`, then one line per cell:
/// `x y [z] rho u_x u_y [u_z|u_r] T`, i fastest, `#` comments ignored.
MacroField load_macro_field(const std::string& path);
void save_macro_field(const MacroField& field, const std::string& path,
                      const std::string& header_comment = "");

} // namespace rarevel
