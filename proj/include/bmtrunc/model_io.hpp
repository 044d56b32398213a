#ifndef BMTRUNC_MODEL_IO_HPP
#define BMTRUNC_MODEL_IO_HPP

// YAML model files. Keys may sit at the top level or under `parameters`.
//
//   kind: banded | mg1 | bmap
//   d: <phases>
//   banded: L, U, K_hom, levels (K_hom + 1 maps offset -> matrix),
//           homogeneous (map offset -> matrix)
//   mg1:    B (list), A_down, A (list)
//   bmap:   D (list), optional k_max, mu (number or {table, rule: {base, slope}}), psi
//
// Matrices are row-major lists of rows.

#include "bmtrunc/bmap.hpp"
#include "bmtrunc/model.hpp"

#include <optional>
#include <string>

namespace bmtrunc {

struct LoadedModel {
  ModelPtr model;
  std::string kind;
  std::optional<BmapModel> bmap;                        // kind == bmap
  std::shared_ptr<const ExplicitBandedModel> banded;    // kind == banded or mg1
};

LoadedModel parse_model(const std::string& text);
LoadedModel load_model(const std::string& path);

}  // namespace bmtrunc

#endif  // BMTRUNC_MODEL_IO_HPP
