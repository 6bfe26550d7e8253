#pragma once

// JSON documents for lattices and bodies.
//   lattice: {"dim": n, "basis": [row-major n*n reals; columns are generators], "radius": r?}
//   body:    {"blocks": [[dim, radius], ...], "scale": s?, "translates": [[...], ...]?}

#include <optional>
#include <string>

#include "latcover/density.hpp"
#include "latcover/lattice.hpp"

namespace latcover {

struct LatticeDocument {
  Lattice lattice;
  std::optional<double> radius;
};

LatticeDocument parse_lattice(const std::string& text);
std::string format_lattice(const Lattice& lat, std::optional<double> radius = std::nullopt);

ProductBody parse_body(const std::string& text);
std::string format_body(const ProductBody& body);

/// Reads a whole file; MalformedInput if it cannot be opened.
std::string read_text_file(const std::string& path);

LatticeDocument load_lattice(const std::string& path);
ProductBody load_body(const std::string& path);

}  // namespace latcover
