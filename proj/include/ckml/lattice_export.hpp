#pragma once

#include <string>
#include <string_view>

#include "ckml/lattice.hpp"

namespace ckml {

enum class LatticeFormat { Dot, Structured, AsciiHasse };

/// Parses "dot", "structured" (alias "json") or "ascii-hasse"; throws
/// InputError for anything else.
LatticeFormat parse_lattice_format(std::string_view name);

/// Deterministic text rendering of a lattice.
///
/// - Dot: a Graphviz digraph with one node per concept (labelled with the
///   objects and attributes it introduces) and one edge per cover pair,
///   drawn bottom to top.
/// - Structured: JSON with `concepts[]` ({id, extent, intent}), `order[]`
///   (cover pairs {lower, upper}) and `labels{}` ({objects, attributes} maps
///   from names to concept ids).
/// - AsciiHasse: one line per concept in id order,
///   `<id> ^ <upper cover ids> | <extent> | <intent>`.
std::string export_lattice(const ConceptLattice& lat, LatticeFormat format);

}  // namespace ckml
