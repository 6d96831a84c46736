#pragma once

#include <string>
#include <string_view>

#include "privcomp/kg.hpp"

namespace privcomp {

/// Writes the fixed prefix block (cc:, rdf:, xsd:) followed by one triple per
/// line in sorted order. Output is a pure function of the triple set.
std::string serialize_turtle(const Graph& graph);

/// Reads the Turtle subset produced by serialize_turtle plus `;`/`,`
/// abbreviations, `a`, comments and `@prefix`/`PREFIX` declarations. Blank
/// nodes, collections, language tags and long strings are rejected with
/// TurtleSyntax.
Graph parse_turtle(std::string_view text);

}  // namespace privcomp
