#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crn/model.hpp"

namespace crn {

/// Parsed form of a .crn file before matrix assembly.
struct NetworkDocument {
  std::string name;
  std::vector<std::string> species;  // declared order, or first-appearance order
  std::vector<Reaction> reactions;
  std::optional<std::vector<double>> equilibrium_hint;
  std::optional<std::vector<double>> x0_hint;
  bool generalized = false;

  Network to_network() const { return Network::build(species, reactions, generalized); }
};

/// Parses the reaction DSL. One reaction per line:
///
///   complex "->" complex ";" "k" "=" number
///   complex "<->" complex ";" "k" "=" kf "," kr     (expands to two lines)
///   complex := term ("+" term)* | "0"
///   term    := [coefficient] species
///
/// '#' starts a comment. Optional headers (before any reaction):
///   @name = ...            @species = A, B, C
///   @equilibrium = (...)   @x0 = (...)            @generalized
///
/// Species not declared via @species are registered in order of first
/// appearance. Negative or fractional coefficients need @generalized.
NetworkDocument parse_network(const std::string& text);

/// Inverse of parse_network on the matrix level:
/// parse_network(serialize_network(net)).to_network() rebuilds identical
/// Z, B, S and L. Numbers are printed with the shortest digit string that
/// round-trips to the same double.
std::string serialize_network(const Network& net, std::string_view name = {});

/// Shortest decimal string that strtod parses back to exactly v.
std::string format_double(double v);

std::string complex_to_string(const Complex& cpx, const std::vector<std::string>& species_names);

}  // namespace crn
