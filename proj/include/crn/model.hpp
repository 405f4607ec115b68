#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "crn/matrix.hpp"
#include "crn/polynomial.hpp"

namespace crn {

struct SpeciesId {
  std::size_t index = 0;
  std::string name;
};

/// A complex: the coefficient of every species on one side of a reaction.
/// Stored dense (species count is small). Standard complexes have
/// nonnegative integer entries; generalized networks allow arbitrary reals.
class Complex {
 public:
  Complex() = default;
  explicit Complex(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  const std::vector<double>& coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  double operator[](std::size_t i) const { return coeffs_[i]; }

  bool is_zero() const;
  bool is_integral() const;
  bool is_nonnegative() const;

  bool operator==(const Complex& other) const = default;

 private:
  std::vector<double> coeffs_;
};

struct Reaction {
  Complex reactant;
  Complex product;
  double rate = 0.0;
};

struct StructureReport {
  std::size_t species = 0;
  std::size_t reactions = 0;
  std::size_t complexes = 0;
  std::size_t linkage_classes = 0;
  std::size_t rank = 0;
  long deficiency = 0;
  bool weakly_reversible = false;
};

/// A mass action system: species, reactions and the derived matrices.
///
///   Z  n x c   complex coefficients, one column per distinct complex
///   B  c x r   incidence: -1 at the reactant complex, +1 at the product
///   S  n x r   stoichiometric matrix, S = Z*B
///   L  c x c   Kirchhoff matrix; L(head,tail) = rate, diagonal closes each
///              column to sum exactly to zero
///
/// Immutable after construction; all member operations are pure.
class Network {
 public:
  /// Empty network; only useful as a placeholder inside result structs.
  Network() = default;

  /// Validates and assembles the matrices. Rejects empty reaction lists,
  /// nonpositive rates, reactant==product, duplicate (reactant, product)
  /// pairs, and (in standard mode) non-integer or negative stoichiometry.
  static Network build(std::vector<std::string> species_names, std::vector<Reaction> reactions,
                       bool generalized = false);

  std::size_t num_species() const { return species_.size(); }
  std::size_t num_reactions() const { return reactions_.size(); }
  std::size_t num_complexes() const { return complexes_.size(); }

  const std::vector<SpeciesId>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const std::vector<Complex>& complexes() const { return complexes_; }
  std::size_t reactant_index(std::size_t j) const { return reactant_index_[j]; }
  std::size_t product_index(std::size_t j) const { return product_index_[j]; }

  const Matrix& z() const { return z_; }
  const Matrix& b() const { return b_; }
  const Matrix& s() const { return s_; }
  const Matrix& kirchhoff() const { return l_; }
  bool generalized() const { return generalized_; }

  std::vector<std::string> species_names() const;

  /// v_j(x) = k_j * prod_i x_i^{Z_ij}. Requires x >= 0 (x > 0 when the
  /// network is generalized).
  std::vector<double> mass_action_rates(std::span<const double> x) const;

  /// Complex monomial vector, psi_rho(x) = prod_i x_i^{Z_i,rho}.
  std::vector<double> psi(std::span<const double> x) const;

  /// f(x) = S v(x) as a sparse polynomial vector; coefficientwise identical
  /// to Z L psi(x). Requires integer reactant stoichiometry.
  PolynomialVector vector_field() const;

  /// Evaluates S v(x) numerically.
  std::vector<double> field_at(std::span<const double> x) const;

  StructureReport structure_report() const;

 private:
  std::vector<SpeciesId> species_;
  std::vector<Reaction> reactions_;
  std::vector<Complex> complexes_;
  std::vector<std::size_t> reactant_index_;
  std::vector<std::size_t> product_index_;
  Matrix z_, b_, s_, l_;
  bool generalized_ = false;
};

}  // namespace crn
