#include "crn/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "crn/error.hpp"

namespace crn {

namespace {

bool valid_species_name(const std::string& name) {
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0]))) return false;
  for (char ch : name)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
  return true;
}

double power_term(double x, double exponent, bool generalized) {
  if (exponent == 0.0) return 1.0;
  if (!generalized) {
    double out = 1.0;
    for (int k = 0; k < static_cast<int>(exponent); ++k) out *= x;
    return out;
  }
  return std::pow(x, exponent);
}

std::string complex_debug(const Complex& cpx, const std::vector<SpeciesId>& species) {
  if (cpx.is_zero()) return "0";
  std::string out;
  for (std::size_t i = 0; i < cpx.size(); ++i) {
    if (cpx[i] == 0.0) continue;
    if (!out.empty()) out += " + ";
    if (cpx[i] != 1.0) out += std::to_string(cpx[i]) + " ";
    out += species[i].name;
  }
  return out;
}

}  // namespace

bool Complex::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

bool Complex::is_integral() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](double c) { return c == std::nearbyint(c); });
}

bool Complex::is_nonnegative() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c >= 0.0; });
}

Network Network::build(std::vector<std::string> species_names, std::vector<Reaction> reactions,
                       bool generalized) {
  if (reactions.empty()) throw Error("network: at least one reaction is required");
  Network net;
  net.generalized_ = generalized;

  std::set<std::string> seen_names;
  for (std::size_t i = 0; i < species_names.size(); ++i) {
    if (!valid_species_name(species_names[i]))
      throw Error("network: invalid species name '" + species_names[i] + "'");
    if (!seen_names.insert(species_names[i]).second)
      throw Error("network: duplicate species name '" + species_names[i] + "'");
    net.species_.push_back({i, species_names[i]});
  }
  const std::size_t n = net.species_.size();

  auto check_complex = [&](const Complex& cpx) {
    if (cpx.size() != n) throw Error("network: complex coefficient length mismatch");
    for (double coeff : cpx.coeffs())
      if (!std::isfinite(coeff)) throw Error("network: non-finite stoichiometric coefficient");
    if (!generalized) {
      if (!cpx.is_nonnegative() || !cpx.is_integral())
        throw Error("network: standard complexes need nonnegative integer stoichiometry "
                    "(use generalized mode for real coefficients)");
    }
  };

  auto intern_complex = [&](const Complex& cpx) -> std::size_t {
    for (std::size_t idx = 0; idx < net.complexes_.size(); ++idx)
      if (net.complexes_[idx] == cpx) return idx;
    net.complexes_.push_back(cpx);
    return net.complexes_.size() - 1;
  };

  for (const Reaction& rx : reactions) {
    check_complex(rx.reactant);
    check_complex(rx.product);
    if (!(rx.rate > 0.0) || !std::isfinite(rx.rate))
      throw Error("network: reaction rate must be positive and finite");
    if (rx.reactant == rx.product)
      throw Error("network: reactant and product complexes are identical (" +
                  complex_debug(rx.reactant, net.species_) + ")");
    const std::size_t tail = intern_complex(rx.reactant);
    const std::size_t head = intern_complex(rx.product);
    for (std::size_t j = 0; j < net.reactant_index_.size(); ++j)
      if (net.reactant_index_[j] == tail && net.product_index_[j] == head)
        throw Error("network: duplicate reaction " + complex_debug(rx.reactant, net.species_) +
                    " -> " + complex_debug(rx.product, net.species_) +
                    " (merge rates explicitly instead)");
    net.reactant_index_.push_back(tail);
    net.product_index_.push_back(head);
  }
  net.reactions_ = std::move(reactions);

  const std::size_t c = net.complexes_.size();
  const std::size_t r = net.reactions_.size();
  net.z_ = Matrix(n, c);
  for (std::size_t rho = 0; rho < c; ++rho)
    for (std::size_t i = 0; i < n; ++i) net.z_(i, rho) = net.complexes_[rho][i];

  net.b_ = Matrix(c, r);
  net.s_ = Matrix(n, r);
  for (std::size_t j = 0; j < r; ++j) {
    net.b_(net.reactant_index_[j], j) = -1.0;
    net.b_(net.product_index_[j], j) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      net.s_(i, j) = net.reactions_[j].product[i] - net.reactions_[j].reactant[i];
  }

  // Diagonal closes each column exactly: the same off-diagonal entries, in
  // the same ascending-row order, summed and negated.
  net.l_ = Matrix(c, c);
  for (std::size_t j = 0; j < r; ++j)
    net.l_(net.product_index_[j], net.reactant_index_[j]) = net.reactions_[j].rate;
  for (std::size_t pi = 0; pi < c; ++pi) {
    double column_sum = 0.0;
    for (std::size_t rho = 0; rho < c; ++rho)
      if (rho != pi) column_sum += net.l_(rho, pi);
    net.l_(pi, pi) = -column_sum;
  }
  return net;
}

std::vector<std::string> Network::species_names() const {
  std::vector<std::string> names;
  names.reserve(species_.size());
  for (const auto& sp : species_) names.push_back(sp.name);
  return names;
}

std::vector<double> Network::mass_action_rates(std::span<const double> x) const {
  if (x.size() != num_species()) throw Error("mass_action_rates: state length mismatch");
  for (double xi : x) {
    if (xi < 0.0) throw Error("mass_action_rates: negative concentration");
    if (generalized_ && xi == 0.0)
      throw Error("mass_action_rates: generalized kinetics require x > 0");
  }
  std::vector<double> v(num_reactions());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const Complex& reactant = reactions_[j].reactant;
    double rate = reactions_[j].rate;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = reactant[i];
      if (e == 0.0) continue;
      if (x[i] == 0.0) {
        rate = 0.0;
        break;
      }
      rate *= power_term(x[i], e, generalized_ || e != std::nearbyint(e));
    }
    v[j] = rate;
  }
  return v;
}

std::vector<double> Network::psi(std::span<const double> x) const {
  if (x.size() != num_species()) throw Error("psi: state length mismatch");
  std::vector<double> out(num_complexes());
  for (std::size_t rho = 0; rho < out.size(); ++rho) {
    double value = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = complexes_[rho][i];
      if (e == 0.0) continue;
      if (x[i] == 0.0) {
        if (e < 0.0) throw Error("psi: negative exponent at zero concentration");
        value = 0.0;
        break;
      }
      value *= power_term(x[i], e, e != std::nearbyint(e) || e < 0.0);
    }
    out[rho] = value;
  }
  return out;
}

PolynomialVector Network::vector_field() const {
  const std::size_t n = num_species();
  PolynomialVector field(n, Polynomial(n));
  for (std::size_t j = 0; j < num_reactions(); ++j) {
    const Complex& reactant = reactions_[j].reactant;
    if (!reactant.is_integral() || !reactant.is_nonnegative())
      throw Error("vector_field: reactant stoichiometry must be nonnegative integers");
    Polynomial::Exponents e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = static_cast<int>(std::nearbyint(reactant[i]));
    const double k = reactions_[j].rate;
    for (std::size_t i = 0; i < n; ++i) {
      const double sij = s_(i, j);
      if (sij == 0.0) continue;
      field[i].add_term(e, k * sij);
    }
  }
  return field;
}

std::vector<double> Network::field_at(std::span<const double> x) const {
  return s_ * mass_action_rates(x);
}

StructureReport Network::structure_report() const {
  StructureReport rep;
  rep.species = num_species();
  rep.reactions = num_reactions();
  rep.complexes = num_complexes();
  rep.rank = crn::rank(s_, 1e-9);

  const std::size_t c = num_complexes();
  std::vector<std::vector<std::size_t>> out_edges(c);
  std::vector<std::vector<std::size_t>> und_edges(c);
  for (std::size_t j = 0; j < num_reactions(); ++j) {
    out_edges[reactant_index_[j]].push_back(product_index_[j]);
    und_edges[reactant_index_[j]].push_back(product_index_[j]);
    und_edges[product_index_[j]].push_back(reactant_index_[j]);
  }

  auto reachable_from = [&](std::size_t start, const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<bool> seen(c, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t w : adj[u])
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
    }
    return seen;
  };

  std::vector<int> component(c, -1);
  std::size_t ncomp = 0;
  for (std::size_t v = 0; v < c; ++v) {
    if (component[v] >= 0) continue;
    const auto seen = reachable_from(v, und_edges);
    for (std::size_t w = 0; w < c; ++w)
      if (seen[w]) component[w] = static_cast<int>(ncomp);
    ++ncomp;
  }
  rep.linkage_classes = ncomp;
  rep.deficiency = static_cast<long>(c) - static_cast<long>(ncomp) - static_cast<long>(rep.rank);

  rep.weakly_reversible = true;
  std::vector<std::vector<bool>> reach(c);
  for (std::size_t v = 0; v < c; ++v) reach[v] = reachable_from(v, out_edges);
  for (std::size_t v = 0; v < c && rep.weakly_reversible; ++v)
    for (std::size_t w = 0; w < c; ++w)
      if (component[v] == component[w] && (!reach[v][w] || !reach[w][v])) {
        rep.weakly_reversible = false;
        break;
      }
  return rep;
}

}  // namespace crn
