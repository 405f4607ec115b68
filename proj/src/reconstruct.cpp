#include "crn/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "crn/dynamics.hpp"
#include "crn/error.hpp"
#include "crn/lp.hpp"

namespace crn {

namespace {

constexpr double kEquilibriumTol = 1e-8;
constexpr double kPruneTol = 1e-9;

std::vector<std::string> fresh_species_names(std::size_t count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t i = 0; i < count; ++i) names.push_back("Xh" + std::to_string(i + 1));
  return names;
}

std::vector<double> permuted_free_part(const ConservedStructure& cs,
                                       const std::vector<double>& x) {
  const std::size_t p = x.size() - cs.q;
  std::vector<double> out(p);
  for (std::size_t j = 0; j < p; ++j) out[j] = x[cs.permutation[j]];
  return out;
}

double psi_value(const Polynomial::Exponents& e, const std::vector<double>& x) {
  double value = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int k = 0; k < e[i]; ++k) value *= x[i];
  return value;
}

}  // namespace

PolynomialVector substituted_field(const Network& net, const ConservedStructure& cs,
                                   const std::vector<double>& x_star) {
  if (x_star.size() != net.num_species())
    throw Error("substituted_field: equilibrium length mismatch");
  const double residual = max_abs(net.field_at(x_star));
  if (residual >= kEquilibriumTol)
    throw Error("substituted_field: x* is not an equilibrium (|S v(x*)| = " +
                std::to_string(residual) + ")");

  const PolynomialVector field = net.vector_field();
  const std::size_t p = net.num_species() - cs.q;
  PolynomialVector permuted;
  permuted.reserve(p);
  for (std::size_t i = 0; i < p; ++i)
    permuted.push_back(reorder_variables(field[cs.permutation[i]], cs.permutation));
  if (cs.q == 0) return permuted;

  const AffineSubstitution sub = substitution_map(cs, x_star);
  PolynomialVector g;
  g.reserve(p);
  for (const Polynomial& poly : permuted)
    g.push_back(substitute_affine(poly, sub.targets, sub.exprs));
  return g;
}

CandidateComplexSet default_candidates(const PolynomialVector& g, std::size_t radius) {
  if (radius < 1) throw Error("default_candidates: radius must be >= 1");
  if (g.empty()) throw Error("default_candidates: empty field");
  const std::size_t p = g[0].nvars();

  std::set<Polynomial::Exponents> base;
  base.insert(Polynomial::Exponents(p, 0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (const auto& [e, c] : g[i].terms()) {
      base.insert(e);
      Polynomial::Exponents shifted = e;
      if (c > 0.0) {
        shifted[i] += 1;
        base.insert(shifted);
      } else if (e[i] >= 1) {
        shifted[i] -= 1;
        base.insert(shifted);
      }
    }
  }

  std::set<Polynomial::Exponents> closure = base;
  std::set<Polynomial::Exponents> frontier = base;
  for (std::size_t step = 1; step < radius; ++step) {
    std::set<Polynomial::Exponents> next;
    for (const auto& m : frontier) {
      for (std::size_t i = 0; i < p; ++i) {
        Polynomial::Exponents up = m;
        up[i] += 1;
        if (closure.insert(up).second) next.insert(up);
        if (m[i] >= 1) {
          Polynomial::Exponents down = m;
          down[i] -= 1;
          if (closure.insert(down).second) next.insert(down);
        }
      }
    }
    frontier = std::move(next);
  }

  CandidateComplexSet out;
  out.complexes.assign(closure.begin(), closure.end());
  out.zc = Matrix(p, out.complexes.size());
  for (std::size_t j = 0; j < out.complexes.size(); ++j)
    for (std::size_t i = 0; i < p; ++i) out.zc(i, j) = out.complexes[j][i];
  return out;
}

P1Outcome solve_p1(const PolynomialVector& g, const CandidateComplexSet& candidates,
                   const std::vector<double>& x_hat_star, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("solve_p1: epsilon must lie in (0, 1)");
  const std::size_t p = g.size();
  const std::size_t chat = candidates.size();
  if (x_hat_star.size() != p) throw Error("solve_p1: equilibrium length mismatch");

  std::map<Polynomial::Exponents, std::size_t> index_of;
  for (std::size_t j = 0; j < chat; ++j) index_of[candidates.complexes[j]] = j;
  for (std::size_t i = 0; i < p; ++i)
    for (const auto& [e, c] : g[i].terms())
      if (!index_of.count(e))
        throw Error("solve_p1: field monomial missing from the candidate complex set");

  std::vector<double> psi_star(chat);
  for (std::size_t j = 0; j < chat; ++j)
    psi_star[j] = psi_value(candidates.complexes[j], x_hat_star);

  // Variables: d_1..d_p, then L(rho,pi) for pi-major rho != pi.
  const std::size_t npairs = chat * (chat - 1);
  const std::size_t nvars = p + npairs;
  auto pair_var = [&](std::size_t rho, std::size_t pi) {
    return p + pi * (chat - 1) + (rho < pi ? rho : rho - 1);
  };

  LinearProgram lp;
  lp.objective.assign(nvars, 0.0);
  lp.lower.assign(nvars, 0.0);
  lp.upper.assign(nvars, kLpInfinity);
  for (std::size_t i = 0; i < p; ++i) {
    lp.lower[i] = epsilon;
    lp.upper[i] = 1.0 / epsilon;
  }
  for (std::size_t v = p; v < nvars; ++v) lp.objective[v] = 1.0;

  const std::size_t nrows = p * chat + chat;
  lp.a = Matrix(nrows, nvars);
  lp.b.assign(nrows, 0.0);
  std::size_t row = 0;
  // Coefficient matching: the reconstruction field must equal d_i g_i.
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < chat; ++j, ++row) {
      for (std::size_t rho = 0; rho < chat; ++rho) {
        if (rho == j) continue;
        lp.a(row, pair_var(rho, j)) = candidates.zc(i, rho) - candidates.zc(i, j);
      }
      lp.a(row, i) = -g[i].coeff(candidates.complexes[j]);
    }
  }
  // Complex balance at the reconstruction equilibrium.
  for (std::size_t rho = 0; rho < chat; ++rho, ++row) {
    for (std::size_t pi = 0; pi < chat; ++pi) {
      if (pi == rho) continue;
      lp.a(row, pair_var(rho, pi)) += psi_star[pi];
      lp.a(row, pair_var(pi, rho)) -= psi_star[rho];
    }
  }

  const LPSolution sol = solve_lp(lp);
  P1Outcome out;
  if (sol.status != LPStatus::kOptimal) {
    out.result.candidates = candidates;  // report the set that was tried
    std::ostringstream os;
    os << "reconstruction LP " << to_string(sol.status) << " over " << chat
       << " candidate complexes; a larger candidate radius may help "
          "(infeasibility does not refute reconstructability)";
    out.message = os.str();
    return out;
  }

  ReconstructionResult& rr = out.result;
  rr.candidates = candidates;
  rr.g = g;
  rr.x_hat_star = x_hat_star;
  rr.d1.assign(sol.y.begin(), sol.y.begin() + p);
  rr.objective = sol.objective;

  rr.lhat = Matrix(chat, chat);
  std::vector<Reaction> reactions;
  for (std::size_t pi = 0; pi < chat; ++pi)
    for (std::size_t rho = 0; rho < chat; ++rho) {
      if (rho == pi) continue;
      const double rate = sol.y[pair_var(rho, pi)];
      if (rate <= kPruneTol) continue;
      rr.lhat(rho, pi) = rate;
      std::vector<double> tail(candidates.complexes[pi].begin(), candidates.complexes[pi].end());
      std::vector<double> head(candidates.complexes[rho].begin(), candidates.complexes[rho].end());
      reactions.push_back({Complex(std::move(tail)), Complex(std::move(head)), rate});
    }
  for (std::size_t pi = 0; pi < chat; ++pi) {
    double column_sum = 0.0;
    for (std::size_t rho = 0; rho < chat; ++rho)
      if (rho != pi) column_sum += rr.lhat(rho, pi);
    rr.lhat(pi, pi) = -column_sum;
  }
  if (reactions.empty()) {
    out.message = "reconstruction LP returned no reactions (free-species field vanishes)";
    return out;
  }
  rr.recon = Network::build(fresh_species_names(p), std::move(reactions));

  // Residuals recomputed from the assembled network, not the LP tableau.
  const PolynomialVector recon_field = rr.recon.vector_field();
  rr.residual_dyn_equiv = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    rr.residual_dyn_equiv =
        std::max(rr.residual_dyn_equiv, recon_field[i].max_coeff_diff(g[i].scaled(rr.d1[i])));
  const std::vector<double> balance = rr.recon.kirchhoff() * rr.recon.psi(x_hat_star);
  rr.residual_complex_balance = max_abs(balance);
  out.feasible = true;
  return out;
}

VerificationReport verify_reconstruction(const Network& net, const ConservedStructure& cs,
                                         const std::vector<double>& d1, const Network& recon,
                                         const std::vector<double>& x_star) {
  const std::size_t p = net.num_species() - cs.q;
  if (d1.size() != p) throw Error("verify_reconstruction: d1 length mismatch");
  if (recon.num_species() != p)
    throw Error("verify_reconstruction: reconstruction species count mismatch");

  VerificationReport rep;
  const PolynomialVector g = substituted_field(net, cs, x_star);
  const PolynomialVector recon_field = recon.vector_field();
  for (std::size_t i = 0; i < p; ++i)
    rep.dyn_equiv = std::max(rep.dyn_equiv, recon_field[i].max_coeff_diff(g[i].scaled(d1[i])));

  const std::vector<double> x_hat_star = permuted_free_part(cs, x_star);
  rep.complex_balance = max_abs(recon.kirchhoff() * recon.psi(x_hat_star));

  // Rows of C lie in Ker(S^T), so C^T S v(x) vanishes identically.
  const PolynomialVector field = net.vector_field();
  for (std::size_t k = 0; k < cs.q; ++k) {
    Polynomial lower(net.num_species());
    for (std::size_t i = 0; i < net.num_species(); ++i) lower += field[i].scaled(cs.c(i, k));
    rep.lower_rows = std::max(rep.lower_rows, lower.max_abs_coeff());
  }
  return rep;
}

ReverseReconstruction reverse_reconstruction(const ReconstructionResult& recon) {
  const Network& hat = recon.recon;
  const std::size_t p = hat.num_species();
  std::vector<Reaction> reactions;
  bool generalized = false;
  for (const Reaction& rx : hat.reactions()) {
    std::vector<double> product(p);
    for (std::size_t i = 0; i < p; ++i)
      product[i] = rx.reactant[i] + (rx.product[i] - rx.reactant[i]) / recon.d1[i];
    Complex shifted(std::move(product));
    if (!shifted.is_integral() || !shifted.is_nonnegative()) generalized = true;
    reactions.push_back({rx.reactant, std::move(shifted), rx.rate});
  }
  ReverseReconstruction out;
  out.net = Network::build(hat.species_names(), std::move(reactions), generalized);

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < hat.num_reactions(); ++j)
      out.s_residual =
          std::max(out.s_residual, std::fabs(out.net.s()(i, j) - hat.s()(i, j) / recon.d1[i]));
  return out;
}

StabilityCertificate certify(const Network& net, const CertifyOptions& opts) {
  StabilityCertificate cert;
  cert.network = net;

  if (opts.equilibrium) {
    cert.equilibrium = *opts.equilibrium;
    const double residual = max_abs(net.field_at(cert.equilibrium));
    if (residual >= kEquilibriumTol)
      throw Error("equilibrium stage: supplied equilibrium rejected (|S v| = " +
                  std::to_string(residual) + ")");
  } else {
    std::vector<double> x0 =
        opts.x0 ? *opts.x0 : std::vector<double>(net.num_species(), 1.0);
    try {
      cert.equilibrium = newton_equilibrium(net, std::move(x0));
    } catch (const Error& e) {
      throw Error(std::string("equilibrium stage: ") + e.what());
    }
  }

  cert.conserved = find_conserved_matrix(net, opts.q_target);
  choose_partition(cert.conserved);
  cert.conserved.totals = cert.conserved.q > 0
                              ? cert.conserved.c.transposed() * cert.equilibrium
                              : std::vector<double>{};

  const std::size_t p = net.num_species() - cert.conserved.q;

  // A network that is already complex balanced is its own reconstruction
  // under D = I (only available on the q = 0 path, where no species are
  // eliminated).
  if (cert.conserved.q == 0 && !net.generalized() &&
      max_abs(net.b() * net.mass_action_rates(cert.equilibrium)) < kCertifyResidualTol) {
    ReconstructionResult rr;
    rr.d1.assign(p, 1.0);
    rr.recon = net;
    rr.x_hat_star = cert.equilibrium;
    rr.g = net.vector_field();
    for (std::size_t j = 0; j < net.num_complexes(); ++j) {
      Polynomial::Exponents e(p);
      for (std::size_t i = 0; i < p; ++i)
        e[i] = static_cast<int>(std::nearbyint(net.complexes()[j][i]));
      rr.candidates.complexes.push_back(std::move(e));
    }
    rr.candidates.zc = net.z();
    rr.lhat = net.kirchhoff();
    rr.residual_complex_balance = max_abs(net.kirchhoff() * net.psi(cert.equilibrium));
    rr.residual_dyn_equiv = 0.0;
    rr.objective = 0.0;
    cert.reconstruction = std::move(rr);
    cert.reverse = reverse_reconstruction(*cert.reconstruction);
    cert.d = assemble_d(cert.conserved, cert.reconstruction->d1);
    cert.residual_dyn_equiv = 0.0;
    cert.residual_complex_balance = cert.reconstruction->residual_complex_balance;
    cert.verdict = "locally asymptotically stable";
    cert.detail = "network is complex balanced at x*; D = I";
    return cert;
  }

  const PolynomialVector g = substituted_field(net, cert.conserved, cert.equilibrium);
  CandidateComplexSet candidates = default_candidates(g, opts.radius);
  for (const auto& extra : opts.extra_candidates) {
    if (extra.size() != p) throw Error("certify: extra candidate has wrong arity");
    if (std::find(candidates.complexes.begin(), candidates.complexes.end(), extra) ==
        candidates.complexes.end())
      candidates.complexes.push_back(extra);
  }
  if (!opts.extra_candidates.empty()) {
    std::sort(candidates.complexes.begin(), candidates.complexes.end());
    candidates.zc = Matrix(p, candidates.complexes.size());
    for (std::size_t j = 0; j < candidates.complexes.size(); ++j)
      for (std::size_t i = 0; i < p; ++i) candidates.zc(i, j) = candidates.complexes[j][i];
  }

  const std::vector<double> x_hat_star = permuted_free_part(cert.conserved, cert.equilibrium);
  P1Outcome outcome;
  try {
    outcome = solve_p1(g, candidates, x_hat_star, opts.epsilon);
  } catch (const Error& e) {
    cert.verdict = "inconclusive";
    cert.detail = std::string("reconstruction stage: ") + e.what();
    return cert;
  }
  if (!outcome.feasible) {
    cert.verdict = "inconclusive";
    cert.detail = outcome.message;
    return cert;
  }

  cert.reconstruction = std::move(outcome.result);
  cert.d = assemble_d(cert.conserved, cert.reconstruction->d1);
  const VerificationReport rep = verify_reconstruction(
      net, cert.conserved, cert.reconstruction->d1, cert.reconstruction->recon, cert.equilibrium);
  cert.reverse = reverse_reconstruction(*cert.reconstruction);
  cert.residual_dyn_equiv = rep.dyn_equiv;
  cert.residual_complex_balance = rep.complex_balance;

  const double worst = std::max({rep.dyn_equiv, rep.complex_balance, rep.lower_rows,
                                 cert.reverse->s_residual});
  if (worst < kCertifyResidualTol) {
    cert.verdict = "locally asymptotically stable";
  } else {
    cert.verdict = "inconclusive";
    cert.detail = "verification residual " + std::to_string(worst) + " exceeds tolerance";
  }
  return cert;
}

}  // namespace crn
