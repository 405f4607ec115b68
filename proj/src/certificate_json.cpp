#include "crn/certificate_json.hpp"

#include <algorithm>

#include "crn/error.hpp"
#include "crn/parser.hpp"

namespace crn {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows) {
  std::size_t nr = rows.size();
  std::size_t nc = nr == 0 ? 0 : rows.at(0).size();
  Matrix m(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) m(i, j) = rows.at(i).at(j).get<double>();
  return m;
}

json reactions_to_json(const Network& net) {
  json out = json::array();
  for (const Reaction& rx : net.reactions()) {
    json entry;
    entry["reactant"] = rx.reactant.coeffs();
    entry["product"] = rx.product.coeffs();
    entry["rate"] = rx.rate;
    out.push_back(std::move(entry));
  }
  return out;
}

Network network_from_reactions(const json& node, bool generalized) {
  std::vector<std::string> species = node.at("species").get<std::vector<std::string>>();
  std::vector<Reaction> reactions;
  for (const json& entry : node.at("reactions")) {
    Reaction rx;
    rx.reactant = Complex(entry.at("reactant").get<std::vector<double>>());
    rx.product = Complex(entry.at("product").get<std::vector<double>>());
    rx.rate = entry.at("rate").get<double>();
    reactions.push_back(std::move(rx));
  }
  return Network::build(std::move(species), std::move(reactions), generalized);
}

}  // namespace

json certificate_to_json(const StabilityCertificate& cert) {
  json j;
  j["schema"] = "crn-certificate/1";
  j["network"]["name"] = cert.network_name;
  j["network"]["crn"] = serialize_network(cert.network, cert.network_name);
  j["equilibrium"] = cert.equilibrium;
  j["conserved_matrix"] = matrix_to_json(cert.conserved.c);
  j["permutation"] = cert.conserved.permutation;
  j["verdict"] = cert.verdict;
  if (!cert.detail.empty()) j["detail"] = cert.detail;
  if (cert.reconstruction) {
    const ReconstructionResult& rr = *cert.reconstruction;
    j["D"] = matrix_to_json(cert.d.d);
    j["d1"] = rr.d1;
    json rec;
    rec["species"] = rr.recon.species_names();
    json complexes = json::array();
    for (const auto& e : rr.candidates.complexes) complexes.push_back(e);
    rec["complexes"] = std::move(complexes);
    rec["kirchhoff"] = matrix_to_json(rr.lhat);
    rec["reactions"] = reactions_to_json(rr.recon);
    rec["equilibrium"] = rr.x_hat_star;
    rec["objective"] = rr.objective;
    j["reconstruction"] = std::move(rec);
    j["residuals"]["dyn_equiv"] = cert.residual_dyn_equiv;
    j["residuals"]["complex_balance"] = cert.residual_complex_balance;
  }
  if (cert.reverse) {
    json rev;
    rev["species"] = cert.reverse->net.species_names();
    rev["generalized"] = cert.reverse->net.generalized();
    rev["reactions"] = reactions_to_json(cert.reverse->net);
    rev["crn"] = serialize_network(cert.reverse->net);
    j["reverse_reconstruction"] = std::move(rev);
  }
  return j;
}

CertificateCheck verify_certificate(const json& cert,
                                    const std::optional<std::string>& network_text) {
  const std::string crn_text =
      network_text ? *network_text : cert.at("network").at("crn").get<std::string>();
  const Network net = parse_network(crn_text).to_network();

  const auto equilibrium = cert.at("equilibrium").get<std::vector<double>>();
  if (equilibrium.size() != net.num_species())
    throw Error("certificate: equilibrium length does not match the network");

  ConservedStructure cs;
  cs.c = matrix_from_json(cert.value("conserved_matrix", json::array()));
  cs.q = cs.c.cols();
  std::vector<std::size_t> permutation;
  if (cert.contains("permutation"))
    permutation = cert.at("permutation").get<std::vector<std::size_t>>();
  else {
    permutation.resize(net.num_species());
    for (std::size_t i = 0; i < permutation.size(); ++i) permutation[i] = i;
  }
  apply_partition(cs, std::move(permutation));

  if (!cert.contains("reconstruction"))
    throw Error("certificate: no reconstruction to verify");
  const auto d1 = cert.at("d1").get<std::vector<double>>();
  const Network recon = network_from_reactions(cert.at("reconstruction"), false);

  CertificateCheck check;
  check.recomputed = verify_reconstruction(net, cs, d1, recon, equilibrium);
  if (cert.contains("residuals")) {
    check.stored_dyn_equiv = cert.at("residuals").value("dyn_equiv", 0.0);
    check.stored_complex_balance = cert.at("residuals").value("complex_balance", 0.0);
    check.matches_stored = check.recomputed.dyn_equiv == check.stored_dyn_equiv &&
                           check.recomputed.complex_balance == check.stored_complex_balance;
  }
  const double worst = std::max({check.recomputed.dyn_equiv, check.recomputed.complex_balance,
                                 check.recomputed.lower_rows});
  check.within_tolerance = worst < kCertifyResidualTol;
  check.verdict = cert.value("verdict", "");
  return check;
}

}  // namespace crn
