// crn: certify local asymptotic stability of mass action networks by
// computing complex balanced reconstructions, plus structure / simulation
// utilities around the same library.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crn/certificate_json.hpp"
#include "crn/dynamics.hpp"
#include "crn/error.hpp"
#include "crn/parser.hpp"
#include "crn/reconstruct.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInconclusive = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw crn::Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw crn::Error("cannot write '" + out_path + "'");
  out << content;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::string vec_to_string(const std::vector<double>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i)
    out += (i ? ", " : "") + crn::format_double(v[i]);
  return out + ")";
}

struct CommonOpts {
  std::string input;
  std::string out_path;
  std::string format = "text";
  double epsilon = 1e-3;
  std::size_t radius = 1;
  int q_target = -1;
  std::string x0_text;
  double t_end = 10.0;
  double dt = 1e-3;
  bool adaptive = false;
  bool simulate_reverse = false;
  std::vector<std::string> extra_complexes;
};

crn::NetworkDocument load_document(const std::string& path) {
  return crn::parse_network(read_file(path));
}

crn::CertifyOptions certify_options(const CommonOpts& opts, const crn::NetworkDocument& doc) {
  crn::CertifyOptions co;
  co.epsilon = opts.epsilon;
  co.radius = opts.radius;
  if (opts.q_target >= 0) co.q_target = static_cast<std::size_t>(opts.q_target);
  if (!opts.x0_text.empty())
    co.x0 = parse_csv_doubles(opts.x0_text);
  else if (doc.x0_hint)
    co.x0 = doc.x0_hint;
  if (doc.equilibrium_hint) co.equilibrium = doc.equilibrium_hint;
  for (const std::string& text : opts.extra_complexes) {
    crn::Polynomial::Exponents e;
    for (double v : parse_csv_doubles(text)) e.push_back(static_cast<int>(v));
    co.extra_candidates.push_back(std::move(e));
  }
  return co;
}

std::string certificate_text(const crn::StabilityCertificate& cert) {
  std::ostringstream os;
  os << "verdict: " << cert.verdict << "\n";
  if (!cert.detail.empty()) os << "detail: " << cert.detail << "\n";
  os << "equilibrium: " << vec_to_string(cert.equilibrium) << "\n";
  os << "conserved laws: q = " << cert.conserved.q << "\n";
  const auto names = cert.network.species_names();
  if (cert.conserved.q > 0) {
    for (std::size_t k = 0; k < cert.conserved.q; ++k)
      os << "  C[:," << k << "] = " << vec_to_string(cert.conserved.c.column(k)) << "\n";
    os << "  free species:";
    for (std::size_t j = 0; j + cert.conserved.q < names.size(); ++j)
      os << " " << names[cert.conserved.permutation[j]];
    os << "; non-free:";
    for (std::size_t j = names.size() - cert.conserved.q; j < names.size(); ++j)
      os << " " << names[cert.conserved.permutation[j]];
    os << "\n";
  }
  if (cert.reconstruction) {
    const auto& rr = *cert.reconstruction;
    os << "D1: " << vec_to_string(rr.d1) << "\n";
    os << "reconstruction (" << rr.recon.num_reactions() << " reactions):\n";
    const auto rnames = rr.recon.species_names();
    for (const auto& rx : rr.recon.reactions())
      os << "  " << crn::complex_to_string(rx.reactant, rnames) << " -> "
         << crn::complex_to_string(rx.product, rnames)
         << " ; k = " << crn::format_double(rx.rate) << "\n";
    if (cert.reverse) {
      os << "reverse reconstruction:\n";
      for (const auto& rx : cert.reverse->net.reactions())
        os << "  " << crn::complex_to_string(rx.reactant, rnames) << " -> "
           << crn::complex_to_string(rx.product, rnames)
           << " ; k = " << crn::format_double(rx.rate) << "\n";
    }
    os << "residuals: dyn_equiv = " << crn::format_double(cert.residual_dyn_equiv)
       << ", complex_balance = " << crn::format_double(cert.residual_complex_balance) << "\n";
  }
  return os.str();
}

int run_info(const CommonOpts& opts) {
  const auto doc = load_document(opts.input);
  const crn::Network net = doc.to_network();
  const crn::StructureReport rep = net.structure_report();
  std::ostringstream os;
  if (!doc.name.empty()) os << "name: " << doc.name << "\n";
  os << "species: " << rep.species << ", reactions: " << rep.reactions
     << ", complexes: " << rep.complexes << "\n";
  os << "linkage classes: " << rep.linkage_classes << ", rank: " << rep.rank
     << ", deficiency: " << rep.deficiency << "\n";
  os << "weakly reversible: " << (rep.weakly_reversible ? "yes" : "no") << "\n";
  const auto cs = crn::find_conserved_matrix(net);
  os << "independent positive conservation laws found: " << cs.q << "\n";
  if (doc.equilibrium_hint) {
    const double balance =
        crn::max_abs(net.b() * net.mass_action_rates(*doc.equilibrium_hint));
    os << "complex balanced at the given equilibrium: "
       << (balance < 1e-8 ? "yes" : "no") << " (|B v| = " << crn::format_double(balance)
       << ")\n";
  }
  write_output(opts.out_path, os.str());
  return kExitOk;
}

int run_conserved(const CommonOpts& opts) {
  const auto doc = load_document(opts.input);
  const crn::Network net = doc.to_network();
  auto cs = crn::find_conserved_matrix(
      net, opts.q_target >= 0 ? std::optional<std::size_t>(opts.q_target) : std::nullopt);
  crn::choose_partition(cs);
  std::ostringstream os;
  os << "q = " << cs.q << "\n";
  const auto names = net.species_names();
  for (std::size_t k = 0; k < cs.q; ++k)
    os << "C[:," << k << "] = " << vec_to_string(cs.c.column(k)) << "\n";
  if (cs.q > 0) {
    os << "free:";
    for (std::size_t j = 0; j + cs.q < names.size(); ++j)
      os << " " << names[cs.permutation[j]];
    os << "\nnon-free:";
    for (std::size_t j = names.size() - cs.q; j < names.size(); ++j)
      os << " " << names[cs.permutation[j]];
    os << "\n";
  }
  write_output(opts.out_path, os.str());
  return kExitOk;
}

int run_equilibrium(const CommonOpts& opts) {
  const auto doc = load_document(opts.input);
  const crn::Network net = doc.to_network();
  std::vector<double> x0(net.num_species(), 1.0);
  if (!opts.x0_text.empty())
    x0 = parse_csv_doubles(opts.x0_text);
  else if (doc.x0_hint)
    x0 = *doc.x0_hint;
  else if (doc.equilibrium_hint)
    x0 = *doc.equilibrium_hint;
  const std::vector<double> xs = crn::newton_equilibrium(net, x0);
  std::ostringstream os;
  os << "equilibrium: " << vec_to_string(xs) << "\n";
  os << "residual |S v(x*)|: " << crn::format_double(crn::max_abs(net.field_at(xs))) << "\n";
  write_output(opts.out_path, os.str());
  return kExitOk;
}

int run_reconstruct(const CommonOpts& opts) {
  const auto doc = load_document(opts.input);
  const crn::Network net = doc.to_network();
  crn::StabilityCertificate cert = crn::certify(net, certify_options(opts, doc));
  cert.network_name = doc.name;
  if (opts.format == "json") {
    write_output(opts.out_path, crn::certificate_to_json(cert).dump(2) + "\n");
  } else {
    write_output(opts.out_path, certificate_text(cert));
  }
  return cert.stable() ? kExitOk : kExitInconclusive;
}

int run_simulate(const CommonOpts& opts) {
  const auto doc = load_document(opts.input);
  const crn::Network net = doc.to_network();
  std::vector<double> x0(net.num_species(), 1.0);
  if (!opts.x0_text.empty())
    x0 = parse_csv_doubles(opts.x0_text);
  else if (doc.x0_hint)
    x0 = *doc.x0_hint;

  crn::IntegrateOptions io;
  io.dt = opts.dt;
  io.adaptive = opts.adaptive;

  if (opts.simulate_reverse) {
    const crn::StabilityCertificate cert = crn::certify(net, certify_options(opts, doc));
    if (!cert.reverse) throw crn::Error("simulate --reverse: no reconstruction available");
    const crn::Network& rev = cert.reverse->net;
    std::vector<double> xr0(rev.num_species());
    for (std::size_t j = 0; j < xr0.size(); ++j) xr0[j] = x0[cert.conserved.permutation[j]];
    crn::LyapunovSpec spec;
    spec.weights = cert.reconstruction->d1;
    spec.indices.resize(xr0.size());
    for (std::size_t j = 0; j < xr0.size(); ++j) spec.indices[j] = j;
    spec.x_star = cert.reconstruction->x_hat_star;
    io.lyapunov = &spec;
    const crn::Trajectory traj = crn::integrate(rev, xr0, opts.t_end, io);
    write_output(opts.out_path, crn::trajectory_csv(traj, rev.species_names()));
    return kExitOk;
  }

  auto cs = crn::find_conserved_matrix(net);
  io.conserved = cs.q > 0 ? &cs.c : nullptr;
  crn::LyapunovSpec spec;
  try {
    const std::vector<double> xs =
        doc.equilibrium_hint ? *doc.equilibrium_hint : crn::newton_equilibrium(net, x0);
    spec = crn::LyapunovSpec::classic(xs);
    io.lyapunov = &spec;
  } catch (const crn::Error&) {
    // no equilibrium, CSV gets nan in the G column
  }
  const crn::Trajectory traj = crn::integrate(net, x0, opts.t_end, io);
  write_output(opts.out_path, crn::trajectory_csv(traj, net.species_names()));
  return kExitOk;
}

int run_verify(const CommonOpts& opts, const std::string& network_path) {
  const nlohmann::json cert = nlohmann::json::parse(read_file(opts.input));
  std::optional<std::string> override_text;
  if (!network_path.empty()) override_text = read_file(network_path);
  const crn::CertificateCheck check = crn::verify_certificate(cert, override_text);
  std::ostringstream os;
  os << "recomputed residuals: dyn_equiv = " << crn::format_double(check.recomputed.dyn_equiv)
     << ", complex_balance = " << crn::format_double(check.recomputed.complex_balance)
     << ", conserved_rows = " << crn::format_double(check.recomputed.lower_rows) << "\n";
  if (check.stored_dyn_equiv != 0.0 || check.stored_complex_balance != 0.0 || check.matches_stored)
    os << "stored residuals " << (check.matches_stored ? "match" : "DIFFER") << "\n";
  os << "within tolerance (1e-8): " << (check.within_tolerance ? "yes" : "NO") << "\n";
  write_output(opts.out_path, os.str());
  return check.within_tolerance ? kExitOk : kExitInconclusive;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"complex balanced reconstruction toolkit for mass action networks"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string verify_network_path;

  auto add_common = [&](CLI::App* cmd, bool needs_input = true) {
    if (needs_input) cmd->add_option("input", opts.input, "network file (.crn)")->required();
    cmd->add_option("--out", opts.out_path, "write output to a file instead of stdout");
    cmd->add_option("--format", opts.format, "text|json|csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
  };

  CLI::App* info = app.add_subcommand("info", "structural summary (linkage classes, rank, deficiency)");
  add_common(info);

  CLI::App* conserved = app.add_subcommand("conserved", "conserved matrix and species partition");
  add_common(conserved);
  conserved->add_option("--q", opts.q_target, "number of conserved columns to aim for");

  CLI::App* equilibrium = app.add_subcommand("equilibrium", "Newton equilibrium in the class of x0");
  add_common(equilibrium);
  equilibrium->add_option("--x0", opts.x0_text, "comma-separated start point");

  CLI::App* reconstruct =
      app.add_subcommand("reconstruct", "full certification pipeline, emits a certificate");
  add_common(reconstruct);
  reconstruct->add_option("--epsilon", opts.epsilon, "bounds on d: epsilon <= d_i <= 1/epsilon");
  reconstruct->add_option("--radius", opts.radius, "candidate complex closure radius (>= 1)");
  reconstruct->add_option("--q", opts.q_target, "number of conserved columns to aim for");
  reconstruct->add_option("--x0", opts.x0_text, "start point for the equilibrium solve");
  reconstruct->add_option("--add-complex", opts.extra_complexes,
                          "extra candidate complex as comma-separated exponents (repeatable)");

  CLI::App* simulate = app.add_subcommand("simulate", "integrate the network (or its reverse reconstruction) to CSV");
  add_common(simulate);
  simulate->add_option("--x0", opts.x0_text, "comma-separated initial state");
  simulate->add_option("--t-end", opts.t_end, "final time");
  simulate->add_option("--dt", opts.dt, "fixed RK4 step");
  simulate->add_flag("--adaptive", opts.adaptive, "embedded 4(5) adaptive stepping");
  simulate->add_flag("--reverse", opts.simulate_reverse,
                     "simulate the reverse reconstruction from the certify pipeline");
  simulate->add_option("--epsilon", opts.epsilon, "reconstruction epsilon (with --reverse)");
  simulate->add_option("--radius", opts.radius, "candidate radius (with --reverse)");

  CLI::App* verify = app.add_subcommand("verify", "recompute the residuals of a certificate");
  verify->add_option("input", opts.input, "certificate file (.json)")->required();
  verify->add_option("network", verify_network_path, "optional .crn overriding the embedded network");
  verify->add_option("--out", opts.out_path, "write output to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (info->parsed()) return run_info(opts);
    if (conserved->parsed()) return run_conserved(opts);
    if (equilibrium->parsed()) return run_equilibrium(opts);
    if (reconstruct->parsed()) return run_reconstruct(opts);
    if (simulate->parsed()) return run_simulate(opts);
    if (verify->parsed()) return run_verify(opts, verify_network_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
