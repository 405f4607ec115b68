#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "crn/reconstruct.hpp"

namespace crn {

/// Standalone JSON form of a certificate: embeds the network source text so
/// third parties can recheck every residual from the file alone.
nlohmann::json certificate_to_json(const StabilityCertificate& cert);

struct CertificateCheck {
  VerificationReport recomputed;
  double stored_dyn_equiv = 0.0;
  double stored_complex_balance = 0.0;
  bool matches_stored = false;    // recomputed residuals equal the stored ones
  bool within_tolerance = false;  // recomputed residuals below 1e-8
  std::string verdict;
};

/// Rebuilds the network, conserved structure and reconstruction from a
/// certificate and recomputes the residuals independently. An optional
/// network source overrides the embedded one.
CertificateCheck verify_certificate(const nlohmann::json& cert,
                                    const std::optional<std::string>& network_text = {});

}  // namespace crn
