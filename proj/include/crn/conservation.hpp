#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "crn/matrix.hpp"
#include "crn/model.hpp"
#include "crn/polynomial.hpp"

namespace crn {

/// Conserved matrix C (strictly positive columns spanning part of Ker(S^T))
/// plus the free / non-free species partition.
///
/// `permutation` lists species in analysis order: the n-q free species first
/// (ascending original index), then the q non-free species (ascending).
/// C_l and C_r are the corresponding row blocks of C in that order.
struct ConservedStructure {
  Matrix c;  // n x q, every entry >= 1 after normalization
  std::size_t q = 0;
  std::vector<std::size_t> permutation;  // new index -> original species index
  Matrix c_l;                            // (n-q) x q
  Matrix c_r;                            // q x q, invertible
  std::vector<double> totals;            // C^T x_ref for the analysis context

  std::size_t num_free(std::size_t n) const { return n - q; }
};

/// Finds up to q_target independent strictly positive vectors in Ker(S^T).
/// The first column comes from an LP (xi = N w, xi >= 1, min sum xi); extra
/// columns are positivity-preserving perturbations of it along the kernel
/// basis, kept greedily while they increase rank. q = 0 (not mass-conserved)
/// is a valid outcome, as is a forced q_target of 0. Columns are normalized
/// so their smallest entry is exactly 1. The partition is left unset.
ConservedStructure find_conserved_matrix(const Network& net,
                                         std::optional<std::size_t> q_target = {});

/// Selects the q non-free species by Gaussian elimination with column
/// pivoting on C^T (greedy max-|pivot|; ties keep the lower-indexed species
/// free) and fills permutation / C_l / C_r.
void choose_partition(ConservedStructure& cs);

/// Fills the partition blocks for a caller-chosen permutation (free species
/// first). Throws when C_r is singular.
void apply_partition(ConservedStructure& cs, std::vector<std::size_t> permutation);

struct ReconstructingMatrix {
  Matrix d;     // [[diag(d1), 0], [C_l^T, C_r^T]] over permuted species
  Matrix dinv;  // closed-form inverse, verified against d
  std::vector<double> d1;
};

/// D = [[diag(d), 0], [C_l^T, C_r^T]]; the inverse is assembled from the
/// closed form with blocks diag(1/d), -C_r^{-T} C_l^T diag(1/d), C_r^{-T}
/// and checked against D to 1e-10. All d entries must be positive.
ReconstructingMatrix assemble_d(const ConservedStructure& cs, const std::vector<double>& d);

/// Affine elimination of the non-free species,
/// x_top = C_r^{-T} C_l^T (x*_free - x_free) + x*_top,
/// expressed over the permuted variable order for substitute_affine.
struct AffineSubstitution {
  std::vector<std::size_t> targets;  // permuted indices n-q .. n-1
  std::vector<AffineExpr> exprs;
  std::vector<double> totals;  // C^T x_star
};

AffineSubstitution substitution_map(const ConservedStructure& cs,
                                    const std::vector<double>& x_star);

}  // namespace crn
