// Shared fixtures for the test suites: Table 1 networks and their published
// reconstruction triples, a deterministic random-network generator, and
// small independent oracles (minor-based rank) used to cross-check the
// production linear algebra.
#pragma once

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "crn/conservation.hpp"
#include "crn/matrix.hpp"
#include "crn/model.hpp"
#include "crn/parser.hpp"

namespace testsupport {

inline std::string data_path(const std::string& name) {
  return std::string(CRN_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline crn::NetworkDocument load_document(const std::string& name) {
  return crn::parse_network(read_file(data_path(name)));
}

inline crn::Network load_network(const std::string& name) {
  return load_document(name).to_network();
}

inline std::uint64_t test_seed() {
  if (const char* env = std::getenv("CRN_SEED")) return std::strtoull(env, nullptr, 10);
  return 20250808;
}

// ---------------------------------------------------------------------------
// Independent oracles (kept free of the production rref/nullspace paths).

inline double minor_det(const crn::Matrix& m, const std::vector<std::size_t>& rows,
                        const std::vector<std::size_t>& cols) {
  const std::size_t k = rows.size();
  if (k == 1) return m(rows[0], cols[0]);
  double det = 0.0;
  double sign = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
    std::vector<std::size_t> sub_cols;
    for (std::size_t l = 0; l < k; ++l)
      if (l != j) sub_cols.push_back(cols[l]);
    det += sign * m(rows[0], cols[j]) * minor_det(m, sub_rows, sub_cols);
    sign = -sign;
  }
  return det;
}

inline void subsets_of(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> pick(k);
  std::vector<std::size_t> stack;
  // iterative lexicographic enumeration
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  if (k > n) return;
  while (true) {
    out.push_back(pick);
    std::size_t i = k;
    while (i-- > 0) {
      if (pick[i] + (k - i) <= n - 1 + 0) {
        ++pick[i];
        for (std::size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
  }
}

/// Exhaustive rank: the largest k with a k x k minor above tolerance.
inline std::size_t minor_rank(const crn::Matrix& m, double tol = 1e-9) {
  if (m.empty()) return 0;
  const double scale = std::max(m.max_abs(), 1.0);
  const std::size_t kmax = std::min(m.rows(), m.cols());
  for (std::size_t k = kmax; k >= 1; --k) {
    std::vector<std::vector<std::size_t>> row_sets, col_sets;
    subsets_of(m.rows(), k, row_sets);
    subsets_of(m.cols(), k, col_sets);
    for (const auto& rs : row_sets)
      for (const auto& cs : col_sets)
        if (std::fabs(minor_det(m, rs, cs)) > tol * scale) return k;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Random small networks for property suites.

inline crn::Network random_network(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> species_dist(1, 4);
  const int n = species_dist(rng);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("X" + std::to_string(i + 1));

  std::uniform_int_distribution<int> coeff_dist(0, 2);
  std::uniform_int_distribution<int> pool_dist(2, 5);
  std::vector<crn::Complex> pool;
  const int pool_target = pool_dist(rng);
  int guard = 0;
  while (static_cast<int>(pool.size()) < pool_target && guard++ < 100) {
    std::vector<double> coeffs(n);
    for (int i = 0; i < n; ++i) coeffs[i] = coeff_dist(rng);
    crn::Complex cpx(coeffs);
    bool duplicate = false;
    for (const auto& existing : pool) duplicate |= existing == cpx;
    if (!duplicate) pool.push_back(std::move(cpx));
  }

  std::uniform_int_distribution<int> rate_dist(1, 16);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> count_dist(1, 5);
  std::vector<crn::Reaction> reactions;
  std::vector<std::pair<std::size_t, std::size_t>> used;
  const int want = count_dist(rng);
  guard = 0;
  while (static_cast<int>(reactions.size()) < want && guard++ < 200) {
    const std::size_t tail = pick(rng);
    const std::size_t head = pick(rng);
    if (tail == head) continue;
    bool duplicate = false;
    for (const auto& [t, h] : used) duplicate |= (t == tail && h == head);
    if (duplicate) continue;
    used.emplace_back(tail, head);
    reactions.push_back({pool[tail], pool[head], rate_dist(rng) / 4.0});
  }
  if (reactions.empty()) reactions.push_back({pool[0], pool[1], 1.0});
  return crn::Network::build(names, reactions);
}

// ---------------------------------------------------------------------------
// Published Table 1 reconstruction triples.

struct PublishedTriple {
  crn::Network net;
  std::vector<double> equilibrium;
  crn::ConservedStructure cs;
  std::vector<double> d1;
  crn::Network recon;
};

inline crn::ConservedStructure structure_from_columns(
    const std::vector<std::vector<double>>& columns, std::vector<std::size_t> permutation) {
  crn::ConservedStructure cs;
  cs.c = crn::Matrix::from_columns(columns);
  cs.q = columns.size();
  crn::apply_partition(cs, std::move(permutation));
  return cs;
}

inline PublishedTriple published_row1() {
  PublishedTriple t;
  t.net = load_network("table1_row1.crn");
  t.equilibrium = {1.0, 2.0};
  t.cs = structure_from_columns({{1.0, 1.0}}, {0, 1});
  t.d1 = {0.01};
  t.recon = crn::Network::build(
      {"Xh1"}, {{crn::Complex({1.0}), crn::Complex({0.0}), 0.01},
                {crn::Complex({0.0}), crn::Complex({1.0}), 0.008},
                {crn::Complex({0.0}), crn::Complex({2.0}), 0.011},
                {crn::Complex({2.0}), crn::Complex({0.0}), 0.009}});
  return t;
}

inline PublishedTriple published_row2() {
  PublishedTriple t;
  t.net = load_network("table1_row2.crn");
  t.equilibrium = {1.0, 1.0};
  t.cs = structure_from_columns({{1.0, 1.0}}, {0, 1});
  t.d1 = {0.01};
  t.recon = crn::Network::build({"Xh1"}, {{crn::Complex({2.0}), crn::Complex({1.0}), 0.02},
                                          {crn::Complex({1.0}), crn::Complex({2.0}), 0.02}});
  return t;
}

inline PublishedTriple published_row4() {
  PublishedTriple t;
  t.net = load_network("table1_row4.crn");
  t.equilibrium = {0.5, 0.5, 0.5};
  t.cs = structure_from_columns({{1.0, 1.0, 2.0}, {1.0, 2.0, 3.0}}, {0, 1, 2});
  t.d1 = {0.01};
  t.recon = crn::Network::build({"Xh1"}, {{crn::Complex({1.0}), crn::Complex({0.0}), 0.04},
                                          {crn::Complex({0.0}), crn::Complex({1.0}), 0.02}});
  return t;
}

}  // namespace testsupport
