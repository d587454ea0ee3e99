#pragma once

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mebd/hilbert.hpp"

namespace mebd {

/// Ordered pair of disjoint, non-empty site sets covering the register.
class Bipartition {
 public:
  /// Throws BadPartition unless the parts are disjoint, non-empty and covering.
  Bipartition(SiteSet part_a, SiteSet part_b);

  [[nodiscard]] const SiteSet& part_a() const noexcept { return part_a_; }
  [[nodiscard]] const SiteSet& part_b() const noexcept { return part_b_; }
  [[nodiscard]] int n_sites() const noexcept { return part_a_.n_sites(); }
  [[nodiscard]] Bipartition swapped() const { return Bipartition(part_b_, part_a_); }

  /// "1,2|3,4"
  [[nodiscard]] std::string to_string() const;

  friend auto operator<=>(const Bipartition&, const Bipartition&) = default;

 private:
  SiteSet part_a_;
  SiteSet part_b_;
};

/// Parses "1,2|3,4" over an n-site register. Throws BadPartition.
Bipartition parse_bipartition(std::string_view spec, int n_sites);

/// Every split of the register into two parts, once each: site 1 always in
/// part_a, ordered by part_a's mask. Size 2^(n-1) - 1.
struct PartitionFamily {
  int n_sites = 0;
  std::vector<Bipartition> partitions;
};

PartitionFamily enumerate_bipartitions(int n_sites);

/// Twice the absolute sum of the negative eigenvalues of rho^{T_A}.
double double_negativity(const DensityMatrix& rho, const Bipartition& p,
                         SpectrumPath path = SpectrumPath::Auto);

/// N_{x,y} of the state reduced onto x U y (no reduction when they cover the register).
double reduced_negativity(const DensityMatrix& rho, const SiteSet& x, const SiteSet& y);

/// N_{a_i,a_j} for a multipartition `parts` of the register.
double pairwise_negativity(const DensityMatrix& rho, std::span<const SiteSet> parts,
                           std::size_t i, std::size_t j);

struct PartitionNegativity {
  Bipartition partition;
  double negativity;
};

struct MebdResult {
  double value;
  Bipartition argmin;  // first minimizer in canonical order
  std::vector<PartitionNegativity> per_partition;
};

/// Minimum double negativity over all bipartitions. Partitions are evaluated
/// on up to `threads` workers (0 = all cores); the result does not depend on it.
MebdResult mebd(const DensityMatrix& rho, int threads = 1);

/// MEBD of the state reduced onto `subsystem`; +infinity for a single site,
/// which has no bipartition.
double subsystem_mebd(const DensityMatrix& rho, const SiteSet& subsystem);

/// min(E(A), E(B), N_{A,B}) for the split j = A|B.
double lower_estimate_1(const DensityMatrix& rho, const Bipartition& j);

/// Deepest meaningful estimator level for an n-site register: max(1, n - 2).
int max_estimate_level(int n_sites) noexcept;

/// Recursive lower estimate E^(level):
///   est_0(S) = E(S),  est_k(S) = max_j min(est_{k-1}(A_j), est_{k-1}(B_j), N_{A_j,B_j}),
/// with single-site subsystems contributing +infinity. Throws BadLevel unless
/// 1 <= level <= max_estimate_level(n).
double lower_estimate_level(const DensityMatrix& rho, int level);

/// min over sites i of N_{s_i, rest}.
double single_node_witness(const DensityMatrix& rho);

}  // namespace mebd
