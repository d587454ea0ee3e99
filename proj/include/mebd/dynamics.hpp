#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mebd/entanglement.hpp"
#include "mebd/hilbert.hpp"
#include "mebd/model.hpp"

namespace mebd {

enum class Quantity {
  Mebd,          // E(S_N)
  E1Fixed,       // E^(1)_j for a fixed split j
  ETilde,        // single-node witness
  PerPartition,  // every canonical bipartition's double negativity
};

/// "mebd", "e1_fixed", "e_tilde", "per_partition"
std::string_view to_string(Quantity q) noexcept;
/// Accepts the to_string forms and their dashed spellings ("e1-fixed").
std::optional<Quantity> parse_quantity(std::string_view text) noexcept;

/// First 2^floor(log2(n - 1)) sites versus the rest: 1|2, 12|3, 12|34, 1234|56, 1234|5678.
Bipartition default_e1_split(int n_sites);

inline constexpr std::size_t kMaxGridPoints = 100000;

struct SweepConfig {
  int n_sites = 2;
  BasisLabel initial_label = BasisLabel("10");
  CouplingKind profile = CouplingKind::AllPairsDipolar;
  double tau_start = 0.0;
  double tau_end = 4.0;
  double tau_step = 0.005;
  std::vector<Quantity> quantities = {Quantity::Mebd, Quantity::E1Fixed, Quantity::ETilde};
  std::optional<Bipartition> e1_split;  // default_e1_split(n_sites) when unset
  int threads = 1;                      // 0 = all cores

  [[nodiscard]] bool wants(Quantity q) const noexcept;
};

/// Throws BadSize, BadLabel, InvalidArgument or GridTooLarge.
void validate(const SweepConfig& cfg);

/// tau_start + i * tau_step for every point not beyond tau_end.
std::vector<double> sweep_grid(const SweepConfig& cfg);

struct SweepRecord {
  double tau = 0.0;
  std::optional<double> mebd;
  std::optional<double> e1_fixed;
  std::optional<double> e_tilde;
  std::vector<double> per_partition;  // enumerate_bipartitions order
  // E of the E1 split's first part; mebd / (2 e_part_a) is the additivity ratio.
  std::optional<double> e_part_a;

  // Conservation diagnostics for rho(tau).
  double trace_error = 0.0;     // |Tr rho - 1|
  double purity_error = 0.0;    // |Tr rho^2 - 1|
  double sector_leakage = 0.0;  // max |rho| outside the initial excitation sector

  [[nodiscard]] std::optional<double> value(Quantity q) const noexcept;
};

/// Pure-state evolution |psi(tau)> = V exp(-i Lambda tau) V^dagger |psi_0> from a
/// single eigendecomposition of H.
class Evolution {
 public:
  Evolution(const Hamiltonian& h, const BasisLabel& initial);

  [[nodiscard]] std::vector<cplx> state(double tau) const;
  [[nodiscard]] DensityMatrix density(double tau) const;
  [[nodiscard]] const SpectralForm& spectrum() const noexcept { return spectrum_; }
  [[nodiscard]] int n_sites() const noexcept { return n_sites_; }

 private:
  int n_sites_;
  SpectralForm spectrum_;
  std::vector<cplx> initial_coefficients_;  // V^dagger |psi_0>
};

/// One record per grid point, ordered by tau. Grid points are spread over
/// cfg.threads workers; records are identical for any worker count.
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg);

enum class MaximumKind { GridPoint, ParabolicRefined };

std::string_view to_string(MaximumKind kind) noexcept;

struct MaximumReport {
  double tau_star = 0.0;
  double value = 0.0;
  MaximumKind kind = MaximumKind::GridPoint;
  std::size_t grid_index = 0;
};

inline constexpr double kDefaultMinPeak = 0.5;

/// First interior grid point that is >= both neighbours and >= min_value,
/// refined by the parabola through it and its neighbours. Throws NoMaximumFound.
MaximumReport find_first_maximum(std::span<const double> taus, std::span<const double> values,
                                 double min_value = kDefaultMinPeak);
MaximumReport find_first_maximum(std::span<const SweepRecord> series, Quantity q,
                                 double min_value = kDefaultMinPeak);

/// tau_star < pi, the optimal end-to-end transfer time in these units.
bool sanity_tau_bound(const MaximumReport& report) noexcept;

}  // namespace mebd
