#pragma once

#include <optional>
#include <string_view>

#include "mebd/linalg.hpp"

namespace mebd {

enum class CouplingKind {
  AllPairsDipolar,  // D_ij = 1 / |i - j|^3
  NearestNeighbor,  // D_ij = 1 iff j = i + 1
};

/// "all-pairs" / "nearest-neighbor".
std::string_view to_string(CouplingKind kind) noexcept;
std::optional<CouplingKind> parse_coupling_kind(std::string_view text) noexcept;

struct CouplingProfile {
  CouplingKind kind = CouplingKind::AllPairsDipolar;
  int n_sites = 0;

  /// D_ij in units of the nearest-neighbor coupling; sites are one-based.
  [[nodiscard]] double coupling(int i, int j) const noexcept;
};

struct Hamiltonian {
  ComplexMatrix matrix;
  CouplingProfile profile;
};

/// Secular dipolar Hamiltonian sum_{i<j} D_ij (I_x I_x + I_y I_y - 2 I_z I_z)
/// with I = Pauli / 2 and |1> the excited (spin-down) state. Throws BadSize
/// unless 2 <= n_sites <= 12.
Hamiltonian build_hdz(int n_sites, CouplingKind kind = CouplingKind::AllPairsDipolar);

/// Total z-projection: (n_sites - 2k) / 2 on a label with k excitations.
ComplexMatrix total_iz(int n_sites);

/// max |[H, I_z]| entry.
double verify_iz_commutation(const ComplexMatrix& h);
double verify_iz_commutation(const Hamiltonian& h);

}  // namespace mebd
