#include "mebd/model.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>

#include "mebd/error.hpp"
#include "mebd/hilbert.hpp"

namespace mebd {

std::string_view to_string(CouplingKind kind) noexcept {
  switch (kind) {
    case CouplingKind::AllPairsDipolar: return "all-pairs";
    case CouplingKind::NearestNeighbor: return "nearest-neighbor";
  }
  return "unknown";
}

std::optional<CouplingKind> parse_coupling_kind(std::string_view text) noexcept {
  if (text == "all-pairs") return CouplingKind::AllPairsDipolar;
  if (text == "nearest-neighbor") return CouplingKind::NearestNeighbor;
  return std::nullopt;
}

double CouplingProfile::coupling(int i, int j) const noexcept {
  const int distance = std::abs(i - j);
  if (distance == 0) return 0.0;
  if (kind == CouplingKind::NearestNeighbor) return distance == 1 ? 1.0 : 0.0;
  return 1.0 / (static_cast<double>(distance) * distance * distance);
}

Hamiltonian build_hdz(int n_sites, CouplingKind kind) {
  if (n_sites < 2 || n_sites > kMaxSites)
    throw Error(ErrorKind::BadSize, "chain length " + std::to_string(n_sites) + " outside 2.." +
                                        std::to_string(kMaxSites));
  Hamiltonian h{ComplexMatrix(std::size_t{1} << n_sites), CouplingProfile{kind, n_sites}};
  const std::size_t dim = h.matrix.dim();
  for (int i = 1; i <= n_sites; ++i) {
    for (int j = i + 1; j <= n_sites; ++j) {
      const double d = h.profile.coupling(i, j);
      if (d == 0.0) continue;
      const std::size_t bit_i = std::size_t{1} << (n_sites - i);
      const std::size_t bit_j = std::size_t{1} << (n_sites - j);
      for (std::size_t x = 0; x < dim; ++x) {
        const bool ei = (x & bit_i) != 0;
        const bool ej = (x & bit_j) != 0;
        // -2 I_z I_z: -1/2 for aligned spins, +1/2 for anti-aligned.
        h.matrix(x, x) += d * (ei == ej ? -0.5 : 0.5);
        // I_x I_x + I_y I_y = (I+ I- + I- I+) / 2 flips an anti-aligned pair.
        if (ei != ej) h.matrix(x ^ bit_i ^ bit_j, x) += 0.5 * d;
      }
    }
  }
  return h;
}

ComplexMatrix total_iz(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxSites)
    throw Error(ErrorKind::BadSize, "register size " + std::to_string(n_sites));
  ComplexMatrix iz(std::size_t{1} << n_sites);
  for (std::size_t x = 0; x < iz.dim(); ++x)
    iz(x, x) = 0.5 * (n_sites - 2 * std::popcount(x));
  return iz;
}

double verify_iz_commutation(const ComplexMatrix& h) {
  if (!std::has_single_bit(h.dim()) || h.dim() < 2)
    throw Error(ErrorKind::DimensionMismatch, "dimension is not a power of two");
  const int n = std::countr_zero(h.dim());
  const ComplexMatrix iz = total_iz(n);
  return max_abs_diff(h * iz, iz * h);
}

double verify_iz_commutation(const Hamiltonian& h) { return verify_iz_commutation(h.matrix); }

}  // namespace mebd
