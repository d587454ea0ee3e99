#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mebd/linalg.hpp"

namespace mebd {

inline constexpr int kMaxSites = 12;

/// Subset of the sites 1..n_sites of a register.
///
/// Bit (s - 1) of mask() marks site s. Basis indices use the opposite order
/// (site 1 is the most significant bit), see index_mask().
class SiteSet {
 public:
  SiteSet() = default;
  SiteSet(int n_sites, std::uint32_t mask);

  /// One-based site numbers. Throws BadPartition on out-of-range or repeated sites.
  static SiteSet from_sites(int n_sites, std::span<const int> sites);
  static SiteSet full(int n_sites);

  [[nodiscard]] int n_sites() const noexcept { return n_sites_; }
  [[nodiscard]] std::uint32_t mask() const noexcept { return mask_; }
  [[nodiscard]] int size() const noexcept;
  [[nodiscard]] bool empty() const noexcept { return mask_ == 0; }
  [[nodiscard]] bool contains(int site) const noexcept;
  [[nodiscard]] SiteSet complement() const noexcept;
  [[nodiscard]] std::vector<int> sites() const;

  /// Same set expressed as a mask over basis-index bits.
  [[nodiscard]] std::uint32_t index_mask() const noexcept;

  /// Renumber this set relative to `within` (which must contain it): the k-th
  /// site of `within` becomes site k of a |within|-site register.
  [[nodiscard]] SiteSet relative_to(const SiteSet& within) const;

  /// "1,2,4" style listing.
  [[nodiscard]] std::string to_string(std::string_view separator = ",") const;

  friend auto operator<=>(const SiteSet&, const SiteSet&) = default;

 private:
  int n_sites_ = 0;
  std::uint32_t mask_ = 0;
};

/// |n_1 ... n_N> occupation label; '1' marks an excited site.
class BasisLabel {
 public:
  /// Throws BadLabel on empty input, non-binary characters or more than kMaxSites sites.
  explicit BasisLabel(std::string bits);

  [[nodiscard]] const std::string& bits() const noexcept { return bits_; }
  [[nodiscard]] int n_sites() const noexcept { return static_cast<int>(bits_.size()); }
  [[nodiscard]] int excitations() const noexcept;

  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;

 private:
  std::string bits_;
};

/// Site 1 is the most significant digit: "100" -> 4, "010" -> 2.
std::size_t basis_index(const BasisLabel& label);
BasisLabel label_of(std::size_t index, int n_sites);

/// Unit-trace Hermitian operator on the 2^n_sites product basis of a register.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Throws DimensionMismatch if the matrix is not 2^n_sites square.
  DensityMatrix(int n_sites, ComplexMatrix matrix);

  [[nodiscard]] int n_sites() const noexcept { return n_sites_; }
  [[nodiscard]] std::size_t dim() const noexcept { return matrix_.dim(); }
  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return matrix_; }
  [[nodiscard]] const cplx& operator()(std::size_t r, std::size_t c) const noexcept {
    return matrix_(r, c);
  }

 private:
  int n_sites_ = 0;
  ComplexMatrix matrix_;
};

inline constexpr double kNormalizationTolerance = 1e-10;

DensityMatrix pure_density(const BasisLabel& label);
/// Amplitudes over the product basis; length must be a power of two. Throws NotNormalized.
DensityMatrix pure_density(std::span<const cplx> amplitudes);

/// Reduce onto `keep`; kept sites are renumbered 1..|keep| in ascending order.
DensityMatrix partial_trace(const DensityMatrix& rho, const SiteSet& keep);

/// Transpose the indices belonging to `subset`.
ComplexMatrix partial_transpose(const DensityMatrix& rho, const SiteSet& subset);

/// Basis indices with exactly k excited sites, ascending.
std::vector<std::size_t> excitation_sector(int n_sites, int k);

/// Largest |rho(r, c)| over entries whose row and column differ in excitation number.
double off_sector_weight(const ComplexMatrix& rho);

enum class SpectrumPath {
  Naive,    // eigensolve of the full partial transpose
  Blocked,  // per-block eigensolve; requires rho to commute with total I_z
  Auto,     // Blocked when off_sector_weight(rho) <= kSectorTolerance, else Naive
};

inline constexpr double kSectorTolerance = 1e-12;

/// Spectrum of rho^{T_subset}, ascending.
///
/// For rho commuting with total I_z the partial transpose only couples basis
/// states with equal (excitations on subset) - (excitations off subset), so
/// the blocked path diagonalizes those blocks independently. Block rows whose
/// entries all fall below 1e-15 in magnitude are dropped and reported as 0.
std::vector<double> partial_transpose_spectrum(const DensityMatrix& rho, const SiteSet& subset,
                                               SpectrumPath path = SpectrumPath::Auto);

}  // namespace mebd
