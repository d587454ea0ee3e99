#include "mebd/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mebd/error.hpp"

namespace mebd {

namespace {

std::uint32_t full_mask(int n_sites) { return (std::uint32_t{1} << n_sites) - 1u; }

void require_register_size(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxSites)
    throw Error(ErrorKind::BadSize, "register size " + std::to_string(n_sites) +
                                        " outside 1.." + std::to_string(kMaxSites));
}

// Basis-index masks for every configuration of `sites` (ascending site order,
// first site most significant), indexed by the reduced label.
std::vector<std::size_t> embed_configurations(const std::vector<int>& sites, int n_sites) {
  const std::size_t count = std::size_t{1} << sites.size();
  const int m = static_cast<int>(sites.size());
  std::vector<std::size_t> out(count, 0);
  for (std::size_t reduced = 0; reduced < count; ++reduced) {
    std::size_t full = 0;
    for (int k = 0; k < m; ++k)
      if ((reduced >> (m - 1 - k)) & 1u) full |= std::size_t{1} << (n_sites - sites[k]);
    out[reduced] = full;
  }
  return out;
}

void require_matching_register(const DensityMatrix& rho, const SiteSet& set) {
  if (set.n_sites() != rho.n_sites())
    throw Error(ErrorKind::DimensionMismatch,
                "site set over " + std::to_string(set.n_sites()) + " sites, state over " +
                    std::to_string(rho.n_sites()));
}

}  // namespace

SiteSet::SiteSet(int n_sites, std::uint32_t mask) : n_sites_(n_sites), mask_(mask) {
  require_register_size(n_sites);
  if (mask > full_mask(n_sites))
    throw Error(ErrorKind::BadPartition, "mask exceeds register of " + std::to_string(n_sites));
}

SiteSet SiteSet::from_sites(int n_sites, std::span<const int> sites) {
  require_register_size(n_sites);
  std::uint32_t mask = 0;
  for (const int s : sites) {
    if (s < 1 || s > n_sites)
      throw Error(ErrorKind::BadPartition, "site " + std::to_string(s) + " outside 1.." +
                                               std::to_string(n_sites));
    const std::uint32_t bit = std::uint32_t{1} << (s - 1);
    if (mask & bit) throw Error(ErrorKind::BadPartition, "site " + std::to_string(s) + " repeated");
    mask |= bit;
  }
  return SiteSet(n_sites, mask);
}

SiteSet SiteSet::full(int n_sites) {
  require_register_size(n_sites);
  return SiteSet(n_sites, full_mask(n_sites));
}

int SiteSet::size() const noexcept { return std::popcount(mask_); }

bool SiteSet::contains(int site) const noexcept {
  return site >= 1 && site <= n_sites_ && ((mask_ >> (site - 1)) & 1u);
}

SiteSet SiteSet::complement() const noexcept {
  SiteSet out = *this;
  out.mask_ = full_mask(n_sites_) & ~mask_;
  return out;
}

std::vector<int> SiteSet::sites() const {
  std::vector<int> out;
  for (int s = 1; s <= n_sites_; ++s)
    if (contains(s)) out.push_back(s);
  return out;
}

std::uint32_t SiteSet::index_mask() const noexcept {
  std::uint32_t out = 0;
  for (int s = 1; s <= n_sites_; ++s)
    if (contains(s)) out |= std::uint32_t{1} << (n_sites_ - s);
  return out;
}

SiteSet SiteSet::relative_to(const SiteSet& within) const {
  if (within.n_sites() != n_sites_ || (mask_ & ~within.mask()) != 0)
    throw Error(ErrorKind::BadPartition, "{" + to_string() + "} not contained in {" +
                                             within.to_string() + "}");
  std::uint32_t mask = 0;
  int k = 0;
  for (const int s : within.sites()) {
    if (contains(s)) mask |= std::uint32_t{1} << k;
    ++k;
  }
  return SiteSet(within.size(), mask);
}

std::string SiteSet::to_string(std::string_view separator) const {
  std::string out;
  for (const int s : sites()) {
    if (!out.empty()) out += separator;
    out += std::to_string(s);
  }
  return out;
}

BasisLabel::BasisLabel(std::string bits) : bits_(std::move(bits)) {
  if (bits_.empty() || static_cast<int>(bits_.size()) > kMaxSites)
    throw Error(ErrorKind::BadLabel, "label length must be 1.." + std::to_string(kMaxSites));
  if (bits_.find_first_not_of("01") != std::string::npos)
    throw Error(ErrorKind::BadLabel, "label '" + bits_ + "' is not a bitstring");
}

int BasisLabel::excitations() const noexcept {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), '1'));
}

std::size_t basis_index(const BasisLabel& label) {
  std::size_t index = 0;
  for (const char ch : label.bits()) index = (index << 1) | static_cast<std::size_t>(ch == '1');
  return index;
}

BasisLabel label_of(std::size_t index, int n_sites) {
  require_register_size(n_sites);
  if (index >= (std::size_t{1} << n_sites))
    throw Error(ErrorKind::BadLabel, "index " + std::to_string(index) + " out of range");
  std::string bits(static_cast<std::size_t>(n_sites), '0');
  for (int s = 1; s <= n_sites; ++s)
    if ((index >> (n_sites - s)) & 1u) bits[static_cast<std::size_t>(s - 1)] = '1';
  return BasisLabel(std::move(bits));
}

DensityMatrix::DensityMatrix(int n_sites, ComplexMatrix matrix)
    : n_sites_(n_sites), matrix_(std::move(matrix)) {
  require_register_size(n_sites);
  if (matrix_.dim() != (std::size_t{1} << n_sites))
    throw Error(ErrorKind::DimensionMismatch, "matrix dimension " + std::to_string(matrix_.dim()) +
                                                  " != 2^" + std::to_string(n_sites));
}

DensityMatrix pure_density(const BasisLabel& label) {
  ComplexMatrix m(std::size_t{1} << label.n_sites());
  const std::size_t i = basis_index(label);
  m(i, i) = 1.0;
  return DensityMatrix(label.n_sites(), std::move(m));
}

DensityMatrix pure_density(std::span<const cplx> amplitudes) {
  const std::size_t dim = amplitudes.size();
  if (dim < 2 || !std::has_single_bit(dim))
    throw Error(ErrorKind::DimensionMismatch,
                "amplitude count " + std::to_string(dim) + " is not a power of two >= 2");
  double norm = 0.0;
  for (const cplx& a : amplitudes) norm += std::norm(a);
  if (std::abs(norm - 1.0) > kNormalizationTolerance)
    throw Error(ErrorKind::NotNormalized, "squared norm " + std::to_string(norm));
  ComplexMatrix m(dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = amplitudes[r] * std::conj(amplitudes[c]);
  return DensityMatrix(std::countr_zero(dim), std::move(m));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const SiteSet& keep) {
  require_matching_register(rho, keep);
  if (keep.empty()) throw Error(ErrorKind::EmptyKeepSet, "nothing to keep");
  const auto kept = embed_configurations(keep.sites(), rho.n_sites());
  const auto traced = embed_configurations(keep.complement().sites(), rho.n_sites());

  ComplexMatrix out(kept.size());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    for (std::size_t c = 0; c < kept.size(); ++c) {
      cplx acc = 0.0;
      for (const std::size_t t : traced) acc += rho(kept[r] | t, kept[c] | t);
      out(r, c) = acc;
    }
  }
  return DensityMatrix(keep.size(), std::move(out));
}

ComplexMatrix partial_transpose(const DensityMatrix& rho, const SiteSet& subset) {
  require_matching_register(rho, subset);
  if (subset.empty()) throw Error(ErrorKind::EmptySubset, "empty transpose subset");
  const std::size_t m = subset.index_mask();
  const std::size_t dim = rho.dim();
  ComplexMatrix out(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const std::size_t swap = (r ^ c) & m;
      out(r, c) = rho(r ^ swap, c ^ swap);
    }
  }
  return out;
}

std::vector<std::size_t> excitation_sector(int n_sites, int k) {
  require_register_size(n_sites);
  if (k < 0 || k > n_sites)
    throw Error(ErrorKind::BadK, "k = " + std::to_string(k) + " outside 0.." +
                                     std::to_string(n_sites));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < (std::size_t{1} << n_sites); ++i)
    if (std::popcount(i) == k) out.push_back(i);
  return out;
}

double off_sector_weight(const ComplexMatrix& rho) {
  double worst = 0.0;
  for (std::size_t r = 0; r < rho.dim(); ++r)
    for (std::size_t c = 0; c < rho.dim(); ++c)
      if (std::popcount(r) != std::popcount(c)) worst = std::max(worst, std::abs(rho(r, c)));
  return worst;
}

namespace {

constexpr double kNegligibleEntry = 1e-15;

std::vector<double> blocked_spectrum(const DensityMatrix& rho, const SiteSet& subset) {
  const int n = rho.n_sites();
  const std::size_t dim = rho.dim();
  const std::size_t m = subset.index_mask();
  const std::size_t rest = static_cast<std::size_t>(full_mask(n)) & ~m;

  // Block label (excitations on subset) - (excitations elsewhere), shifted to 0..2n.
  std::vector<std::vector<std::size_t>> blocks(static_cast<std::size_t>(2 * n + 1));
  for (std::size_t x = 0; x < dim; ++x)
    blocks[static_cast<std::size_t>(std::popcount(x & m) - std::popcount(x & rest) + n)]
        .push_back(x);

  const auto entry = [&](std::size_t r, std::size_t c) {
    const std::size_t swap = (r ^ c) & m;
    return rho(r ^ swap, c ^ swap);
  };

  std::vector<double> spectrum;
  spectrum.reserve(dim);
  std::vector<std::size_t> live;
  for (const auto& block : blocks) {
    live.clear();
    for (const std::size_t r : block) {
      const bool nonzero = std::any_of(block.begin(), block.end(), [&](std::size_t c) {
        return std::abs(entry(r, c)) > kNegligibleEntry;
      });
      if (nonzero) live.push_back(r);
    }
    if (live.empty()) continue;
    ComplexMatrix sub(live.size());
    for (std::size_t i = 0; i < live.size(); ++i)
      for (std::size_t j = 0; j < live.size(); ++j) sub(i, j) = entry(live[i], live[j]);
    const auto values = hermitian_eigenvalues(sub);
    spectrum.insert(spectrum.end(), values.begin(), values.end());
  }
  spectrum.resize(dim, 0.0);
  std::sort(spectrum.begin(), spectrum.end());
  return spectrum;
}

}  // namespace

std::vector<double> partial_transpose_spectrum(const DensityMatrix& rho, const SiteSet& subset,
                                               SpectrumPath path) {
  require_matching_register(rho, subset);
  if (subset.empty()) throw Error(ErrorKind::EmptySubset, "empty transpose subset");
  if (path == SpectrumPath::Auto)
    path = off_sector_weight(rho.matrix()) <= kSectorTolerance ? SpectrumPath::Blocked
                                                               : SpectrumPath::Naive;
  if (path == SpectrumPath::Blocked) return blocked_spectrum(rho, subset);
  return hermitian_eigenvalues(partial_transpose(rho, subset));
}

}  // namespace mebd
