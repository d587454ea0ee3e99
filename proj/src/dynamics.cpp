#include "mebd/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mebd/error.hpp"
#include "mebd/parallel.hpp"

namespace mebd {

std::string_view to_string(Quantity q) noexcept {
  switch (q) {
    case Quantity::Mebd: return "mebd";
    case Quantity::E1Fixed: return "e1_fixed";
    case Quantity::ETilde: return "e_tilde";
    case Quantity::PerPartition: return "per_partition";
  }
  return "unknown";
}

std::optional<Quantity> parse_quantity(std::string_view text) noexcept {
  for (const Quantity q :
       {Quantity::Mebd, Quantity::E1Fixed, Quantity::ETilde, Quantity::PerPartition}) {
    const std::string_view name = to_string(q);
    if (text.size() != name.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < name.size() && same; ++i)
      same = text[i] == name[i] || (name[i] == '_' && text[i] == '-');
    if (same) return q;
  }
  return std::nullopt;
}

std::string_view to_string(MaximumKind kind) noexcept {
  return kind == MaximumKind::GridPoint ? "GridPoint" : "ParabolicRefined";
}

Bipartition default_e1_split(int n_sites) {
  if (n_sites < 2 || n_sites > kMaxSites)
    throw Error(ErrorKind::BadSize, "no default split for " + std::to_string(n_sites) + " sites");
  const auto head = std::bit_floor(static_cast<unsigned>(n_sites - 1));
  const SiteSet a(n_sites, (std::uint32_t{1} << head) - 1u);
  return Bipartition(a, a.complement());
}

bool SweepConfig::wants(Quantity q) const noexcept {
  return std::find(quantities.begin(), quantities.end(), q) != quantities.end();
}

namespace {

std::size_t grid_size(const SweepConfig& cfg) {
  const double span = (cfg.tau_end - cfg.tau_start) / cfg.tau_step;
  if (span + 1.0 > static_cast<double>(kMaxGridPoints))
    throw Error(ErrorKind::GridTooLarge, "grid would hold more than " +
                                             std::to_string(kMaxGridPoints) + " points");
  return static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
}

}  // namespace

void validate(const SweepConfig& cfg) {
  if (cfg.n_sites < 2 || cfg.n_sites > kMaxSites)
    throw Error(ErrorKind::BadSize, "chain length " + std::to_string(cfg.n_sites));
  if (cfg.initial_label.n_sites() != cfg.n_sites)
    throw Error(ErrorKind::BadLabel, "label '" + cfg.initial_label.bits() + "' does not have " +
                                         std::to_string(cfg.n_sites) + " sites");
  if (!std::isfinite(cfg.tau_start) || !std::isfinite(cfg.tau_end) || !std::isfinite(cfg.tau_step))
    throw Error(ErrorKind::InvalidArgument, "non-finite time grid");
  if (cfg.tau_start < 0.0 || cfg.tau_end < cfg.tau_start || cfg.tau_step <= 0.0)
    throw Error(ErrorKind::InvalidArgument, "need 0 <= tau_start <= tau_end and tau_step > 0");
  if (cfg.e1_split && cfg.e1_split->n_sites() != cfg.n_sites)
    throw Error(ErrorKind::BadPartition, "E1 split lives on a different register");
  grid_size(cfg);
}

std::vector<double> sweep_grid(const SweepConfig& cfg) {
  validate(cfg);
  std::vector<double> taus(grid_size(cfg));
  for (std::size_t i = 0; i < taus.size(); ++i)
    taus[i] = cfg.tau_start + static_cast<double>(i) * cfg.tau_step;
  return taus;
}

std::optional<double> SweepRecord::value(Quantity q) const noexcept {
  switch (q) {
    case Quantity::Mebd: return mebd;
    case Quantity::E1Fixed: return e1_fixed;
    case Quantity::ETilde: return e_tilde;
    case Quantity::PerPartition: return std::nullopt;
  }
  return std::nullopt;
}

Evolution::Evolution(const Hamiltonian& h, const BasisLabel& initial)
    : n_sites_(h.profile.n_sites), spectrum_(hermitian_eig(h.matrix)) {
  if (initial.n_sites() != n_sites_)
    throw Error(ErrorKind::BadLabel, "initial label does not match the chain length");
  const std::size_t idx = basis_index(initial);
  const std::size_t dim = spectrum_.vectors.dim();
  initial_coefficients_.resize(dim);
  for (std::size_t k = 0; k < dim; ++k)
    initial_coefficients_[k] = std::conj(spectrum_.vectors(idx, k));
}

std::vector<cplx> Evolution::state(double tau) const {
  const std::size_t dim = spectrum_.vectors.dim();
  std::vector<cplx> rotated(dim);
  for (std::size_t k = 0; k < dim; ++k)
    rotated[k] = std::polar(1.0, -spectrum_.eigenvalues[k] * tau) * initial_coefficients_[k];
  std::vector<cplx> psi(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) acc += spectrum_.vectors(r, k) * rotated[k];
    psi[r] = acc;
  }
  return psi;
}

DensityMatrix Evolution::density(double tau) const {
  const auto psi = state(tau);
  ComplexMatrix rho(psi.size());
  for (std::size_t r = 0; r < psi.size(); ++r)
    for (std::size_t c = 0; c < psi.size(); ++c) rho(r, c) = psi[r] * std::conj(psi[c]);
  return DensityMatrix(n_sites_, std::move(rho));
}

namespace {

void fill_diagnostics(SweepRecord& rec, const DensityMatrix& rho, int sector) {
  const std::size_t dim = rho.dim();
  double purity = 0.0;
  double leakage = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    const bool row_in = std::popcount(r) == sector;
    for (std::size_t c = 0; c < dim; ++c) {
      const double mag = std::abs(rho(r, c));
      purity += mag * mag;
      if (!row_in || std::popcount(c) != sector) leakage = std::max(leakage, mag);
    }
  }
  rec.trace_error = std::abs(rho.matrix().trace() - 1.0);
  rec.purity_error = std::abs(purity - 1.0);
  rec.sector_leakage = leakage;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  const std::vector<double> taus = sweep_grid(cfg);
  const Evolution evolution(build_hdz(cfg.n_sites, cfg.profile), cfg.initial_label);
  const Bipartition e1_split = cfg.e1_split.value_or(default_e1_split(cfg.n_sites));
  const int sector = cfg.initial_label.excitations();
  const bool need_family =
      cfg.wants(Quantity::Mebd) || cfg.wants(Quantity::PerPartition) || cfg.wants(Quantity::ETilde);

  std::vector<SweepRecord> records(taus.size());
  parallel_for(taus.size(), cfg.threads, [&](std::size_t i) {
    SweepRecord rec;
    rec.tau = taus[i];
    const DensityMatrix rho = evolution.density(rec.tau);
    fill_diagnostics(rec, rho, sector);
    if (need_family) {
      const MebdResult result = mebd(rho);
      if (cfg.wants(Quantity::Mebd)) rec.mebd = result.value;
      if (cfg.wants(Quantity::ETilde)) {
        double witness = std::numeric_limits<double>::infinity();
        for (const auto& [partition, negativity] : result.per_partition)
          if (partition.part_a().size() == 1 || partition.part_b().size() == 1)
            witness = std::min(witness, negativity);
        rec.e_tilde = witness;
      }
      if (cfg.wants(Quantity::PerPartition)) {
        rec.per_partition.reserve(result.per_partition.size());
        for (const auto& entry : result.per_partition) rec.per_partition.push_back(entry.negativity);
      }
    }
    if (cfg.wants(Quantity::E1Fixed)) {
      rec.e1_fixed = lower_estimate_1(rho, e1_split);
      rec.e_part_a = subsystem_mebd(rho, e1_split.part_a());
    }
    records[i] = std::move(rec);
  });
  return records;
}

MaximumReport find_first_maximum(std::span<const double> taus, std::span<const double> values,
                                 double min_value) {
  if (taus.size() != values.size())
    throw Error(ErrorKind::DimensionMismatch, "tau and value series differ in length");
  if (taus.empty()) throw Error(ErrorKind::NoMaximumFound, "empty series");
  for (std::size_t i = 1; i < taus.size(); ++i)
    if (!(taus[i] > taus[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "tau must increase strictly");

  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    const double y0 = values[i - 1], y1 = values[i], y2 = values[i + 1];
    if (!(y1 >= y0 && y1 >= y2 && y1 >= min_value)) continue;

    MaximumReport report{taus[i], y1, MaximumKind::GridPoint, i};
    const double t0 = taus[i - 1], t1 = taus[i], t2 = taus[i + 1];
    // Newton form: p(t) = y0 + d1 (t - t0) + d2 (t - t0)(t - t1).
    const double d01 = (y1 - y0) / (t1 - t0);
    const double d12 = (y2 - y1) / (t2 - t1);
    const double d2 = (d12 - d01) / (t2 - t0);
    if (d2 < 0.0) {
      const double vertex = 0.5 * (t0 + t1) - d01 / (2.0 * d2);
      const double t = std::clamp(vertex, t0, t2);
      report.tau_star = t;
      report.value = y0 + d01 * (t - t0) + d2 * (t - t0) * (t - t1);
      report.kind = MaximumKind::ParabolicRefined;
    }
    return report;
  }
  throw Error(ErrorKind::NoMaximumFound,
              "no interior local maximum >= " + std::to_string(min_value));
}

MaximumReport find_first_maximum(std::span<const SweepRecord> series, Quantity q,
                                 double min_value) {
  std::vector<double> taus, values;
  taus.reserve(series.size());
  values.reserve(series.size());
  for (const SweepRecord& rec : series) {
    const auto v = rec.value(q);
    if (!v)
      throw Error(ErrorKind::InvalidArgument,
                  "series has no scalar '" + std::string(to_string(q)) + "' values");
    taus.push_back(rec.tau);
    values.push_back(*v);
  }
  return find_first_maximum(taus, values, min_value);
}

bool sanity_tau_bound(const MaximumReport& report) noexcept {
  return report.tau_star < std::numbers::pi;
}

}  // namespace mebd
