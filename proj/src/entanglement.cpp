#include "mebd/entanglement.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <limits>
#include <map>
#include <unordered_map>

#include "mebd/error.hpp"
#include "mebd/parallel.hpp"

namespace mebd {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

std::uint32_t lowest_bit(std::uint32_t mask) noexcept { return mask & (~mask + 1u); }

std::vector<int> parse_site_list(std::string_view text) {
  std::vector<int> sites;
  while (true) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size())
      throw Error(ErrorKind::BadPartition, "bad site '" + std::string(item) + "'");
    sites.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return sites;
}

}  // namespace

Bipartition::Bipartition(SiteSet part_a, SiteSet part_b)
    : part_a_(part_a), part_b_(part_b) {
  if (part_a.n_sites() != part_b.n_sites())
    throw Error(ErrorKind::BadPartition, "parts live on different registers");
  if (part_a.empty() || part_b.empty())
    throw Error(ErrorKind::BadPartition, "empty part");
  if ((part_a.mask() & part_b.mask()) != 0)
    throw Error(ErrorKind::BadPartition, "parts overlap");
  if ((part_a.mask() | part_b.mask()) != SiteSet::full(part_a.n_sites()).mask())
    throw Error(ErrorKind::BadPartition, "parts do not cover the register");
}

std::string Bipartition::to_string() const {
  return part_a_.to_string() + "|" + part_b_.to_string();
}

Bipartition parse_bipartition(std::string_view spec, int n_sites) {
  const auto bar = spec.find('|');
  if (bar == std::string_view::npos || spec.find('|', bar + 1) != std::string_view::npos)
    throw Error(ErrorKind::BadPartition, "expected exactly one '|' in '" + std::string(spec) + "'");
  const auto a = parse_site_list(spec.substr(0, bar));
  const auto b = parse_site_list(spec.substr(bar + 1));
  return Bipartition(SiteSet::from_sites(n_sites, a), SiteSet::from_sites(n_sites, b));
}

PartitionFamily enumerate_bipartitions(int n_sites) {
  if (n_sites < 2 || n_sites > kMaxSites)
    throw Error(ErrorKind::BadSize, "cannot bipartition " + std::to_string(n_sites) + " sites");
  PartitionFamily family{n_sites, {}};
  const std::uint32_t full = SiteSet::full(n_sites).mask();
  family.partitions.reserve((std::size_t{1} << (n_sites - 1)) - 1);
  for (std::uint32_t a = 1; a < full; a += 2)
    family.partitions.emplace_back(SiteSet(n_sites, a), SiteSet(n_sites, full & ~a));
  return family;
}

double double_negativity(const DensityMatrix& rho, const Bipartition& p, SpectrumPath path) {
  if (p.n_sites() != rho.n_sites())
    throw Error(ErrorKind::DimensionMismatch, "partition register differs from state register");
  return negative_sum(partial_transpose_spectrum(rho, p.part_a(), path));
}

double reduced_negativity(const DensityMatrix& rho, const SiteSet& x, const SiteSet& y) {
  if (x.n_sites() != rho.n_sites() || y.n_sites() != rho.n_sites())
    throw Error(ErrorKind::DimensionMismatch, "site sets live on a different register");
  if (x.empty() || y.empty() || (x.mask() & y.mask()) != 0)
    throw Error(ErrorKind::BadPartition, "need two disjoint non-empty site sets");
  const SiteSet joint(rho.n_sites(), x.mask() | y.mask());
  if (joint == SiteSet::full(rho.n_sites())) return double_negativity(rho, Bipartition(x, y));
  const DensityMatrix reduced = partial_trace(rho, joint);
  return double_negativity(reduced, Bipartition(x.relative_to(joint), y.relative_to(joint)));
}

double pairwise_negativity(const DensityMatrix& rho, std::span<const SiteSet> parts,
                           std::size_t i, std::size_t j) {
  if (i >= parts.size() || j >= parts.size() || i == j)
    throw Error(ErrorKind::BadPartition, "part indices must be distinct and in range");
  std::uint32_t seen = 0;
  for (const SiteSet& part : parts) {
    if (part.n_sites() != rho.n_sites() || part.empty() || (seen & part.mask()) != 0)
      throw Error(ErrorKind::BadPartition, "parts must be non-empty, disjoint, on the register");
    seen |= part.mask();
  }
  if (seen != SiteSet::full(rho.n_sites()).mask())
    throw Error(ErrorKind::BadPartition, "parts do not cover the register");
  return reduced_negativity(rho, parts[i], parts[j]);
}

MebdResult mebd(const DensityMatrix& rho, int threads) {
  const PartitionFamily family = enumerate_bipartitions(rho.n_sites());
  std::vector<double> values(family.partitions.size());
  parallel_for(values.size(), threads,
               [&](std::size_t k) { values[k] = double_negativity(rho, family.partitions[k]); });

  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] < values[best]) best = k;

  MebdResult result{values[best], family.partitions[best], {}};
  result.per_partition.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k)
    result.per_partition.push_back({family.partitions[k], values[k]});
  return result;
}

namespace {

// Memoizes reduced states, cross negativities and estimator values for
// subsystems of one register, keyed by SiteSet masks.
class SubsystemAnalyzer {
 public:
  explicit SubsystemAnalyzer(const DensityMatrix& rho)
      : rho_(rho), full_(SiteSet::full(rho.n_sites()).mask()) {}

  // N_{A, S\A} on the state reduced onto S.
  double cross(std::uint32_t subsystem, std::uint32_t part) {
    const auto key = std::pair{subsystem, part};
    if (const auto it = cross_.find(key); it != cross_.end()) return it->second;
    const int n = rho_.n_sites();
    const SiteSet s(n, subsystem);
    const SiteSet a(n, part);
    const SiteSet b(n, subsystem & ~part);
    double value = 0.0;
    if (subsystem == full_) {
      value = double_negativity(rho_, Bipartition(a, b));
    } else {
      value = double_negativity(reduced(subsystem), Bipartition(a.relative_to(s), b.relative_to(s)));
    }
    cross_.emplace(key, value);
    return value;
  }

  // est_0 = MEBD of the subsystem, est_k per the recursive max-min.
  double estimate(std::uint32_t subsystem, int level) {
    if (std::popcount(subsystem) < 2) return kInfinity;
    const auto key = std::pair{subsystem, level};
    if (const auto it = estimate_.find(key); it != estimate_.end()) return it->second;
    double value = level == 0 ? kInfinity : -kInfinity;
    for_each_split(subsystem, [&](std::uint32_t part) {
      const double n = cross(subsystem, part);
      if (level == 0) {
        value = std::min(value, n);
      } else {
        const double inner = std::min(estimate(part, level - 1),
                                      estimate(subsystem & ~part, level - 1));
        value = std::max(value, std::min(inner, n));
      }
    });
    estimate_.emplace(key, value);
    return value;
  }

 private:
  template <class F>
  static void for_each_split(std::uint32_t subsystem, F&& f) {
    const std::uint32_t anchor = lowest_bit(subsystem);
    const std::uint32_t others = subsystem & ~anchor;
    // Submasks of `others` in increasing order, each joined with the anchor site.
    std::uint32_t sub = 0;
    do {
      const std::uint32_t part = sub | anchor;
      if (part != subsystem) f(part);
      sub = (sub - others) & others;
    } while (sub != 0);
  }

  const DensityMatrix& reduced(std::uint32_t subsystem) {
    auto it = reduced_.find(subsystem);
    if (it == reduced_.end())
      it = reduced_.emplace(subsystem, partial_trace(rho_, SiteSet(rho_.n_sites(), subsystem))).first;
    return it->second;
  }

  const DensityMatrix& rho_;
  std::uint32_t full_;
  std::unordered_map<std::uint32_t, DensityMatrix> reduced_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> cross_;
  std::map<std::pair<std::uint32_t, int>, double> estimate_;
};

}  // namespace

double subsystem_mebd(const DensityMatrix& rho, const SiteSet& subsystem) {
  if (subsystem.n_sites() != rho.n_sites())
    throw Error(ErrorKind::DimensionMismatch, "subsystem lives on a different register");
  if (subsystem.empty()) throw Error(ErrorKind::EmptyKeepSet, "empty subsystem");
  return SubsystemAnalyzer(rho).estimate(subsystem.mask(), 0);
}

double lower_estimate_1(const DensityMatrix& rho, const Bipartition& j) {
  if (j.n_sites() != rho.n_sites())
    throw Error(ErrorKind::DimensionMismatch, "partition register differs from state register");
  SubsystemAnalyzer analyzer(rho);
  const std::uint32_t a = j.part_a().mask();
  const std::uint32_t b = j.part_b().mask();
  return std::min({analyzer.estimate(a, 0), analyzer.estimate(b, 0), analyzer.cross(a | b, a)});
}

int max_estimate_level(int n_sites) noexcept { return std::max(1, n_sites - 2); }

double lower_estimate_level(const DensityMatrix& rho, int level) {
  if (rho.n_sites() < 2) throw Error(ErrorKind::BadSize, "need at least two sites");
  const int top = max_estimate_level(rho.n_sites());
  if (level < 1 || level > top)
    throw Error(ErrorKind::BadLevel,
                "level " + std::to_string(level) + " outside 1.." + std::to_string(top));
  return SubsystemAnalyzer(rho).estimate(SiteSet::full(rho.n_sites()).mask(), level);
}

double single_node_witness(const DensityMatrix& rho) {
  const int n = rho.n_sites();
  if (n < 2) throw Error(ErrorKind::BadSize, "need at least two sites");
  double best = kInfinity;
  for (int s = 1; s <= n; ++s) {
    const SiteSet site(n, std::uint32_t{1} << (s - 1));
    best = std::min(best, double_negativity(rho, Bipartition(site, site.complement())));
  }
  return best;
}

}  // namespace mebd
