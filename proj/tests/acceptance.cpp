// Acceptance run: one PASS/FAIL line per criterion, details indented below it.
// Usage: mebd_acceptance [threads]   (default: all cores)

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "checks.hpp"
#include "mebd/dynamics.hpp"
#include "mebd/error.hpp"
#include "mebd/parallel.hpp"
#include "oracles.hpp"

using namespace mebd;

namespace {

struct Row {
  int n;
  const char* label;
  double tau;
  double value;
};

constexpr Row kRows[] = {
    {3, "010", 1.505, 0.943},
    {4, "1001", 1.819, 1.000},
    {6, "100110", 2.110, 0.992},
    {8, "10011001", 2.193, 0.988},
};

struct Sweep {
  Row row;
  std::vector<SweepRecord> records;
  std::optional<MaximumReport> peak;
  double seconds = 0.0;
};

int failures = 0;

void verdict(int id, const std::string& title, bool ok, const std::string& details) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << '\n' << details;
  std::cout.flush();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

DensityMatrix ghz(int n) {
  std::vector<cplx> amps(std::size_t{1} << n);
  amps.front() = amps.back() = 1.0 / std::sqrt(2.0);
  return pure_density(amps);
}

std::vector<Sweep> table_sweeps(CouplingKind profile, int threads, std::initializer_list<int> sizes,
                                std::vector<Quantity> quantities) {
  std::vector<Sweep> out;
  for (const Row& row : kRows) {
    if (std::find(sizes.begin(), sizes.end(), row.n) == sizes.end()) continue;
    SweepConfig cfg;
    cfg.n_sites = row.n;
    cfg.initial_label = BasisLabel(row.label);
    cfg.profile = profile;
    cfg.quantities = quantities;
    cfg.threads = threads;
    Sweep s{row, {}, {}, 0.0};
    const auto start = std::chrono::steady_clock::now();
    s.records = run_sweep(cfg);
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
      s.peak = find_first_maximum(s.records, Quantity::Mebd);
    } catch (const Error&) {
    }
    out.push_back(std::move(s));
  }
  return out;
}

bool within_table(const Sweep& s) {
  return s.peak && std::abs(s.peak->tau_star - s.row.tau) <= 0.01 &&
         std::abs(s.peak->value - s.row.value) <= 0.01;
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : 0;
  const int workers = resolve_threads(threads);
  std::cout << "mebd acceptance, " << workers << " worker(s)\n";

  // Shared sweeps over the default grid [0, 4] step 0.005.
  const std::vector<Sweep> sweeps =
      table_sweeps(CouplingKind::AllPairsDipolar, threads, {3, 4, 6, 8},
                   {Quantity::Mebd, Quantity::E1Fixed, Quantity::ETilde});
  const std::vector<Sweep> nn =
      table_sweeps(CouplingKind::NearestNeighbor, threads, {3, 4}, {Quantity::Mebd});

  {  // 1
    std::ostringstream d;
    bool ok = true;
    const double n8_budget = workers >= 8 ? 300.0 : 1800.0;
    for (const Sweep& s : sweeps) {
      const bool row_ok = within_table(s);
      const double budget = s.row.n <= 4 ? 10.0 : s.row.n == 6 ? 120.0 : n8_budget;
      const bool fast = s.seconds < budget;
      ok = ok && row_ok && fast;
      d << "      all-pairs N=" << s.row.n << ": ";
      if (s.peak)
        d << "tau=" << fixed(s.peak->tau_star) << " E=" << fixed(s.peak->value) << " (reference "
          << fixed(s.row.tau, 3) << ", " << fixed(s.row.value, 3) << "; dtau="
          << fixed(s.peak->tau_star - s.row.tau) << " dE=" << fixed(s.peak->value - s.row.value)
          << ")";
      else
        d << "no maximum found";
      d << " sweep " << fixed(s.seconds, 1) << " s (budget " << budget << " s)"
        << (row_ok && fast ? "" : "  <-- outside") << '\n';
    }
    for (const Sweep& s : nn)
      d << "      nearest-neighbor N=" << s.row.n << " (informational): "
        << (s.peak ? "tau=" + fixed(s.peak->tau_star) + " E=" + fixed(s.peak->value) : "no maximum")
        << (within_table(s) ? " matches" : " does not match") << '\n';
    verdict(1, "reference maxima reproduced with the all-pairs profile (|dtau|, |dE| <= 0.01)", ok,
            d.str());
  }

  {  // 2
    std::ostringstream d;
    bool ok = true;
    for (const Sweep& s : sweeps) {
      const bool below = s.peak && sanity_tau_bound(*s.peak);
      ok = ok && below;
      d << "      N=" << s.row.n << " tau=" << (s.peak ? fixed(s.peak->tau_star) : "n/a")
        << (below ? " < pi" : " NOT < pi") << '\n';
    }
    verdict(2, "every reproduced tau_N is below pi", ok, d.str());
  }

  {  // 3
    std::mt19937_64 rng(20240601);
    int instances = 0;
    double worst = 0.0;
    std::string worst_case = "none";
    for (int trial = 0; trial < 100; ++trial) {
      const DensityMatrix rho = pure_density(oracle::random_amplitudes(16, rng));
      for (const checks::Outcome& o : {checks::nested_negativity(rho), checks::four_site_chain(rho)}) {
        instances += o.instances;
        if (o.worst > worst) {
          worst = o.worst;
          worst_case = o.worst_case;
        }
      }
    }
    const Sweep& n4 = sweeps[1];
    const double tau4 = n4.peak ? n4.peak->tau_star : 1.819;
    const Evolution ev(build_hdz(4), BasisLabel("1001"));
    const checks::Outcome chain = checks::four_site_chain(ev.density(tau4));
    const bool ok = worst <= 1e-9 && chain.worst <= 1e-9 && chain.instances == 6;
    std::ostringstream d;
    d << "      100 random 4-site pure states: " << instances
      << " nested inequalities, worst violation " << sci(worst) << " (" << worst_case << ")\n"
      << "      evolved |1001> at tau=" << fixed(tau4) << ": " << chain.instances
      << " chain inequalities, worst violation " << sci(chain.worst) << '\n';
    verdict(3, "negativity hierarchy under nested groupings", ok, d.str());
  }

  {  // 4
    std::ostringstream d;
    bool ok = true;
    for (const Sweep& s : sweeps) {
      if (s.row.n == 3) continue;
      double worst = -INFINITY;
      for (const SweepRecord& r : s.records) worst = std::max(worst, *r.e1_fixed - *r.mebd);
      ok = ok && worst <= 1e-9;
      d << "      N=" << s.row.n << " split " << default_e1_split(s.row.n).to_string()
        << ": max(E1 - E) over " << s.records.size() << " points = " << sci(worst) << '\n';
    }
    std::mt19937_64 rng(77);
    double worst21 = -INFINITY, worst1e = -INFINITY, worst_deep = -INFINITY;
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 4 + trial % 3;
      const DensityMatrix rho = pure_density(oracle::random_amplitudes(std::size_t{1} << n, rng));
      const double e = mebd::mebd(rho).value;
      std::vector<double> levels;
      for (int k = 1; k <= max_estimate_level(n); ++k) levels.push_back(lower_estimate_level(rho, k));
      worst1e = std::max(worst1e, levels[0] - e);
      worst21 = std::max(worst21, levels[1] - levels[0]);
      for (std::size_t k = 2; k < levels.size(); ++k)
        worst_deep = std::max(worst_deep, levels[k] - levels[k - 1]);
    }
    ok = ok && worst21 <= 1e-9 && worst1e <= 1e-9 && worst_deep <= 1e-9;
    d << "      50 random pure states (N=4,5,6): max(E^(1) - E) = " << sci(worst1e)
      << ", max(E^(2) - E^(1)) = " << sci(worst21) << ", deeper levels " << sci(worst_deep) << '\n';
    verdict(4, "estimator ordering E^(2) <= E^(1) <= E", ok, d.str());
  }

  {  // 5
    std::ostringstream d;
    bool ok = true;
    for (const Sweep& s : sweeps) {
      double worst = -INFINITY, gap = 0.0, gap_tau = 0.0;
      for (const SweepRecord& r : s.records) {
        worst = std::max(worst, *r.mebd - *r.e_tilde);
        if (*r.e_tilde - *r.mebd > gap) {
          gap = *r.e_tilde - *r.mebd;
          gap_tau = r.tau;
        }
      }
      ok = ok && worst <= 0.0;
      d << "      N=" << s.row.n << ": max(E - E~) = " << sci(worst) << ", largest gap E~ - E = "
        << fixed(gap) << " at tau=" << fixed(gap_tau, 3) << '\n';
    }
    verdict(5, "witness ordering E <= E~ at every sweep point", ok, d.str());
  }

  {  // 6
    std::ostringstream d;
    double trace = 0.0, purity = 0.0, leakage = 0.0, commutator = 0.0;
    for (const Sweep& s : sweeps)
      for (const SweepRecord& r : s.records) {
        trace = std::max(trace, r.trace_error);
        purity = std::max(purity, r.purity_error);
        leakage = std::max(leakage, r.sector_leakage);
      }
    for (int n : {3, 4, 6, 8})
      for (auto kind : {CouplingKind::AllPairsDipolar, CouplingKind::NearestNeighbor})
        commutator = std::max(commutator, verify_iz_commutation(build_hdz(n, kind)));
    const bool ok = trace < 1e-10 && purity < 1e-9 && leakage < 1e-10 && commutator < 1e-12;
    d << "      max trace error " << sci(trace) << ", purity error " << sci(purity)
      << ", off-sector leakage " << sci(leakage) << ", max|[H,Iz]| " << sci(commutator) << '\n';
    verdict(6, "conservation along all sweeps", ok, d.str());
  }

  {  // 7
    std::mt19937_64 rng(4242);
    double blocked = 0.0;
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 5;
      const int k = static_cast<int>(rng() % (n + 1));
      const DensityMatrix rho = trial % 3 == 2 ? oracle::random_sector_mixture(n, rng)
                                               : pure_density(oracle::random_sector_amplitudes(n, k, rng));
      for (const auto& p : enumerate_bipartitions(n).partitions) {
        blocked = std::max(blocked, oracle::max_sorted_diff(
                                        partial_transpose_spectrum(rho, p.part_a(), SpectrumPath::Blocked),
                                        partial_transpose_spectrum(rho, p.part_a(), SpectrumPath::Naive)));
        ++checked;
      }
    }
    double taylor = 0.0;
    for (int n = 2; n <= 3; ++n) {
      const std::string label = n == 2 ? "10" : "010";
      for (auto kind : {CouplingKind::AllPairsDipolar, CouplingKind::NearestNeighbor}) {
        const Hamiltonian h = build_hdz(n, kind);
        const Evolution ev(h, BasisLabel(label));
        const ComplexMatrix rho0 = pure_density(BasisLabel(label)).matrix();
        for (double tau = 0.0; tau <= 2.0 + 1e-12; tau += 0.25)
          taylor = std::max(taylor, max_abs_diff(ev.density(tau).matrix(),
                                                 conjugate_evolution(rho0, oracle::taylor_propagator(h.matrix, tau))));
      }
    }
    const bool ok = blocked <= 1e-9 && taylor <= 1e-8;
    std::ostringstream d;
    d << "      blocked vs naive partial-transpose spectra: 50 sector states (N<=6), " << checked
      << " partitions, max diff " << sci(blocked) << '\n'
      << "      evolution vs Taylor series (N=2,3, tau<=2): max diff " << sci(taylor) << '\n';
    verdict(7, "oracle equivalence", ok, d.str());
  }

  {  // 8
    std::ostringstream d;
    bool ok = true;
    d << "     ";
    for (int n = 2; n <= 10; ++n) {
      const std::size_t size = enumerate_bipartitions(n).partitions.size();
      const std::size_t expected = (std::size_t{1} << (n - 1)) - 1;
      ok = ok && size == expected;
      d << " N=" << n << ":" << size;
    }
    d << '\n';
    const auto names = [](int n) {
      std::vector<std::string> out;
      for (const auto& p : enumerate_bipartitions(n).partitions) out.push_back(p.to_string());
      std::sort(out.begin(), out.end());
      return out;
    };
    std::vector<std::string> three{"1|2,3", "1,3|2", "1,2|3"};
    std::vector<std::string> four{"1|2,3,4", "1,3,4|2", "1,2,4|3", "1,2,3|4",
                                  "1,2|3,4", "1,3|2,4", "1,4|2,3"};
    std::sort(three.begin(), three.end());
    std::sort(four.begin(), four.end());
    const bool lists = names(3) == three && names(4) == four;
    ok = ok && lists;
    d << "      N=3 and N=4 families " << (lists ? "match" : "DO NOT match") << " the explicit lists\n";
    verdict(8, "bipartition counts 2^(N-1)-1 and explicit families", ok, d.str());
  }

  {  // 9
    const double bell = double_negativity(ghz(2), parse_bipartition("1|2", 2));
    const double g3 = mebd::mebd(ghz(3)).value;
    const double g4 = mebd::mebd(ghz(4)).value;
    const std::vector<SiteSet> singles{SiteSet::from_sites(3, std::vector<int>{1}),
                                       SiteSet::from_sites(3, std::vector<int>{2}),
                                       SiteSet::from_sites(3, std::vector<int>{3})};
    const double g3_pair = pairwise_negativity(ghz(3), singles, 0, 1);
    const double a = 1.0 / std::sqrt(3.0);
    const std::vector<cplx> w{0.0, a, a, 0.0, a, 0.0, 0.0, 0.0};
    const double w_single = double_negativity(pure_density(w), parse_bipartition("1|2,3", 3));
    const double w_expected = 2.0 * std::sqrt(2.0) / 3.0;
    const bool ok = std::abs(bell - 1.0) <= 1e-9 && std::abs(g3 - 1.0) <= 1e-9 &&
                    std::abs(g4 - 1.0) <= 1e-9 && std::abs(g3_pair) <= 1e-9 &&
                    std::abs(w_single - w_expected) <= 1e-9;
    std::ostringstream d;
    d << std::setprecision(12) << "      Bell " << bell << ", GHZ3 " << g3 << ", GHZ4 " << g4
      << ", GHZ3 pair(1,2) " << g3_pair << ", W 1|2,3 " << w_single << " (expected " << w_expected
      << ")\n";
    verdict(9, "known-state values", ok, d.str());
  }

  std::cout << (9 - failures) << "/9 criteria passed\n";
  return failures == 0 ? 0 : 1;
}
