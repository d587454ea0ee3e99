#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "mebd/dynamics.hpp"
#include "mebd/error.hpp"
#include "oracles.hpp"

using namespace mebd;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no mebd::Error thrown";
  return ErrorKind::InvalidArgument;
}

SweepConfig config(int n, const char* label, double tau_end, double step = 0.005) {
  SweepConfig cfg;
  cfg.n_sites = n;
  cfg.initial_label = BasisLabel(label);
  cfg.tau_end = tau_end;
  cfg.tau_step = step;
  return cfg;
}

}  // namespace

TEST(DefaultSplit, PowersOfTwo) {
  EXPECT_EQ(default_e1_split(2).to_string(), "1|2");
  EXPECT_EQ(default_e1_split(3).to_string(), "1,2|3");
  EXPECT_EQ(default_e1_split(4).to_string(), "1,2|3,4");
  EXPECT_EQ(default_e1_split(6).to_string(), "1,2,3,4|5,6");
  EXPECT_EQ(default_e1_split(8).to_string(), "1,2,3,4|5,6,7,8");
}

TEST(Quantity, NamesRoundTrip) {
  for (Quantity q : {Quantity::Mebd, Quantity::E1Fixed, Quantity::ETilde, Quantity::PerPartition})
    EXPECT_EQ(parse_quantity(to_string(q)), q);
  EXPECT_EQ(parse_quantity("per-partition"), Quantity::PerPartition);
  EXPECT_EQ(parse_quantity("mebdx"), std::nullopt);
}

TEST(SweepConfig, Validation) {
  SweepConfig cfg = config(3, "010", 1.0);
  EXPECT_NO_THROW(validate(cfg));
  cfg.tau_step = 0.0;
  EXPECT_EQ(kind_of([&] { validate(cfg); }), ErrorKind::InvalidArgument);
  cfg = config(3, "010", 1.0);
  cfg.tau_start = -0.1;
  EXPECT_EQ(kind_of([&] { validate(cfg); }), ErrorKind::InvalidArgument);
  cfg = config(3, "01", 1.0);
  EXPECT_EQ(kind_of([&] { validate(cfg); }), ErrorKind::BadLabel);
  cfg = config(3, "010", 1000.0, 1e-3);
  EXPECT_EQ(kind_of([&] { validate(cfg); }), ErrorKind::GridTooLarge);
  cfg = config(3, "010", 1.0);
  cfg.n_sites = 13;
  EXPECT_EQ(kind_of([&] { validate(cfg); }), ErrorKind::BadSize);
}

TEST(SweepGrid, InclusiveEndpoints) {
  const auto grid = sweep_grid(config(2, "10", 4.0));
  ASSERT_EQ(grid.size(), 801u);
  EXPECT_DOUBLE_EQ(grid.front(), 0.0);
  EXPECT_NEAR(grid.back(), 4.0, 1e-12);
  SweepConfig single = config(2, "10", 0.0);
  EXPECT_EQ(sweep_grid(single).size(), 1u);
}

TEST(Evolution, MatchesPropagatorAndTaylorOracle) {
  for (int n = 2; n <= 3; ++n) {
    const Hamiltonian h = build_hdz(n);
    const std::string label = n == 2 ? "10" : "010";
    const Evolution ev(h, BasisLabel(label));
    const ComplexMatrix rho0 = pure_density(BasisLabel(label)).matrix();
    for (double tau : {0.3, 1.0, 2.0}) {
      const ComplexMatrix expected = conjugate_evolution(rho0, propagator(ev.spectrum(), tau));
      EXPECT_LT(max_abs_diff(ev.density(tau).matrix(), expected), 1e-10);
      const ComplexMatrix taylor = conjugate_evolution(rho0, oracle::taylor_propagator(h.matrix, tau));
      EXPECT_LT(max_abs_diff(ev.density(tau).matrix(), taylor), 1e-8);
    }
  }
}

TEST(RunSweep, TwoSiteClosedForm) {
  SweepConfig cfg = config(2, "10", 3.0, 0.01);
  cfg.profile = CouplingKind::NearestNeighbor;
  for (const SweepRecord& rec : run_sweep(cfg)) {
    ASSERT_TRUE(rec.mebd.has_value());
    EXPECT_NEAR(*rec.mebd, std::abs(std::sin(rec.tau)), 1e-9) << rec.tau;
  }
}

TEST(RunSweep, ProductStartAndConservation) {
  SweepConfig cfg = config(4, "1001", 3.0, 0.05);
  const auto records = run_sweep(cfg);
  ASSERT_EQ(records.size(), 61u);
  EXPECT_EQ(*records.front().mebd, 0.0);
  EXPECT_EQ(*records.front().e_tilde, 0.0);
  for (const SweepRecord& rec : records) {
    EXPECT_LT(rec.trace_error, 1e-10);
    EXPECT_LT(rec.purity_error, 1e-9);
    EXPECT_LT(rec.sector_leakage, 1e-10);
    EXPECT_LE(*rec.e1_fixed, *rec.mebd + 1e-9);
    EXPECT_LE(*rec.mebd, *rec.e_tilde + 1e-12);
    EXPECT_TRUE(rec.per_partition.empty());
  }
}

TEST(RunSweep, StationaryGroundState) {
  SweepConfig cfg = config(2, "00", 1.0, 0.1);
  for (const SweepRecord& rec : run_sweep(cfg)) {
    EXPECT_EQ(*rec.mebd, 0.0);
    EXPECT_EQ(*rec.e1_fixed, 0.0);
    EXPECT_EQ(*rec.e_tilde, 0.0);
  }
}

TEST(RunSweep, PerPartitionColumnsAndThreadDeterminism) {
  SweepConfig cfg = config(4, "1001", 2.0, 0.1);
  cfg.quantities = {Quantity::Mebd, Quantity::ETilde, Quantity::PerPartition};
  const auto one = run_sweep(cfg);
  cfg.threads = 3;
  const auto three = run_sweep(cfg);
  ASSERT_EQ(one.size(), three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    ASSERT_EQ(one[i].per_partition.size(), 7u);
    EXPECT_FALSE(one[i].e1_fixed.has_value());
    EXPECT_EQ(one[i].per_partition, three[i].per_partition);
    EXPECT_EQ(one[i].mebd, three[i].mebd);
    EXPECT_EQ(*one[i].mebd, *std::min_element(one[i].per_partition.begin(),
                                               one[i].per_partition.end()));
  }
}

TEST(FirstMaximum, SyntheticSeries) {
  std::vector<double> taus, values;
  for (int i = 0; i <= 400; ++i) {
    taus.push_back(i * 0.01);
    values.push_back(std::sin(taus.back()));
  }
  const MaximumReport r = find_first_maximum(taus, values);
  EXPECT_EQ(r.kind, MaximumKind::ParabolicRefined);
  EXPECT_NEAR(r.tau_star, std::numbers::pi / 2, 1e-5);
  EXPECT_NEAR(r.value, 1.0, 1e-6);
  EXPECT_EQ(r.grid_index, 157u);
}

TEST(FirstMaximum, SkipsSmallRipplesAndFlatTops) {
  const std::vector<double> taus{0, 1, 2, 3, 4, 5, 6};
  const std::vector<double> ripple{0.0, 0.2, 0.1, 0.6, 0.9, 0.7, 0.8};
  const MaximumReport r = find_first_maximum(taus, ripple);
  EXPECT_EQ(r.grid_index, 4u);
  const std::vector<double> flat{0.0, 0.7, 0.7, 0.7, 0.1, 0.0, 0.0};
  const MaximumReport f = find_first_maximum(taus, flat);
  EXPECT_EQ(f.grid_index, 1u);
  EXPECT_GE(f.tau_star, taus.front());
  EXPECT_LE(f.tau_star, taus.back());
}

TEST(FirstMaximum, Errors) {
  const std::vector<double> taus{0, 1, 2, 3};
  const std::vector<double> rising{0, 1, 2, 3};
  EXPECT_EQ(kind_of([&] { find_first_maximum(taus, rising); }), ErrorKind::NoMaximumFound);
  const std::vector<double> low{0.0, 0.3, 0.1, 0.0};
  EXPECT_EQ(kind_of([&] { find_first_maximum(taus, low); }), ErrorKind::NoMaximumFound);
  EXPECT_NO_THROW(find_first_maximum(taus, low, 0.2));
  const std::vector<double> shorter{0, 1};
  EXPECT_EQ(kind_of([&] { find_first_maximum(taus, shorter); }), ErrorKind::DimensionMismatch);
  std::vector<SweepRecord> recs(3);
  EXPECT_EQ(kind_of([&] { find_first_maximum(recs, Quantity::Mebd); }), ErrorKind::InvalidArgument);
}

TEST(FirstMaximum, ThreeSiteChainAndGridConvergence) {
  SweepConfig cfg = config(3, "010", 3.0, 0.01);
  cfg.quantities = {Quantity::Mebd};
  const MaximumReport coarse = find_first_maximum(run_sweep(cfg), Quantity::Mebd);
  cfg.tau_step = 0.005;
  const MaximumReport fine = find_first_maximum(run_sweep(cfg), Quantity::Mebd);
  EXPECT_NEAR(fine.tau_star, 1.505, 0.01);
  EXPECT_NEAR(fine.value, 0.943, 0.01);
  EXPECT_LT(std::abs(fine.tau_star - coarse.tau_star), 0.01);
  EXPECT_TRUE(sanity_tau_bound(fine));
}

TEST(SanityBound, Examples) {
  EXPECT_TRUE(sanity_tau_bound({1.505, 0.943}));
  EXPECT_TRUE(sanity_tau_bound({2.193, 0.988}));
  EXPECT_FALSE(sanity_tau_bound({3.5, 0.9}));
  EXPECT_FALSE(sanity_tau_bound({std::numbers::pi, 0.9}));
}
