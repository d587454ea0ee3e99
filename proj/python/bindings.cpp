#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <bit>
#include <cstring>

#include "mebd/dynamics.hpp"
#include "mebd/error.hpp"

namespace py = pybind11;
using namespace mebd;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

CArray to_numpy(const ComplexMatrix& m) {
  CArray out({m.dim(), m.dim()});
  std::memcpy(out.mutable_data(), m.data().data(), m.data().size() * sizeof(cplx));
  return out;
}

DensityMatrix from_numpy(const CArray& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1))
    throw Error(ErrorKind::DimensionMismatch, "density matrix must be square");
  const auto dim = static_cast<std::size_t>(a.shape(0));
  if (!std::has_single_bit(dim) || dim < 2)
    throw Error(ErrorKind::DimensionMismatch, "dimension must be a power of two >= 2");
  ComplexMatrix m(dim);
  std::memcpy(m.data().data(), a.data(), dim * dim * sizeof(cplx));
  return DensityMatrix(std::countr_zero(dim), std::move(m));
}

CouplingKind profile_of(const std::string& text) {
  const auto kind = parse_coupling_kind(text);
  if (!kind) throw Error(ErrorKind::InvalidArgument, "unknown profile '" + text + "'");
  return *kind;
}

SiteSet site_set(int n, const std::vector<int>& sites) { return SiteSet::from_sites(n, sites); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Minimal entanglement of bipartite decompositions for dipolar spin chains";

  static py::exception<Error> error_type(m, "MebdError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  m.def("build_hdz", [](int n, const std::string& profile) {
    return to_numpy(build_hdz(n, profile_of(profile)).matrix);
  }, py::arg("n_sites"), py::arg("profile") = "all-pairs");

  m.def("pure_density", [](const std::string& label) {
    return to_numpy(pure_density(BasisLabel(label)).matrix());
  }, py::arg("label"));

  m.def("basis_index", [](const std::string& label) { return basis_index(BasisLabel(label)); });

  m.def("partial_trace", [](const CArray& rho, const std::vector<int>& keep) {
    const DensityMatrix d = from_numpy(rho);
    return to_numpy(partial_trace(d, site_set(d.n_sites(), keep)).matrix());
  }, py::arg("rho"), py::arg("keep"));

  m.def("partial_transpose", [](const CArray& rho, const std::vector<int>& sites) {
    const DensityMatrix d = from_numpy(rho);
    return to_numpy(partial_transpose(d, site_set(d.n_sites(), sites)));
  }, py::arg("rho"), py::arg("sites"));

  m.def("enumerate_bipartitions", [](int n) {
    std::vector<std::string> out;
    for (const auto& p : enumerate_bipartitions(n).partitions) out.push_back(p.to_string());
    return out;
  }, py::arg("n_sites"));

  m.def("double_negativity", [](const CArray& rho, const std::string& partition) {
    const DensityMatrix d = from_numpy(rho);
    return double_negativity(d, parse_bipartition(partition, d.n_sites()));
  }, py::arg("rho"), py::arg("partition"));

  m.def("mebd", [](const CArray& rho, int threads) {
    const MebdResult r = mebd::mebd(from_numpy(rho), threads);
    py::dict per;
    for (const auto& e : r.per_partition) per[py::str(e.partition.to_string())] = e.negativity;
    py::dict out;
    out["value"] = r.value;
    out["argmin"] = r.argmin.to_string();
    out["per_partition"] = per;
    return out;
  }, py::arg("rho"), py::arg("threads") = 1);

  m.def("lower_estimate_1", [](const CArray& rho, const std::string& partition) {
    const DensityMatrix d = from_numpy(rho);
    return lower_estimate_1(d, parse_bipartition(partition, d.n_sites()));
  }, py::arg("rho"), py::arg("partition"));

  m.def("lower_estimate_level", [](const CArray& rho, int level) {
    return lower_estimate_level(from_numpy(rho), level);
  }, py::arg("rho"), py::arg("level"));

  m.def("single_node_witness", [](const CArray& rho) { return single_node_witness(from_numpy(rho)); },
        py::arg("rho"));

  m.def("evolve", [](const std::string& label, double tau, const std::string& profile) {
    const BasisLabel init(label);
    const Evolution ev(build_hdz(init.n_sites(), profile_of(profile)), init);
    return to_numpy(ev.density(tau).matrix());
  }, py::arg("label"), py::arg("tau"), py::arg("profile") = "all-pairs");

  m.def("run_sweep", [](const std::string& label, double tau_start, double tau_end, double tau_step,
                        const std::vector<std::string>& quantities, const std::string& profile,
                        const std::string& e1_split, int threads) {
    SweepConfig cfg;
    cfg.initial_label = BasisLabel(label);
    cfg.n_sites = cfg.initial_label.n_sites();
    cfg.profile = profile_of(profile);
    cfg.tau_start = tau_start;
    cfg.tau_end = tau_end;
    cfg.tau_step = tau_step;
    cfg.quantities.clear();
    for (const std::string& q : quantities) {
      const auto parsed = parse_quantity(q);
      if (!parsed) throw Error(ErrorKind::InvalidArgument, "unknown quantity '" + q + "'");
      cfg.quantities.push_back(*parsed);
    }
    if (!e1_split.empty()) cfg.e1_split = parse_bipartition(e1_split, cfg.n_sites);
    cfg.threads = threads;

    const auto records = [&] {
      py::gil_scoped_release release;
      return run_sweep(cfg);
    }();
    py::dict out;
    std::vector<double> taus;
    for (const auto& r : records) taus.push_back(r.tau);
    out["tau"] = py::array_t<double>(taus.size(), taus.data());
    for (Quantity q : {Quantity::Mebd, Quantity::E1Fixed, Quantity::ETilde}) {
      if (!cfg.wants(q)) continue;
      std::vector<double> v;
      for (const auto& r : records) v.push_back(*r.value(q));
      out[py::str(std::string(to_string(q)))] = py::array_t<double>(v.size(), v.data());
    }
    if (cfg.wants(Quantity::PerPartition)) {
      const auto family = enumerate_bipartitions(cfg.n_sites);
      py::dict per;
      for (std::size_t i = 0; i < family.partitions.size(); ++i) {
        std::vector<double> v;
        for (const auto& r : records) v.push_back(r.per_partition[i]);
        per[py::str(family.partitions[i].to_string())] = py::array_t<double>(v.size(), v.data());
      }
      out["per_partition"] = per;
    }
    return out;
  }, py::arg("label"), py::arg("tau_start") = 0.0, py::arg("tau_end") = 4.0,
     py::arg("tau_step") = 0.005,
     py::arg("quantities") = std::vector<std::string>{"mebd", "e1_fixed", "e_tilde"},
     py::arg("profile") = "all-pairs", py::arg("e1_split") = "", py::arg("threads") = 1);

  m.def("find_first_maximum", [](const std::vector<double>& taus, const std::vector<double>& values,
                                 double min_value) {
    const MaximumReport r = find_first_maximum(taus, values, min_value);
    py::dict out;
    out["tau_star"] = r.tau_star;
    out["value"] = r.value;
    out["kind"] = std::string(to_string(r.kind));
    out["grid_index"] = r.grid_index;
    out["tau_below_pi"] = sanity_tau_bound(r);
    return out;
  }, py::arg("taus"), py::arg("values"), py::arg("min_value") = kDefaultMinPeak);
}
