#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qcap/capacity.hpp"
#include "qcap/cli.hpp"
#include "qcap/gaussian.hpp"
#include "qcap/selftest.hpp"
#include "qcap/semicontinuity.hpp"

namespace py = pybind11;
using namespace qcap;

namespace {

Ensemble make_ensemble(const std::vector<double>& weights, const std::vector<Matrix>& states) {
  if (weights.size() != states.size()) throw ValidationError("weights and states differ in length");
  std::vector<Member> members;
  for (std::size_t i = 0; i < weights.size(); ++i) members.push_back({weights[i], DensityMatrix(states[i])});
  return Ensemble(std::move(members));
}

py::dict certificate_dict(const OptimalityCertificate& c) {
  py::dict d;
  d["lagrangian_gap"] = c.lagrangian_gap;
  d["slackness_residual"] = c.slackness_residual;
  d["member_residual"] = c.member_residual;
  d["passed"] = c.passed;
  return d;
}

py::dict result_dict(const CapacityResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["multiplier"] = r.multiplier;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["certificate"] = certificate_dict(r.certificate);
  if (r.state) d["state"] = r.state->matrix();
  if (r.ensemble) {
    py::list w;
    py::list s;
    for (const Member& m : r.ensemble->members()) {
      w.append(m.weight);
      s.append(m.state.matrix());
    }
    d["weights"] = w;
    d["states"] = s;
  }
  return d;
}

OptimizerOptions options(int restarts, std::uint64_t seed) {
  OptimizerOptions o;
  o.restarts = restarts;
  o.seed = seed;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entropic characteristics of finite-dimensional quantum channels";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<KrausChannel>(m, "Channel")
      .def(py::init([](const std::vector<Matrix>& kraus) { return KrausChannel(kraus); }), py::arg("kraus"))
      .def_static("identity", &KrausChannel::identity, py::arg("dim"))
      .def_static("dephasing", &KrausChannel::dephasing, py::arg("dim"))
      .def_static("depolarizing", &KrausChannel::depolarizing, py::arg("dim"))
      .def_static("cq", [](const std::vector<Matrix>& sigmas) {
        std::vector<DensityMatrix> s;
        for (const Matrix& x : sigmas) s.emplace_back(x);
        return cq_channel(s);
      }, py::arg("sigmas"))
      .def_property_readonly("dim_in", &KrausChannel::dim_in)
      .def_property_readonly("dim_out", &KrausChannel::dim_out)
      .def_property_readonly("kraus", &KrausChannel::kraus)
      .def("apply", [](const KrausChannel& phi, const Matrix& rho) { return apply(phi, DensityMatrix(rho)).matrix(); })
      .def("complementary", [](const KrausChannel& phi) { return complementary(phi); })
      .def("choi_rank", [](const KrausChannel& phi) { return phi.choi_rank(); })
      .def("__repr__", [](const KrausChannel& phi) {
        std::ostringstream s;
        s << "Channel(dim_in=" << phi.dim_in() << ", dim_out=" << phi.dim_out() << ", kraus=" << phi.kraus().size()
          << ")";
        return s.str();
      });

  m.def("entropy", [](const Matrix& rho) { return von_neumann_entropy(DensityMatrix(rho)); }, py::arg("rho"));
  m.def("relative_entropy",
        [](const Matrix& rho, const Matrix& sigma) { return relative_entropy(DensityMatrix(rho), DensityMatrix(sigma)); },
        py::arg("rho"), py::arg("sigma"));
  m.def("gibbs_state", [](const Matrix& h, double energy) {
    const GibbsResult g = gibbs_state(Hamiltonian(h), energy);
    return py::make_tuple(g.state.matrix(), g.multiplier);
  }, py::arg("hamiltonian"), py::arg("energy"));

  m.def("chi", [](const std::vector<double>& w, const std::vector<Matrix>& s) { return chi_quantity(make_ensemble(w, s)); },
        py::arg("weights"), py::arg("states"));
  m.def("entropic_disturbance",
        [](const KrausChannel& phi, const std::vector<double>& w, const std::vector<Matrix>& s) {
          return entropic_disturbance(phi, make_ensemble(w, s));
        },
        py::arg("channel"), py::arg("weights"), py::arg("states"));
  m.def("verify_identity",
        [](const KrausChannel& phi, const std::vector<double>& w, const std::vector<Matrix>& s) {
          const DisturbanceIdentity d = verify_disturbance_identity(phi, make_ensemble(w, s));
          py::dict out;
          out["chi_input"] = d.chi_input;
          out["mi_average"] = d.mi_average;
          out["chi_output"] = d.chi_output;
          out["chi_environment"] = d.chi_environment;
          out["mi_members"] = d.mi_members;
          out["lhs"] = d.lhs;
          out["rhs"] = d.rhs;
          out["residual"] = d.residual;
          return out;
        },
        py::arg("channel"), py::arg("weights"), py::arg("states"));

  m.def("chi_capacity",
        [](const KrausChannel& phi, const Matrix& h, double energy, int restarts, std::uint64_t seed) {
          return result_dict(chi_capacity(phi, ConstraintSpec(Hamiltonian(h), energy), options(restarts, seed)));
        },
        py::arg("channel"), py::arg("hamiltonian"), py::arg("energy"), py::arg("restarts") = 16, py::arg("seed") = 0);
  m.def("chi_function",
        [](const KrausChannel& phi, const Matrix& rho, int restarts, std::uint64_t seed) {
          return result_dict(chi_function(phi, DensityMatrix(rho), options(restarts, seed)));
        },
        py::arg("channel"), py::arg("rho"), py::arg("restarts") = 16, py::arg("seed") = 0);
  m.def("ea_capacity",
        [](const KrausChannel& phi, const Matrix& h, double energy) {
          return result_dict(ea_capacity(phi, ConstraintSpec(Hamiltonian(h), energy)));
        },
        py::arg("channel"), py::arg("hamiltonian"), py::arg("energy"));
  m.def("capacity_gap",
        [](const KrausChannel& phi, const Matrix& h, double energy, int restarts, std::uint64_t seed) {
          const GapReport g = capacity_gap(phi, ConstraintSpec(Hamiltonian(h), energy), options(restarts, seed));
          py::dict out;
          out["chi"] = g.chi.value;
          out["ea"] = g.ea.value;
          out["gap"] = g.gap;
          out["triggered"] = g.triggered;
          return out;
        },
        py::arg("channel"), py::arg("hamiltonian"), py::arg("energy"), py::arg("restarts") = 16, py::arg("seed") = 0);
  m.def("mutual_information",
        [](const KrausChannel& phi, const Matrix& rho) { return channel_mutual_information(phi, DensityMatrix(rho)); },
        py::arg("channel"), py::arg("rho"));
  m.def("coherent_information",
        [](const KrausChannel& phi, const Matrix& rho) { return coherent_information(phi, DensityMatrix(rho)); },
        py::arg("channel"), py::arg("rho"));
  m.def("coherent_information_via_chi",
        [](const KrausChannel& phi, const Matrix& rho) { return ci_via_chi(phi, DensityMatrix(rho)).value; },
        py::arg("channel"), py::arg("rho"));

  m.def("classify_gaussian",
        [](int s_a, int s_b, const RealMatrix& k, const RealMatrix& alpha, bool degradable) {
          const GaussianChannelSpec spec(s_a, s_b, k, alpha);
          const GaussianValidity v = validate(spec);
          py::dict out;
          out["valid"] = v.valid;
          out["min_eigenvalue"] = std::min(v.min_eig_minus, v.min_eig_plus);
          if (v.valid) {
            const GapClassification c = classify_gap(spec, degradable);
            out["triggers"] = c.triggers;
            out["verdict"] = c.verdict;
            out["rank_k"] = c.rank_k;
          }
          return out;
        },
        py::arg("s_a"), py::arg("s_b"), py::arg("k"), py::arg("alpha"), py::arg("degradable") = false);

  m.def("selftest", [](unsigned seed) {
    py::list out;
    for (const SelfCheck& c : run_selftest(seed)) {
      py::dict d;
      d["name"] = c.name;
      d["passed"] = c.passed;
      d["detail"] = c.detail;
      out.append(d);
    }
    return out;
  }, py::arg("seed") = 0);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<std::string> full = {"qcap"};
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const std::string& a : full) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
