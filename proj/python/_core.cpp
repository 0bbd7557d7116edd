#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "asymptotica/backward.hpp"
#include "asymptotica/experiments.hpp"
#include "asymptotica/version.hpp"

namespace py = pybind11;
using namespace asymptotica;

namespace {

Direction direction_of(const std::string& s) {
  if (s == "forward") return Direction::forward;
  if (s == "adjoint") return Direction::adjoint;
  throw py::value_error("direction must be 'forward' or 'adjoint'");
}

ChainMode mode_of(const std::string& s) {
  if (s == "stepwise") return ChainMode::stepwise;
  if (s == "joint") return ChainMode::joint;
  throw py::value_error("mode must be 'stepwise' or 'joint'");
}

py::dict orbit_dict(const OrbitRecord& r) {
  py::dict d;
  d["direction"] = std::string(to_string(r.direction));
  d["norms"] = r.norms;
  d["faithful_horizon"] = r.faithful_horizon;
  d["verdict"] = std::string(to_string(r.verdict));
  d["liminf_proxy"] = r.liminf_proxy;
  return d;
}

py::dict chain_dict(const BackwardChain& c) {
  Mat elements(c.elements.empty() ? 0 : c.elements[0].size(), c.elements.size());
  for (std::size_t n = 0; n < c.elements.size(); ++n) elements.col(static_cast<Eigen::Index>(n)) = c.elements[n];
  py::dict d;
  d["elements"] = elements;
  d["residuals"] = c.residuals;
  d["norm_profile"] = c.norm_profile;
  d["sup_norm"] = c.sup_norm;
  d["verdict"] = std::string(to_string(c.bounded_verdict));
  d["growth_slope"] = c.growth_slope;
  d["mode"] = std::string(to_string(c.mode));
  d["trusted_prefix"] = c.trusted_prefix;
  d["chain_tol"] = c.chain_tol;
  return d;
}

py::dict report_dict(const Report& r) {
  py::list checks;
  for (const auto& c : r.checks) {
    py::dict d;
    d["group"] = c.group;
    d["name"] = c.name;
    d["passed"] = c.passed;
    d["value"] = c.value;
    d["bound"] = c.bound;
    d["detail"] = c.detail;
    d["informational"] = c.informational;
    checks.append(d);
  }
  py::dict d;
  d["experiment"] = r.experiment;
  d["passed"] = r.passed();
  d["checks"] = checks;
  d["diagnostics"] = r.diagnostics;
  d["csv"] = render_csv(r);
  d["summary"] = render_summary(r);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical experiments on power-bounded operators";
  m.attr("__version__") = kVersion;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<NotInRangeError>(m, "NotInRangeError", error.ptr());

  py::class_<Operator>(m, "Operator")
      .def_property_readonly("dim", &Operator::dim)
      .def_property_readonly("label", &Operator::label)
      .def("apply", &Operator::apply, py::arg("x"))
      .def("adjoint_apply", &Operator::adjoint_apply, py::arg("y"))
      .def("apply_power", &Operator::apply_power, py::arg("x"), py::arg("n"))
      .def("dense", &Operator::dense)
      .def("__repr__", [](const Operator& op) {
        return "<Operator " + op.label() + " dim=" + std::to_string(op.dim()) + ">";
      });

  m.def("parse_operator", &parse_operator, py::arg("expression"), py::arg("dim") = py::none(),
        "Operator from a JSON expression or a call such as 'jordan(4)'.");
  m.def("matrix", [](const Mat& a) { return dense_op(a, "matrix"); }, py::arg("a"));
  m.def("identity", &identity, py::arg("dim"));
  m.def("jordan", &jordan_nilpotent, py::arg("dim"));
  m.def("diag_unitary", &diag_unitary, py::arg("dim"), py::arg("seed") = 0);
  m.def("example1", &example1, py::arg("dim"));
  m.def("example2", &example2_op, py::arg("dim"));
  m.def("example3", &example3, py::arg("blocks") = 64, py::arg("block_dim") = 64);
  m.def("volterra", [](std::size_t n) { return volterra(n); }, py::arg("m"));
  m.def("mult_exp", [](std::size_t n) { return mult_exp(n); }, py::arg("m"));
  m.def("projection_constants", &projection_constants, py::arg("m"));
  m.def("direct_sum", &direct_sum, py::arg("blocks"));
  m.def("sum", &sum, py::arg("terms"));
  m.def("compose", py::overload_cast<std::vector<Operator>>(&compose), py::arg("factors"));
  m.def("scale", &scale, py::arg("op"), py::arg("factor"));
  m.def("similarity", &similarity, py::arg("s"), py::arg("t"));
  m.def("inverse", [](const Operator& op) { return inverse_op(op); }, py::arg("op"));
  m.def("adjoint", &adjoint_op, py::arg("op"));

  m.def("orbit",
        [](const Operator& op, const Vec& x, std::size_t n_max, const std::string& direction) {
          return orbit_dict(orbit(op, x, n_max, direction_of(direction)));
        },
        py::arg("op"), py::arg("x"), py::arg("n_max"), py::arg("direction") = "forward");
  m.def("power_bound_estimate",
        [](const Operator& op, std::size_t n_max) {
          const PowerBound pb = power_bound_estimate(op, n_max);
          py::dict d;
          d["m_est"] = pb.m_est;
          d["attained_at"] = pb.attained_at;
          d["power_norms"] = pb.power_norms;
          d["method"] = pb.method;
          return d;
        },
        py::arg("op"), py::arg("n_max"));
  m.def("asymptote_gram",
        [](const Operator& op, std::size_t n, const std::string& direction) {
          const AsymptoteGram g = asymptote_gram(op, n, direction_of(direction));
          py::dict d;
          d["average"] = g.average;
          d["kernel_basis"] = g.kernel_basis;
          d["range_basis"] = g.range_basis;
          d["eigenvalues"] = g.eigenvalues;
          d["stabilization"] = g.stabilization;
          d["glim_unresolved"] = g.glim_unresolved;
          d["warning"] = g.warning;
          return d;
        },
        py::arg("op"), py::arg("n_horizon"), py::arg("direction") = "adjoint");
  m.def("backward_chain",
        [](const Operator& op, const Vec& x, std::size_t steps, const std::string& mode) {
          return chain_dict(backward_chain(op, x, steps, mode_of(mode)));
        },
        py::arg("op"), py::arg("x"), py::arg("m"), py::arg("mode") = "stepwise");
  m.def("is_in_mt",
        [](const Operator& op, const Vec& x, std::size_t horizon, std::optional<double> cap) {
          const MtMembership r = is_in_mt(op, x, horizon, cap);
          py::dict d;
          d["verdict"] = std::string(to_string(r.verdict));
          d["sup_norm"] = r.sup_norm;
          d["witness"] = r.witness;
          d["horizon"] = r.horizon;
          d["growth_slope"] = r.growth_slope;
          return d;
        },
        py::arg("op"), py::arg("x"), py::arg("horizon") = 0, py::arg("bound_cap") = py::none());

  m.def("verify_cases", &verify_cases);
  m.def("verify",
        [](const std::string& name, std::optional<std::size_t> dim, std::optional<std::size_t> horizon,
           std::uint64_t seed) {
          VerifyOptions o;
          o.dim = dim;
          o.horizon = horizon;
          o.seed = seed;
          Report r;
          {
            py::gil_scoped_release release;
            r = verify(name, o);
          }
          return report_dict(r);
        },
        py::arg("case"), py::arg("dim") = py::none(), py::arg("horizon") = py::none(),
        py::arg("seed") = 0);
  m.def("run_config",
        [](const std::string& text) {
          const ExperimentConfig cfg = parse_config(text);
          Report r;
          {
            py::gil_scoped_release release;
            r = run(cfg);
          }
          return report_dict(r);
        },
        py::arg("config_json"));
}
