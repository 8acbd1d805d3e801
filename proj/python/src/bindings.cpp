#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hardcore/bounds.hpp"
#include "hardcore/errors.hpp"
#include "hardcore/finite_oracle.hpp"
#include "hardcore/path_measures.hpp"
#include "hardcore/periodic.hpp"
#include "hardcore/ti_solver.hpp"

namespace py = pybind11;
using namespace hardcore;

namespace {

ActivityVector uniform(double lambda) { return ActivityVector::uniform(2, lambda); }

py::int_ to_python(const BigCount& value) {
  return py::reinterpret_steal<py::int_>(PyLong_FromString(value.str().c_str(), nullptr, 10));
}

}  // namespace

PYBIND11_MODULE(hardcore_trees, m) {
  m.doc() = "Hard-core models on Cayley trees: fixed points, phase transitions and exact checks";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<SingularModel>(m, "SingularModel", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);

  py::class_<TISolution>(m, "TISolution")
      .def_readonly("z", &TISolution::z)
      .def_property_readonly("kind", [](const TISolution& s) { return std::string(to_string(s.kind)); })
      .def_readonly("residual", &TISolution::residual)
      .def("__repr__", [](const TISolution& s) {
        return "TISolution(z=" + py::repr(py::cast(s.z)).cast<std::string>() + ", kind=" +
               std::string(to_string(s.kind)) + ")";
      });

  m.def(
      "ti_solutions",
      [](const std::string& model, double lambda, int k) {
        return count_ti_solutions(builtin(model), uniform(lambda), k);
      },
      py::arg("model"), py::arg("lam"), py::arg("k") = 2,
      "Translation-invariant solutions for a builtin graph with activities (1, lam, lam).");
  m.def(
      "critical_lambda",
      [](const std::string& model, int k) { return critical_lambda(parse_builtin(model), k); }, py::arg("model"),
      py::arg("k") = 2, "Activity where the hinge or wand TI solution count first exceeds one, or None.");
  m.def(
      "pipe_certificate", [](double lambda, int k) { return pipe_uniqueness_certificate(lambda, k).passed(); },
      py::arg("lam"), py::arg("k"));

  py::class_<Envelope>(m, "Envelope")
      .def_readonly("z1_minus", &Envelope::z1_minus)
      .def_readonly("z1_plus", &Envelope::z1_plus)
      .def_readonly("z2_minus", &Envelope::z2_minus)
      .def_readonly("z2_plus", &Envelope::z2_plus)
      .def_readonly("z_minus", &Envelope::z_minus)
      .def_readonly("residual", &Envelope::residual)
      .def("collapsed", &Envelope::collapsed, py::arg("tol") = 1e-8)
      .def("symmetry_check", [](const Envelope& e) { return envelope_symmetry_check(e); });
  m.def(
      "envelopes", [](const std::string& model, double lambda, int k) { return solve_envelope(parse_builtin(model), lambda, k); },
      py::arg("model"), py::arg("lam"), py::arg("k") = 2);
  m.def("z_minus", &z_minus_hinge_k2, py::arg("lam"));
  m.def("lipschitz_constant", &lipschitz_constant, py::arg("z_minus"));

  m.def("gamma2_fixed_points", &gamma2_fixed_points, py::arg("lam"), py::arg("k"));
  m.def("kesten_condition", &kesten_condition, py::arg("lam"), py::arg("k"));
  m.def(
      "period_doubling_window",
      [](int k) -> std::optional<std::pair<double, double>> {
        const auto w = period_doubling_window(k);
        if (!w) return std::nullopt;
        return std::make_pair(w->lambda_low, w->lambda_high);
      },
      py::arg("k"), "Activity interval with a symmetric two-cycle, or None for k < 6.");

  m.def("contraction_window", [] {
    const auto w = contraction_window();
    return std::make_pair(w.lower, w.upper);
  });
  py::class_<PathField>(m, "PathField")
      .def_readonly("t", &PathField::t)
      .def_readonly("lam", &PathField::lambda)
      .def_readonly("n", &PathField::n)
      .def_readonly("depth_limit", &PathField::depth_limit)
      .def_readonly("history", &PathField::history)
      .def_readonly("sup_change", &PathField::sup_change)
      .def_readonly("converged", &PathField::converged)
      .def("log_field", [](const PathField& f) {
        std::vector<LogPair> out;
        for (std::size_t v = 0; v < f.field.size(); ++v) out.push_back(f.log_at(v));
        return out;
      })
      .def("contraction_ratios", &PathField::contraction_ratios, py::arg("floor") = 1e-13)
      .def("to_csv", &PathField::to_csv);
  m.def("solve_path_field", &solve_path_field, py::arg("t"), py::arg("lam"), py::arg("n"),
        py::arg("depth_limit") = py::none(), py::arg("tol") = 1e-9);
  m.def(
      "distinguish",
      [](double t1, double t2, double lambda, int n, double tol) -> std::optional<std::string> {
        const auto x = distinguish(t1, t2, lambda, n, tol);
        if (!x) return std::nullopt;
        return x->to_string();
      },
      py::arg("t1"), py::arg("t2"), py::arg("lam"), py::arg("n"), py::arg("tol") = 1e-9,
      "Address of the first vertex where the two path fields differ, or None.");

  m.def(
      "count_admissible",
      [](const std::string& model, int k, int n) { return to_python(count_admissible(builtin(model), k, n).value); },
      py::arg("model"), py::arg("k"), py::arg("n"));
  m.def(
      "oracle_check",
      [](const std::string& model, double lambda, int k, int n, int solution) {
        const auto g = builtin(model);
        const auto lam = uniform(lambda);
        const auto sols = count_ti_solutions(g, lam, k);
        if (solution < 0 || solution >= static_cast<int>(sols.size())) {
          throw InvalidInput("solution must index one of the " + std::to_string(sols.size()) + " TI solutions");
        }
        const auto r = oracle_report(g, lam, constant_field(g, lam, k, n, sols[static_cast<std::size_t>(solution)].z));
        py::dict d;
        d["model"] = r.model;
        d["lambda"] = r.lambda;
        d["k"] = r.k;
        d["n"] = r.n;
        d["Z"] = r.Z;
        d["defect"] = r.defect;
        d["marginals"] = r.marginals;
        return d;
      },
      py::arg("model"), py::arg("lam"), py::arg("k") = 2, py::arg("n") = 2, py::arg("solution") = 0,
      "Exact compatibility check of a TI field on the ball of radius n.");
}
