#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ldpkit/cgf.hpp"
#include "ldpkit/errors.hpp"
#include "ldpkit/kernel.hpp"
#include "ldpkit/kernel_rate.hpp"
#include "ldpkit/metrics.hpp"
#include "ldpkit/montecarlo.hpp"
#include "ldpkit/path.hpp"
#include "ldpkit/selftest.hpp"

namespace py = pybind11;
using namespace ldp;

namespace {

// Extended reals cross the boundary as IEEE doubles (inf allowed).
double d(ExtReal x) { return x.to_double(); }

Vec as_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

py::dict rate_dict(const KernelRateResult& r) {
  py::dict out;
  out["value"] = d(r.value);
  out["branch"] = to_string(r.branch);
  out["lambda_star"] = r.lambda_star ? py::cast(std::vector<double>(r.lambda_star->begin(), r.lambda_star->end()))
                                     : py::none();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rate functions of kernel-weighted sums, path functionals and metrics";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);

  py::class_<CgfModel, std::shared_ptr<CgfModel>>(m, "Model")
      .def_property_readonly("id", &CgfModel::id)
      .def_property_readonly("dimension", &CgfModel::dimension)
      .def("cgf", [](const CgfModel& md, const std::vector<double>& u) { return d(cgf_eval(md, as_vec(u))); })
      .def("cgf_grad", [](const CgfModel& md, const std::vector<double>& u) { return cgf_grad(md, as_vec(u)); })
      .def("rate", [](const CgfModel& md, const std::vector<double>& v) { return d(rate_value(md, as_vec(v))); })
      .def("recession", [](const CgfModel& md, const std::vector<double>& l) { return d(recession(md, as_vec(l))); })
      .def("__repr__", [](const CgfModel& md) { return "Model('" + md.id() + "')"; });
  m.def(
      "parse_model",
      [](const std::string& spec) { return std::const_pointer_cast<CgfModel>(parse_model(spec)); },
      py::arg("spec"));

  py::class_<Kernel>(m, "Kernel")
      .def(py::init(&parse_kernel), py::arg("spec"))
      .def("__call__", &Kernel::operator())
      .def_property_readonly("spec", &Kernel::spec)
      .def("__repr__", [](const Kernel& k) { return "Kernel('" + k.spec() + "')"; });

  py::class_<CadlagPath>(m, "Path")
      .def_static("parse", &parse_path, py::arg("text"))
      .def_static("scalar", &CadlagPath::scalar, py::arg("grid"), py::arg("slopes"),
                  py::arg("jumps") = std::vector<std::pair<double, double>>{})
      .def_property_readonly("dimension", &CadlagPath::dimension)
      .def("value", &CadlagPath::value, py::arg("t"))
      .def("to_text", &to_text)
      .def("to_json", &to_json)
      .def("__eq__", [](const CadlagPath& a, const CadlagPath& b) { return a == b; });

  m.def("e_f", [](const CgfModel& md, const Kernel& k, const std::vector<double>& l) { return d(e_f(md, k, as_vec(l))); },
        py::arg("model"), py::arg("kernel"), py::arg("lam"));
  m.def(
      "i_f_conjugate",
      [](const CgfModel& md, const Kernel& k, const std::vector<double>& x, double tol) {
        return rate_dict(i_f_conjugate(md, k, as_vec(x), tol));
      },
      py::arg("model"), py::arg("kernel"), py::arg("x"), py::arg("tol") = 0.0);
  m.def(
      "i_f_explicit",
      [](const CgfModel& md, const Kernel& k, const std::vector<double>& x, double tol) {
        return rate_dict(i_f_explicit(md, k, as_vec(x), tol));
      },
      py::arg("model"), py::arg("kernel"), py::arg("x"), py::arg("tol") = 0.0);
  m.def(
      "minimizer",
      [](const CgfModel& md, const Kernel& k, const std::vector<double>& x, int cells) {
        return minimizer(md, k, as_vec(x), 0.0, cells);
      },
      py::arg("model"), py::arg("kernel"), py::arg("x"), py::arg("cells") = 4096);
  m.def(
      "variational_rate",
      [](const CgfModel& md, const Kernel& k, const std::vector<double>& x, int pieces) {
        return d(variational_rate(md, k, as_vec(x), pieces));
      },
      py::arg("model"), py::arg("kernel"), py::arg("x"), py::arg("pieces"));

  m.def("var", &var, py::arg("path"));
  m.def("i_d", [](const CadlagPath& h, const CgfModel& md) { return d(i_d(h, md)); }, py::arg("path"), py::arg("model"));
  m.def("pair", &pair, py::arg("kernel"), py::arg("path"));
  m.def("rho_2", &rho_2);
  m.def("rho_2_prime", &rho_2_prime);
  m.def("rho_star", &rho_star);

  m.def(
      "estimate_tail",
      [](const CgfModel& md, const Kernel& k, int n, double a, std::size_t samples, std::uint64_t seed) {
        const McEstimate e = estimate_tail(md, k, n, a, scalar_vec(1.0), samples, seed);
        py::dict out;
        out["log_prob"] = e.log_prob;
        out["std_error"] = e.std_error;
        out["rate_estimate"] = e.rate_estimate;
        out["boundary_tilt"] = e.boundary_tilt;
        return out;
      },
      py::arg("model"), py::arg("kernel"), py::arg("n"), py::arg("a"), py::arg("samples") = 100000,
      py::arg("seed") = 1);
  m.def(
      "exact_tail",
      [](const CgfModel& md, const Kernel& k, int n, double a) {
        return exact_tail_oracle(md, k, n, a, scalar_vec(1.0));
      },
      py::arg("model"), py::arg("kernel"), py::arg("n"), py::arg("a"));

  m.def(
      "selftest",
      [](std::uint64_t seed) {
        py::list out;
        for (const auto& r : run_selftest(seed))
          out.append(py::dict(py::arg("suite") = r.name, py::arg("checks") = r.checks,
                              py::arg("failures") = r.failures, py::arg("worst") = r.worst));
        return out;
      },
      py::arg("seed") = 1);
}
