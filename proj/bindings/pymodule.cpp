#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hardylab/bvp.hpp"
#include "hardylab/capacity.hpp"
#include "hardylab/fieldops.hpp"
#include "hardylab/hemisphere.hpp"
#include "hardylab/params.hpp"

namespace py = pybind11;
using namespace hardylab;

namespace {

py::dict pack_dict(const ExponentPack& pk) {
  py::dict d;
  d["q"] = pk.q;
  d["q_crit"] = pk.q_crit;
  d["ell"] = pk.ell;
  d["kappa"] = pk.kappa;
  d["sing_exp"] = pk.sing_exp;
  if (pk.gamma1) d["gamma1"] = *pk.gamma1;
  if (pk.alpha0) d["alpha0"] = *pk.alpha0;
  if (pk.mu0) d["mu0"] = *pk.mu0;
  if (pk.gamma2) d["gamma2"] = *pk.gamma2;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hardylab, m) {
  m.doc() = "numerical laboratory for the Hardy-potential equation with gradient absorption";

  py::register_exception<domain_error>(m, "DomainError", PyExc_ValueError);
  py::register_exception<supercritical_error>(m, "SupercriticalError", PyExc_RuntimeError);
  py::register_exception<convergence_error>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<fit_error>(m, "FitError", PyExc_RuntimeError);

  m.def("alpha_of_mu", &alpha_of_mu, py::arg("mu"));
  m.def("q_crit", &q_crit, py::arg("n"), py::arg("alpha"));
  m.def("phi_mu", &phi_mu, py::arg("phi_angle"), py::arg("alpha"));
  m.def("grad_identity_gap", &grad_identity_gap, py::arg("phi_angle"));
  m.def(
      "weight_w",
      [](double delta, int n, double mu, double diam) {
        return weight_W(delta, HardyParams::make(n, mu), diam);
      },
      py::arg("delta"), py::arg("n"), py::arg("mu"), py::arg("diam") = 2.0);
  m.def(
      "exponent_pack",
      [](int n, double mu, double q) { return pack_dict(exponent_pack(HardyParams::make(n, mu), q)); },
      py::arg("n"), py::arg("mu"), py::arg("q"));

  m.def(
      "solve_omega",
      [](int n, double mu, double q, int mesh) {
        const auto hp = HardyParams::make(n, mu);
        const auto sol = solve_omega(hp, q, AngularMesh::cosine(mesh));
        py::dict d;
        d["phi"] = sol.mesh.phi;
        d["omega"] = sol.omega;
        d["v"] = sol.v;
        d["residual_sup"] = sol.residual_sup;
        d["boundary_exponent_fit"] = boundary_exponent_fit(sol);
        d["alpha"] = hp.alpha;
        return d;
      },
      py::arg("n"), py::arg("mu"), py::arg("q"), py::arg("mesh") = 400);
  m.def(
      "uniqueness_probe",
      [](int n, double mu, double q, int mesh) {
        return uniqueness_probe(HardyParams::make(n, mu), q, AngularMesh::cosine(mesh));
      },
      py::arg("n"), py::arg("mu"), py::arg("q"), py::arg("mesh") = 200);

  m.def(
      "martin_halfspace",
      [](double r, double phi, int n, double mu) {
        return martin_halfspace(r, phi, HardyParams::make(n, mu));
      },
      py::arg("r"), py::arg("phi"), py::arg("n"), py::arg("mu"));
  m.def(
      "rayleigh_lambda",
      [](int n, double mu, int trials, double r_min, int jr, int mesh) {
        return rayleigh_lambda(AxiGrid::make(r_min, jr, mesh, n), HardyParams::make(n, mu),
                               trials);
      },
      py::arg("n"), py::arg("mu"), py::arg("trials") = 8, py::arg("r_min") = 1e-3,
      py::arg("jr") = 65, py::arg("mesh") = 97);
  m.def(
      "weak_tail_martin",
      [](int n, double mu, double gamma, bool gradient, double r_min, int jr, int mesh) {
        const auto hp = HardyParams::make(n, mu);
        const AxiGrid g = AxiGrid::make(r_min, jr, mesh, n);
        SolutionField K = martin_field(g, hp);
        WeakNormReport r;
        if (gradient) {
          K.compute_gradient();
          SolutionField gm(g);
          for (int j = 0; j < g.jr(); ++j)
            for (int i = 0; i < g.m(); ++i) gm.at(j, i) = K.gradient_magnitude(j, i);
          r = weak_tail(gm, gamma);
        } else {
          r = weak_tail(K, gamma);
        }
        py::dict d;
        d["gamma"] = r.gamma;
        d["p_hat"] = r.p_hat;
        d["lambda_lo"] = r.lambda_lo;
        d["lambda_hi"] = r.lambda_hi;
        d["norm_estimate"] = r.norm_estimate;
        return d;
      },
      py::arg("n"), py::arg("mu"), py::arg("gamma") = 0.0, py::arg("gradient") = false,
      py::arg("r_min") = 1e-3, py::arg("jr") = 129, py::arg("mesh") = 160);

  m.def(
      "solve_weak",
      [](double k, int n, double mu, double q, double r_min, int jr, int mesh) {
        const auto hp = HardyParams::make(n, mu);
        const AxiGrid g = AxiGrid::make(r_min, jr, mesh, n);
        const auto run = solve_weak(k, hp, q, g);
        const auto tr = ratio_trace(run);
        py::dict d;
        d["k"] = k;
        d["residual_sup"] = run.residual_sup;
        d["r"] = tr.r;
        d["axis_ratio"] = tr.ratio;
        d["ratio_extrapolated"] = tr.extrapolated;
        return d;
      },
      py::arg("k"), py::arg("n"), py::arg("mu"), py::arg("q"), py::arg("r_min") = 1e-3,
      py::arg("jr") = 97, py::arg("mesh") = 120);

  m.def("point_capacity_zero", &point_capacity_zero, py::arg("s"), py::arg("p"), py::arg("d"));
  m.def(
      "threshold_consistency",
      [](int n, double mu) { return threshold_consistency(HardyParams::make(n, mu)); },
      py::arg("n"), py::arg("mu"));
  m.def("ball_capacity_scaling", &ball_capacity_scaling, py::arg("s"), py::arg("p"), py::arg("d"),
        py::arg("radii"));
  m.def(
      "classify_removability",
      [](int n, double mu, double q) {
        const auto v = classify_removability(HardyParams::make(n, mu), q);
        py::dict d;
        d["regime"] = to_string(v.regime);
        d["point_removable"] = v.point_removable;
        d["conclusive"] = v.conclusive;
        d["s"] = v.s;
        d["p"] = v.p;
        if (v.eps_lo) d["eps_window"] = py::make_tuple(*v.eps_lo, *v.eps_hi);
        if (v.eps_cert_lo) d["eps_certifying"] = py::make_tuple(*v.eps_cert_lo, *v.eps_cert_hi);
        return d;
      },
      py::arg("n"), py::arg("mu"), py::arg("q"));

  m.def(
      "barrier_certificate",
      [](int n, double mu, double q, double gamma, double b, double radius, int side) {
        BarrierSpec spec;
        spec.gamma = gamma;
        spec.b = b;
        spec.radius = radius;
        spec.log_case = mu >= 0.25;
        const auto cert = barrier_certificate(spec, HardyParams::make(n, mu), q, side);
        py::dict d;
        d["amplitude"] = cert.amplitude;
        d["min_residual"] = cert.min_residual;
        d["min_scaled"] = cert.min_scaled;
        return d;
      },
      py::arg("n"), py::arg("mu"), py::arg("q"), py::arg("gamma") = 0.6, py::arg("b") = 9.0,
      py::arg("radius") = 1.0 / 16.0, py::arg("side") = 120);
}
