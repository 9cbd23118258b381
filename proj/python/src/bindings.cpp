#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kpqhj/action.hpp"
#include "kpqhj/bloch.hpp"
#include "kpqhj/cli.hpp"
#include "kpqhj/errors.hpp"
#include "kpqhj/matching.hpp"
#include "kpqhj/model.hpp"
#include "kpqhj/spectrum.hpp"

namespace py = pybind11;
using namespace kpqhj;

PYBIND11_MODULE(_kpqhj, m) {
  m.doc() = "Kronig-Penney lattice through the reduced action of the quantum Hamilton-Jacobi equation";

  auto base = py::register_exception<Error>(m, "KpqhjError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<GridError>(m, "GridError", base);
  py::register_exception<ConstantError>(m, "ConstantError", base);
  py::register_exception<DegenerateError>(m, "DegenerateError", base);
  py::register_exception<GammaDegenerateError>(m, "GammaDegenerateError", base);
  py::register_exception<TanPoleError>(m, "TanPoleError", base);
  py::register_exception<PoleError>(m, "PoleError", base);
  py::register_exception<NoConvergenceError>(m, "NoConvergenceError", base);
  py::register_exception<ForbiddenEnergyError>(m, "ForbiddenEnergyError", base);

  py::enum_<Region>(m, "Region").value("Well", Region::Well).value("Barrier", Region::Barrier);
  py::enum_<Regime>(m, "Regime")
      .value("AboveBarrier", Regime::AboveBarrier)
      .value("BelowBarrier", Regime::BelowBarrier)
      .value("AtThreshold", Regime::AtThreshold);
  py::enum_<BasisKind>(m, "BasisKind")
      .value("Trig", BasisKind::Trig)
      .value("Hyperbolic", BasisKind::Hyperbolic)
      .value("Linear", BasisKind::Linear);

  py::class_<LatticeSpec>(m, "LatticeSpec")
      .def(py::init<double, double, double>(), py::arg("v0"), py::arg("c"), py::arg("d"))
      .def_property_readonly("v0", &LatticeSpec::v0)
      .def_property_readonly("c", &LatticeSpec::c)
      .def_property_readonly("d", &LatticeSpec::d)
      .def_property_readonly("period", &LatticeSpec::period)
      .def("potential", &LatticeSpec::potential)
      .def("__repr__", [](const LatticeSpec& l) {
        std::ostringstream s;
        s << "LatticeSpec(v0=" << l.v0() << ", c=" << l.c() << ", d=" << l.d() << ")";
        return s.str();
      });

  py::class_<Wavenumbers>(m, "Wavenumbers")
      .def_readonly("regime", &Wavenumbers::regime)
      .def_readonly("k1", &Wavenumbers::k1)
      .def_readonly("k2", &Wavenumbers::k2)
      .def_readonly("k3", &Wavenumbers::k3);
  m.def("wavenumbers", &wavenumbers, py::arg("energy"), py::arg("lattice"));

  py::class_<BasisPair>(m, "BasisPair")
      .def(py::init<BasisKind, double, double, Mat2>(), py::arg("kind"), py::arg("k"),
           py::arg("origin") = 0.0, py::arg("mix") = kIdentity2)
      .def_property_readonly("kind", &BasisPair::kind)
      .def_property_readonly("k", &BasisPair::k)
      .def_property_readonly("origin", &BasisPair::origin)
      .def_property_readonly("wronskian", &BasisPair::wronskian)
      .def("recombined", &BasisPair::recombined);

  py::class_<ActionConstants>(m, "ActionConstants")
      .def(py::init(&ActionConstants::make), py::arg("mu"), py::arg("nu"), py::arg("l") = 0.0)
      .def_readonly("mu", &ActionConstants::mu)
      .def_readonly("nu", &ActionConstants::nu)
      .def_readonly("l", &ActionConstants::l);

  py::class_<ActionSample>(m, "ActionSample")
      .def_readonly("x", &ActionSample::x)
      .def_readonly("s0", &ActionSample::s0)
      .def_readonly("ds0", &ActionSample::ds0)
      .def_readonly("d2s0", &ActionSample::d2s0)
      .def_readonly("r", &ActionSample::r)
      .def_readonly("branch_count", &ActionSample::branch_count);
  m.def("eval_action", &eval_action, py::arg("x"), py::arg("basis"), py::arg("constants"));
  m.def(
      "qshje_residual",
      [](const std::vector<double>& grid, const BasisPair& b, const ActionConstants& k, double e,
         const LatticeSpec& lat) { return qshje_residual(grid, amplitude_profile(grid, b, k), e, lat); },
      py::arg("grid"), py::arg("basis"), py::arg("constants"), py::arg("energy"), py::arg("lattice"));
  m.def(
      "schrodinger_residual",
      [](const std::vector<double>& phi, double e, const LatticeSpec& lat,
         const std::vector<double>& grid) { return schrodinger_residual(phi, e, lat, grid); },
      py::arg("phi"), py::arg("energy"), py::arg("lattice"), py::arg("grid"));
  m.def("propagate_constants", &propagate_constants, py::arg("left"), py::arg("basis_left"),
        py::arg("basis_right"), py::arg("interface_x"));

  py::class_<SuperpositionParams>(m, "SuperpositionParams")
      .def(py::init<double, double, double, double>(), py::arg("alpha_mod"), py::arg("a"),
           py::arg("beta_mod"), py::arg("b"))
      .def_static("from_gamma_delta", &SuperpositionParams::from_gamma_delta, py::arg("gamma"),
                  py::arg("delta") = 0.0)
      .def_static("bohm", &SuperpositionParams::bohm)
      .def_property_readonly("gamma", &SuperpositionParams::gamma)
      .def_property_readonly("delta", &SuperpositionParams::delta);

  m.def("dispersion_rhs", &dispersion_rhs, py::arg("energy"), py::arg("lattice"));
  py::class_<BlochPoint>(m, "BlochPoint")
      .def_readonly("energy", &BlochPoint::energy)
      .def_readonly("cos_ke", &BlochPoint::cos_ke)
      .def_readonly("allowed", &BlochPoint::allowed)
      .def_readonly("k_bloch", &BlochPoint::k_bloch);
  m.def("bloch_wavenumber", &bloch_wavenumber, py::arg("energy"), py::arg("lattice"));
  py::class_<Band>(m, "Band")
      .def_readonly("index", &Band::index)
      .def_readonly("e_lo", &Band::e_lo)
      .def_readonly("e_hi", &Band::e_hi)
      .def_readonly("clipped_lo", &Band::clipped_lo)
      .def_readonly("clipped_hi", &Band::clipped_hi);
  m.def("find_bands", &find_bands, py::arg("lattice"), py::arg("e_min"), py::arg("e_max"),
        py::arg("n_samples") = 4000);
  m.def(
      "transfer_half_trace",
      [](double e, const LatticeSpec& lat) { return transfer_matrix_oracle(e, lat).half_trace; },
      py::arg("energy"), py::arg("lattice"));

  m.def("dispersion_via_action", &dispersion_via_action, py::arg("energy"), py::arg("lattice"),
        py::arg("superposition"));
  m.def(
      "solve_bloch_constants",
      [](double e, const LatticeSpec& lat, const SuperpositionParams& sp) {
        const BlochPoint bp = bloch_wavenumber(e, lat);
        if (!bp.k_bloch) throw ForbiddenEnergyError("energy lies in a gap");
        const auto bc = solve_bloch_constants(e, lat, sp, *bp.k_bloch * lat.period());
        return py::make_tuple(bc.mu1, bc.nu1, bc.n);
      },
      py::arg("energy"), py::arg("lattice"), py::arg("superposition"),
      "(mu1, nu1, n) of the exp(+iKe) state");

  py::class_<MobiusMap>(m, "MobiusMap")
      .def_readonly("p", &MobiusMap::p)
      .def_readonly("q", &MobiusMap::q)
      .def_readonly("m", &MobiusMap::m)
      .def_readonly("n", &MobiusMap::n)
      .def("trace", &MobiusMap::trace)
      .def("__call__", [](const MobiusMap& map, cplx z) { return apply_mobius(map, z); });
  m.def("mobius_coefficients", &mobius_coefficients, py::arg("superposition"), py::arg("ke"));
  m.def(
      "bloch_defect",
      [](double s, double se, const SuperpositionParams& sp, double ke) {
        const auto d = bloch_defect(s, se, sp, ke);
        return py::make_tuple(d.defect, d.n);
      },
      py::arg("s0_x"), py::arg("s0_xe"), py::arg("superposition"), py::arg("ke"));
  m.def(
      "bohm_defect",
      [](double s, double se, double ke) {
        const auto d = bohm_defect(s, se, ke);
        return py::make_tuple(d.defect, d.n_prime, d.f_shift);
      },
      py::arg("s0_x"), py::arg("s0_xe"), py::arg("ke"));

  py::class_<BlochAction>(m, "BlochAction")
      .def_static("construct", &BlochAction::construct, py::arg("energy"), py::arg("lattice"),
                  py::arg("superposition"), py::arg("periods") = 2)
      .def_property_readonly("energy", &BlochAction::energy)
      .def_property_readonly("ke", &BlochAction::ke)
      .def_property_readonly("k_bloch", &BlochAction::k_bloch)
      .def_property_readonly("mu1", &BlochAction::mu1)
      .def_property_readonly("nu1", &BlochAction::nu1)
      .def_property_readonly("n", &BlochAction::n)
      .def_property_readonly("x_begin", &BlochAction::x_begin)
      .def_property_readonly("x_end", &BlochAction::x_end)
      .def("sample", &BlochAction::sample, py::arg("x"))
      .def("wavefunction", &BlochAction::wavefunction, py::arg("x"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line front end; returns (exit code, stdout, stderr).");
}
