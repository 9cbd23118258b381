#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kpqhj/bloch.hpp"
#include "kpqhj/errors.hpp"
#include "kpqhj/spectrum.hpp"
#include "oracles.hpp"

using namespace kpqhj;
using std::numbers::pi;

namespace {

double ke_of(double energy, const LatticeSpec& lat) {
  return *bloch_wavenumber(energy, lat).k_bloch * lat.period();
}

bool close(cplx a, cplx b, double tol = 1e-13) { return std::abs(a - b) < tol; }

}  // namespace

TEST_CASE("superposition parameters") {
  const auto sp = SuperpositionParams::from_gamma_delta(0.4, 0.3);
  CHECK(sp.gamma() == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(sp.delta() == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(SuperpositionParams::bohm().gamma() == 1.0);
  CHECK(SuperpositionParams(0.0, 0.0, 2.0, 0.0).gamma() == -1.0);
  CHECK_THROWS_AS(SuperpositionParams(0.0, 0.0, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(SuperpositionParams(-1.0, 0.0, 2.0, 0.0), DomainError);
}

TEST_CASE("Moebius coefficients") {
  const double ke = 0.83;
  const cplx w = std::polar(1.0, 2 * ke);
  auto m = mobius_coefficients(SuperpositionParams::from_gamma_delta(1.0, 0.0), ke);
  CHECK(close(m.p, 4.0 * w));
  CHECK(close(m.q, 0.0));
  CHECK(close(m.m, 0.0));
  CHECK(close(m.n, 4.0));

  m = mobius_coefficients(SuperpositionParams::from_gamma_delta(0.0, 0.0), ke);
  CHECK(close(m.p, w - 1.0));
  CHECK(close(m.q, w - 1.0));
  CHECK(close(m.m, -(w - 1.0)));
  CHECK(close(m.n, 1.0 - w));
  CHECK(close(m.trace(), 0.0));

  m = mobius_coefficients(SuperpositionParams::from_gamma_delta(0.6, 0.2), 0.0);
  CHECK(close(m.p, 4 * 0.6));
  CHECK(close(m.n, 4 * 0.6));
  CHECK(close(m.q, 0.0));
  CHECK(close(m.m, 0.0));
  const cplx z = std::polar(1.0, 0.77);
  CHECK(close(apply_mobius(m, z), z));
}

TEST_CASE("apply_mobius") {
  const double ke = 1.1;
  const auto bohm = mobius_coefficients(SuperpositionParams::from_gamma_delta(1.0, 0.0), ke);
  const cplx z = std::polar(1.0, 0.4);
  CHECK(close(apply_mobius(bohm, z), std::polar(1.0, 2 * ke) * z));

  const auto m = mobius_coefficients(SuperpositionParams::from_gamma_delta(0.5, 0.3), ke);
  const cplx direct = (m.p * z + m.q) / (m.m * z + m.n);
  CHECK(close(apply_mobius(m, z), direct, 1e-15));
  CHECK(std::abs(std::abs(apply_mobius(m, z)) - 1.0) < 1e-12);

  const MobiusMap pole{1.0, 0.0, 1.0, -1.0};
  CHECK_THROWS_AS(apply_mobius(pole, 1.0), PoleError);
}

TEST_CASE("Moebius trace, determinant and circle preservation") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> ug(-1.0, 1.0), ua(-pi, pi), ux(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    double g = ug(rng);
    if (std::abs(g) < 1e-3) g = 0.5;
    const double ke = ux(rng);
    const auto m = mobius_coefficients(SuperpositionParams::from_gamma_delta(g, ua(rng)), ke);
    CHECK(std::abs(m.trace() - 4 * g * (1.0 + std::polar(1.0, 2 * ke))) < 1e-12);
    CHECK(std::abs(m.determinant()) > 0.0);
    for (int j = 0; j < 10; ++j) {
      const cplx z = std::polar(1.0, ua(rng));
      if (std::abs(m.m * z + m.n) < 1e-6) continue;
      CHECK(std::abs(std::abs(apply_mobius(m, z)) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("Bloch phase unwrapping") {
  CHECK_THROWS_AS(unwrapped_bloch_phase(0.3, 0.0, 0.0), GammaDegenerateError);
  for (double g : {0.3, 1.0, -0.6}) {
    double prev = unwrapped_bloch_phase(-10.0, g, 0.2);
    for (int i = 1; i <= 4000; ++i) {
      const double s = -10.0 + i * 0.005;
      const double h = unwrapped_bloch_phase(s, g, 0.2);
      CHECK(std::abs(h - prev) < 0.05);
      const double t = std::atan(g * std::tan(s + 0.2));
      const double r = (h - t) / pi;
      CHECK(std::abs(r - std::round(r)) < 1e-9);
      prev = h;
    }
  }
}

TEST_CASE("Bloch and Bohm defect examples") {
  const auto bohm = SuperpositionParams::bohm();
  const double ke = 0.9;
  auto b = bloch_defect(0.4, 0.4 + ke, bohm, ke);
  CHECK(b.defect < 1e-15);
  CHECK(b.n == 0);
  b = bloch_defect(0.4, 0.4 + ke + pi, bohm, ke);
  CHECK(b.defect < 1e-14);
  CHECK(b.n == 1);
  CHECK_THROWS_AS(bloch_defect(0.1, 0.2, SuperpositionParams::from_gamma_delta(0.0, 0.0), ke),
                  GammaDegenerateError);

  auto h = bohm_defect(1.3, 1.3 + ke, ke);
  CHECK(h.defect < 1e-15);
  CHECK(h.n_prime == 0);
  CHECK(std::abs(h.f_shift) < 1e-15);
  h = bohm_defect(1.3, 1.3 + ke + 2 * pi, ke);
  CHECK(h.defect < 1e-14);
  CHECK(h.n_prime == 2);
  CHECK(h.f_shift == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("interface quantities") {
  const LatticeSpec lat(10.0, 1.0, 1.0);
  // k1 d = pi / 4
  const double k1 = pi / 4;
  const auto wn = wavenumbers(10.0 + k1 * k1, lat);
  auto q = interface_quantities(1.0, 0.0, wn, lat);
  CHECK(q.a_val == doctest::Approx(-1.0).epsilon(1e-14));

  const LatticeSpec free_lat(0.0, 0.8, 0.8);
  const auto fw = wavenumbers(2.0, free_lat);
  const double k = std::sqrt(2.0);
  q = interface_quantities(1.0, 0.0, fw, free_lat);
  CHECK(q.a_val == doctest::Approx(-std::tan(k * 0.8)).epsilon(1e-14));
  CHECK(q.b_val == doctest::Approx(std::tan(k * 0.8)).epsilon(1e-14));
  CHECK(q.b_val - q.a_val == doctest::Approx(2 * std::tan(k * 0.8)).epsilon(1e-14));

  CHECK_THROWS_AS(interface_quantities(1.0, 0.0, wavenumbers(5.0, lat), lat), DomainError);
  // k2 c = pi / 2 exactly is not representable; a pole within 1e-12 is rejected
  const double e_pole = (pi / 2) * (pi / 2);
  CHECK_THROWS_AS(interface_quantities(1.0, 0.0, wavenumbers(e_pole, LatticeSpec(0.5, 1.0, 1.0)),
                                       LatticeSpec(0.5, 1.0, 1.0)),
                  TanPoleError);
}

TEST_CASE("interface identities over random inputs") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(-3.0, 3.0), ue(10.5, 60.0), ul(0.3, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng), g = u(rng) / 3;
    const double lhs = g * g * (b - a) * (b - a);
    const double rhs = (1 + g * g * b * b) + (1 + g * g * a * a) - 2 * (1 + g * g * a * b);
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
  }
  for (int i = 0; i < 300; ++i) {
    const LatticeSpec lat(10.0, ul(rng), ul(rng));
    const auto wn = wavenumbers(ue(rng), lat);
    const double k1 = *wn.k1, k2 = wn.k2;
    if (std::abs(std::cos(k1 * lat.d())) < 1e-3 || std::abs(std::cos(k2 * lat.c())) < 1e-3) continue;
    const double mu = u(rng), nu = u(rng);
    const auto q = interface_quantities(mu, nu, wn, lat);
    const double factor =
        mu / k2 * (k1 * std::tan(k2 * lat.c()) + k2 * std::tan(k1 * lat.d()));
    CHECK(std::abs((q.b_val - q.a_val) - factor) < 1e-12 * std::max(1.0, std::abs(factor)));
    const auto [a2, b2] = constraint_arguments(mu, nu, wn, lat);
    CHECK(a2 == doctest::Approx(q.a_val).epsilon(1e-14));
    CHECK(b2 == doctest::Approx(q.b_val).epsilon(1e-12));
  }
}

TEST_CASE("solve_bloch_constants examples") {
  SUBCASE("free lattice") {
    const LatticeSpec lat(0.0, 1.0, 1.0);
    const auto sp = SuperpositionParams::from_gamma_delta(0.5, 0.0);
    for (double e : {0.7, 4.0, 9.3}) {
      const double ke = ke_of(e, lat);
      CHECK(std::cos(ke) == doctest::Approx(std::cos(std::sqrt(e) * 2.0)).epsilon(1e-12));
      const auto bc = solve_bloch_constants(e, lat, sp, ke);
      const auto [a, b] = constraint_arguments(bc.mu1, bc.nu1, wavenumbers(e, lat), lat);
      const auto res = bloch_relation_residuals(a, b, 0.5, ke);
      CHECK(res.cos2_form < 1e-9);
      if (res.tan_form) CHECK(std::abs(*res.tan_form) < 1e-9);
    }
  }
  SUBCASE("first excited band") {
    const LatticeSpec lat(10.0, 1.0, 1.0);
    const auto sp = SuperpositionParams::from_gamma_delta(0.7, 0.2);
    for (double e : {10.5, 12.0, 13.9}) {
      const double ke = ke_of(e, lat);
      const auto bc = solve_bloch_constants(e, lat, sp, ke);
      const auto q = interface_quantities(bc.mu1, bc.nu1, wavenumbers(e, lat), lat);
      const auto res = bloch_relation_residuals(q.a_val, q.b_val, 0.7, ke);
      REQUIRE(res.tan_form);
      CHECK(std::abs(*res.tan_form) < 1e-9);
      CHECK(res.cos2_form < 1e-9);
      CHECK(bc.n % 2 == 0);
      const auto [r1, r2] = explicit_constraint_residuals(bc.mu1, bc.nu1, 0.7, wavenumbers(e, lat), lat);
      CHECK(std::abs(r1) < 1e-9);
      CHECK(std::abs(r2) < 1e-8);
    }
  }
  SUBCASE("below the barrier") {
    const LatticeSpec lat(10.0, 1.0, 1.0);
    const auto sp = SuperpositionParams::from_gamma_delta(0.5, -0.4);
    for (double e : {3.3, 3.5, 3.8}) {
      const auto bc = solve_bloch_constants(e, lat, sp, ke_of(e, lat));
      CHECK(std::abs(bc.residual_first) < 1e-12);
      CHECK(std::abs(bc.residual_second) < 1e-12);
    }
  }
  SUBCASE("errors") {
    const LatticeSpec lat(10.0, 1.0, 1.0);
    CHECK_THROWS_AS(solve_bloch_constants(5.0, lat, SuperpositionParams::bohm(), 0.0),
                    ForbiddenEnergyError);
    CHECK_THROWS_AS(BlochAction::construct(5.0, lat, SuperpositionParams::bohm(), 1),
                    ForbiddenEnergyError);
    CHECK_THROWS_AS(solve_bloch_constants(12.0, lat, SuperpositionParams::from_gamma_delta(0.0, 0.0),
                                          ke_of(12.0, lat)),
                    GammaDegenerateError);
  }
}

TEST_CASE("solved constants match the transfer-matrix eigenvector") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> ufrac(0.05, 0.95), ug(0.2, 1.0), ud(-1.0, 1.0);
  const LatticeSpec lat(10.0, 1.0, 1.0);
  const double bands[][2] = {{3.217280669906, 3.850768152576},
                             {9.956365746114, 14.247691628711},
                             {16.463949188077, 26.559973351348}};
  for (int i = 0; i < 30; ++i) {
    const auto& band = bands[i % 3];
    const double e = band[0] + ufrac(rng) * (band[1] - band[0]);
    const double g = ug(rng);
    const auto bc =
        solve_bloch_constants(e, lat, SuperpositionParams::from_gamma_delta(g, ud(rng)), ke_of(e, lat));
    const auto [mu_o, nu_o] = oracle::eigen_constants(e, 10.0, 1.0, 1.0, g);
    const auto [mu_t, nu_t] = bloch_constants_from_transfer(e, lat, g);
    CAPTURE(e);
    CHECK(bc.mu1 == doctest::Approx(mu_o).epsilon(1e-8));
    CHECK(std::abs(bc.nu1 - nu_o) < 1e-8 * std::max(1.0, std::abs(nu_o)));
    CHECK(mu_t == doctest::Approx(mu_o).epsilon(1e-10));
    CHECK(std::abs(nu_t - nu_o) < 1e-10 * std::max(1.0, std::abs(nu_o)));
  }
}

TEST_CASE("dispersion through the reduced action") {
  const auto g03 = SuperpositionParams::from_gamma_delta(0.3, 0.0);
  const auto g07 = SuperpositionParams::from_gamma_delta(0.7, 0.1);
  const auto g10 = SuperpositionParams::bohm();
  const LatticeSpec free_lat(0.0, 1.0, 1.0);
  for (double e : {0.5, 3.0, 7.7}) {
    CHECK(dispersion_via_action(e, free_lat, g07) ==
          doctest::Approx(std::cos(2 * std::sqrt(e))).epsilon(1e-12));
  }
  const LatticeSpec lat(10.0, 1.0, 1.0);
  CHECK(std::abs(dispersion_via_action(13.0, lat, g07) - dispersion_rhs(13.0, lat)) < 1e-10);
  for (double e : {2.0, 5.0, 13.0, 27.5}) {
    const double a = dispersion_via_action(e, lat, g03);
    CHECK(std::abs(a - dispersion_via_action(e, lat, g07)) < 1e-12);
    CHECK(std::abs(a - dispersion_via_action(e, lat, g10)) < 1e-12);
  }
  // threshold falls back to the closed form
  CHECK(dispersion_via_action(10.0, lat, g07) == dispersion_rhs(10.0, lat));
}

TEST_CASE("defect and Moebius forms agree on constructed actions") {
  const LatticeSpec lat(10.0, 1.0, 1.0);
  for (double g : {0.5, 1.0, -0.4}) {
    for (double e : {3.5, 12.0, 20.0}) {
      const auto sp = SuperpositionParams::from_gamma_delta(g, 0.3);
      const auto chain = BlochAction::construct(e, lat, sp, 2);
      const auto map = mobius_coefficients(sp, chain.ke());
      for (int i = 0; i < 20; ++i) {
        const double x = -1.0 + 2.0 * i / 20.0 + 0.013;
        const double s = chain.sample(x).s0, se = chain.sample(x + 2.0).s0;
        const auto def = bloch_defect(s, se, sp, chain.ke());
        const double mob = std::abs(std::polar(1.0, 2 * se) - apply_mobius(map, std::polar(1.0, 2 * s)));
        CHECK(def.defect < 1e-9);
        CHECK(mob < 1e-8);
      }
      // a corrupted action breaks both
      const auto bad = BlochAction::from_constants(e, lat, sp, chain.mu1(), chain.nu1() + 0.05, 2);
      const double s = bad.sample(0.4).s0, se = bad.sample(2.4).s0;
      CHECK(bloch_defect(s, se, sp, chain.ke()).defect > 1e-6);
      CHECK(std::abs(std::polar(1.0, 2 * se) - apply_mobius(map, std::polar(1.0, 2 * s))) > 1e-6);
    }
  }
}

TEST_CASE("Bohm specialization") {
  const LatticeSpec lat(10.0, 1.0, 1.0);
  const auto sp = SuperpositionParams::bohm();
  for (double e : {3.3, 11.0, 25.0}) {
    const auto chain = BlochAction::construct(e, lat, sp, 3);
    for (double x : {-0.9, -0.2, 0.5, 1.3, 2.7}) {
      const double s = chain.sample(x).s0, se = chain.sample(x + 2.0).s0;
      const auto h = bohm_defect(s, se, chain.ke());
      CHECK(h.defect < 1e-9);
      CHECK(std::abs(h.f_shift - std::round(h.f_shift)) < 1e-9);
      CHECK(bloch_defect(s, se, sp, chain.ke()).defect < 1e-9);
    }
  }
}

TEST_CASE("Bloch wavefunction") {
  const LatticeSpec lat(10.0, 1.0, 1.0);
  for (double g : {0.5, 1.0}) {
    const auto chain = BlochAction::construct(12.0, lat, SuperpositionParams::from_gamma_delta(g, 0.2), 2);
    double peak = 0.0;
    for (int i = 0; i <= 400; ++i) peak = std::max(peak, std::abs(chain.wavefunction(-1.0 + i * 0.01)));
    const cplx phase = std::polar(1.0, chain.ke());
    for (int i = 0; i < 20; ++i) {
      const double x = -1.0 + 0.1 * i + 0.003;
      CHECK(std::abs(chain.wavefunction(x + 2.0) - phase * chain.wavefunction(x)) < 1e-9 * peak);
    }
  }
}

TEST_CASE("BlochAction layout") {
  const LatticeSpec lat(10.0, 1.0, 1.0);
  const auto chain = BlochAction::construct(12.0, lat, SuperpositionParams::bohm(), 2);
  CHECK(chain.x_begin() == -1.0);
  CHECK(chain.x_end() == 4.0);
  CHECK(chain.regions().size() == 5);
  CHECK(chain.region_at(0.0).region == Region::Well);
  CHECK(chain.region_at(1.0).region == Region::Barrier);
  CHECK(chain.region_at(1.0).cell == 0);
  CHECK(chain.region_at(-0.1).cell == -1);
  CHECK(chain.region_at(4.0).cell == 1);
  CHECK_THROWS_AS(chain.region_at(4.5), DomainError);
  CHECK_THROWS_AS(BlochAction::construct(12.0, lat, SuperpositionParams::bohm(), 0), DomainError);
  double prev = chain.sample(-1.0).s0;
  const double dir = chain.sample(-1.0).ds0 > 0 ? 1.0 : -1.0;
  for (int i = 1; i <= 500; ++i) {
    const auto s = chain.sample(-1.0 + i * 0.01);
    CHECK(dir * (s.s0 - prev) > 0.0);
    CHECK(dir * s.ds0 > 0.0);
    CHECK(s.r > 0.0);
    prev = s.s0;
  }
}
