#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "kpqhj/action.hpp"
#include "kpqhj/bloch.hpp"
#include "kpqhj/matching.hpp"
#include "kpqhj/spectrum.hpp"
#include "oracles.hpp"

using namespace kpqhj;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const LatticeSpec kLattice(10.0, 1.0, 1.0);

// 20 interior energies over the first three bands, 7 + 7 + 6.
std::vector<double> band_energies() {
  const auto bands = find_bands(kLattice, 0.1, 40.0, 4000);
  std::vector<double> es;
  const int per_band[] = {7, 7, 6};
  for (int b = 0; b < 3; ++b) {
    for (int i = 0; i < per_band[b]; ++i) {
      const double t = (i + 0.5) / per_band[b];
      es.push_back(bands[b].e_lo + t * (bands[b].e_hi - bands[b].e_lo));
    }
  }
  return es;
}

struct Run {
  double energy;
  SuperpositionParams sp;
  BlochAction chain;
};

const std::vector<Run>& runs() {
  static const std::vector<Run> all = [] {
    std::vector<Run> r;
    for (const auto& sp : {SuperpositionParams::from_gamma_delta(0.5, 0.3),
                           SuperpositionParams::bohm()}) {
      for (double e : band_energies()) {
        r.push_back({e, sp, BlochAction::construct(e, kLattice, sp, 2)});
      }
    }
    return r;
  }();
  return all;
}

// 20 points in [-d, -d + e), away from the region edges.
std::vector<double> sample_points(const LatticeSpec& lat) {
  std::vector<double> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(-lat.d() + lat.period() * (i + 0.37) / 20.0);
  return xs;
}

Outcome dispersion_vs_transfer(double lo, double hi) {
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double e = lo + (hi - lo) * (i + 0.5) / 500.0;
    worst = std::max(worst, std::abs(dispersion_rhs(e, kLattice) -
                                     transfer_matrix_oracle(e, kLattice).half_trace));
  }
  return {worst < 1e-12, fmt("max |f - half trace| = %.3e over 500 energies (tol 1e-12)", worst)};
}

Outcome c01() { return dispersion_vs_transfer(10.01, 60.0); }
Outcome c02() { return dispersion_vs_transfer(0.01, 9.99); }

Outcome c03() {
  std::mt19937_64 rng(2003);
  std::uniform_real_distribution<double> uv(0.5, 20.0), ul(0.2, 2.0), u01(0.0, 1.0);
  double worst[3] = {0.0, 0.0, 0.0};
  int skipped = 0, evaluated = 0;
  for (int regime = 0; regime < 3; ++regime) {
    for (int i = 0; i < 200; ++i) {
      const LatticeSpec lat(uv(rng), ul(rng), ul(rng));
      double e = 0.0;
      switch (regime) {
        case 0: e = lat.v0() + 0.01 + 50.0 * u01(rng); break;
        case 1: e = lat.v0() * (0.001 + 0.998 * u01(rng)); break;
        default: e = lat.v0(); break;
      }
      const auto wn = wavenumbers(e, lat);
      const double cos_c = std::cos(wn.k2 * lat.c());
      const double cos_d = wn.k1 ? std::cos(*wn.k1 * lat.d()) : 1.0;
      if (std::abs(cos_c) < 1e-6 || std::abs(cos_d) < 1e-6) {
        ++skipped;
        continue;
      }
      const double f = dispersion_rhs(e, lat);
      for (double g : {0.3, 0.7, 1.0}) {
        const auto sp = SuperpositionParams::from_gamma_delta(g, 0.0);
        worst[regime] = std::max(worst[regime], std::abs(dispersion_via_action(e, lat, sp) - f));
        ++evaluated;
      }
    }
  }
  const double w = std::max({worst[0], worst[1], worst[2]});
  return {w < 1e-9, fmt("max |via action - closed form| above %.3e, below %.3e, threshold %.3e; "
                        "%d evaluations, %d pole samples skipped (tol 1e-9)",
                        worst[0], worst[1], worst[2], evaluated, skipped)};
}

Outcome c04() {
  const auto bands = find_bands(kLattice, 0.1, 40.0, 4000);
  bool disjoint = true;
  for (std::size_t i = 1; i < bands.size(); ++i) disjoint &= bands[i - 1].e_hi < bands[i].e_lo;
  std::vector<double> edges;
  double worst_f = 0.0;
  for (const auto& b : bands) {
    for (auto [v, clipped] : {std::pair{b.e_lo, b.clipped_lo}, std::pair{b.e_hi, b.clipped_hi}}) {
      if (clipped) continue;
      edges.push_back(v);
      worst_f = std::max(worst_f, std::abs(std::abs(dispersion_rhs(v, kLattice)) - 1.0));
    }
  }
  const auto ref = oracle::dense_scan_edges(10.0, 1.0, 1.0, 0.1, 40.0, 1000000);
  double worst_e = ref.size() == edges.size() ? 0.0 : HUGE_VAL;
  for (std::size_t i = 0; i < edges.size() && i < ref.size(); ++i) {
    worst_e = std::max(worst_e, std::abs(edges[i] - ref[i]));
  }
  const bool pass = bands.size() >= 3 && disjoint && worst_f < 1e-9 && worst_e < 1e-6;
  return {pass, fmt("%zu bands (disjoint: %s), %zu interior edges; max ||f|-1| = %.3e (tol 1e-9), "
                    "max |edge - dense scan| = %.3e (tol 1e-6)",
                    bands.size(), disjoint ? "yes" : "no", edges.size(), worst_f, worst_e)};
}

Outcome c05() {
  double worst = 0.0;
  std::vector<long> ns;
  for (const auto& run : runs()) {
    for (double x : sample_points(kLattice)) {
      const auto d = bloch_defect(run.chain.sample(x).s0, run.chain.sample(x + kLattice.period()).s0,
                                  run.sp, run.chain.ke());
      worst = std::max(worst, d.defect);
      if (std::find(ns.begin(), ns.end(), d.n) == ns.end()) ns.push_back(d.n);
    }
  }
  std::string n_text;
  std::sort(ns.begin(), ns.end());
  for (long n : ns) n_text += (n_text.empty() ? "" : " ") + std::to_string(n);
  return {worst < 1e-9, fmt("%zu runs x 20 points, max defect = %.3e (tol 1e-9), n in {%s}",
                            runs().size(), worst, n_text.c_str())};
}

Outcome c06() {
  double worst = 0.0;
  for (const auto& run : runs()) {
    const auto map = mobius_coefficients(run.sp, run.chain.ke());
    for (double x : sample_points(kLattice)) {
      const cplx z = std::polar(1.0, 2 * run.chain.sample(x).s0);
      const cplx ze = std::polar(1.0, 2 * run.chain.sample(x + kLattice.period()).s0);
      worst = std::max(worst, std::abs(ze - apply_mobius(map, z)));
    }
  }
  std::mt19937_64 rng(2006);
  std::uniform_real_distribution<double> ug(-1.0, 1.0), ua(-pi, pi), uk(-10.0, 10.0);
  double worst_trace = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double g = ug(rng), ke = uk(rng);
    const auto m = mobius_coefficients(SuperpositionParams::from_gamma_delta(g, ua(rng)), ke);
    worst_trace = std::max(worst_trace, std::abs(m.trace() - 4 * g * (1.0 + std::polar(1.0, 2 * ke))));
  }
  return {worst < 1e-8 && worst_trace < 1e-12,
          fmt("max |z(x+e) - M z(x)| = %.3e (tol 1e-8); max trace error = %.3e (tol 1e-12)", worst,
              worst_trace)};
}

Outcome c07() {
  double worst = 0.0, worst_f = 0.0;
  int count = 0;
  for (const auto& run : runs()) {
    if (run.sp.gamma() != 1.0 || run.sp.delta() != 0.0) continue;
    for (double x : sample_points(kLattice)) {
      const auto h = bohm_defect(run.chain.sample(x).s0, run.chain.sample(x + kLattice.period()).s0,
                                 run.chain.ke());
      worst = std::max(worst, h.defect);
      worst_f = std::max(worst_f, std::abs(h.f_shift - std::round(h.f_shift)));
      ++count;
    }
  }
  return {count > 0 && worst < 1e-9 && worst_f < 1e-9,
          fmt("%d points; max |S0(x+e) - S0(x) - Ke - n'pi| = %.3e, max F-shift non-integrality "
              "= %.3e (tol 1e-9)",
              count, worst, worst_f)};
}

Outcome c08() {
  double worst_coarse = 0.0, worst_fine = 0.0, min_ratio = HUGE_VAL, max_ratio = 0.0;
  double min_next = HUGE_VAL, max_next = 0.0;
  for (const auto& run : runs()) {
    for (const auto& reg : run.chain.regions()) {
      if (reg.cell != 0) continue;
      const double mid = 0.5 * (reg.x_lo + reg.x_hi);
      double r[3];
      for (int k = 0; k < 3; ++k) {
        const double h = 1e-3 / (1 << k);
        std::vector<double> g;
        const int half = 10 << k;  // same span [mid - 0.01, mid + 0.01] at every step
        for (int i = -half; i <= half; ++i) g.push_back(mid + i * h);
        r[k] = qshje_residual(g, amplitude_profile(g, reg.basis, reg.constants), run.energy, kLattice);
      }
      worst_coarse = std::max(worst_coarse, r[0]);
      worst_fine = std::max(worst_fine, r[1]);
      if (r[1] > 0.0) {
        min_ratio = std::min(min_ratio, r[0] / r[1]);
        max_ratio = std::max(max_ratio, r[0] / r[1]);
      }
      if (r[2] > 0.0) {
        min_next = std::min(min_next, r[1] / r[2]);
        max_next = std::max(max_next, r[1] / r[2]);
      }
    }
  }
  const bool order = min_ratio > 3.5 && max_ratio < 4.5;
  return {worst_coarse < 1e-6 && order,
          fmt("max residual %.3e at h=1e-3 (tol 1e-6), %.3e at h=5e-4; refinement ratio in "
              "[%.3f, %.3f] (O(h^2): 4; next halving [%.3f, %.3f])",
              worst_coarse, worst_fine, min_ratio, max_ratio, min_next, max_next)};
}

Outcome c09() {
  double worst_s = 0.0, worst_scaled = 0.0, worst_b = 0.0;
  double per_band[3] = {0.0, 0.0, 0.0};
  for (std::size_t idx = 0; idx < runs().size(); ++idx) {
    const auto& run = runs()[idx];
    const int band = idx % 20 < 7 ? 0 : (idx % 20 < 14 ? 1 : 2);
    const auto& chain = run.chain;
    double peak = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      peak = std::max(peak, std::abs(chain.wavefunction(chain.x_begin() + i * kLattice.period() / 2000)));
    }
    const cplx phase = std::polar(1.0, chain.ke());
    for (double x : sample_points(kLattice)) {
      worst_b = std::max(worst_b, std::abs(chain.wavefunction(x + kLattice.period()) -
                                           phase * chain.wavefunction(x)) / peak);
    }
    for (const auto& reg : chain.regions()) {
      if (reg.cell != 0) continue;
      const double v = reg.region == Region::Well ? 0.0 : kLattice.v0();
      const double h = 2.7e-4 / std::sqrt(std::max(std::abs(run.energy - v), 1.0));
      std::vector<double> g, re, im;
      for (int i = -50; i <= 50; ++i) {
        g.push_back(0.5 * (reg.x_lo + reg.x_hi) + i * h);
        const cplx p = chain.wavefunction(g.back());
        re.push_back(p.real());
        im.push_back(p.imag());
      }
      const double r = std::max(schrodinger_residual(re, run.energy, kLattice, g),
                                schrodinger_residual(im, run.energy, kLattice, g));
      worst_s = std::max(worst_s, r);
      per_band[band] = std::max(per_band[band], r);
      worst_scaled = std::max(worst_scaled, r / peak);
    }
  }
  return {worst_s < 1e-7 && worst_b < 1e-9,
          fmt("max Schroedinger residual %.3e (tol 1e-7; bands 0/1/2: %.3e/%.3e/%.3e; %.3e with "
              "max|phi| scaled to 1), max |phi(x+e) - exp(iKe) phi(x)| / max|phi| = %.3e (tol 1e-9)",
              worst_s, per_band[0], per_band[1], per_band[2], worst_scaled, worst_b)};
}

Outcome c10() {
  std::mt19937_64 rng(2010);
  std::uniform_real_distribution<double> u(-5.0, 5.0), ug(-1.0, 1.0), ue(10.2, 60.0), ul(0.2, 2.0);
  double w53 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng), g = ug(rng);
    const double lhs = g * g * (b - a) * (b - a);
    const double rhs = (1 + g * g * b * b) + (1 + g * g * a * a) - 2 * (1 + g * g * a * b);
    w53 = std::max(w53, std::abs(lhs - rhs));
  }
  double w52 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const LatticeSpec lat(10.0, ul(rng), ul(rng));
    const auto wn = wavenumbers(ue(rng), lat);
    const double tc = std::tan(wn.k2 * lat.c()), td = std::tan(*wn.k1 * lat.d());
    if (std::abs(tc) > 1e3 || std::abs(td) > 1e3) continue;
    const double mu = u(rng), nu = u(rng);
    const auto q = interface_quantities(mu, nu, wn, lat);
    const double factor = mu / wn.k2 * (*wn.k1 * tc + wn.k2 * td);
    w52 = std::max(w52, std::abs(q.b_val - q.a_val - factor) / std::max(1.0, std::abs(factor)));
  }
  double w38 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double k1 = 0.5 + std::abs(u(rng)), k2 = 0.5 + std::abs(u(rng));
    const ActionConstants left{u(rng), u(rng), u(rng)};
    const auto right = propagate_constants(left, BasisPair(BasisKind::Trig, k1),
                                           BasisPair(BasisKind::Trig, k2), 0.0);
    w38 = std::max({w38, std::abs(right.mu - k1 * left.mu / k2) / std::abs(right.mu),
                    std::abs(right.nu - left.nu), std::abs(right.l - left.l)});
  }
  return {w53 < 1e-12 && w52 < 1e-12 && w38 < 1e-15,
          fmt("gamma-square identity %.3e, B-A factorization %.3e (tol 1e-12); trig matching "
              "(mu k1/k2, nu, l) deviation %.3e",
              w53, w52, w38)};
}

Outcome c11() {
  std::mt19937_64 rng(2011);
  std::uniform_real_distribution<double> uv(0.5, 20.0), ul(0.2, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const LatticeSpec lat(uv(rng), ul(rng), ul(rng));
    for (double eps : {1e-4, 1e-5, 1e-6}) {
      const double jump = std::abs(dispersion_rhs(lat.v0() + eps, lat) - dispersion_rhs(lat.v0() - eps, lat));
      worst = std::max(worst, jump / eps);
    }
  }
  return {worst < 10.0, fmt("max |f(V0+eps) - f(V0-eps)| / eps = %.4f (tol 10)", worst)};
}

Outcome c12() {
  std::mt19937_64 rng(2012);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0, worst_offset = 0.0;
  const auto& chain = runs()[8].chain;
  for (int i = 0; i < 50; ++i) {
    const auto& reg = chain.regions()[1 + i % 2];
    Mat2 m{};
    do {
      m = {{{u(rng), u(rng)}, {u(rng), u(rng)}}};
    } while (std::abs(m[0][0] * m[1][1] - m[0][1] * m[1][0]) < 0.1);
    const BasisPair other = reg.basis.recombined(m);
    const double anchor = reg.x_lo + 0.3 * (reg.x_hi - reg.x_lo);
    const auto k2 = propagate_constants_generic(reg.constants, reg.basis, other, anchor);
    const double offset0 = eval_action(reg.x_lo, other, k2).s0 - eval_action(reg.x_lo, reg.basis, reg.constants).s0;
    worst_offset = std::max(worst_offset, std::abs(offset0 - pi * std::round(offset0 / pi)));
    for (int j = 0; j <= 100; ++j) {
      const double x = reg.x_lo + (reg.x_hi - reg.x_lo) * j / 100.0;
      const double diff =
          eval_action(x, other, k2).s0 - eval_action(x, reg.basis, reg.constants).s0;
      worst = std::max(worst, std::abs(diff - offset0));
    }
  }
  return {worst < 1e-9 && worst_offset < 1e-9,
          fmt("50 recombinations x 101 points: max pointwise change %.3e, offset off pi*Z by %.3e "
              "(tol 1e-9)",
              worst, worst_offset)};
}

struct Criterion {
  const char* name;
  Outcome (*fn)();
  double time_limit;  // seconds; 0 for none
};

const Criterion kCriteria[] = {
    {"dispersion above the barrier vs transfer matrix", c01, 1.0},
    {"dispersion below the barrier vs transfer matrix", c02, 1.0},
    {"reduced-action route to the dispersion relation", c03, 5.0},
    {"band structure and edges", c04, 5.0},
    {"Bloch condition on the reduced action", c05, 0.0},
    {"Moebius form and trace identity", c06, 0.0},
    {"Bohm limit", c07, 0.0},
    {"quantum Hamilton-Jacobi residual", c08, 0.0},
    {"wavefunction consistency", c09, 0.0},
    {"identity suite", c10, 0.0},
    {"threshold continuity", c11, 0.0},
    {"basis-recombination invariance", c12, 0.0},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (int i = 1; i <= 12; ++i) which.push_back(i);
  }
  int failures = 0;
  for (int id : which) {
    if (id < 1 || id > 12) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const Criterion& c = kCriteria[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.3f s", secs);
    if (c.time_limit > 0.0) {
      timing += fmt(" (limit %.0f s)", c.time_limit);
      if (secs >= c.time_limit) o.pass = false;
    }
    std::printf("%s [%02d] %s: %s; %s\n", o.pass ? "PASS" : "FAIL", id, c.name, o.detail.c_str(),
                timing.c_str());
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
