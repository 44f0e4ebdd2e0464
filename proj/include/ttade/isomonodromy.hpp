#pragma once

#include <vector>

#include "ttade/rh_solver.hpp"
#include "ttade/spectrum_geometry.hpp"

namespace ttade {

// Psi_mu = C(mu) Psi with C = -x A / mu^2 + (x/2) G^{-1}G_x / mu + x G^{-1} conj(A) G.
struct OdeSystem {
  double x = 0.0;
  Spectrum spec;
  CMat A, Abar;
  CMat G, Ginv, GinvGx;
};

OdeSystem make_ode_system(const Spectrum& spec, double x, const CMat& G, const CMat& GinvGx);
OdeSystem make_ode_system(const RHSolution& sol);
CMat coefficient(const OdeSystem& sys, cplx mu);

// Formal solution at infinity G^{-1} (sum psi_k mu^{-k}) e^{mu x conj(A)} and the
// coefficients of the inverse series.
struct FormalSeries {
  std::vector<CMat> psi;
  std::vector<CMat> inv;
};
FormalSeries formal_series(const OdeSystem& sys, int terms);

// Sum truncated just before the smallest term; error is that smallest term.
struct SeriesValue {
  CMat value;
  double error = 0.0;
  int terms = 0;
};
SeriesValue eval_series(const std::vector<CMat>& c, cplx mu);

struct IsoOptions {
  double tol = 1e-12;        // integrator tolerance
  double r_start = 0.0;      // 0: 32 / (x * min |u_j - u_l|)
  double r_match = 1.0;      // modulus of the matching arc
  int series_terms = 80;
  double tol_iso = 1e-4;
  double entry_floor = 0.0;  // 0: 10 * tol
  double margin_angle = 1e-3;
  long max_steps = 200000;
  bool cross_check = true;   // recompute each entry from shifted integration rays
  int max_depth = 2;         // dominant rows plus recessive columns tolerated per pairing
};

// Columns of Psi e^{-mu x conj(A)} along arg mu = angle, integrated from r_start to r_end
// starting from the formal solution.
CMat integrate_ray(const OdeSystem& sys, double angle, double r_start, double r_end,
                   const IsoOptions& opt = {});

struct StokesFactor {
  int index = 0;  // j in 1..2m
  int a = 0, b = 0;
  cplx value;
  double shifted_gap = 0.0;  // |value - value from shifted rays|
  double series_error = 0.0;
};

struct NumericStokesReport {
  double x = 0.0;
  double r_start = 0.0;
  double margin = 0.0;  // smallest angular distance from an integration ray to a Stokes ray
  int max_depth = 0;
  std::vector<StokesFactor> factors;
  RMat S_rec;           // K_1 ... K_m, real part
  double imag_max = 0.0;
  double halfturn_gap = 0.0;
};

NumericStokesReport recover_stokes(const OdeSystem& sys, const RayArrangement& arr, const IsoOptions& opt = {});
bool halfturn_symmetry_check(const NumericStokesReport& rep, double tol);

struct IsoReport {
  std::vector<NumericStokesReport> per_x;
  double deviation = 0.0;       // max over x of |S_rec(x) - S_rec(x_0)|
  double input_gap = -1.0;      // max over x of |S_rec(x) - S| when S is known
  bool halfturn_ok = true;
  bool pass = false;
};

// Recovers the Stokes matrix at the chosen curve points (all when empty).
IsoReport verify_isomonodromy(const MetricCurve& curve, const std::vector<int>& which = {},
                              const IsoOptions& opt = {}, bool compare_input = true);

}  // namespace ttade
