#pragma once

#include <optional>
#include <vector>

#include "ttade/common.hpp"

namespace ttade {

struct Spectrum {
  std::vector<cplx> u;
  std::size_t n() const { return u.size(); }
};

// Labels are 1-based, as in (j, l) for the ray of u_j - u_l.
struct Ray {
  double angle = 0.0;
  int j = 0;
  int l = 0;
};

struct RayArrangement {
  std::vector<Ray> rays;        // all n(n-1) rays, ascending angle
  std::vector<Ray> separating;  // R_1 .. R_2m
  std::vector<double> theta;    // theta_k = -angle(R_k) in [0, 2pi)
  int m = 0;
};

struct GeometryTolerances {
  double angle = 1e-12;
  double distinct = 1e-12;
};

// Argument of z wrapped to (-pi, pi]; values within tol of 0 or of pi are snapped.
double canonical_angle(double a, double tol);
double ray_angle(cplx ujl, double tol);

void check_db(const Spectrum& spec, double tol = 1e-12);
bool check_pd(const Spectrum& spec, double tol_angle = 1e-12);

RayArrangement stokes_rays(const Spectrum& spec, bool strict = false,
                           const GeometryTolerances& tol = {});

// perm[k] is the original (0-based) index placed at position k.
std::vector<int> admissible_order(const Spectrum& spec,
                                  std::optional<double> delta = std::nullopt,
                                  double tol = 1e-12);
Spectrum reorder(const Spectrum& spec, const std::vector<int>& perm);
bool is_admissibly_ordered(const Spectrum& spec, double tol = 1e-12);

// Upper end of the feasible interval (0, d_max) for the decay condition
// cos(arg(u_j - u_l) - delta/2) > 0, j < l.
double delta_upper_bound(const Spectrum& spec);
bool delta_feasible(const Spectrum& spec, double delta);
double choose_delta(const Spectrum& spec);

// Adjacent transpositions l_1, l_2, ... triggered while the coordinate
// rotates by phi in (0, 2pi].
std::vector<int> crossing_sequence(const Spectrum& spec, double phi,
                                   const GeometryTolerances& tol = {});

}  // namespace ttade
