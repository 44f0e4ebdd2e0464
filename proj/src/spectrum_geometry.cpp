#include "ttade/spectrum_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ttade {

namespace {

double scale_of(const Spectrum& spec) {
  double s = 1.0;
  for (auto z : spec.u) s = std::max(s, std::abs(z));
  return s;
}

double to_theta(double angle) {
  double th = -angle;
  if (th < 0) th += 2 * kPi;
  if (th >= 2 * kPi) th -= 2 * kPi;
  return th;
}

}  // namespace

double canonical_angle(double a, double tol) {
  a = std::remainder(a, 2 * kPi);  // [-pi, pi]
  if (a <= -kPi + tol) a += 2 * kPi;
  if (std::abs(a) <= tol) a = 0.0;
  if (std::abs(a - kPi) <= tol) a = kPi;
  return a;
}

double ray_angle(cplx ujl, double tol) { return canonical_angle(std::arg(ujl) - kPi / 2, tol); }

void check_db(const Spectrum& spec, double tol) {
  const double s = scale_of(spec);
  for (std::size_t i = 0; i < spec.n(); ++i) {
    if (!std::isfinite(spec.u[i].real()) || !std::isfinite(spec.u[i].imag()))
      throw Error(ErrorKind::BadInput, "non-finite eigenvalue");
    for (std::size_t j = i + 1; j < spec.n(); ++j)
      if (std::abs(spec.u[i] - spec.u[j]) <= tol * s)
        throw Error(ErrorKind::DegenerateSpectrum,
                    "u_" + std::to_string(i + 1) + " = u_" + std::to_string(j + 1));
  }
}

bool check_pd(const Spectrum& spec, double tol_angle) {
  check_db(spec);
  std::vector<double> th;
  for (std::size_t j = 0; j < spec.n(); ++j)
    for (std::size_t l = 0; l < spec.n(); ++l)
      if (j != l) th.push_back(to_theta(ray_angle(spec.u[j] - spec.u[l], tol_angle)));
  if (th.size() < 2) return true;
  std::sort(th.begin(), th.end());
  for (std::size_t k = 1; k < th.size(); ++k)
    if (th[k] - th[k - 1] <= tol_angle) return false;
  return th.front() + 2 * kPi - th.back() > tol_angle;
}

RayArrangement stokes_rays(const Spectrum& spec, bool strict, const GeometryTolerances& tol) {
  check_db(spec, tol.distinct);
  if (strict && !check_pd(spec, tol.angle))
    throw Error(ErrorKind::NonGenericRays, "two Stokes rays coincide");
  RayArrangement ra;
  const int n = static_cast<int>(spec.n());
  ra.m = n * (n - 1) / 2;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      if (j != l) ra.rays.push_back({ray_angle(spec.u[j] - spec.u[l], tol.angle), j + 1, l + 1});

  auto label_less = [](const Ray& a, const Ray& b) {
    return a.j != b.j ? a.j < b.j : a.l < b.l;
  };
  std::sort(ra.rays.begin(), ra.rays.end(), [&](const Ray& a, const Ray& b) {
    return a.angle != b.angle ? a.angle < b.angle : label_less(a, b);
  });

  // R_1 is the ray with the largest angle <= 0; numbering proceeds clockwise.
  ra.separating = ra.rays;
  std::sort(ra.separating.begin(), ra.separating.end(), [&](const Ray& a, const Ray& b) {
    double ta = to_theta(a.angle), tb = to_theta(b.angle);
    return ta != tb ? ta < tb : label_less(a, b);
  });
  for (const auto& r : ra.separating) ra.theta.push_back(to_theta(r.angle));
  return ra;
}

std::vector<int> admissible_order(const Spectrum& spec, std::optional<double> delta, double tol) {
  check_db(spec, tol);
  const double s = tol * scale_of(spec);
  std::vector<int> perm(spec.n());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    const cplx ua = spec.u[a], ub = spec.u[b];
    if (std::abs(ua.real() - ub.real()) > s) return ua.real() > ub.real();
    return ua.imag() > ub.imag();
  });
  if (delta) {
    Spectrum ordered = reorder(spec, perm);
    if (!delta_feasible(ordered, *delta))
      throw Error(ErrorKind::NoAdmissibleDelta,
                  "delta = " + std::to_string(*delta) + " violates the decay condition");
  }
  return perm;
}

Spectrum reorder(const Spectrum& spec, const std::vector<int>& perm) {
  if (perm.size() != spec.n()) throw Error(ErrorKind::BadInput, "permutation size mismatch");
  Spectrum out;
  for (int p : perm) out.u.push_back(spec.u.at(p));
  return out;
}

bool is_admissibly_ordered(const Spectrum& spec, double tol) {
  const double s = tol * scale_of(spec);
  for (std::size_t k = 0; k + 1 < spec.n(); ++k) {
    const cplx a = spec.u[k], b = spec.u[k + 1];
    if (a.real() > b.real() + s) continue;
    if (std::abs(a.real() - b.real()) <= s && a.imag() > b.imag()) continue;
    return false;
  }
  return true;
}

double delta_upper_bound(const Spectrum& spec) {
  double hi = kPi / 2;
  for (std::size_t j = 0; j < spec.n(); ++j)
    for (std::size_t l = j + 1; l < spec.n(); ++l)
      hi = std::min(hi, 2 * (std::arg(spec.u[j] - spec.u[l]) + kPi / 2));
  return std::max(hi, 0.0);
}

bool delta_feasible(const Spectrum& spec, double delta) {
  if (!(delta > 0 && delta < kPi / 2)) return false;
  for (std::size_t j = 0; j < spec.n(); ++j)
    for (std::size_t l = j + 1; l < spec.n(); ++l)
      if (std::cos(std::arg(spec.u[j] - spec.u[l]) - delta / 2) <= 0) return false;
  return true;
}

double choose_delta(const Spectrum& spec) {
  check_db(spec);
  const double hi = delta_upper_bound(spec);
  if (hi <= 0) throw Error(ErrorKind::NoAdmissibleDelta, "empty feasible interval");
  return hi / 2;
}

std::vector<int> crossing_sequence(const Spectrum& spec, double phi, const GeometryTolerances& tol) {
  if (!(phi > 0 && phi <= 2 * kPi + tol.angle))
    throw Error(ErrorKind::BadInput, "rotation angle must lie in (0, 2pi]");
  const RayArrangement ra = stokes_rays(spec, true, tol);
  for (double th : ra.theta)
    if (std::abs(phi - th) <= tol.angle)
      throw Error(ErrorKind::RayCollision, "rotation angle lands on a separating ray");

  std::vector<int> pos(spec.n());
  std::iota(pos.begin(), pos.end(), 0);
  std::vector<int> seq;
  for (std::size_t k = 0; k < ra.separating.size() && ra.theta[k] < phi; ++k) {
    const int a = ra.separating[k].j - 1, b = ra.separating[k].l - 1;
    if (pos[b] != pos[a] + 1)
      throw Error(ErrorKind::BadInput, "spectrum is not in admissible order");
    seq.push_back(pos[a] + 1);
    std::swap(pos[a], pos[b]);
  }
  return seq;
}

}  // namespace ttade
