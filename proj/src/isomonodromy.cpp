#include "ttade/isomonodromy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/LU>
#include <boost/numeric/odeint.hpp>

namespace ttade {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<cplx>;

struct StepLimit {
  long max_steps;
  long* count;
  void operator()(const State&, double) const {
    if (++*count > max_steps) throw Error(ErrorKind::StiffnessFailure, "step budget exhausted");
  }
};

// Adaptive RKF78 from t0 to t1 (either direction).
void integrate(const std::function<void(const State&, State&, double)>& rhs, State& y, double t0, double t1,
               const IsoOptions& opt, double scale) {
  if (t0 == t1) return;
  auto stepper = odeint::make_controlled(opt.tol * 1e-3 * scale, opt.tol, odeint::runge_kutta_fehlberg78<State>());
  long count = 0;
  const double dt = (t1 > t0 ? 1.0 : -1.0) * std::min(1e-2, std::abs(t1 - t0) / 10);
  try {
    odeint::integrate_adaptive(stepper, rhs, y, t0, t1, dt, StepLimit{opt.max_steps, &count});
  } catch (const odeint::step_adjustment_error& e) {
    throw Error(ErrorKind::StiffnessFailure, e.what());
  }
  for (const auto& v : y)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error(ErrorKind::StiffnessFailure, "non-finite state");
}

double state_scale(const State& y) {
  double s = 0.0;
  for (const auto& v : y) s = std::max(s, std::abs(v));
  return std::max(s, 1e-300);
}

double min_gap(const Spectrum& spec) {
  double g = INFINITY;
  for (std::size_t p = 0; p < spec.n(); ++p)
    for (std::size_t q = p + 1; q < spec.n(); ++q) g = std::min(g, std::abs(spec.u[p] - spec.u[q]));
  return g;
}

double angular_distance(double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)); }

struct Sweep {
  const OdeSystem& sys;
  const FormalSeries& fs;
  const IsoOptions& opt;
  double rs;
  double max_series_error = 0.0;

  // row a of Psi^{-1}, at mu = r_match e^{i alpha}
  State row(int a, double alpha) {
    const int n = static_cast<int>(sys.A.rows());
    const cplx e = std::polar(1.0, alpha);
    const SeriesValue H = eval_series(fs.inv, rs * e);
    max_series_error = std::max(max_series_error, H.error);
    const CMat HG = H.value * sys.G;
    State v(n);
    for (int k = 0; k < n; ++k) v[k] = HG(a, k);
    const cplx ua = sys.Abar(a, a) * sys.x;
    auto rhs = [&](const State& y, State& dy, double r) {
      const CMat C = coefficient(sys, r * e);
      for (int k = 0; k < n; ++k) {
        cplx s = 0;
        for (int i = 0; i < n; ++i) s += y[i] * C(i, k);
        dy[k] = -(s - y[k] * ua) * e;
      }
    };
    integrate(rhs, v, rs, opt.r_match, opt, state_scale(v));
    const cplx f = std::exp(-opt.r_match * e * ua);
    for (auto& c : v) c *= f;
    return v;
  }

  // column b of Psi from the ray at beta, carried along the arc to alpha
  State column(int b, double beta, double alpha) {
    const int n = static_cast<int>(sys.A.rows());
    const cplx e = std::polar(1.0, beta);
    const SeriesValue F = eval_series(fs.psi, rs * e);
    max_series_error = std::max(max_series_error, F.error);
    const CMat GF = sys.Ginv * F.value;
    State w(n);
    for (int k = 0; k < n; ++k) w[k] = GF(k, b);
    const cplx ub = sys.Abar(b, b) * sys.x;
    auto rhs = [&](const State& y, State& dy, double r) {
      const CMat C = coefficient(sys, r * e);
      for (int k = 0; k < n; ++k) {
        cplx s = 0;
        for (int i = 0; i < n; ++i) s += C(k, i) * y[i];
        dy[k] = (s - ub * y[k]) * e;
      }
    };
    integrate(rhs, w, rs, opt.r_match, opt, state_scale(w));
    const cplx f = std::exp(opt.r_match * e * ub);
    for (auto& c : w) c *= f;
    auto arc = [&](const State& y, State& dy, double t) {
      const cplx mu = std::polar(opt.r_match, t);
      const CMat C = coefficient(sys, mu);
      for (int k = 0; k < n; ++k) {
        cplx s = 0;
        for (int i = 0; i < n; ++i) s += C(k, i) * y[i];
        dy[k] = s * cplx(0, 1) * mu;
      }
    };
    integrate(arc, w, beta, alpha, opt, state_scale(w) * 1e-3);
    return w;
  }

  cplx entry(int a, int b, double alpha, double beta) {
    const State v = row(a, alpha), w = column(b, beta, alpha);
    cplx s = 0;
    for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * w[k];
    return s;
  }
};

// The pairing of a row from the ray at alpha_j with a column from the ray at
// beta_j yields the (a,b) entry of K_{j-1} K_j ... K_{m+j} (indices mod 2m).
// Gauss-Seidel on the affine dependence on s_j peels the neighbours off.
std::vector<cplx> peel(int n, int m, const std::vector<std::pair<int, int>>& labels, const std::vector<cplx>& raw) {
  std::vector<cplx> s = raw;
  auto factor = [&](int k) {
    const int i = ((k - 1) % (2 * m) + 2 * m) % (2 * m);
    CMat K = CMat::Identity(n, n);
    K(labels[i].first - 1, labels[i].second - 1) = s[i];
    return K;
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double change = 0.0;
    for (int j = 1; j <= 2 * m; ++j) {
      const int a = labels[j - 1].first - 1, b = labels[j - 1].second - 1;
      const CMat L = factor(j - 1);
      CMat R = CMat::Identity(n, n);
      for (int k = j + 1; k <= m + j; ++k) R = R * factor(k);
      const cplx c0 = (L * R)(a, b), c1 = L(a, a) * R(b, b);
      if (std::abs(c1) < 1e-12)
        throw Error(ErrorKind::StructureViolation, "factor " + std::to_string(j) + " is not identifiable");
      const cplx next = (raw[j - 1] - c0) / c1;
      change = std::max(change, std::abs(next - s[j - 1]));
      s[j - 1] = next;
    }
    if (change < 1e-15 * (1 + state_scale(s))) return s;
  }
  throw Error(ErrorKind::StructureViolation, "factor extraction did not settle");
}

}  // namespace

OdeSystem make_ode_system(const Spectrum& spec, double x, const CMat& G, const CMat& GinvGx) {
  const int n = static_cast<int>(spec.n());
  if (G.rows() != n || G.cols() != n || GinvGx.rows() != n || GinvGx.cols() != n)
    throw Error(ErrorKind::BadInput, "metric size does not match the spectrum");
  if (!(x > 0)) throw Error(ErrorKind::BadInput, "x must be positive");
  OdeSystem s;
  s.x = x;
  s.spec = spec;
  s.A = CMat::Zero(n, n);
  s.Abar = CMat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    s.A(j, j) = spec.u[j];
    s.Abar(j, j) = std::conj(spec.u[j]);
  }
  s.G = G;
  s.GinvGx = GinvGx;
  Eigen::FullPivLU<CMat> lu(G);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) throw Error(ErrorKind::SingularMetric, "metric is not invertible");
  s.Ginv = lu.inverse();
  return s;
}

OdeSystem make_ode_system(const RHSolution& sol) {
  return make_ode_system(sol.jd.spec, sol.jd.x, sol.G, log_derivative(sol));
}

CMat coefficient(const OdeSystem& sys, cplx mu) {
  if (mu == cplx(0.0)) throw Error(ErrorKind::BadInput, "coefficient is singular at mu = 0");
  return (-sys.x / (mu * mu)) * sys.A + (sys.x / (2.0 * mu)) * sys.GinvGx + sys.x * sys.Ginv * sys.Abar * sys.G;
}

FormalSeries formal_series(const OdeSystem& sys, int terms) {
  const int n = static_cast<int>(sys.A.rows());
  const double x = sys.x;
  const CMat B1 = (x / 2) * sys.G * sys.GinvGx * sys.Ginv;  // (x/2) G_x G^{-1}
  const CMat B2 = -x * sys.G * sys.A * sys.Ginv;
  FormalSeries fs;
  fs.psi.push_back(CMat::Identity(n, n));
  for (int k = 1; k <= terms; ++k) {
    const CMat& p1 = fs.psi[k - 1];
    const CMat p2 = k >= 2 ? fs.psi[k - 2] : CMat::Zero(n, n);
    const CMat R = B1 * p1 + B2 * p2 + static_cast<double>(k - 1) * p1;
    CMat P = CMat::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) P(a, b) = R(a, b) / (x * (sys.Abar(b, b) - sys.Abar(a, a)));
    const CMat T = B2 * p1;
    for (int a = 0; a < n; ++a) {
      cplx s = 0;
      for (int q = 0; q < n; ++q)
        if (q != a) s += B1(a, q) * P(q, a);
      P(a, a) = (-T(a, a) - s) / (static_cast<double>(k) + B1(a, a));
    }
    fs.psi.push_back(P);
  }
  fs.inv.push_back(CMat::Identity(n, n));
  for (int k = 1; k <= terms; ++k) {
    CMat h = CMat::Zero(n, n);
    for (int i = 1; i <= k; ++i) h -= fs.psi[i] * fs.inv[k - i];
    fs.inv.push_back(h);
  }
  return fs;
}

SeriesValue eval_series(const std::vector<CMat>& c, cplx mu) {
  SeriesValue out;
  const int K = static_cast<int>(c.size());
  std::vector<CMat> terms(K);
  std::vector<double> norms(K);
  cplx p = 1.0;
  for (int k = 0; k < K; ++k) {
    terms[k] = c[k] * p;
    norms[k] = terms[k].cwiseAbs().maxCoeff();
    p /= mu;
  }
  int kopt = K > 1 ? 1 : 0;
  for (int k = 1; k < K; ++k)
    if (norms[k] < norms[kopt]) kopt = k;
  out.value = CMat::Zero(c[0].rows(), c[0].cols());
  for (int k = 0; k < std::max(kopt, 1); ++k) out.value += terms[k];
  out.terms = std::max(kopt, 1);
  out.error = K > 1 ? norms[kopt] : 0.0;
  return out;
}

CMat integrate_ray(const OdeSystem& sys, double angle, double r_start, double r_end, const IsoOptions& opt) {
  const int n = static_cast<int>(sys.A.rows());
  const FormalSeries fs = formal_series(sys, opt.series_terms);
  const cplx e = std::polar(1.0, angle);
  const CMat Phi0 = sys.Ginv * eval_series(fs.psi, r_start * e).value;
  CMat out(n, n);
  for (int b = 0; b < n; ++b) {
    State w(n);
    for (int k = 0; k < n; ++k) w[k] = Phi0(k, b);
    const cplx ub = sys.x * sys.Abar(b, b);
    auto rhs = [&](const State& y, State& dy, double r) {
      const CMat C = coefficient(sys, r * e);
      for (int k = 0; k < n; ++k) {
        cplx s = 0;
        for (int i = 0; i < n; ++i) s += C(k, i) * y[i];
        dy[k] = (s - ub * y[k]) * e;
      }
    };
    integrate(rhs, w, r_start, r_end, opt, state_scale(w));
    for (int k = 0; k < n; ++k) out(k, b) = w[k];
  }
  return out;
}

NumericStokesReport recover_stokes(const OdeSystem& sys, const RayArrangement& arr, const IsoOptions& opt) {
  const int n = static_cast<int>(sys.spec.n());
  const int m = arr.m;
  if (static_cast<int>(arr.separating.size()) != 2 * m || m != n * (n - 1) / 2)
    throw Error(ErrorKind::BadInput, "arrangement does not match the spectrum");
  NumericStokesReport rep;
  rep.x = sys.x;
  rep.S_rec = RMat::Identity(n, n);
  if (n == 1) return rep;

  rep.r_start = opt.r_start > 0 ? opt.r_start : 32.0 / (sys.x * min_gap(sys.spec));
  if (rep.r_start <= opt.r_match) throw Error(ErrorKind::BadInput, "start radius must exceed the matching radius");
  const FormalSeries fs = formal_series(sys, opt.series_terms);
  Sweep sw{sys, fs, opt, rep.r_start};
  auto TH = [&](int k) {
    const int q = (k - 1) >= 0 ? (k - 1) / (2 * m) : -1;
    const int r = (k - 1) - q * 2 * m;
    return arr.theta[r] + 2 * kPi * q;
  };
  auto margin = [&](double ang) {
    double d = INFINITY;
    for (const auto& ray : arr.rays) d = std::min(d, angular_distance(ang, ray.angle));
    return d;
  };

  const double floor = opt.entry_floor > 0 ? opt.entry_floor : 10 * opt.tol;
  rep.margin = INFINITY;
  std::vector<std::pair<int, int>> labels;
  std::vector<cplx> raw, raw2;
  for (int j = 1; j <= 2 * m; ++j) {
    const int a = arr.separating[j - 1].j, b = arr.separating[j - 1].l;
    labels.emplace_back(a, b);
    const double alpha = -(TH(j - 1) + TH(j)) / 2;
    const double beta = -(TH(m + j) + TH(m + j + 1)) / 2;
    rep.margin = std::min({rep.margin, margin(alpha), margin(beta)});
    // rows integrate inward stably when few rows dominate them, columns likewise
    // when few columns are more recessive
    int depth = 0;
    for (int c = 0; c < n; ++c) {
      if ((std::polar(1.0, alpha) * (sys.Abar(c, c) - sys.Abar(a - 1, a - 1))).real() > 0) ++depth;
      if ((std::polar(1.0, beta) * (sys.Abar(c, c) - sys.Abar(b - 1, b - 1))).real() < 0) ++depth;
    }
    rep.max_depth = std::max(rep.max_depth, depth);
    if (depth > opt.max_depth)
      throw Error(ErrorKind::StructureViolation, "pairing for factor " + std::to_string(j) +
                                                     " is ill-conditioned (dominance depth " + std::to_string(depth) + ")");
    raw.push_back(sw.entry(a - 1, b - 1, alpha, beta));
    if (opt.cross_check) {
      const double alpha2 = alpha + (TH(j) - TH(j - 1)) / 4;
      const double beta2 = beta + (TH(m + j + 1) - TH(m + j)) / 4;
      rep.margin = std::min({rep.margin, margin(alpha2), margin(beta2)});
      raw2.push_back(sw.entry(a - 1, b - 1, alpha2, beta2));
    }
  }
  if (rep.margin < opt.margin_angle)
    throw Error(ErrorKind::NonGenericRays, "integration ray within the margin of a Stokes ray");
  const std::vector<cplx> s = peel(n, m, labels, raw);
  const std::vector<cplx> s2 = opt.cross_check ? peel(n, m, labels, raw2) : s;
  for (int j = 0; j < 2 * m; ++j) {
    StokesFactor f;
    f.index = j + 1;
    f.a = labels[j].first;
    f.b = labels[j].second;
    f.value = std::abs(s[j]) < floor ? cplx(0.0) : s[j];
    f.shifted_gap = std::abs(s2[j] - s[j]);
    f.series_error = sw.max_series_error;
    rep.factors.push_back(f);
  }

  CMat P = CMat::Identity(n, n);
  for (int j = 0; j < m; ++j) {
    const auto& f = rep.factors[j];
    if (f.a >= f.b) throw Error(ErrorKind::StructureViolation, "factor " + std::to_string(j + 1) + " is not upper triangular");
    CMat K = CMat::Identity(n, n);
    K(f.a - 1, f.b - 1) = f.value;
    P = P * K;
  }
  rep.S_rec = P.real();
  rep.imag_max = P.imag().cwiseAbs().maxCoeff();
  for (int j = 0; j < m; ++j) {
    const auto& f = rep.factors[j];
    const auto& g = rep.factors[m + j];
    if (g.a != f.b || g.b != f.a) throw Error(ErrorKind::StructureViolation, "half-turn labels do not pair up");
    rep.halfturn_gap = std::max(rep.halfturn_gap, std::abs(g.value + f.value));
  }
  return rep;
}

bool halfturn_symmetry_check(const NumericStokesReport& rep, double tol) {
  return rep.halfturn_gap <= tol;
}

IsoReport verify_isomonodromy(const MetricCurve& curve, const std::vector<int>& which, const IsoOptions& opt,
                              bool compare_input) {
  std::vector<int> idx = which;
  if (idx.empty())
    for (int i = 0; i < static_cast<int>(curve.pts.size()); ++i) idx.push_back(i);
  if (idx.size() < 2) throw Error(ErrorKind::BadInput, "need at least two x values");
  const RayArrangement arr = stokes_rays(curve.spec);
  IsoReport out;
  for (int i : idx) {
    if (i < 0 || i >= static_cast<int>(curve.pts.size())) throw Error(ErrorKind::IndexOutOfRange, "curve index");
    const auto& p = curve.pts[i];
    out.per_x.push_back(recover_stokes(make_ode_system(curve.spec, p.x, p.G, p.GinvGx), arr, opt));
  }
  const RMat& S0 = out.per_x.front().S_rec;
  for (const auto& r : out.per_x) {
    out.deviation = std::max(out.deviation, (r.S_rec - S0).cwiseAbs().maxCoeff());
    out.halfturn_ok = out.halfturn_ok && halfturn_symmetry_check(r, opt.tol_iso);
    if (compare_input && curve.S.rows() == r.S_rec.rows())
      out.input_gap = std::max(out.input_gap, (r.S_rec - curve.S).cwiseAbs().maxCoeff());
  }
  out.pass = out.deviation < opt.tol_iso && out.halfturn_ok && (out.input_gap < 0 || out.input_gap < opt.tol_iso);
  return out;
}

}  // namespace ttade
