#include "ttade/rh_solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace ttade {

namespace {

const cplx kTwoPiI(0.0, 2 * kPi);

double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

bool is_identity(const RMat& S) { return S.isIdentity(0.0); }

CMat diag_of(const Spectrum& spec, bool conjugate) {
  const int n = static_cast<int>(spec.n());
  CMat A = CMat::Zero(n, n);
  for (int j = 0; j < n; ++j) A(j, j) = conjugate ? std::conj(spec.u[j]) : spec.u[j];
  return A;
}

// Angular distance from mu to the line through the contour.
double line_distance(const JumpData& jd, cplx mu) {
  const double a = std::arg(mu) - jd.delta / 2;
  return std::abs(std::remainder(a, kPi));
}

}  // namespace

ContourDiscretization discretize(const JumpData& jd, const SolverOptions& opt) {
  ContourDiscretization d;
  d.h = opt.h;
  if (!(opt.h > 0 && opt.h < 1)) throw Error(ErrorKind::BadInput, "node spacing must lie in (0, 1)");
  if (is_identity(jd.S)) {
    d.trivial = true;
    return d;
  }
  double L = 0.0;
  for (int j = 0; j < jd.n(); ++j)
    for (int l = j + 1; l < jd.n(); ++l)
      if (jd.S(j, l) != 0.0) L = std::max(L, std::log(std::abs(jd.S(j, l)) / opt.trunc_tol) / decay_rate(jd, j, l));
  d.r_max = L > 2 ? (L + std::sqrt(L * L - 4)) / 2 : 1.0;
  d.s_max = std::max(std::log(d.r_max), 4 * opt.h);
  const int half = static_cast<int>(std::ceil(d.s_max / opt.h));
  d.s_max = half * opt.h;
  d.r_max = std::exp(d.s_max);
  d.r_min = 1.0 / d.r_max;
  d.per_ray = 2 * half + 1;
  const cplx rot = std::polar(1.0, jd.delta / 2);
  for (int sg : {-1, 1})
    for (int k = -half; k <= half; ++k) {
      d.s.push_back(k * opt.h);
      d.sigma.push_back(sg);
      d.nodes.push_back(static_cast<double>(sg) * std::exp(k * opt.h) * rot);
    }
  d.endpoint_deviation = jump_deviation(jd, d.r_max);
  return d;
}

RHSolution solve_rh(const JumpData& jd, const ContourDiscretization& disc, const SolverOptions& opt) {
  const int n = jd.n();
  RHSolution sol;
  sol.jd = jd;
  sol.disc = disc;
  if (disc.trivial) {
    sol.G = CMat::Identity(n, n);
    sol.dY0 = CMat::Zero(n, n);
    sol.method = "trivial";
    symmetry_residuals(sol, sol.res);
    metric_checks(sol.G, sol.res);
    return sol;
  }
  const int N = static_cast<int>(disc.nodes.size());
  const double h = disc.h;

  std::vector<CMat> Jm(N);
  double sup_dev = 0.0;
  for (int k = 0; k < N; ++k) {
    Jm[k] = solver_jump(jd, disc.sigma[k] * std::exp(disc.s[k])) - CMat::Identity(n, n);
    sup_dev = std::max(sup_dev, Jm[k].norm());
  }

  // boundary value of the Cauchy operator from the minus side at the nodes
  CMat Cm = CMat::Zero(N, N);
  for (int k = 0; k < N; ++k) {
    const double ek = std::exp(disc.s[k]);
    for (int j = 0; j < N; ++j) {
      const double ej = std::exp(disc.s[j]);
      double wgt = 0.0;
      if (disc.sigma[j] == disc.sigma[k]) {
        if ((j - k) % 2 != 0) wgt = disc.sigma[j] * 2 * h * ej / (ej - ek);
      } else {
        wgt = disc.sigma[j] * h * ej / (ej + ek);
      }
      Cm(k, j) = wgt / kTwoPiI;
    }
    Cm(k, k) -= 0.5;
  }

  bool neumann = opt.method == SolverOptions::Method::Neumann ||
                 (opt.method == SolverOptions::Method::Auto && sup_dev < 0.5);
  if (neumann) {
    // rows of U hold u_k flattened row-major
    CMat U = CMat::Zero(N, n * n), V;
    bool converged = false;
    for (int it = 1; it <= opt.neumann_max_iter; ++it) {
      V = Cm * U;
      CMat Unew(N, n * n);
      for (int k = 0; k < N; ++k) {
        CMat cu(n, n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) cu(a, b) = V(k, a * n + b);
        const CMat uk = Jm[k] + cu * Jm[k];
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) Unew(k, a * n + b) = uk(a, b);
      }
      const double change = max_abs(Unew - U);
      const double scale = std::max(1.0, max_abs(Unew));
      U = std::move(Unew);
      sol.iterations = it;
      if (!std::isfinite(change)) break;
      if (change <= opt.neumann_tol * scale) {
        converged = true;
        break;
      }
    }
    if (converged) {
      sol.method = "neumann";
      sol.u.resize(N);
      for (int k = 0; k < N; ++k) {
        sol.u[k].resize(n, n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) sol.u[k](a, b) = U(k, a * n + b);
      }
    } else if (opt.method == SolverOptions::Method::Neumann) {
      throw Error(ErrorKind::SolveFailure, "Neumann iteration did not converge");
    } else {
      neumann = false;
    }
  }
  if (!neumann) {
    // u_k^T - sum_j Cm[k,j] Jm_k^T u_j^T = Jm_k^T
    const int D = N * n;
    CMat A = CMat::Identity(D, D), B(D, n);
    for (int k = 0; k < N; ++k) {
      const CMat JT = Jm[k].transpose();
      B.block(k * n, 0, n, n) = JT;
      for (int j = 0; j < N; ++j)
        if (Cm(k, j) != 0.0) A.block(k * n, j * n, n, n) -= Cm(k, j) * JT;
    }
    Eigen::PartialPivLU<CMat> lu(A);
    sol.rcond = lu.rcond();
    if (!(sol.rcond > opt.min_rcond))
      throw Error(ErrorKind::SolveFailure, "collocation system is numerically singular (rcond " +
                                               std::to_string(sol.rcond) + ")");
    const CMat X = lu.solve(B);
    if (!X.allFinite()) throw Error(ErrorKind::SolveFailure, "non-finite density");
    sol.method = "direct";
    sol.u.resize(N);
    for (int k = 0; k < N; ++k) sol.u[k] = X.block(k * n, 0, n, n).transpose();
  }

  const cplx d = std::polar(1.0, jd.delta / 2);
  sol.G = CMat::Identity(n, n);
  sol.dY0 = CMat::Zero(n, n);
  for (int k = 0; k < N; ++k) {
    sol.G += (h / kTwoPiI) * static_cast<double>(disc.sigma[k]) * sol.u[k];
    sol.dY0 += (h / (kTwoPiI * d)) * std::exp(-disc.s[k]) * sol.u[k];
  }
  sol.res.jump = jump_residual(sol);
  symmetry_residuals(sol, sol.res);
  metric_checks(sol.G, sol.res);
  return sol;
}

RHSolution solve_rh(const JumpData& jd, const SolverOptions& opt) {
  ContourDiscretization disc = discretize(jd, opt);
  std::string cert;
  if (disc.trivial) {
    cert = "trivial";
  } else if (auto route = analytic_certificate(jd.S)) {
    cert = "analytic:" + *route;
  } else {
    std::vector<double> radii;
    for (int k = 0; k < disc.per_ray; ++k) radii.push_back(std::exp(disc.s[k]));
    const double p = sampled_min_pivot(jd, radii);
    if (p > 0) {
      cert = "sampled_nodes";
    } else if (opt.force) {
      cert = "forced";
    } else {
      throw Error(ErrorKind::CertificationMissing,
                  "witness matrix is not positive definite at x = " + std::to_string(jd.x));
    }
  }
  RHSolution sol = solve_rh(jd, disc, opt);
  sol.certification = cert;
  return sol;
}

CMat eval_Y(const RHSolution& sol, cplx mu) {
  const int n = sol.jd.n();
  if (sol.disc.trivial) return CMat::Identity(n, n);
  if (mu == cplx(0.0)) return sol.G;
  if (line_distance(sol.jd, mu) < 6 * sol.disc.h)
    throw Error(ErrorKind::NearContour, "evaluation point within the guard band of the contour");
  const cplx w = mu / std::polar(1.0, sol.jd.delta / 2);
  CMat Y = CMat::Identity(n, n);
  for (std::size_t k = 0; k < sol.u.size(); ++k) {
    const double e = std::exp(sol.disc.s[k]);
    Y += (sol.disc.h * e / (kTwoPiI * (sol.disc.sigma[k] * e - w))) * sol.u[k];
  }
  return Y;
}

double jump_residual(const RHSolution& sol) {
  if (sol.disc.trivial) return 0.0;
  const int n = sol.jd.n();
  const auto& disc = sol.disc;
  const int N = static_cast<int>(disc.nodes.size()), M = disc.per_ray;
  const double h = disc.h;
  double res = 0.0;
  for (int side = 0; side < 2; ++side) {
    const int sg = side == 0 ? -1 : 1, off = side * M;
    for (int m = 0; m + 1 < M; ++m) {
      const double sm = disc.s[off + m] + h / 2, em = std::exp(sm);
      CMat P = CMat::Zero(n, n), um = CMat::Zero(n, n);
      for (int j = 0; j < N; ++j) {
        const double ej = std::exp(disc.s[j]);
        const double wgt = disc.sigma[j] * h * ej / (disc.sigma[j] == sg ? ej - em : ej + em);
        P += wgt * sol.u[j];
      }
      for (int j = 0; j < M; ++j) {
        const double a = (sm - disc.s[off + j]) / h;
        um += (std::sin(kPi * a) / (kPi * a)) * sol.u[off + j];
      }
      const CMat Yp = CMat::Identity(n, n) + um / 2.0 + P / kTwoPiI;
      const CMat Ym = CMat::Identity(n, n) - um / 2.0 + P / kTwoPiI;
      res = std::max(res, max_abs(Yp - Ym * solver_jump(sol.jd, sg * em)));
    }
  }
  return res;
}

void symmetry_residuals(const RHSolution& sol, ResidualReport& rep) {
  const int n = sol.jd.n();
  const CMat G0bar_inv = sol.G.conjugate().inverse();
  double r1 = 0.0, r2 = 0.0;
  for (double psi : {kPi / 2, -kPi / 2, kPi / 4, -kPi / 4, 3 * kPi / 4, -3 * kPi / 4})
    for (double q : {-1.0, -0.4, 0.0, 0.4, 1.0}) {
      const cplx mu = std::polar(std::exp(q), sol.jd.delta / 2 + psi);
      const CMat Y = eval_Y(sol, mu);
      r1 = std::max(r1, max_abs(CMat(eval_Y(sol, -mu).inverse().transpose()) - Y));
      r2 = std::max(r2, max_abs(G0bar_inv * eval_Y(sol, 1.0 / std::conj(mu)).conjugate() - Y));
    }
  rep.sym_reflect = r1;
  rep.sym_conj = r2;
  const cplx big = std::polar(1e8, sol.jd.delta / 2 + kPi / 2);
  rep.normalization = max_abs(eval_Y(sol, big) - CMat::Identity(n, n));
}

void metric_checks(const CMat& G, ResidualReport& rep) {
  const int n = static_cast<int>(G.rows());
  rep.hermitian = max_abs(G - G.adjoint());
  rep.orthogonal = max_abs(G * G.conjugate() - CMat::Identity(n, n));
  rep.det = std::abs(G.determinant() - 1.0);
  const CMat Hs = (G + G.adjoint()) / 2.0;
  rep.min_eig = Eigen::SelfAdjointEigenSolver<CMat>(Hs).eigenvalues().minCoeff();
  rep.cholesky_ok = Eigen::LLT<CMat>(Hs).info() == Eigen::Success && rep.min_eig > 0;
}

CMat psi1_zero(const RHSolution& sol) {
  return sol.G.inverse() * sol.dY0 + sol.jd.x * diag_of(sol.jd.spec, true);
}

CMat log_derivative(const RHSolution& sol) {
  const CMat A = diag_of(sol.jd.spec, false);
  const CMat p = psi1_zero(sol);
  return 2.0 * (A * p - p * A);
}

std::vector<double> log_grid(double x_min, double x_max, int count) {
  if (!(x_min > 0) || !(x_max >= x_min) || count < 1) throw Error(ErrorKind::BadInput, "bad x grid");
  std::vector<double> xs(count);
  for (int i = 0; i < count; ++i)
    xs[i] = count == 1 ? x_min : std::exp(std::log(x_min) + (std::log(x_max) - std::log(x_min)) * i / (count - 1));
  return xs;
}

MetricCurve metric_curve(const Spectrum& spec, const RMat& S, const std::vector<double>& xs,
                         const SolverOptions& opt, std::optional<double> delta) {
  MetricCurve c;
  c.spec = spec;
  c.S = S;
  for (double x : xs) {
    JumpData jd = make_jump_data(spec, S, x, delta);
    c.delta = jd.delta;
    RHSolution sol;
    try {
      sol = solve_rh(jd, opt);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SolveFailure)
        throw Error(ErrorKind::SolveFailure, std::string(e.what()) + " at x = " + std::to_string(x));
      throw;
    }
    CurvePoint p;
    p.x = x;
    p.G = sol.G;
    p.GinvGx = log_derivative(sol);
    p.res = sol.res;
    p.method = sol.method;
    p.nodes = static_cast<int>(sol.disc.nodes.size());
    c.pts.push_back(std::move(p));
  }
  return c;
}

std::vector<double> fornberg_weights(double x0, const std::vector<double>& xs, int m) {
  const int N = static_cast<int>(xs.size()) - 1;
  std::vector<std::vector<std::vector<double>>> c(m + 1, std::vector<std::vector<double>>(N + 1, std::vector<double>(N + 1, 0.0)));
  c[0][0][0] = 1.0;
  double c1 = 1.0;
  for (int i = 1; i <= N; ++i) {
    double c2 = 1.0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      for (int k = 0; k <= std::min(i, m); ++k) {
        c[k][i][j] = ((xs[i] - x0) * c[k][i - 1][j] - (k ? k * c[k - 1][i - 1][j] : 0.0)) / c3;
      }
    }
    for (int k = 0; k <= std::min(i, m); ++k) {
      c[k][i][i] = c1 / c2 * ((k ? k * c[k - 1][i - 1][i - 1] : 0.0) - (xs[i - 1] - x0) * c[k][i - 1][i - 1]);
    }
    c1 = c2;
  }
  std::vector<double> w(N + 1);
  for (int j = 0; j <= N; ++j) w[j] = c[m][N][j];
  return w;
}

TtResidual tt_residual(const MetricCurve& curve, int order) {
  const int N = static_cast<int>(curve.pts.size());
  if (order < 2 || order % 2) throw Error(ErrorKind::BadInput, "stencil order must be even and >= 2");
  const int p = order / 2;
  if (N < 5 || N < 2 * p + 1) throw Error(ErrorKind::GridTooCoarse, "need at least max(5, order+1) grid points");
  TtResidual out;
  out.order = order;
  std::vector<double> L(N);
  for (int i = 0; i < N; ++i) L[i] = std::log(curve.pts[i].x);
  const CMat A = diag_of(curve.spec, false), Ab = diag_of(curve.spec, true);

  auto deriv = [&](const std::vector<CMat>& f, int i) {
    std::vector<double> xs(L.begin() + i - p, L.begin() + i + p + 1);
    auto w = fornberg_weights(L[i], xs, 1);
    CMat r = CMat::Zero(f[i].rows(), f[i].cols());
    for (int k = 0; k <= 2 * p; ++k) r += w[k] * f[i - p + k];
    return r;
  };
  auto rhs = [&](int i) {
    const CMat& G = curve.pts[i].G;
    const CMat B = G.inverse() * Ab * G;
    return CMat(4 * curve.pts[i].x * (A * B - B * A));
  };

  std::vector<CMat> F(N);
  for (int i = 0; i < N; ++i) F[i] = curve.pts[i].x * curve.pts[i].GinvGx;
  for (int i = p; i < N - p; ++i) {
    const CMat lhs = deriv(F, i) / curve.pts[i].x;
    out.residual = std::max(out.residual, max_abs(lhs - rhs(i)));
    ++out.interior;
  }

  // second route: G_x by differences of G itself
  std::vector<CMat> Gs(N), Ffd(N);
  for (int i = 0; i < N; ++i) Gs[i] = curve.pts[i].G;
  for (int i = p; i < N - p; ++i) {
    const CMat Gx = deriv(Gs, i) / curve.pts[i].x;
    const CMat GiGx = curve.pts[i].G.inverse() * Gx;
    out.gx_gap = std::max(out.gx_gap, max_abs(GiGx - curve.pts[i].GinvGx));
    Ffd[i] = curve.pts[i].x * GiGx;
  }
  for (int i = 2 * p; i < N - 2 * p; ++i) {
    const CMat lhs = deriv(Ffd, i) / curve.pts[i].x;
    out.residual_fd = std::max(out.residual_fd, max_abs(lhs - rhs(i)));
  }
  return out;
}

}  // namespace ttade
