#include "ttade/rh_kernel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>

#include <Eigen/Eigenvalues>

namespace ttade {

namespace {

const cplx I1(0.0, 1.0);

cplx half_delta(const JumpData& jd) { return std::polar(1.0, jd.delta / 2); }

double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)); }

// G_- entries for t < 0, G_+^{-1} entries for t > 0; zero coefficients short-circuit
// so that the growing exponentials below the diagonal never overflow.
CMat masked_jump(const JumpData& jd, const RMat& coef, cplx mu) {
  const int n = jd.n();
  CMat G = CMat::Zero(n, n);
  const CMat E = exponent_matrix(jd, mu);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      if (coef(j, l) != 0.0) G(j, l) = coef(j, l) * E(j, l);
  return G;
}

RMat inverse_transpose(const RMat& S) { return S.inverse().transpose(); }

}  // namespace

RMat to_real(const RationalMatrix& S) { return S.to_double(); }

JumpData make_jump_data(const Spectrum& spec, const RMat& S, double x, std::optional<double> delta) {
  const int n = static_cast<int>(spec.n());
  if (S.rows() != n || S.cols() != n) throw Error(ErrorKind::BadInput, "matrix size differs from spectrum size");
  for (int i = 0; i < n; ++i) {
    if (S(i, i) != 1.0) throw Error(ErrorKind::NotUnitriangular, "diagonal entry is not 1");
    for (int j = 0; j < i; ++j)
      if (S(i, j) != 0.0) throw Error(ErrorKind::NotUnitriangular, "nonzero entry below the diagonal");
  }
  if (!(x > 0) || !std::isfinite(x)) throw Error(ErrorKind::BadInput, "x must be positive");
  check_db(spec);
  JumpData jd;
  jd.spec = spec;
  jd.S = S;
  jd.x = x;
  jd.delta = delta ? *delta : choose_delta(spec);
  if (!delta_feasible(spec, jd.delta))
    throw Error(ErrorKind::NoAdmissibleDelta, "jumps do not decay on the contour for this ordering and delta");
  return jd;
}

ContourSide contour_side(const JumpData& jd, cplx mu, double tol) {
  if (std::abs(mu) == 0.0) throw Error(ErrorKind::ContourViolation, "mu = 0 is not on the contour");
  const double a = std::arg(mu);
  if (angle_gap(a, jd.delta / 2) <= tol) return ContourSide::Plus;
  if (angle_gap(a, jd.delta / 2 - kPi) <= tol) return ContourSide::Minus;
  throw Error(ErrorKind::ContourViolation, "arg mu = " + std::to_string(a) + " is off both rays");
}

cplx contour_point(const JumpData& jd, ContourSide side, double r) {
  return (side == ContourSide::Plus ? r : -r) * half_delta(jd);
}

CMat exponent_matrix(const JumpData& jd, cplx mu) {
  const int n = jd.n();
  std::vector<cplx> phi(n), psi(n, 0.0);
  for (int j = 0; j < n; ++j) phi[j] = jd.x * (jd.spec.u[j] / mu + mu * std::conj(jd.spec.u[j]));
  if (!jd.beta.empty()) {
    const cplx d = half_delta(jd);
    const cplx g = 1.0 / mu * d - mu * std::conj(d);
    for (int j = 0; j < n; ++j) psi[j] = g * jd.x * jd.beta[j];
  }
  CMat E(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) E(j, l) = std::exp(phi[j] - phi[l] + I1 * (psi[l] - psi[j]));
  return E;
}

JumpPair jump_matrices(const JumpData& jd, cplx mu) {
  contour_side(jd, mu);
  JumpPair p;
  const RMat Sit = inverse_transpose(jd.S);
  p.minus = masked_jump(jd, jd.S, mu);
  p.plus = masked_jump(jd, Sit, mu);
  return p;
}

CMat solver_jump(const JumpData& jd, double t) {
  const cplx mu = t * half_delta(jd);
  return t < 0 ? masked_jump(jd, jd.S, mu) : masked_jump(jd, RMat(jd.S.transpose()), mu);
}

JumpData gauge_transform(const JumpData& jd, const std::vector<double>& beta) {
  if (static_cast<int>(beta.size()) != jd.n()) throw Error(ErrorKind::BadInput, "beta length mismatch");
  JumpData out = jd;
  out.beta = beta;
  if (!jd.beta.empty())
    for (int j = 0; j < jd.n(); ++j) out.beta[j] += jd.beta[j];
  return out;
}

double decay_rate(const JumpData& jd, int j, int l) {
  const cplx w = jd.spec.u[j] - jd.spec.u[l];
  return jd.x * std::abs(w) * std::cos(std::arg(w) - jd.delta / 2);
}

double jump_deviation(const JumpData& jd, double r) {
  const RMat Si = jd.S.inverse();
  double dev = 0.0;
  for (int j = 0; j < jd.n(); ++j)
    for (int l = j + 1; l < jd.n(); ++l) {
      const double c = std::max(std::abs(jd.S(j, l)), std::abs(Si(j, l)));
      if (c != 0.0) dev = std::max(dev, c * std::exp(-(r + 1 / r) * decay_rate(jd, j, l)));
    }
  return dev;
}

HermitianWitness hermitian_witness(const JumpData& jd, cplx mu) {
  HermitianWitness w;
  w.mu = mu;
  w.side = contour_side(jd, mu);
  const cplx mu2 = std::polar(1.0, jd.delta) * std::conj(mu);
  auto jp = jump_matrices(jd, mu), jq = jump_matrices(jd, mu2);
  if (w.side == ContourSide::Minus) {
    w.H = jp.minus + jq.minus.adjoint();
  } else {
    w.H = jp.plus.inverse() + CMat(jq.plus.inverse()).adjoint();
  }
  w.hermitian_defect = (w.H - w.H.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<CMat> es(w.H);
  w.min_eigenvalue = es.eigenvalues().minCoeff();
  w.cholesky_ok = Eigen::LLT<CMat>(w.H).info() == Eigen::Success && w.min_eigenvalue > 0;
  return w;
}

std::vector<double> an_chain_determinants(const std::vector<cplx>& a, bool allow_boundary) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double m = std::abs(a[j]);
    if (!(m < 1.0) && !(allow_boundary && m <= 1.0))
      throw Error(ErrorKind::ModulusViolation, "|a_" + std::to_string(j + 1) + "| = " + std::to_string(m));
  }
  std::vector<double> det{2.0};
  for (std::size_t i = 1; i <= a.size(); ++i) {
    const double prev2 = i >= 2 ? det[i - 2] : 1.0;
    det.push_back(2.0 * det[i - 1] - std::norm(a[i - 1]) * prev2);
  }
  return det;
}

EFamily parse_efamily(const std::string& s) {
  if (s == "E6" || s == "e6" || s == "6") return EFamily::E6;
  if (s == "E7" || s == "e7" || s == "7") return EFamily::E7;
  if (s == "E8" || s == "e8" || s == "8") return EFamily::E8;
  throw Error(ErrorKind::BadInput, "family must be E6, E7 or E8");
}

const char* efamily_name(EFamily f) { return f == EFamily::E6 ? "E6" : f == EFamily::E7 ? "E7" : "E8"; }

int efamily_rank(EFamily f) { return f == EFamily::E6 ? 6 : f == EFamily::E7 ? 7 : 8; }

std::vector<std::pair<int, int>> f_edges(EFamily f) {
  switch (f) {
    case EFamily::E6: return {{1, 2}, {2, 3}, {3, 4}, {3, 6}, {4, 5}};
    case EFamily::E7: return {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {4, 7}, {5, 6}};
    default: return {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {5, 8}, {6, 7}};
  }
}

std::vector<std::string> f_variable_names(EFamily f) {
  std::vector<std::string> v{"e1"};
  const int k = efamily_rank(f) - 1;
  for (int i = 3; i <= k + 1; ++i) v.push_back("e" + std::to_string(i));
  return v;
}

namespace {

const simd::TreeShape& shape_of(EFamily f) {
  static const simd::TreeShape s6 = simd::make_tree_shape(6, f_edges(EFamily::E6));
  static const simd::TreeShape s7 = simd::make_tree_shape(7, f_edges(EFamily::E7));
  static const simd::TreeShape s8 = simd::make_tree_shape(8, f_edges(EFamily::E8));
  return f == EFamily::E6 ? s6 : f == EFamily::E7 ? s7 : s8;
}

double f_at_t(EFamily f, const std::vector<double>& t) {
  std::vector<const double*> ptr(t.size());
  for (std::size_t e = 0; e < t.size(); ++e) ptr[e] = &t[e];
  double out = 0.0;
  simd::tree_det_scalar(shape_of(f), ptr.data(), 1, &out);
  return out;
}

}  // namespace

double f_eval(EFamily f, const std::vector<double>& e) {
  if (static_cast<int>(e.size()) != efamily_rank(f) - 1)
    throw Error(ErrorKind::BadInput, std::string(efamily_name(f)) + " takes " +
                                         std::to_string(efamily_rank(f) - 1) + " edge weights");
  std::vector<double> t(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) t[i] = e[i] * e[i];
  return f_at_t(f, t);
}

double f_eval_complex(EFamily f, const std::vector<cplx>& e) {
  const auto edges = f_edges(f);
  if (e.size() != edges.size()) throw Error(ErrorKind::BadInput, "wrong number of edge weights");
  const int n = efamily_rank(f);
  CMat M = 2.0 * CMat::Identity(n, n);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    M(edges[k].first - 1, edges[k].second - 1) = e[k];
    M(edges[k].second - 1, edges[k].first - 1) = std::conj(e[k]);
  }
  return M.determinant().real();
}

FMinResult f_minimize(EFamily f, double grid_step, double refine_tol) {
  if (!(grid_step > 0 && grid_step <= 0.1)) throw Error(ErrorKind::BadInput, "grid step must lie in (0, 0.1]");
  const auto t0 = std::chrono::steady_clock::now();
  const simd::TreeShape& shape = shape_of(f);
  const int k = shape.edges();
  const int m = static_cast<int>(std::lround(1.0 / grid_step)) + 1;
  std::vector<double> axis(m);  // grid in |e|, stored as t = e^2
  for (int i = 0; i < m; ++i) {
    const double e = std::min(1.0, i * grid_step);
    axis[i] = e * e;
  }

  // the last two coordinates vary inside a chunk, the rest are constant
  const std::size_t chunk = static_cast<std::size_t>(m) * m;
  std::vector<std::vector<double>> buf(k, std::vector<double>(chunk));
  for (std::size_t c = 0; c < chunk; ++c) {
    buf[k - 2][c] = axis[c / m];
    buf[k - 1][c] = axis[c % m];
  }
  std::vector<const double*> ptr(k);
  for (int e = 0; e < k; ++e) ptr[e] = buf[e].data();
  std::vector<double> out(chunk);
  std::vector<int> odo(k - 2, 0);

  FMinResult r;
  r.kernel = simd::isa_name(simd::active_isa());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_idx(k, 0);
  for (;;) {
    for (int e = 0; e < k - 2; ++e) std::fill(buf[e].begin(), buf[e].end(), axis[odo[e]]);
    simd::tree_det(shape, ptr.data(), chunk, out.data());
    r.grid_points += chunk;
    for (std::size_t c = 0; c < chunk; ++c)
      if (out[c] < best) {
        best = out[c];
        for (int e = 0; e < k - 2; ++e) best_idx[e] = odo[e];
        best_idx[k - 2] = static_cast<int>(c / m);
        best_idx[k - 1] = static_cast<int>(c % m);
      }
    int e = k - 3;
    while (e >= 0 && ++odo[e] == m) odo[e--] = 0;
    if (e < 0) break;
  }
  r.grid_min = best;
  std::vector<double> t(k);
  for (int e = 0; e < k; ++e) t[e] = axis[best_idx[e]];
  for (int e = 0; e < k; ++e) r.grid_argmin.push_back(-std::sqrt(t[e]));

  // f is affine in each t_e, so exact coordinate minimisation moves to an endpoint
  double cur = f_at_t(f, t);
  for (;;) {
    ++r.refine_sweeps;
    const double before = cur;
    for (int e = 0; e < k; ++e) {
      std::vector<double> lo = t, hi = t;
      lo[e] = 0.0;
      hi[e] = 1.0;
      const double flo = f_at_t(f, lo), fhi = f_at_t(f, hi);
      if (flo < cur - refine_tol && flo <= fhi) t = lo, cur = flo;
      else if (fhi < cur - refine_tol) t = hi, cur = fhi;
    }
    if (before - cur <= refine_tol || r.refine_sweeps > 64) break;
  }
  r.min = std::min(cur, best);
  for (int e = 0; e < k; ++e) r.argmin.push_back(-std::sqrt(t[e]));
  r.attained_on_boundary = std::any_of(r.argmin.begin(), r.argmin.end(),
                                       [](double v) { return std::abs(v) >= 1.0 - 1e-12; });
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::CertifiedAnalytic: return "CertifiedAnalytic";
    case Verdict::CertifiedSampled: return "CertifiedSampled";
    case Verdict::Refuted: return "Refuted";
    default: return "Inconclusive";
  }
}

std::optional<std::string> analytic_certificate(const RMat& S) {
  const int n = static_cast<int>(S.rows());
  if (S.isIdentity(0.0)) return std::string("trivial");

  bool small = true;
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (S(i, j) != 0.0) {
        small = small && std::abs(S(i, j)) <= 1.0;
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
  if (small) {
    // every component must be an A/D/E tree
    std::vector<int> comp(n, -1);
    bool ok = true;
    for (int s = 0; s < n && ok; ++s) {
      if (comp[s] >= 0) continue;
      std::vector<int> nodes{s};
      comp[s] = s;
      for (std::size_t q = 0; q < nodes.size(); ++q)
        for (int w : adj[nodes[q]])
          if (comp[w] < 0) comp[w] = s, nodes.push_back(w);
      std::map<int, int> local;
      for (std::size_t q = 0; q < nodes.size(); ++q) local[nodes[q]] = static_cast<int>(q);
      std::vector<std::vector<int>> sub(nodes.size());
      for (std::size_t q = 0; q < nodes.size(); ++q)
        for (int w : adj[nodes[q]]) sub[q].push_back(local[w]);
      ok = classify_tree(sub).has_value();
    }
    if (ok) return std::string("ade_forest");
  }

  RMat M = (S + S.transpose() - 2.0 * RMat::Identity(n, n)).cwiseAbs();
  Eigen::SelfAdjointEigenSolver<RMat> es(M);
  if (es.eigenvalues().maxCoeff() < 2.0 - 1e-12) return std::string("perron_frobenius");
  return std::nullopt;
}

double sampled_min_pivot(const JumpData& jd, const std::vector<double>& radii, cplx* worst_mu,
                         ContourSide* worst_side) {
  const int n = jd.n();
  const std::size_t R = radii.size(), count = 2 * R;
  std::vector<double> re(n * n * count, 0.0), im(n * n * count, 0.0);
  const RMat St = jd.S.transpose();
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t q = 0; q < R; ++q) {
      const std::size_t p = s * R + q;
      const ContourSide side = s == 0 ? ContourSide::Minus : ContourSide::Plus;
      const cplx mu = contour_point(jd, side, radii[q]);
      // on the contour the reflected point is mu itself, so H = G + G^*
      const CMat G = masked_jump(jd, side == ContourSide::Minus ? jd.S : St, mu);
      const CMat H = G + G.adjoint();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          re[(i * n + j) * count + p] = H(i, j).real();
          im[(i * n + j) * count + p] = H(i, j).imag();
        }
    }
  std::vector<double> piv(count);
  simd::herm_min_pivot(n, re.data(), im.data(), count, piv.data());
  const std::size_t w = std::min_element(piv.begin(), piv.end()) - piv.begin();
  const ContourSide side = w < R ? ContourSide::Minus : ContourSide::Plus;
  if (worst_mu) *worst_mu = contour_point(jd, side, radii[w % R]);
  if (worst_side) *worst_side = side;
  return piv[w];
}

CertificateReport positivity_certificate(const Spectrum& spec, const RMat& S, const CertifyOptions& opt) {
  CertificateReport rep;
  JumpData base = make_jump_data(spec, S, 1.0, opt.delta);
  rep.delta = base.delta;
  rep.kernel = simd::isa_name(simd::active_isa());
  if (auto route = analytic_certificate(S)) {
    rep.verdict = Verdict::CertifiedAnalytic;
    rep.route = *route;
    rep.detail = "positivity holds for every x > 0 and every mu on the contour";
    return rep;
  }
  if (opt.analytic_only) {
    rep.verdict = Verdict::Inconclusive;
    rep.route = "none";
    rep.detail = "no analytic route applies and sampling was disabled";
    return rep;
  }

  rep.route = "sampled";
  double worst = std::numeric_limits<double>::infinity();
  for (int ix = 0; ix < opt.x_count; ++ix) {
    const double x = opt.x_count == 1 ? opt.x_min
                                      : opt.x_min * std::pow(opt.x_max / opt.x_min, double(ix) / (opt.x_count - 1));
    JumpData jd = base;
    jd.x = x;
    double L = 0.0;
    for (int j = 0; j < jd.n(); ++j)
      for (int l = j + 1; l < jd.n(); ++l)
        if (S(j, l) != 0.0)
          L = std::max(L, std::log(std::abs(S(j, l)) / opt.endpoint_tol) / decay_rate(jd, j, l));
    const double rmax = std::max(L > 2 ? (L + std::sqrt(L * L - 4)) / 2 : 1.0, std::exp(1.0));
    std::vector<double> radii(opt.r_count);
    for (int q = 0; q < opt.r_count; ++q)
      radii[q] = opt.r_count == 1 ? 1.0 : std::pow(rmax, 2.0 * q / (opt.r_count - 1) - 1.0);
    cplx mu;
    ContourSide side;
    const double p = sampled_min_pivot(jd, radii, &mu, &side);
    rep.samples += 2 * radii.size();
    if (p < worst) {
      worst = p;
      rep.worst_x = x;
      rep.worst_mu = mu;
      rep.worst_side = side == ContourSide::Minus ? "minus" : "plus";
    }
  }
  JumpData jd = base;
  jd.x = rep.worst_x;
  rep.worst_min_eig = hermitian_witness(jd, rep.worst_mu).min_eigenvalue;
  if (worst > opt.eig_tol && rep.worst_min_eig > opt.eig_tol) {
    rep.verdict = Verdict::CertifiedSampled;
    rep.detail = "all sampled witnesses are positive definite";
  } else if (rep.worst_min_eig < -opt.eig_tol) {
    rep.verdict = Verdict::Refuted;
    rep.detail = "witness with a negative eigenvalue found";
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.detail = "smallest eigenvalue is within tolerance of zero";
  }
  return rep;
}

}  // namespace ttade
