#include "ttade/braid_action.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_set>

#include <Eigen/Eigenvalues>

namespace ttade {

namespace {

void check_index(const RationalMatrix& S, int l) {
  if (l < 1 || l >= static_cast<int>(S.n()))
    throw Error(ErrorKind::IndexOutOfRange, "braid index " + std::to_string(l) +
                                                " outside 1.." + std::to_string(S.n() - 1));
}

void check_unitriangular(const RationalMatrix& S) {
  if (!S.is_unitriangular()) throw Error(ErrorKind::NotUnitriangular, to_string(S));
}

// Conjugation by a matrix that differs from I only in the 2x2 block at (l-1, l).
RationalMatrix block_conjugate(const RationalMatrix& S, int l, const mpq_class blk[4]) {
  const std::size_t n = S.n(), a = l - 1, b = l;
  RationalMatrix t = S;
  for (std::size_t j = 0; j < n; ++j) {
    t(a, j) = blk[0] * S(a, j) + blk[1] * S(b, j);
    t(b, j) = blk[2] * S(a, j) + blk[3] * S(b, j);
  }
  RationalMatrix r = t;
  for (std::size_t i = 0; i < n; ++i) {
    r(i, a) = t(i, a) * blk[0] + t(i, b) * blk[2];
    r(i, b) = t(i, a) * blk[1] + t(i, b) * blk[3];
  }
  return r;
}

}  // namespace

std::string to_string(const BraidWord& w) {
  std::string s = "[";
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) s += ", ";
    if (w[k].kind == Generator::Kind::Move) {
      s += "s" + std::to_string(w[k].l);
      if (w[k].inverse) s += "^-1";
    } else {
      s += "eps(";
      for (std::size_t i = 0; i < w[k].eps.size(); ++i) s += (i ? "," : "") + std::to_string(w[k].eps[i]);
      s += ")";
    }
  }
  return s + "]";
}

RationalMatrix sigma_eps(const RationalMatrix& S, const SignVector& eps) {
  if (eps.size() != S.n()) throw Error(ErrorKind::BadInput, "sign vector length mismatch");
  RationalMatrix r = S;
  for (std::size_t i = 0; i < S.n(); ++i) {
    if (eps[i] != 1 && eps[i] != -1) throw Error(ErrorKind::BadInput, "sign entries must be +-1");
    for (std::size_t j = 0; j < S.n(); ++j)
      if (eps[i] * eps[j] < 0) r(i, j) = -r(i, j);
  }
  return r;
}

RationalMatrix b_matrix(const RationalMatrix& S, int l) {
  check_index(S, l);
  RationalMatrix B = RationalMatrix::identity(S.n());
  B(l - 1, l - 1) = 0;
  B(l - 1, l) = 1;
  B(l, l - 1) = 1;
  B(l, l) = -S(l - 1, l);
  return B;
}

RationalMatrix sigma_l(const RationalMatrix& S, int l) {
  check_index(S, l);
  const mpq_class blk[4] = {0, 1, 1, -S(l - 1, l)};
  RationalMatrix r = block_conjugate(S, l, blk);
  check_unitriangular(r);
  return r;
}

RationalMatrix sigma_l_inv(const RationalMatrix& S, int l) {
  check_index(S, l);
  const mpq_class blk[4] = {-S(l - 1, l), 1, 1, 0};
  RationalMatrix r = block_conjugate(S, l, blk);
  check_unitriangular(r);
  return r;
}

RationalMatrix apply_generator(const RationalMatrix& S, const Generator& g) {
  if (g.kind == Generator::Kind::Sign) return sigma_eps(S, g.eps);
  return g.inverse ? sigma_l_inv(S, g.l) : sigma_l(S, g.l);
}

RationalMatrix apply_word(const RationalMatrix& S, const BraidWord& w) {
  RationalMatrix r = S;
  for (const auto& g : w) r = apply_generator(r, g);
  return r;
}

BraidWord full_turn_word(const Spectrum& spec, const GeometryTolerances& tol) {
  BraidWord w;
  for (int l : crossing_sequence(spec, 2 * kPi, tol)) w.push_back(Generator::move(l));
  return w;
}

StokesDataSet stokes_data(const RationalMatrix& S, const Spectrum& spec, const GeometryTolerances& tol) {
  if (S.n() != spec.n()) throw Error(ErrorKind::BadInput, "matrix and spectrum sizes differ");
  check_unitriangular(S);
  const BraidWord w = full_turn_word(spec, tol);
  const std::size_t n = S.n();
  StokesDataSet out;
  std::unordered_set<std::string> seen;
  RationalMatrix t = S;
  for (const auto& g : w) {
    t = apply_generator(t, g);
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
      SignVector eps(n);
      for (std::size_t i = 0; i < n; ++i) eps[i] = (mask >> i) & 1 ? -1 : 1;
      RationalMatrix c = sigma_eps(t, eps);
      ++out.raw_count;
      if (seen.insert(c.key()).second) out.matrices.push_back(std::move(c));
    }
  }
  if (w.empty()) {  // n = 1
    out.matrices.push_back(S);
    out.raw_count = 1;
  }
  return out;
}

RationalMatrix sign_canonical(const RationalMatrix& S, SignVector* eps_out) {
  const std::size_t n = S.n();
  SignVector eps(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (eps[root]) continue;
    eps[root] = 1;
    std::deque<std::size_t> q{root};
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop_front();
      for (std::size_t w = 0; w < n; ++w) {
        if (w == v || eps[w]) continue;
        const mpq_class& e = v < w ? S(v, w) : S(w, v);
        if (sgn(e) == 0) continue;
        eps[w] = eps[v] * sgn(e);
        q.push_back(w);
      }
    }
  }
  if (eps_out) *eps_out = eps;
  return sigma_eps(S, eps);
}

std::optional<SignVector> sign_equivalence(const RationalMatrix& X, const RationalMatrix& T) {
  if (X.n() != T.n()) return std::nullopt;
  SignVector ex, et;
  const RationalMatrix cx = sign_canonical(X, &ex);
  const RationalMatrix ct = sign_canonical(T, &et);
  if (cx != ct) return std::nullopt;
  // ex X ex = et T et  =>  T = (et ex) X (ex et)
  SignVector e(X.n());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = ex[i] * et[i];
  return e;
}

std::optional<BraidWord> orbit_find(const RationalMatrix& S, const OrbitPredicate& accept, int bound,
                                    OrbitSearchStats* stats) {
  OrbitSearchStats st;
  auto finish = [&](std::optional<BraidWord> r) {
    if (stats) {
      st.charge_mismatch = stats->charge_mismatch;
      *stats = st;
    }
    return r;
  };
  check_unitriangular(S);
  auto hit = [&](const RationalMatrix& X, const BraidWord& w) -> std::optional<BraidWord> {
    auto e = accept(X);
    if (!e) return std::nullopt;
    BraidWord r = w;
    if (std::any_of(e->begin(), e->end(), [](int v) { return v != 1; }))
      r.push_back(Generator::sign(*e));
    return r;
  };

  struct Node {
    RationalMatrix m;
    BraidWord w;
  };
  const int n = static_cast<int>(S.n());
  std::unordered_set<std::string> visited{sign_canonical(S).key()};
  std::vector<Node> frontier{{S, {}}};
  st.visited = 1;
  if (auto r = hit(S, {})) return finish(r);
  for (int depth = 1; depth <= bound && !frontier.empty(); ++depth) {
    st.depth_reached = depth;
    std::vector<Node> next;
    for (const auto& nd : frontier)
      for (int l = 1; l < n; ++l)
        for (bool inv : {false, true}) {
          RationalMatrix m = inv ? sigma_l_inv(nd.m, l) : sigma_l(nd.m, l);
          if (!visited.insert(sign_canonical(m).key()).second) continue;
          ++st.visited;
          BraidWord w = nd.w;
          w.push_back(Generator::move(l, inv));
          if (auto r = hit(m, w)) return finish(r);
          next.push_back({std::move(m), std::move(w)});
        }
    frontier = std::move(next);
  }
  return finish(std::nullopt);
}

std::optional<BraidWord> orbit_search(const RationalMatrix& S, const RationalMatrix& target, int bound,
                                      OrbitSearchStats* stats) {
  if (S.n() != target.n()) return std::nullopt;
  check_unitriangular(target);
  if (charge_polynomial(S) != charge_polynomial(target)) {
    if (stats) *stats = OrbitSearchStats{0, 0, true};
    return std::nullopt;
  }
  if (stats) stats->charge_mismatch = false;
  return orbit_find(S, [&](const RationalMatrix& X) { return sign_equivalence(X, target); }, bound, stats);
}

std::vector<mpq_class> charge_polynomial(const RationalMatrix& S) {
  check_unitriangular(S);
  return (S * S.inverse().transpose()).charpoly();
}

std::vector<cplx> charges(const RationalMatrix& S) {
  check_unitriangular(S);
  const Eigen::MatrixXd M = (S * S.inverse().transpose()).to_double();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M.cast<cplx>());
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + M.rows());
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    const double pa = std::arg(a), pb = std::arg(b);
    if (std::abs(pa - pb) > 1e-12) return pa < pb;
    return std::abs(a) < std::abs(b);
  });
  return ev;
}

}  // namespace ttade
