#include <random>

#include "doctest.h"
#include "ttade/ade_catalog.hpp"
#include "ttade/rh_kernel.hpp"

using namespace ttade;

namespace {

const cplx w = std::polar(1.0, 2 * kPi / 3);
const Spectrum cube{{1.0, w, w * w}};
const Spectrum pair{{1.0, -1.0}};

RMat seed(char f, int n) { return to_real(cartan_seed({f, n})); }

// dense determinant of the displayed E-family matrices
double dense_f(EFamily f, const std::vector<double>& e) {
  const auto edges = f_edges(f);
  const int n = efamily_rank(f);
  RMat M = 2.0 * RMat::Identity(n, n);
  for (std::size_t k = 0; k < edges.size(); ++k)
    M(edges[k].first - 1, edges[k].second - 1) = M(edges[k].second - 1, edges[k].first - 1) = e[k];
  return M.determinant();
}

Spectrum random_spectrum(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0, 1);
  for (;;) {
    Spectrum s;
    for (int k = 0; k < n; ++k) s.u.push_back({N(rng), N(rng)});
    if (!check_pd(s, 1e-9)) continue;
    s = reorder(s, admissible_order(s));
    if (delta_upper_bound(s) > 1e-3) return s;
  }
}

}  // namespace

TEST_CASE("jump matrices") {
  auto jd = make_jump_data(cube, RMat::Identity(3, 3), 0.7);
  auto mu = contour_point(jd, ContourSide::Minus, 0.8);
  auto jp = jump_matrices(jd, mu);
  CHECK((jp.minus - CMat::Identity(3, 3)).norm() == 0.0);
  CHECK((jp.plus - CMat::Identity(3, 3)).norm() == 0.0);
  CHECK_THROWS_AS(jump_matrices(jd, cplx(0.3, 0.9)), Error);

  auto j2 = make_jump_data(pair, seed('A', 2), 1.3);
  for (double r : {0.1, 0.5, 1.0, 3.0}) {
    const cplx m = contour_point(j2, ContourSide::Minus, r);
    const cplx ex = j2.x * ((pair.u[0] - pair.u[1]) / m + m * std::conj(pair.u[0] - pair.u[1]));
    auto g = jump_matrices(j2, m);
    CHECK(std::abs(std::abs(g.minus(0, 1)) - std::exp(ex.real())) < 1e-14);
    CHECK(std::abs(g.minus(0, 1)) < 1.0);
  }

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.05, 5);
  for (int t = 0; t < 40; ++t) {
    auto jd3 = make_jump_data(cube, seed('A', 3), U(rng));
    for (auto side : {ContourSide::Minus, ContourSide::Plus}) {
      auto g = jump_matrices(jd3, contour_point(jd3, side, U(rng)));
      CHECK(std::abs(g.minus.determinant() - 1.0) < 1e-12);
      CHECK(std::abs(g.plus.determinant() - 1.0) < 1e-12);
    }
    // off-diagonal moduli on Gamma_- are below 1
    auto g = jump_matrices(jd3, contour_point(jd3, ContourSide::Minus, U(rng)));
    for (int j = 0; j < 3; ++j)
      for (int l = j + 1; l < 3; ++l) CHECK(std::abs(g.minus(j, l)) <= 1.0);
  }
}

TEST_CASE("gauge transform") {
  auto jd = make_jump_data(pair, seed('A', 2), 0.9);
  auto g0 = gauge_transform(jd, {0.0, 0.0});
  const cplx mu = contour_point(jd, ContourSide::Minus, 0.6);
  CHECK((jump_matrices(g0, mu).minus - jump_matrices(jd, mu).minus).norm() < 1e-15);

  auto gi = gauge_transform(make_jump_data(pair, RMat::Identity(2, 2), 0.9), {0.3, -1.1});
  CHECK((jump_matrices(gi, mu).minus - CMat::Identity(2, 2)).norm() < 1e-15);

  // (1,2) entry gains T_2 / T_1 with T_j = exp(i (mu^{-1} d - mu conj d) x beta_j)
  const std::vector<double> beta{0.4, -0.25};
  auto gb = gauge_transform(jd, beta);
  for (double r : {0.3, 1.0, 2.5})
    for (auto side : {ContourSide::Minus, ContourSide::Plus}) {
      const cplx m = contour_point(jd, side, r);
      const cplx d = std::polar(1.0, jd.delta / 2);
      const cplx g = (1.0 / m) * d - m * std::conj(d);
      const cplx fac = std::exp(cplx(0, 1) * g * jd.x * (beta[1] - beta[0]));
      auto a = jump_matrices(jd, m), b = jump_matrices(gb, m);
      CHECK(std::abs(b.minus(0, 1) - a.minus(0, 1) * fac) < 1e-14 * (1 + std::abs(a.minus(0, 1))));
      CHECK(std::abs(b.plus(1, 0) - a.plus(1, 0) / fac) < 1e-14 * (1 + std::abs(a.plus(1, 0))));
      CHECK(std::abs(std::abs(fac) - 1.0) < 1e-14);
      CHECK(std::abs(b.minus.determinant() - 1.0) < 1e-14);
    }
}

TEST_CASE("hermitian witness") {
  auto jd = make_jump_data(cube, RMat::Identity(3, 3), 1.0);
  auto h = hermitian_witness(jd, contour_point(jd, ContourSide::Plus, 2.0));
  CHECK(h.min_eigenvalue == doctest::Approx(2.0));
  CHECK(h.cholesky_ok);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0.05, 4);
  for (int t = 0; t < 30; ++t) {
    auto j3 = make_jump_data(cube, seed('A', 3), U(rng));
    for (auto side : {ContourSide::Minus, ContourSide::Plus}) {
      auto hw = hermitian_witness(j3, contour_point(j3, side, U(rng)));
      CHECK(hw.hermitian_defect < 1e-14);
      CHECK(hw.cholesky_ok);
      // tridiagonal: the chain recursion reproduces the leading minors
      std::vector<cplx> a{hw.H(0, 1), hw.H(1, 2)};
      auto dets = an_chain_determinants(a);
      CHECK(dets[2] == doctest::Approx(hw.H.determinant().real()).epsilon(1e-12));
    }
  }

  // gauge conjugation is unitary on the contour: spectrum of H unchanged
  auto j4 = make_jump_data(cube, seed('A', 3), 0.4);
  auto g4 = gauge_transform(j4, {0.2, -0.7, 1.3});
  for (double r : {0.2, 1.0, 5.0}) {
    auto a = hermitian_witness(j4, contour_point(j4, ContourSide::Minus, r));
    auto b = hermitian_witness(g4, contour_point(g4, ContourSide::Minus, r));
    CHECK(a.min_eigenvalue == doctest::Approx(b.min_eigenvalue).epsilon(1e-12));
  }
}

TEST_CASE("chain determinants") {
  auto d0 = an_chain_determinants(std::vector<cplx>(5, 0.0));
  for (int i = 0; i < 6; ++i) CHECK(d0[i] == std::pow(2.0, i + 1));
  CHECK(an_chain_determinants({0.5})[1] == doctest::Approx(3.75));
  auto db = an_chain_determinants(std::vector<cplx>(7, std::polar(1.0, 0.3)), true);
  for (int i = 0; i < 8; ++i) CHECK(db[i] == doctest::Approx(i + 2).epsilon(1e-13));
  CHECK_THROWS_AS(an_chain_determinants({1.0}), Error);
  CHECK_THROWS_AS(an_chain_determinants({1.2}, true), Error);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 11;
    std::vector<cplx> a(n - 1);
    for (auto& z : a) z = std::polar(0.999 * std::sqrt(U(rng)), 2 * kPi * U(rng));
    auto d = an_chain_determinants(a);
    for (int i = 0; i < n; ++i) CHECK(d[i] > 0);
    for (int i = 1; i < n; ++i) CHECK(d[i] > d[i - 1]);
    CMat M = 2.0 * CMat::Identity(n, n);
    for (int i = 0; i + 1 < n; ++i) M(i, i + 1) = a[i], M(i + 1, i) = std::conj(a[i]);
    CHECK(d[n - 1] == doctest::Approx(M.determinant().real()).epsilon(1e-10));
  }
}

TEST_CASE("f functions") {
  CHECK(f_eval(EFamily::E6, std::vector<double>(5, 0.0)) == 64.0);
  CHECK(f_eval(EFamily::E7, std::vector<double>(6, 0.0)) == 128.0);
  CHECK(f_eval(EFamily::E8, std::vector<double>(7, -1.0)) == doctest::Approx(1.0));
  CHECK(f_eval(EFamily::E6, std::vector<double>(5, -1.0)) == doctest::Approx(3.0));
  CHECK(f_eval(EFamily::E7, std::vector<double>(6, -1.0)) == doctest::Approx(2.0));
  CHECK(f_variable_names(EFamily::E6) == std::vector<std::string>{"e1", "e3", "e4", "e5", "e6"});
  CHECK(f_variable_names(EFamily::E8).back() == "e8");
  CHECK_THROWS_AS(f_eval(EFamily::E8, {1.0}), Error);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-1, 1);
  for (auto f : {EFamily::E6, EFamily::E7, EFamily::E8}) {
    const int k = efamily_rank(f) - 1;
    for (int t = 0; t < 50; ++t) {
      std::vector<double> e(k);
      std::vector<cplx> z(k);
      for (int i = 0; i < k; ++i) e[i] = 1.3 * U(rng), z[i] = std::polar(std::abs(e[i]), kPi * U(rng));
      CHECK(f_eval(f, e) == doctest::Approx(dense_f(f, e)).epsilon(1e-12));
      // tree graphs: phases drop out
      CHECK(f_eval_complex(f, z) == doctest::Approx(f_eval(f, e)).epsilon(1e-12));
      for (auto& v : e) v = std::max(-1.0, std::min(1.0, v));
      const double floor = f == EFamily::E6 ? 3 : f == EFamily::E7 ? 2 : 1;
      CHECK(f_eval(f, e) >= floor - 1e-12);
    }
  }
}

TEST_CASE("f minimisation at a coarse step") {
  auto r = f_minimize(EFamily::E6, 0.1);
  CHECK(r.min == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.attained_on_boundary);
  CHECK(r.grid_points == 161051);
  CHECK_THROWS_AS(f_minimize(EFamily::E6, 0.2), Error);
}

TEST_CASE("analytic certificates") {
  CHECK(analytic_certificate(RMat::Identity(4, 4)) == std::optional<std::string>("trivial"));
  CHECK(analytic_certificate(seed('D', 5)) == std::optional<std::string>("ade_forest"));
  CHECK(analytic_certificate(seed('E', 8)) == std::optional<std::string>("ade_forest"));
  RMat half = seed('A', 3);
  half(0, 2) = 0.5;  // a cycle, rescued by the spectral bound
  CHECK(analytic_certificate(half) == std::optional<std::string>("perron_frobenius"));
  CHECK_FALSE(analytic_certificate(RMat{{1, -3}, {0, 1}}));

  std::mt19937_64 rng(9);
  auto s5 = random_spectrum(rng, 5);
  auto rep = positivity_certificate(s5, seed('D', 5));
  CHECK(rep.verdict == Verdict::CertifiedAnalytic);
  CHECK(positivity_certificate(cube, RMat::Identity(3, 3)).verdict == Verdict::CertifiedAnalytic);
}

TEST_CASE("sampled certificates") {
  auto rep = positivity_certificate(pair, RMat{{1, -3}, {0, 1}});
  CHECK(rep.verdict == Verdict::Refuted);
  CHECK(rep.worst_min_eig < 0);
  auto pf = positivity_certificate(pair, RMat{{1, -1.5}, {0, 1}});
  CHECK(pf.verdict == Verdict::CertifiedAnalytic);
  CHECK(pf.route == "perron_frobenius");
  // |S_12| = 2 sits on the spectral bound, but 2 - 2|E| > 0 since |E| < 1
  auto ok = positivity_certificate(pair, RMat{{1, -2}, {0, 1}});
  CHECK(ok.verdict == Verdict::CertifiedSampled);
  CHECK(ok.worst_min_eig > 0);
  CHECK(positivity_certificate(pair, RMat{{1, -3}, {0, 1}}, CertifyOptions{.analytic_only = true}).verdict ==
        Verdict::Inconclusive);

  // gauge conjugation leaves the sampled verdict unchanged
  auto jd = make_jump_data(pair, RMat{{1, -3}, {0, 1}}, 0.05);
  std::vector<double> radii{0.5, 0.9, 1.0, 1.1, 2.0};
  const double p0 = sampled_min_pivot(jd, radii);
  const double p1 = sampled_min_pivot(gauge_transform(jd, {0.7, -0.2}), radii);
  CHECK(p0 < 0);
  CHECK(p1 == doctest::Approx(p0).epsilon(1e-12));
}
