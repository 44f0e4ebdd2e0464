#include <random>

#include "doctest.h"
#include "ttade/braid_action.hpp"

using namespace ttade;

namespace {

const cplx w = std::polar(1.0, 2 * kPi / 3);

RationalMatrix random_unitriangular(std::mt19937_64& rng, std::size_t n, int lo = -3, int hi = 3) {
  std::uniform_int_distribution<int> D(lo, hi);
  RationalMatrix S = RationalMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) S(i, j) = D(rng);
  return S;
}

Spectrum random_admissible(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0, 1);
  for (;;) {
    Spectrum s;
    for (int k = 0; k < n; ++k) s.u.push_back({N(rng), N(rng)});
    if (!check_pd(s, 1e-9)) continue;
    return reorder(s, admissible_order(s));
  }
}

const RationalMatrix SA2(2, {1, -1, 0, 1});
const RationalMatrix SA3(3, {1, -1, 0, 0, 1, -1, 0, 0, 1});

}  // namespace

TEST_CASE("rational matrix basics") {
  RationalMatrix m(2, {2, 1, 1, 1});
  CHECK(m.determinant() == 1);
  CHECK(m * m.inverse() == RationalMatrix::identity(2));
  auto c = m.charpoly();  // l^2 - 3l + 1
  CHECK(c[0] == 1);
  CHECK(c[1] == -3);
  CHECK(c[2] == 1);
  RationalMatrix sing(2, {1, 2, 2, 4});
  CHECK(sing.determinant() == 0);
  CHECK_THROWS_AS(sing.inverse(), Error);
}

TEST_CASE("sign conjugation") {
  CHECK(sigma_eps(SA2, {1, -1}) == RationalMatrix(2, {1, 1, 0, 1}));
  CHECK(sigma_eps(SA3, {1, 1, 1}) == SA3);
  CHECK(sigma_eps(RationalMatrix::identity(4), {1, -1, -1, 1}) == RationalMatrix::identity(4));
  CHECK(sigma_eps(sigma_eps(SA3, {-1, 1, -1}), {-1, 1, -1}) == SA3);
}

TEST_CASE("b matrix and braid move") {
  auto B = b_matrix(SA2, 1);
  CHECK(B == RationalMatrix(2, {0, 1, 1, 1}));
  CHECK(B.determinant() == -1);
  CHECK(b_matrix(RationalMatrix::identity(2), 1) == RationalMatrix(2, {0, 1, 1, 0}));
  CHECK_THROWS_AS(b_matrix(SA2, 2), Error);
  CHECK(sigma_l(SA2, 1) == RationalMatrix(2, {1, 1, 0, 1}));
  CHECK(sigma_l(RationalMatrix::identity(4), 3) == RationalMatrix::identity(4));
  // hand-multiplied B S B for S_{A_3}, l = 2
  CHECK(sigma_l(SA3, 2) == RationalMatrix(3, {1, 0, -1, 0, 1, 1, 0, 0, 1}));

  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 4;
    auto S = random_unitriangular(rng, n);
    const int l = 1 + t % static_cast<int>(n - 1);
    auto Bm = b_matrix(S, l);
    auto ref = Bm * S * Bm;
    CHECK(sigma_l(S, l) == ref);
    CHECK(ref.determinant() == 1);
    CHECK(sigma_l_inv(sigma_l(S, l), l) == S);
    CHECK(sigma_l(sigma_l_inv(S, l), l) == S);
  }
}

TEST_CASE("apply word") {
  CHECK(apply_word(SA3, {}) == SA3);
  RationalMatrix S(2, {1, 5, 0, 1});
  CHECK(apply_word(S, {Generator::move(1), Generator::move(1)}) == sigma_l(sigma_l(S, 1), 1));
}

TEST_CASE("full turn word") {
  auto w2 = full_turn_word(Spectrum{{1.0, -1.0}});
  CHECK(w2 == BraidWord{Generator::move(1), Generator::move(1)});
  auto w3 = full_turn_word(Spectrum{{1.0, w, w * w}});
  REQUIRE(w3.size() == 6);
  std::mt19937_64 rng(17);
  for (int t = 0; t < 30; ++t) {
    auto S = random_unitriangular(rng, 3);
    CHECK(apply_word(S, w3) == S);
  }
}

TEST_CASE("commutation with sign conjugation") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 4;
    auto S = random_unitriangular(rng, n);
    SignVector e(n);
    for (auto& v : e) v = rng() & 1 ? 1 : -1;
    const int l = 1 + static_cast<int>(rng() % (n - 1));
    SignVector pe = e;
    std::swap(pe[l - 1], pe[l]);
    CHECK(sigma_l(sigma_eps(S, e), l) == sigma_eps(sigma_l(S, l), pe));
  }
}

TEST_CASE("stokes data") {
  auto d = stokes_data(SA2, Spectrum{{1.0, -1.0}});
  CHECK(d.matrices.size() == 2);
  CHECK(d.raw_count == 8);
  auto di = stokes_data(RationalMatrix::identity(3), Spectrum{{1.0, w, w * w}});
  CHECK(di.matrices.size() == 1);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    auto S = random_unitriangular(rng, 3);
    auto ds = stokes_data(S, Spectrum{{1.0, w, w * w}});
    CHECK(ds.matrices.size() <= 24);
  }
}

TEST_CASE("sign canonical form") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 5;
    auto S = random_unitriangular(rng, n, -2, 2);
    SignVector e(n);
    for (auto& v : e) v = rng() & 1 ? 1 : -1;
    auto T = sigma_eps(S, e);
    CHECK(sign_canonical(S) == sign_canonical(T));
    auto found = sign_equivalence(S, T);
    REQUIRE(found);
    CHECK(sigma_eps(S, *found) == T);
  }
  CHECK_FALSE(sign_equivalence(SA2, RationalMatrix(2, {1, 2, 0, 1})));
}

TEST_CASE("orbit search") {
  SignVector e{1, -1, 1};
  auto w1 = orbit_search(SA3, sigma_eps(SA3, e), 3);
  REQUIRE(w1);
  CHECK(w1->size() == 1);
  CHECK(apply_word(SA3, *w1) == sigma_eps(SA3, e));

  auto w2 = orbit_search(SA2, RationalMatrix(2, {1, 1, 0, 1}), 3);
  REQUIRE(w2);
  CHECK(w2->size() == 1);

  OrbitSearchStats st;
  CHECK_FALSE(orbit_search(SA2, RationalMatrix(2, {1, 5, 0, 1}), 6, &st));
  CHECK(st.charge_mismatch);

  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    auto S = random_unitriangular(rng, 3, -1, 1);
    BraidWord word;
    for (int k = 0; k < 3; ++k) word.push_back(Generator::move(1 + static_cast<int>(rng() % 2), rng() & 1));
    auto T = apply_word(S, word);
    auto found = orbit_search(S, T, 3);
    REQUIRE(found);
    CHECK(apply_word(S, *found) == T);
  }
}

TEST_CASE("charges") {
  for (auto c : charges(RationalMatrix::identity(4))) CHECK(std::abs(c - 1.0) < 1e-12);
  auto c2 = charges(SA2);
  REQUIRE(c2.size() == 2);
  CHECK(std::abs(c2[0] - std::polar(1.0, -kPi / 3)) < 1e-12);
  CHECK(std::abs(c2[1] - std::polar(1.0, kPi / 3)) < 1e-12);

  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 4;
    auto S = random_unitriangular(rng, n);
    const int l = 1 + static_cast<int>(rng() % (n - 1));
    auto T = sigma_l(S, l);
    CHECK(charge_polynomial(S) == charge_polynomial(T));
    // float eigenvalues of sigma_l(S) are roots of the exact polynomial of S
    auto poly = charge_polynomial(S);
    for (auto z : charges(T)) {
      cplx acc = 0;
      double scale = 0;
      for (std::size_t k = poly.size(); k-- > 0;) {
        acc = acc * z + poly[k].get_d();
        scale = scale * std::abs(z) + std::abs(poly[k].get_d());
      }
      CHECK(std::abs(acc) < 1e-10 * scale);
    }
  }
}

TEST_CASE("full turn identity on random spectra") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + t % 4;
    auto spec = random_admissible(rng, n);
    auto word = full_turn_word(spec);
    CHECK(word.size() == static_cast<std::size_t>(n * (n - 1)));
    auto S = random_unitriangular(rng, n);
    CHECK(apply_word(S, word) == S);
  }
}
