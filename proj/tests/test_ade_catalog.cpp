#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "ttade/ade_catalog.hpp"

using namespace ttade;

namespace {

RationalMatrix permute(const RationalMatrix& M, const std::vector<int>& p) {
  RationalMatrix r(M.n());
  for (std::size_t i = 0; i < M.n(); ++i)
    for (std::size_t j = 0; j < M.n(); ++j) r(i, j) = M(p[i], p[j]);
  return r;
}

}  // namespace

TEST_CASE("seed displays") {
  CHECK(cartan_seed({'A', 2}) == RationalMatrix(2, {1, -1, 0, 1}));
  CHECK(cartan_seed({'A', 1}) == RationalMatrix::identity(1));
  CHECK(cartan_seed({'D', 4}) == RationalMatrix(4, {1, -1, 0, 0,  //
                                                    0, 1, -1, -1,  //
                                                    0, 0, 1, 0,    //
                                                    0, 0, 0, 1}));
  CHECK(cartan_seed({'E', 6}) == RationalMatrix(6, {1, -1, 0, 0, 0, 0,   //
                                                    0, 1, -1, 0, 0, 0,   //
                                                    0, 0, 1, -1, 0, -1,  //
                                                    0, 0, 0, 1, -1, 0,   //
                                                    0, 0, 0, 0, 1, 0,    //
                                                    0, 0, 0, 0, 0, 1}));
  CHECK(cartan_seed({'E', 7}) == RationalMatrix(7, {1, -1, 0, 0, 0, 0, 0,   //
                                                    0, 1, -1, 0, 0, 0, 0,   //
                                                    0, 0, 1, -1, 0, 0, 0,   //
                                                    0, 0, 0, 1, -1, 0, -1,  //
                                                    0, 0, 0, 0, 1, -1, 0,   //
                                                    0, 0, 0, 0, 0, 1, 0,    //
                                                    0, 0, 0, 0, 0, 0, 1}));
  CHECK(cartan_seed({'E', 8}) == RationalMatrix(8, {1, -1, 0, 0, 0, 0, 0, 0,   //
                                                    0, 1, -1, 0, 0, 0, 0, 0,   //
                                                    0, 0, 1, -1, 0, 0, 0, 0,   //
                                                    0, 0, 0, 1, -1, 0, 0, 0,   //
                                                    0, 0, 0, 0, 1, -1, 0, -1,  //
                                                    0, 0, 0, 0, 0, 1, -1, 0,   //
                                                    0, 0, 0, 0, 0, 0, 1, 0,    //
                                                    0, 0, 0, 0, 0, 0, 0, 1}));
  CHECK_THROWS_AS(cartan_seed({'D', 3}), Error);
  CHECK_THROWS_AS(cartan_seed({'E', 9}), Error);
  CHECK_THROWS_AS(cartan_seed({'A', 0}), Error);
  CHECK(parse_cartan_type("e7") == CartanType{'E', 7});
  CHECK_THROWS_AS(parse_cartan_type("B3"), Error);
}

TEST_CASE("symmetrization and determinants") {
  CHECK(symmetrize(cartan_seed({'A', 2})) == RationalMatrix(2, {2, -1, -1, 2}));
  CHECK(symmetrize(RationalMatrix::identity(3)) == RationalMatrix(3, {2, 0, 0, 0, 2, 0, 0, 0, 2}));
  for (int n = 1; n <= 10; ++n) {
    auto M = symmetrize(cartan_seed({'A', n}));
    CHECK(M.determinant() == n + 1);
    CHECK(std::lround(M.to_double().determinant()) == n + 1);
  }
  for (int n = 4; n <= 10; ++n) CHECK(symmetrize(cartan_seed({'D', n})).determinant() == 4);
  CHECK(symmetrize(cartan_seed({'E', 6})).determinant() == 3);
  CHECK(symmetrize(cartan_seed({'E', 7})).determinant() == 2);
  CHECK(symmetrize(cartan_seed({'E', 8})).determinant() == 1);
  CHECK(std::lround(symmetrize(cartan_seed({'E', 8})).to_double().determinant()) == 1);
}

TEST_CASE("match cartan") {
  for (int n = 1; n <= 8; ++n) CHECK(match_cartan(symmetrize(cartan_seed({'A', n}))) == CartanType{'A', n});
  for (int n = 4; n <= 9; ++n) CHECK(match_cartan(symmetrize(cartan_seed({'D', n}))) == CartanType{'D', n});
  for (int n = 6; n <= 8; ++n) CHECK(match_cartan(symmetrize(cartan_seed({'E', n}))) == CartanType{'E', n});
  CHECK_FALSE(match_cartan(symmetrize(RationalMatrix::identity(3))));
  CHECK(match_cartan(symmetrize(RationalMatrix::identity(1))) == CartanType{'A', 1});

  auto A3 = symmetrize(cartan_seed({'A', 3}));
  auto P = permute(A3, {1, 0, 2});
  CHECK(P != A3);
  CHECK_FALSE(match_cartan(P));
  CHECK(match_cartan(P, true) == CartanType{'A', 3});

  // affine A_2 (a cycle) and a non-ADE tree
  CHECK_FALSE(match_cartan(RationalMatrix(3, {2, -1, -1, -1, 2, -1, -1, -1, 2}), true));
  RationalMatrix star(5);
  for (int i = 0; i < 5; ++i) star(i, i) = 2;
  for (int i = 1; i < 5; ++i) star(0, i) = star(i, 0) = -1;
  CHECK_FALSE(match_cartan(star, true));

  std::mt19937_64 rng(12);
  for (const CartanType t : {CartanType{'D', 6}, CartanType{'E', 6}, CartanType{'E', 7}, CartanType{'E', 8}}) {
    std::vector<int> p(t.rank);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    CHECK(match_cartan(permute(symmetrize(cartan_seed(t)), p), true) == t);
  }
}

TEST_CASE("detect ade on seeds and sign conjugates") {
  std::vector<CartanType> types;
  for (int n = 1; n <= 6; ++n) types.push_back({'A', n});
  for (int n = 4; n <= 7; ++n) types.push_back({'D', n});
  for (int n = 6; n <= 8; ++n) types.push_back({'E', n});
  std::mt19937_64 rng(13);
  for (const auto& t : types) {
    auto S = cartan_seed(t);
    auto d = detect_ade(S, 2);
    REQUIRE(d);
    CHECK(d->type == t);
    CHECK(d->witness.empty());
    if (t.rank == 1) continue;
    SignVector e(t.rank, 1);
    e[rng() % t.rank] = -1;
    auto T = sigma_eps(S, e);
    auto dt = detect_ade(T, 2);
    REQUIRE(dt);
    CHECK(dt->type == t);
    CHECK(dt->witness.size() == 1);
    CHECK(dt->witness[0].kind == Generator::Kind::Sign);
    CHECK(apply_word(T, dt->witness) == S);
  }
  auto dA3 = detect_ade(sigma_eps(cartan_seed({'A', 3}), {1, -1, 1}), 1);
  REQUIRE(dA3);
  CHECK(dA3->witness.size() == 1);
}

TEST_CASE("detect ade failures and covariance") {
  CHECK_FALSE(detect_ade(RationalMatrix(2, {1, 5, 0, 1}), 3));
  CHECK_FALSE(detect_ade(RationalMatrix(2, {1, -3, 0, 1}), 4));

  std::mt19937_64 rng(14);
  for (const CartanType t : {CartanType{'A', 4}, CartanType{'D', 4}, CartanType{'E', 6}}) {
    auto S = cartan_seed(t);
    for (int k = 0; k < 6; ++k) {
      auto g = Generator::move(1 + static_cast<int>(rng() % (t.rank - 1)), rng() & 1);
      auto T = apply_generator(S, g);
      auto d = detect_ade(T, 1);
      REQUIRE(d);
      CHECK(d->type == t);
      auto R = apply_word(T, d->witness);
      CHECK(match_cartan(symmetrize(R)) == t);
    }
  }
}
