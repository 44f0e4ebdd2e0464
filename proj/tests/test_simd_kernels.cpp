#include <random>

#include "doctest.h"
#include "ttade/rh_kernel.hpp"
#include "ttade/simd.hpp"

using namespace ttade;

TEST_CASE("isa selection") {
  const auto isa = simd::active_isa();
  CHECK((isa == simd::Isa::Scalar || isa == simd::Isa::Avx2));
  MESSAGE("active kernel: " << simd::isa_name(isa));
}

TEST_CASE("tree determinant kernels agree") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0, 1.5);
  for (auto f : {EFamily::E6, EFamily::E7, EFamily::E8}) {
    auto shape = simd::make_tree_shape(efamily_rank(f), f_edges(f));
    for (std::size_t count : {1u, 3u, 4u, 5u, 64u, 103u}) {
      std::vector<std::vector<double>> t(shape.edges(), std::vector<double>(count));
      std::vector<const double*> ptr;
      for (auto& v : t) {
        for (auto& x : v) x = U(rng);
        ptr.push_back(v.data());
      }
      std::vector<double> a(count), b(count), c(count);
      simd::tree_det_scalar(shape, ptr.data(), count, a.data());
      simd::tree_det_avx2(shape, ptr.data(), count, b.data());
      simd::tree_det(shape, ptr.data(), count, c.data());
      for (std::size_t p = 0; p < count; ++p) {
        CHECK(b[p] == doctest::Approx(a[p]).epsilon(1e-13));
        CHECK(c[p] == doctest::Approx(a[p]).epsilon(1e-13));
        std::vector<double> e(shape.edges());
        for (int k = 0; k < shape.edges(); ++k) e[k] = std::sqrt(t[k][p]);
        CHECK(a[p] == doctest::Approx(f_eval(f, e)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("tree shape validation") {
  CHECK_THROWS_AS(simd::make_tree_shape(3, {{1, 2}, {1, 2}}), Error);
  CHECK_THROWS_AS(simd::make_tree_shape(3, {{1, 2}}), Error);
  auto s = simd::make_tree_shape(1, {});
  double out = 0;
  simd::tree_det_scalar(s, nullptr, 1, &out);
  CHECK(out == 2.0);
}

TEST_CASE("hermitian pivot kernels agree") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N(0, 1);
  for (int n : {1, 2, 3, 5, 8}) {
    for (std::size_t count : {1u, 4u, 7u, 33u}) {
      std::vector<double> re(n * n * count), im(n * n * count);
      std::vector<CMat> mats;
      for (std::size_t p = 0; p < count; ++p) {
        CMat X(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) X(i, j) = cplx(N(rng), N(rng));
        // half the batch positive definite, half shifted indefinite
        CMat H = X * X.adjoint() / n + (p % 2 ? -0.8 : 0.2) * CMat::Identity(n, n);
        mats.push_back(H);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            re[(i * n + j) * count + p] = H(i, j).real();
            im[(i * n + j) * count + p] = H(i, j).imag();
          }
      }
      std::vector<double> a(count), b(count), c(count);
      simd::herm_min_pivot_scalar(n, re.data(), im.data(), count, a.data());
      simd::herm_min_pivot_avx2(n, re.data(), im.data(), count, b.data());
      simd::herm_min_pivot(n, re.data(), im.data(), count, c.data());
      for (std::size_t p = 0; p < count; ++p) {
        CHECK(b[p] == doctest::Approx(a[p]).epsilon(1e-9));
        CHECK(c[p] == doctest::Approx(a[p]).epsilon(1e-9));
        const bool pd = Eigen::SelfAdjointEigenSolver<CMat>(mats[p]).eigenvalues().minCoeff() > 0;
        CHECK(pd == (a[p] > 0));
      }
    }
  }
}
