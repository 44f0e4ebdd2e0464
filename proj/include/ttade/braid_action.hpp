#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ttade/common.hpp"
#include "ttade/rational_matrix.hpp"
#include "ttade/spectrum_geometry.hpp"

namespace ttade {

using SignVector = std::vector<int>;

struct Generator {
  enum class Kind { Sign, Move };
  Kind kind = Kind::Move;
  int l = 0;             // Move index, 1-based
  bool inverse = false;  // sigma_l^{-1}
  SignVector eps;        // Sign payload

  static Generator move(int l, bool inverse = false) { return {Kind::Move, l, inverse, {}}; }
  static Generator sign(SignVector e) { return {Kind::Sign, 0, false, std::move(e)}; }
  bool operator==(const Generator& o) const {
    return kind == o.kind && l == o.l && inverse == o.inverse && eps == o.eps;
  }
};

// Application order: word[0] acts first.
using BraidWord = std::vector<Generator>;

std::string to_string(const BraidWord& w);

RationalMatrix sigma_eps(const RationalMatrix& S, const SignVector& eps);
RationalMatrix b_matrix(const RationalMatrix& S, int l);
RationalMatrix sigma_l(const RationalMatrix& S, int l);
RationalMatrix sigma_l_inv(const RationalMatrix& S, int l);
RationalMatrix apply_generator(const RationalMatrix& S, const Generator& g);
RationalMatrix apply_word(const RationalMatrix& S, const BraidWord& w);

BraidWord full_turn_word(const Spectrum& spec, const GeometryTolerances& tol = {});

struct StokesDataSet {
  std::vector<RationalMatrix> matrices;  // deduplicated, first-seen order
  std::size_t raw_count = 0;             // prefixes x sign vectors before dedup
};

StokesDataSet stokes_data(const RationalMatrix& S, const Spectrum& spec,
                          const GeometryTolerances& tol = {});

// Representative of the sign-conjugation class: along a BFS spanning forest of
// the nonzero pattern every tree entry is made positive, roots keep eps = +1.
RationalMatrix sign_canonical(const RationalMatrix& S, SignVector* eps_out = nullptr);

// eps with eps X eps = T, if one exists.
std::optional<SignVector> sign_equivalence(const RationalMatrix& X, const RationalMatrix& T);

struct OrbitSearchStats {
  std::size_t visited = 0;
  int depth_reached = 0;
  bool charge_mismatch = false;
};

// Breadth-first over sigma_l^{+-1} with visited states keyed by sign class.
// accept(X) returns the final sign vector that completes a witness, if any.
using OrbitPredicate = std::function<std::optional<SignVector>(const RationalMatrix&)>;
std::optional<BraidWord> orbit_find(const RationalMatrix& S, const OrbitPredicate& accept, int bound,
                                    OrbitSearchStats* stats = nullptr);

// Sign conjugations are folded into the
// visited key and appended as a final Sign generator when needed.
std::optional<BraidWord> orbit_search(const RationalMatrix& S, const RationalMatrix& target,
                                      int bound, OrbitSearchStats* stats = nullptr);

// det(lambda I - S (S^{-1})^t), exact.
std::vector<mpq_class> charge_polynomial(const RationalMatrix& S);
// Eigenvalues of S (S^{-1})^t sorted by argument, then modulus.
std::vector<cplx> charges(const RationalMatrix& S);

}  // namespace ttade
