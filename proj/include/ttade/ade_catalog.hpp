#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ttade/braid_action.hpp"
#include "ttade/rational_matrix.hpp"

namespace ttade {

struct CartanType {
  char family = 'A';  // 'A', 'D' or 'E'
  int rank = 1;

  std::string name() const { return std::string(1, family) + std::to_string(rank); }
  bool operator==(const CartanType& o) const { return family == o.family && rank == o.rank; }
};

// Parses "A5", "D4", "E8"; throws InvalidRank / BadInput.
CartanType parse_cartan_type(const std::string& s);
void validate(const CartanType& t);

// Dynkin edges (1-based, i < j) in the node labelling of the seed matrices.
std::vector<std::pair<int, int>> dynkin_edges(const CartanType& t);

RationalMatrix cartan_seed(const CartanType& t);
RationalMatrix symmetrize(const RationalMatrix& S);

// With permuted = false the match is literal equality with a catalog matrix.
std::optional<CartanType> match_cartan(const RationalMatrix& M, bool permuted = false);

// Classifies a connected simply-laced tree by its shape; nullopt if the
// adjacency is not an ADE tree. adj is symmetric, no self loops.
std::optional<CartanType> classify_tree(const std::vector<std::vector<int>>& adj);

struct AdeDetection {
  CartanType type;
  BraidWord witness;
};

std::optional<AdeDetection> detect_ade(const RationalMatrix& S, int orbit_bound, bool permuted = false,
                                       OrbitSearchStats* stats = nullptr);

}  // namespace ttade
