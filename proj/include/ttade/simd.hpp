#pragma once

#include <cstddef>
#include <vector>

namespace ttade::simd {

// Rooted tree for the division-free determinant of 2I + (edge weights).
// Nodes are visited in post-order; kids[v] lists (child, edge index).
struct TreeShape {
  int n = 0;
  std::vector<int> post_order;
  std::vector<std::vector<std::pair<int, int>>> kids;
  int edges() const { return n - 1; }
};

// Builds the shape from 1-based edges (i, j); node 1 is the root.
TreeShape make_tree_shape(int n, const std::vector<std::pair<int, int>>& edges);

// out[p] = det(2I + W_p) where W_p has |w_e|^2 = t[e][p] on the tree edges.
// t holds one array per edge, each of length count.
void tree_det_scalar(const TreeShape& s, const double* const* t, std::size_t count, double* out);
void tree_det_avx2(const TreeShape& s, const double* const* t, std::size_t count, double* out);

// Batched LDL^H without pivoting for Hermitian n x n matrices.
// Entry (i, j) of matrix p lives at re[(i*n + j)*count + p], im likewise.
// min_pivot[p] is the smallest D entry; > 0 iff the matrix is positive definite.
void herm_min_pivot_scalar(int n, const double* re, const double* im, std::size_t count, double* min_pivot);
void herm_min_pivot_avx2(int n, const double* re, const double* im, std::size_t count, double* min_pivot);

enum class Isa { Scalar, Avx2 };
Isa active_isa();  // AVX2+FMA if the CPU has it and TTADE_FORCE_SCALAR is unset
const char* isa_name(Isa isa);

void tree_det(const TreeShape& s, const double* const* t, std::size_t count, double* out);
void herm_min_pivot(int n, const double* re, const double* im, std::size_t count, double* min_pivot);

}  // namespace ttade::simd
