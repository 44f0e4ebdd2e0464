#include <algorithm>
#include <deque>
#include <limits>

#include "ttade/common.hpp"
#include "ttade/simd.hpp"

namespace ttade::simd {

TreeShape make_tree_shape(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 1 || static_cast<int>(edges.size()) != n - 1) throw Error(ErrorKind::BadInput, "not a tree");
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [a, b] = edges[e];
    if (a < 1 || b < 1 || a > n || b > n || a == b) throw Error(ErrorKind::BadInput, "bad edge");
    adj[a - 1].push_back({b - 1, static_cast<int>(e)});
    adj[b - 1].push_back({a - 1, static_cast<int>(e)});
  }
  TreeShape s;
  s.n = n;
  s.kids.assign(n, {});
  std::vector<int> parent(n, -2), bfs;
  parent[0] = -1;
  std::deque<int> q{0};
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    bfs.push_back(v);
    for (auto [w, e] : adj[v])
      if (parent[w] == -2) {
        parent[w] = v;
        s.kids[v].push_back({w, e});
        q.push_back(w);
      }
  }
  if (static_cast<int>(bfs.size()) != n) throw Error(ErrorKind::BadInput, "edges do not form a tree");
  s.post_order.assign(bfs.rbegin(), bfs.rend());
  return s;
}

void tree_det_scalar(const TreeShape& s, const double* const* t, std::size_t count, double* out) {
  std::vector<double> N(s.n), D(s.n);
  for (std::size_t p = 0; p < count; ++p) {
    for (int v : s.post_order) {
      double P = 1.0, Q = 0.0;
      for (auto [c, e] : s.kids[v]) {
        Q = Q * N[c] + P * t[e][p] * D[c];
        P = P * N[c];
      }
      N[v] = 2.0 * P - Q;
      D[v] = P;
    }
    out[p] = N[s.post_order.back()];
  }
}

void herm_min_pivot_scalar(int n, const double* re, const double* im, std::size_t count, double* min_pivot) {
  std::vector<double> lr(n * n), li(n * n), d(n);
  for (std::size_t p = 0; p < count; ++p) {
    double mn = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      double dk = re[(k * n + k) * count + p];
      for (int j = 0; j < k; ++j) dk -= (lr[k * n + j] * lr[k * n + j] + li[k * n + j] * li[k * n + j]) * d[j];
      mn = std::min(mn, dk);
      d[k] = dk;
      const double inv = dk > 1e-300 ? 1.0 / dk : 1.0;
      for (int i = k + 1; i < n; ++i) {
        double ar = re[(i * n + k) * count + p], ai = im[(i * n + k) * count + p];
        for (int j = 0; j < k; ++j) {
          // L_ij conj(L_kj) d_j
          const double xr = lr[i * n + j], xi = li[i * n + j], yr = lr[k * n + j], yi = -li[k * n + j];
          ar -= (xr * yr - xi * yi) * d[j];
          ai -= (xr * yi + xi * yr) * d[j];
        }
        lr[i * n + k] = ar * inv;
        li[i * n + k] = ai * inv;
      }
    }
    min_pivot[p] = mn;
  }
}

}  // namespace ttade::simd
