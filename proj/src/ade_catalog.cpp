#include "ttade/ade_catalog.hpp"

#include <algorithm>
#include <deque>

namespace ttade {

CartanType parse_cartan_type(const std::string& s) {
  if (s.size() < 2) throw Error(ErrorKind::BadInput, "type must look like A3, D5 or E8");
  CartanType t;
  t.family = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  try {
    std::size_t pos = 0;
    t.rank = std::stoi(s.substr(1), &pos);
    if (pos != s.size() - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorKind::BadInput, "bad type '" + s + "'");
  }
  validate(t);
  return t;
}

void validate(const CartanType& t) {
  bool ok = false;
  switch (t.family) {
    case 'A': ok = t.rank >= 1; break;
    case 'D': ok = t.rank >= 4; break;
    case 'E': ok = t.rank >= 6 && t.rank <= 8; break;
    default: throw Error(ErrorKind::BadInput, std::string("unknown family ") + t.family);
  }
  if (!ok) throw Error(ErrorKind::InvalidRank, t.name());
}

std::vector<std::pair<int, int>> dynkin_edges(const CartanType& t) {
  validate(t);
  std::vector<std::pair<int, int>> e;
  const int n = t.rank;
  if (t.family == 'A') {
    for (int i = 1; i < n; ++i) e.push_back({i, i + 1});
  } else if (t.family == 'D') {
    for (int i = 1; i <= n - 2; ++i) e.push_back({i, i + 1});
    e.push_back({n - 2, n});
  } else {
    // chain to the node before the branch, branch node hangs off n-3
    for (int i = 1; i <= n - 2; ++i) e.push_back({i, i + 1});
    e.push_back({n - 3, n});
    std::sort(e.begin(), e.end());
  }
  return e;
}

RationalMatrix cartan_seed(const CartanType& t) {
  RationalMatrix S = RationalMatrix::identity(t.rank);
  for (auto [i, j] : dynkin_edges(t)) S(i - 1, j - 1) = -1;
  return S;
}

RationalMatrix symmetrize(const RationalMatrix& S) { return S + S.transpose(); }

std::optional<CartanType> classify_tree(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  if (n == 0) return std::nullopt;
  int edges = 0;
  for (const auto& a : adj) edges += static_cast<int>(a.size());
  if (edges != 2 * (n - 1)) return std::nullopt;
  std::vector<int> seen(n, 0);
  std::deque<int> q{0};
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (!seen[w]) seen[w] = 1, ++reached, q.push_back(w);
  }
  if (reached != n) return std::nullopt;

  std::vector<int> branch;
  for (int v = 0; v < n; ++v) {
    if (adj[v].size() > 3) return std::nullopt;
    if (adj[v].size() == 3) branch.push_back(v);
  }
  if (branch.empty()) return CartanType{'A', n};
  if (branch.size() > 1) return std::nullopt;

  std::vector<int> arms;
  for (int start : adj[branch[0]]) {
    int prev = branch[0], cur = start, len = 1;
    while (adj[cur].size() == 2) {
      int nxt = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
      prev = cur, cur = nxt, ++len;
    }
    arms.push_back(len);
  }
  std::sort(arms.begin(), arms.end());
  if (arms[0] != 1) return std::nullopt;
  if (arms[1] == 1) return CartanType{'D', n};
  if (arms[1] == 2 && arms[2] >= 2 && arms[2] <= 4) return CartanType{'E', n};
  return std::nullopt;
}

namespace {

// Diagonal 2, off-diagonal in {0,-1}, symmetric; fills the adjacency lists.
bool simply_laced_pattern(const RationalMatrix& M, std::vector<std::vector<int>>& adj) {
  const std::size_t n = M.n();
  adj.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    if (M(i, i) != 2) return false;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (M(i, j) != M(j, i)) return false;
      if (M(i, j) == -1)
        adj[i].push_back(static_cast<int>(j));
      else if (sgn(M(i, j)) != 0)
        return false;
    }
  }
  return true;
}

}  // namespace

std::optional<CartanType> match_cartan(const RationalMatrix& M, bool permuted) {
  std::vector<std::vector<int>> adj;
  if (M.n() == 0 || !simply_laced_pattern(M, adj)) return std::nullopt;
  auto t = classify_tree(adj);
  if (!t) return std::nullopt;
  if (permuted) return t;
  if (M == symmetrize(cartan_seed(*t))) return t;
  return std::nullopt;
}

std::optional<AdeDetection> detect_ade(const RationalMatrix& S, int orbit_bound, bool permuted,
                                       OrbitSearchStats* stats) {
  std::optional<CartanType> found;
  auto accept = [&](const RationalMatrix& X) -> std::optional<SignVector> {
    const std::size_t n = X.n();
    // entries must be 0 or +-1 and the pattern a tree; then pick eps so every edge is -1
    SignVector eps(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (sgn(X(i, j)) != 0 && abs(X(i, j)) != 1) return std::nullopt;
    for (std::size_t root = 0; root < n; ++root) {
      if (eps[root]) continue;
      eps[root] = 1;
      std::deque<std::size_t> q{root};
      while (!q.empty()) {
        std::size_t v = q.front();
        q.pop_front();
        for (std::size_t w = 0; w < n; ++w) {
          if (w == v || eps[w]) continue;
          const mpq_class& e = v < w ? X(v, w) : X(w, v);
          if (sgn(e) == 0) continue;
          eps[w] = -eps[v] * sgn(e);
          q.push_back(w);
        }
      }
    }
    auto t = match_cartan(symmetrize(sigma_eps(X, eps)), permuted);
    if (!t) return std::nullopt;
    found = t;
    return eps;
  };
  auto w = orbit_find(S, accept, orbit_bound, stats);
  if (!w) return std::nullopt;
  return AdeDetection{*found, *w};
}

}  // namespace ttade
