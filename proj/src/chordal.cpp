#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include "sbc/relax.hpp"

namespace sbc {

std::vector<int> CliqueTree::separator(int a, int b) const {
  std::vector<int> out;
  std::set_intersection(cliques[a].begin(), cliques[a].end(), cliques[b].begin(), cliques[b].end(),
                        std::back_inserter(out));
  return out;
}

bool CliqueTree::running_intersection() const {
  const int nc = static_cast<int>(cliques.size());
  if (nc == 0) return true;
  if (static_cast<int>(edges.size()) != nc - 1) return false;
  std::vector<std::vector<int>> adj(nc);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<int> vertices;
  for (const auto& c : cliques) vertices.insert(c.begin(), c.end());
  auto contains = [&](int c, int v) { return std::binary_search(cliques[c].begin(), cliques[c].end(), v); };
  for (int v : vertices) {
    std::vector<int> holders;
    for (int c = 0; c < nc; ++c) {
      if (contains(c, v)) holders.push_back(c);
    }
    // Connected within the induced subtree.
    std::vector<char> seen(nc, 0);
    std::queue<int> q;
    q.push(holders.front());
    seen[holders.front()] = 1;
    int reached = 0;
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      ++reached;
      for (int nb : adj[c]) {
        if (!seen[nb] && contains(nb, v)) {
          seen[nb] = 1;
          q.push(nb);
        }
      }
    }
    if (reached != static_cast<int>(holders.size())) return false;
  }
  return true;
}

std::vector<LiftedIndex> CliqueTree::pairs() const {
  std::vector<LiftedIndex> out;
  std::set<std::pair<int, int>> seen;
  for (const auto& c : cliques) {
    for (size_t a = 0; a < c.size(); ++a) {
      for (size_t b = a + 1; b < c.size(); ++b) {
        if (seen.insert({c[a], c[b]}).second) out.emplace_back(c[a], c[b]);
      }
    }
  }
  return out;
}

CliqueTree chordal_decompose(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::set<int>> adj(n);
  for (auto [a, b] : edges) {
    if (a == b) continue;
    if (a < 0 || b < 0 || a >= n || b >= n) throw PreconditionError("chordal_decompose: vertex out of range");
    adj[a].insert(b);
    adj[b].insert(a);
  }
  std::vector<char> eliminated(n, 0);
  std::vector<std::vector<int>> candidates;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (eliminated[v]) continue;
      if (best < 0 || adj[v].size() < adj[best].size()) best = v;
    }
    std::vector<int> clique(adj[best].begin(), adj[best].end());
    for (size_t a = 0; a < clique.size(); ++a) {
      for (size_t b = a + 1; b < clique.size(); ++b) {
        adj[clique[a]].insert(clique[b]);
        adj[clique[b]].insert(clique[a]);
      }
    }
    for (int u : clique) adj[u].erase(best);
    clique.push_back(best);
    std::sort(clique.begin(), clique.end());
    candidates.push_back(std::move(clique));
    eliminated[best] = 1;
    adj[best].clear();
  }
  // Keep maximal candidates only.
  CliqueTree ct;
  for (size_t a = 0; a < candidates.size(); ++a) {
    bool dominated = false;
    for (size_t b = 0; b < candidates.size() && !dominated; ++b) {
      if (a == b) continue;
      const bool subset = std::includes(candidates[b].begin(), candidates[b].end(), candidates[a].begin(),
                                        candidates[a].end());
      if (subset && (candidates[b].size() > candidates[a].size() || b < a)) dominated = true;
    }
    if (!dominated) ct.cliques.push_back(candidates[a]);
  }
  std::sort(ct.cliques.begin(), ct.cliques.end(), [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return x.size() > y.size();
    return x < y;
  });
  // Prim's algorithm for a maximum-weight spanning tree on intersection sizes.
  const int nc = static_cast<int>(ct.cliques.size());
  std::vector<char> in_tree(nc, 0);
  std::vector<int> best_w(nc, -1), best_from(nc, -1);
  in_tree[0] = 1;
  for (int c = 1; c < nc; ++c) {
    best_w[c] = static_cast<int>(ct.separator(0, c).size());
    best_from[c] = 0;
  }
  for (int added = 1; added < nc; ++added) {
    int pick = -1;
    for (int c = 0; c < nc; ++c) {
      if (!in_tree[c] && (pick < 0 || best_w[c] > best_w[pick])) pick = c;
    }
    in_tree[pick] = 1;
    ct.edges.emplace_back(best_from[pick], pick);
    for (int c = 0; c < nc; ++c) {
      if (in_tree[c]) continue;
      const int w = static_cast<int>(ct.separator(pick, c).size());
      if (w > best_w[c]) {
        best_w[c] = w;
        best_from[c] = pick;
      }
    }
  }
  if (!ct.running_intersection()) throw NumericalError("chordal_decompose: running-intersection property failed");
  return ct;
}

ComplexVector rank_one_complete(const CliqueTree& ct, const std::vector<HermitianMatrix>& blocks, int n, bool lenient,
                                double tol) {
  if (blocks.size() != ct.cliques.size()) throw PreconditionError("rank_one_complete: one block per clique required");
  ComplexVector y(n);
  std::vector<char> assigned(n, 0);

  auto local_vector = [&](int c) {
    const HermitianMatrix& blk = blocks[c];
    if (blk.size() != static_cast<int>(ct.cliques[c].size())) {
      throw PreconditionError("rank_one_complete: block size does not match clique");
    }
    const PrincipalEigen pe = principal_eigvec(blk);
    const double scale = std::max(1.0, blk.trace());
    if (!lenient) {
      const Vec ev = hermitian_eigenvalues(blk);
      if (ev.size() > 1 && ev(ev.size() - 2) > tol * scale) {
        throw CompletionError("rank_one_complete: block " + std::to_string(c) + " is not rank one", c, c);
      }
      if (ev(0) < -tol * scale) {
        throw CompletionError("rank_one_complete: block " + std::to_string(c) + " is not PSD", c, c);
      }
    }
    Eigen::VectorXcd v = pe.vector.to_complex() * std::sqrt(std::max(0.0, pe.value));
    return v;
  };

  auto place = [&](int c, const Eigen::VectorXcd& v) {
    for (size_t k = 0; k < ct.cliques[c].size(); ++k) {
      const int idx = ct.cliques[c][k];
      if (!assigned[idx]) {
        y.set(idx, v(static_cast<Eigen::Index>(k)));
        assigned[idx] = 1;
      }
    }
  };

  if (ct.cliques.empty()) return y;
  place(0, local_vector(0));
  for (auto [parent, child] : ct.edges) {
    Eigen::VectorXcd v = local_vector(child);
    const auto& cl = ct.cliques[child];
    // Shared entry of largest known magnitude fixes the phase.
    int anchor = -1;
    double anchor_mag = 0.0;
    for (size_t k = 0; k < cl.size(); ++k) {
      if (!assigned[cl[k]]) continue;
      const double mag = std::abs(y[cl[k]]);
      if (anchor < 0 || mag > anchor_mag) {
        anchor = static_cast<int>(k);
        anchor_mag = mag;
      }
    }
    const double scale = std::max(1.0, std::sqrt(std::max(blocks[child].trace(), 0.0)));
    if (anchor >= 0 && anchor_mag > tol * scale && std::abs(v(anchor)) > 0.0) {
      const Complex known = y[cl[anchor]];
      const Complex rot = known / v(anchor);
      v *= rot / std::abs(rot);
    }
    if (!lenient) {
      for (size_t k = 0; k < cl.size(); ++k) {
        if (!assigned[cl[k]]) continue;
        const double diff = std::abs(std::abs(v(static_cast<Eigen::Index>(k))) - std::abs(y[cl[k]]));
        if (diff > tol * scale) {
          throw CompletionError("rank_one_complete: cliques " + std::to_string(parent) + " and " +
                                    std::to_string(child) + " disagree on a separator magnitude",
                                parent, child);
        }
      }
    }
    place(child, v);
  }
  return y;
}

std::vector<HermitianMatrix> clique_blocks(const CliqueTree& ct, const HermitianMatrix& Y) {
  std::vector<HermitianMatrix> out;
  out.reserve(ct.cliques.size());
  for (const auto& c : ct.cliques) out.push_back(Y.principal(c));
  return out;
}

}  // namespace sbc
