#include "pgrav/tree_codec.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <utility>

#include "pgrav/rng.hpp"
#include "pgrav/stats.hpp"

namespace pgrav {

int PlanarTree::count(int type) const {
  int c = 0;
  for (const auto& n : nodes) c += n.type == type;
  return c;
}

namespace {

/// Nodes in preorder (parent before children, left before right).
std::vector<int> preorder(const PlanarTree& t) {
  std::vector<int> order;
  order.reserve(t.nodes.size());
  std::vector<int> stack{t.root};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    const auto& n = t.nodes[v];
    for (int i = n.type - 1; i >= 0; --i) stack.push_back(n.child[i]);
  }
  return order;
}

} // namespace

void PlanarTree::validate() const {
  const int n = size();
  if (root < 0 || root >= n) throw TreeError("tree has no root");
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (seen[v]++) throw TreeError("tree node reached twice");
    const auto& node = nodes[v];
    if (node.type > 2) throw TreeError("node type must be 0, 1 or 2");
    for (int i = 0; i < 2; ++i) {
      const bool used = i < node.type;
      if (used != (node.child[i] >= 0)) throw TreeError("child slots do not match the node type");
      if (used) {
        if (node.child[i] >= n) throw TreeError("child index out of range");
        stack.push_back(node.child[i]);
      }
    }
  }
  if (std::count(seen.begin(), seen.end(), 1) != n) throw TreeError("tree has unreachable nodes");
  const auto order = preorder(*this);
  std::vector<int> m(static_cast<std::size_t>(n));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& node = nodes[*it];
    if (node.type == 0)
      m[*it] = 2;
    else if (node.type == 1)
      m[*it] = m[node.child[0]] - 1;
    else
      m[*it] = m[node.child[0]] + m[node.child[1]] - 1;
    if (m[*it] < 2) throw TreeError("subtree encodes boundary length below 2");
  }
}

std::string PlanarTree::str() const {
  std::string out;
  // Stack entries >= 0 are nodes to print, -1 prints a closing parenthesis.
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (v < 0) {
      out += ')';
      continue;
    }
    const auto& n = nodes[v];
    out += static_cast<char>('0' + n.type);
    if (n.type == 0) continue;
    out += '(';
    stack.push_back(-1);
    for (int i = n.type - 1; i >= 0; --i) stack.push_back(n.child[i]);
  }
  return out;
}

PlanarTree PlanarTree::parse(std::string_view text) {
  PlanarTree t;
  struct Open {
    int node;
    int filled;
  };
  std::vector<Open> open;
  std::size_t i = 0;
  auto attach = [&](int v) {
    if (open.empty()) {
      if (t.root >= 0) throw TreeError("trailing input after tree");
      t.root = v;
      return;
    }
    auto& o = open.back();
    if (o.filled >= t.nodes[o.node].type) throw TreeError("too many children");
    t.nodes[o.node].child[o.filled++] = v;
  };
  while (i < text.size()) {
    const char c = text[i++];
    if (c >= '0' && c <= '2') {
      const int v = t.size();
      t.nodes.push_back({static_cast<std::uint8_t>(c - '0'), {-1, -1}});
      attach(v);
      if (c != '0') {
        if (i >= text.size() || text[i] != '(') throw TreeError("expected '(' after node type");
        ++i;
        open.push_back({v, 0});
      }
    } else if (c == ')') {
      if (open.empty()) throw TreeError("unbalanced ')'");
      if (open.back().filled != t.nodes[open.back().node].type) throw TreeError("too few children");
      open.pop_back();
    } else {
      throw TreeError(std::string("unexpected character '") + c + "'");
    }
  }
  if (!open.empty() || t.root < 0) throw TreeError("incomplete tree");
  t.validate();
  return t;
}

RootedMap decode(const PlanarTree& tree, std::vector<HalfEdgeId>* leaf_roots) {
  tree.validate();
  RootedMap map;
  const auto order = preorder(tree);
  std::vector<HalfEdgeId> root_of(tree.nodes.size(), kNone);
  if (leaf_roots) leaf_roots->clear();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& n = tree.nodes[*it];
    if (n.type == 0)
      root_of[*it] = map.add_edge_map();
    else if (n.type == 1)
      root_of[*it] = map.close_corner(root_of[n.child[0]]);
    else
      root_of[*it] = map.glue(root_of[n.child[0]], root_of[n.child[1]]);
  }
  if (leaf_roots)
    for (int v : order)
      if (tree.nodes[v].type == 0) leaf_roots->push_back(root_of[v]);
  map.set_root(root_of[tree.root]);
  return map;
}

PlanarTree encode(const RootedMap& map) {
  if (map.closed()) throw TreeError("closed maps have no tree");
  RootedMap work(map);
  PlanarTree t;
  struct Pending {
    HalfEdgeId h;
    int parent;
    int slot;
  };
  std::vector<Pending> stack{{map.root(), -1, 0}};
  while (!stack.empty()) {
    const auto [h, parent, slot] = stack.back();
    stack.pop_back();
    const int v = t.size();
    t.nodes.emplace_back();
    if (parent < 0)
      t.root = v;
    else
      t.nodes[parent].child[slot] = v;
    if (work.is_outer(RootedMap::twin(h))) continue;
    RootedMap::Split s;
    try {
      s = work.split_at(h);
    } catch (const std::logic_error& e) {
      throw TreeError(std::string("map outside the generated class: ") + e.what());
    }
    t.nodes[v].type = static_cast<std::uint8_t>(s.move);
    if (s.move == 2) stack.push_back({s.second, v, 1});
    stack.push_back({s.first, v, 0});
  }
  return t;
}

double tree_weight(const PlanarTree& tree, double r0, double r1, double r2) {
  if (r0 < 0 || r1 < 0 || r2 < 0) throw std::invalid_argument("weights must be nonnegative");
  return std::pow(r0, tree.count(0)) * std::pow(r1, tree.count(1)) * std::pow(r2, tree.count(2));
}

std::vector<PlanarTree> enumerate_trees(int max_vertices) {
  if (max_vertices < 1) return {};
  // by_size[k][m]: serialized trees with k vertices and boundary m.
  const int m_cap = max_vertices + 2;
  std::vector<std::vector<std::vector<std::string>>> by_size(
      static_cast<std::size_t>(max_vertices + 1), std::vector<std::vector<std::string>>(m_cap + 1));
  by_size[1][2].push_back("0");
  for (int k = 2; k <= max_vertices; ++k) {
    for (int m = 2; m + 1 <= m_cap; ++m)
      for (const auto& c : by_size[k - 1][m + 1]) by_size[k][m].push_back("1(" + c + ")");
    for (int k1 = 1; k1 <= k - 2; ++k1) {
      const int k2 = k - 1 - k1;
      for (int m1 = 2; m1 <= m_cap; ++m1)
        for (int m2 = 2; m1 + m2 - 1 <= m_cap; ++m2)
          for (const auto& a : by_size[k1][m1])
            for (const auto& b : by_size[k2][m2]) by_size[k][m1 + m2 - 1].push_back("2(" + a + b + ")");
    }
  }
  std::vector<PlanarTree> out;
  for (const auto& level : by_size)
    for (const auto& cell : level)
      for (const auto& s : cell) out.push_back(PlanarTree::parse(s));
  return out;
}

PlanarTree sample_tree(double r0, double r1, double r2, CounterRng& rng, SamplerStats* stats, int max_vertices,
                       long long max_attempts) {
  if (r0 <= 0 || r1 < 0 || r2 < 0 || r0 + r1 + r2 > 1 + 1e-12)
    throw std::invalid_argument("need r0 > 0, r1, r2 >= 0 and r0 + r1 + r2 <= 1");
  // Deficit mass 1 - r0 - r1 - r2 kills the attempt, keeping the law proportional to the weights.
  auto draw = [&]() -> std::uint8_t {
    const double u = rng.uniform();
    return u < r0 ? 0 : u < r0 + r1 ? 1 : u < r0 + r1 + r2 ? 2 : 3;
  };
  SamplerStats local;
  SamplerStats& st = stats ? *stats : local;
  struct Frame {
    int node;
    int filled;
  };
  for (long long attempt = 0; attempt < max_attempts; ++attempt) {
    ++st.attempts;
    PlanarTree t;
    std::vector<int> m;
    std::vector<Frame> frames;
    bool ok = true;
    auto make = [&]() {
      std::uint8_t type = draw();
      if (type == 3) {
        ok = false;
        type = 0;
      }
      t.nodes.push_back({type, {-1, -1}});
      m.push_back(0);
      return t.size() - 1;
    };
    t.root = make();
    frames.push_back({t.root, 0});
    if (!ok) ++st.rejected_deficit;
    while (ok && !frames.empty()) {
      auto& f = frames.back();
      auto& node = t.nodes[f.node];
      if (f.filled < node.type) {
        if (t.size() >= max_vertices) {
          ++st.rejected_size;
          ok = false;
          break;
        }
        const int slot = f.filled++;
        const int c = make();
        if (!ok) {
          ++st.rejected_deficit;
          break;
        }
        t.nodes[f.node].child[slot] = c;
        frames.push_back({c, 0});
        continue;
      }
      const int v = f.node;
      const auto& n = t.nodes[v];
      m[v] = n.type == 0 ? 2 : n.type == 1 ? m[n.child[0]] - 1 : m[n.child[0]] + m[n.child[1]] - 1;
      frames.pop_back();
      if (m[v] < 2) {
        ++st.rejected_constraint;
        ok = false;
        break;
      }
    }
    if (ok) return t;
  }
  throw std::runtime_error("tree sampler exceeded its attempt cap");
}

UniformTreeSampler::UniformTreeSampler(int n_max, int m_max) : n_max_(n_max), m_max_(std::max(m_max, n_max + 2)) {
  if (n_max < 0 || m_max < 2) throw std::invalid_argument("sampler needs n_max >= 0, m_max >= 2");
  const auto w = static_cast<std::size_t>(m_max_ + 2);
  counts_.assign(static_cast<std::size_t>(n_max_ + 1) * w, 0.0);
  split_cache_.resize(counts_.size());
  auto c = [&](int n, int m) -> double& { return counts_[static_cast<std::size_t>(n) * w + static_cast<std::size_t>(m)]; };
  c(0, 2) = 1;
  for (int n = 1; n <= n_max_; ++n)
    for (int m = 2 + (n % 2); m <= std::min(m_max_, n + 2); m += 2) {
      double v = c(n - 1, m + 1);
      for (int n1 = 0; n1 <= n - 1; ++n1) {
        const int n2 = n - 1 - n1;
        for (int m1 = 2 + (n1 % 2); m1 <= std::min(m - 1, n1 + 2); m1 += 2) v += c(n1, m1) * c(n2, m + 1 - m1);
      }
      c(n, m) = v;
    }
}

double UniformTreeSampler::count(int n, int m) const {
  if (n < 0 || n > n_max_ || m < 0 || m > m_max_ + 1) return 0.0;
  return counts_[static_cast<std::size_t>(n) * static_cast<std::size_t>(m_max_ + 2) + static_cast<std::size_t>(m)];
}

const std::vector<double>& UniformTreeSampler::split_weights(int n, int m) {
  auto& cell = split_cache_[static_cast<std::size_t>(n) * static_cast<std::size_t>(m_max_ + 2) + static_cast<std::size_t>(m)];
  if (!cell.empty()) return cell;
  cell.assign(static_cast<std::size_t>(m), 0.0);
  for (int m1 = 2; m1 <= m - 1; ++m1) {
    double s = 0;
    for (int n1 = 0; n1 <= n - 1; ++n1) s += count(n1, m1) * count(n - 1 - n1, m + 1 - m1);
    cell[m1] = s;
  }
  return cell;
}

PlanarTree UniformTreeSampler::sample(int n, int m, CounterRng& rng) {
  if (!(count(n, m) > 0)) throw std::invalid_argument("no maps with this (N, m) in range");
  PlanarTree t;
  struct Job {
    int n, m, parent, slot;
  };
  std::vector<Job> stack{{n, m, -1, 0}};
  while (!stack.empty()) {
    const Job j = stack.back();
    stack.pop_back();
    const int v = t.size();
    t.nodes.emplace_back();
    if (j.parent < 0)
      t.root = v;
    else
      t.nodes[j.parent].child[j.slot] = v;
    if (j.n == 0) continue;
    double u = rng.uniform() * count(j.n, j.m);
    const double linear = count(j.n - 1, j.m + 1);
    if (u < linear) {
      t.nodes[v].type = 1;
      stack.push_back({j.n - 1, j.m + 1, v, 0});
      continue;
    }
    u -= linear;
    t.nodes[v].type = 2;
    const auto& w = split_weights(j.n, j.m);
    int m1 = 2;
    while (m1 < j.m - 1 && u >= w[m1]) u -= w[m1++];
    int n1 = 0;
    for (; n1 < j.n - 1; ++n1) {
      const double c = count(n1, m1) * count(j.n - 1 - n1, j.m + 1 - m1);
      if (u < c) break;
      u -= c;
    }
    // Rounding can land on an empty cell at the end of a scan; step back to a
    // nonempty one.
    while (n1 > 0 && count(n1, m1) * count(j.n - 1 - n1, j.m + 1 - m1) == 0) --n1;
    stack.push_back({j.n - 1 - n1, j.m + 1 - m1, v, 1});
    stack.push_back({n1, m1, v, 0});
  }
  return t;
}

DegreeReport degree_statistics(const DegreeOptions& opt) {
  if (opt.trees < 1) throw std::invalid_argument("need at least one tree");
  UniformTreeSampler sampler(opt.n, opt.m + 2);
  CounterRng rng(opt.seed, 0, 3);
  DegreeReport rep;
  rep.seed = opt.seed;
  std::vector<long long> hist(static_cast<std::size_t>(opt.max_degree + 1), 0);
  const std::size_t nd = opt.distances.size();
  std::vector<std::vector<double>> qa(nd), qb(nd);
  // Pairs from one tree are dependent; standard errors use batch means over trees.
  constexpr long long kBatches = 40;
  std::vector<std::vector<std::size_t>> batch_start(nd);
  std::vector<HalfEdgeId> leaves;
  std::vector<int> q;
  for (long long s = 0; s < opt.trees; ++s) {
    if (s * kBatches % opt.trees < kBatches)
      for (std::size_t k = 0; k < nd; ++k) batch_start[k].push_back(qa[k].size());
    const auto tree = sampler.sample(opt.n, opt.m, rng);
    const auto map = decode(tree, &leaves);
    const int V = static_cast<int>(leaves.size());
    q.assign(leaves.size() + 1, 0);
    const double cut = opt.bulk_fraction * V;
    auto bulk = [&](int v) { return v >= 1 && v <= V && std::min(v, V - v) >= cut; };
    for (int v = 1; v <= V; ++v) {
      q[v] = map.degree(map.origin(leaves[v - 1]));
      if (!bulk(v)) continue;
      ++hist[std::min(q[v], opt.max_degree)];
      ++rep.samples;
    }
    for (std::size_t k = 0; k < nd; ++k)
      for (int v = 1; v + opt.distances[k] <= V; ++v)
        if (bulk(v) && bulk(v + opt.distances[k])) {
          qa[k].push_back(q[v]);
          qb[k].push_back(q[v + opt.distances[k]]);
        }
  }
  if (rep.samples == 0) throw std::runtime_error("no bulk leaves; increase N");
  const double n = static_cast<double>(rep.samples);
  rep.p.assign(hist.size(), 0.0);
  rep.p_se.assign(hist.size(), 0.0);
  for (std::size_t k = 0; k < hist.size(); ++k) {
    rep.p[k] = hist[k] / n;
    rep.p_se[k] = std::sqrt(rep.p[k] * (1 - rep.p[k]) / n);
    rep.p_sum += rep.p[k];
  }
  const auto mode = static_cast<std::size_t>(std::max_element(hist.begin(), hist.end()) - hist.begin());
  std::vector<double> ks, logs;
  for (std::size_t k = mode + 1; k < hist.size(); ++k)
    if (hist[k] >= 30) {
      ks.push_back(static_cast<double>(k));
      logs.push_back(std::log(rep.p[k]));
    }
  if (ks.size() >= 3) {
    const auto fit = linear_regression(ks, logs);
    rep.tail_rate = std::exp(fit.slope);
    rep.tail_rate_se = rep.tail_rate * fit.slope_se;
  }
  for (std::size_t k = 0; k < nd; ++k) {
    DegreePair dp;
    dp.distance = opt.distances[k];
    dp.pairs = static_cast<long long>(qa[k].size());
    if (qa[k].size() >= 3) {
      dp.covariance = covariance(qa[k], qb[k]).cov;
      std::vector<double> covs;
      auto& starts = batch_start[k];
      starts.push_back(qa[k].size());
      for (std::size_t b = 0; b + 1 < starts.size(); ++b) {
        const std::size_t lo = starts[b], len = starts[b + 1] - lo;
        if (len >= 3)
          covs.push_back(covariance(std::span(qa[k]).subspan(lo, len), std::span(qb[k]).subspan(lo, len)).cov);
      }
      dp.covariance_se = covs.size() >= 2 ? mean_ci(covs).se : covariance(qa[k], qb[k]).se;
    }
    rep.pairs.push_back(dp);
  }
  return rep;
}

namespace {

int urn_cap(int k, int slack) { return std::max(0, k - slack); }

} // namespace

mpz_class urn_counts(int n, int m, int slack) {
  if (n < 0 || m < 0 || slack < 0) throw std::domain_error("urn counts need n, m, slack >= 0");
  if (m > urn_cap(n, slack)) return 0;
  // c(k, j) = c(k, j - 1) + c(k - 1, j) on j <= cap(k), c(k, 0) = 1.
  std::vector<mpz_class> prev(static_cast<std::size_t>(m + 1), 0), cur(static_cast<std::size_t>(m + 1), 0);
  prev[0] = 1;
  for (int k = 1; k <= n; ++k) {
    cur[0] = 1;
    for (int j = 1; j <= m; ++j) cur[j] = j <= urn_cap(k, slack) ? cur[j - 1] + prev[j] : mpz_class(0);
    std::swap(prev, cur);
  }
  return prev[m];
}

mpz_class urn_brute_force(int n, int m, int slack) {
  if (n < 0 || m < 0 || slack < 0) throw std::domain_error("urn counts need n, m, slack >= 0");
  mpz_class total = 0;
  // Depth-first over a_1..a_n with the prefix caps enforced on the way down.
  std::vector<std::pair<int, int>> stack{{0, 0}}; // (k filled, prefix)
  while (!stack.empty()) {
    const auto [k, prefix] = stack.back();
    stack.pop_back();
    if (k == n) {
      if (prefix == m) ++total;
      continue;
    }
    const int top = std::min(urn_cap(k + 1, slack), m);
    for (int p = prefix; p <= top; ++p) stack.push_back({k + 1, p});
  }
  return total;
}

std::vector<double> urn_ratio_report(int n, int slack) {
  std::vector<double> out;
  mpz_class prev = urn_counts(n, 0, slack);
  for (int m = 1; m <= n - slack; ++m) {
    const mpz_class cur = urn_counts(n, m, slack);
    out.push_back(mpq_class(cur, prev).get_d());
    prev = cur;
  }
  return out;
}

mpz_class catalan(int n) {
  if (n < 0) throw std::domain_error("catalan needs n >= 0");
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), 2UL * static_cast<unsigned long>(n), static_cast<unsigned long>(n));
  return b / (n + 1);
}

void write_csv(std::ostream& os, const DegreeReport& r) {
  os << "k,p,se\n";
  os.precision(17);
  for (std::size_t k = 0; k < r.p.size(); ++k)
    if (r.p[k] > 0) os << k << ',' << r.p[k] << ',' << r.p_se[k] << '\n';
}

} // namespace pgrav
