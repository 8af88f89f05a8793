#include "pgrav/boundary_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <gmpxx.h>

#include "pgrav/enumeration.hpp"
#include "pgrav/map_core.hpp"
#include "pgrav/rng.hpp"
#include "pgrav/stats.hpp"

namespace pgrav {

namespace {

/// Outer half-edges of a disk with O(1) sampling and removal.
class BoundaryIndex {
public:
  void add(HalfEdgeId h) {
    if (static_cast<std::size_t>(h) >= pos_.size()) pos_.resize(static_cast<std::size_t>(h) * 2 + 2, -1);
    pos_[h] = static_cast<int>(list_.size());
    list_.push_back(h);
  }
  void remove(HalfEdgeId h) {
    const int i = pos_[h];
    const HalfEdgeId last = list_.back();
    list_[i] = last;
    pos_[last] = i;
    list_.pop_back();
    pos_[h] = -1;
  }
  HalfEdgeId operator[](std::size_t i) const { return list_[i]; }
  std::size_t size() const { return list_.size(); }

private:
  std::vector<HalfEdgeId> list_;
  std::vector<int> pos_;
};

template <class T>
void bump(std::vector<T>& v, int m, T by) {
  if (static_cast<std::size_t>(m) >= v.size()) v.resize(static_cast<std::size_t>(m) + 1, T(0));
  v[m] += by;
}

double curvature_value(int q) { return 2.0 * std::numbers::pi * (6.0 - q) / q; }

} // namespace

TraceStats simulate_growth(const GrowthConfig& cfg) {
  if (!(cfg.lambda1 > 0) || !(cfg.lambda2 > 0) || cfg.mu_del < 0) throw std::invalid_argument("rates must be positive");
  if (cfg.max_events <= 0 || !(cfg.max_time > 0)) throw std::invalid_argument("horizon must be positive");
  const bool full = cfg.mode == GrowthMode::full_map;
  CounterRng rng(cfg.seed, cfg.replica, 0);
  TraceStats s;
  s.seed = cfg.seed;

  RootedMap map;
  BoundaryIndex outer;
  if (full) {
    map = tutte_move_2(new_edge_map(), new_edge_map());
    for (HalfEdgeId h : map.outer_half_edges()) outer.add(h);
  }
  int m = 3;
  double t = 0;
  double next_sample = 0;
  long long excursion = -1; // jumps since leaving m = 3, -1 while at 3
  int closures_done = 0;

  auto on_return = [&]() {
    if (excursion >= 0) bump(s.return_jumps, static_cast<int>(excursion), 1LL);
    excursion = -1;
    if (full && cfg.check_closures && (cfg.max_closures == 0 || closures_done < cfg.max_closures)) {
      ++closures_done;
      RootedMap sphere(map);
      sphere.close_sphere();
      ++s.closures;
      if (gauss_bonnet_defect(sphere) != 12) ++s.closure_failures;
    }
  };

  while (s.events < cfg.max_events) {
    const double up = cfg.lambda1 * m;
    const double down = m >= 4 ? cfg.lambda2 * m : 0.0;
    const double del = full ? 2.0 * cfg.mu_del * m : 0.0;
    const double total = up + down + del;
    const double dt = rng.exponential(total);
    if (t + dt >= cfg.max_time) {
      bump(s.occupation_time, m, cfg.max_time - t);
      t = cfg.max_time;
      s.horizon_reached = true;
      break;
    }
    bump(s.occupation_time, m, dt);
    t += dt;
    if (cfg.sample_dt > 0)
      for (; next_sample <= t; next_sample += cfg.sample_dt) s.m_samples.emplace_back(next_sample, m);
    bump(s.event_counts, m, 1LL);
    ++s.events;
    const double u = rng.uniform() * total;
    const auto idx = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(m)));
    const int m_before = m;

    if (u < up) {
      if (full) {
        const HalfEdgeId h = outer[idx];
        const VertexId x = map.attach_triangle(h);
        const HalfEdgeId b = map.vertex_half_edge(x);
        outer.remove(h);
        outer.add(map.prev(b));
        outer.add(b);
      }
      ++m;
    } else if (u < up + down) {
      if (m == 3) ++s.lambda2_at_3;
      if (full) {
        const HalfEdgeId a = outer[idx];
        const HalfEdgeId b = map.next(a);
        const HalfEdgeId r = map.close_corner(a);
        outer.remove(a);
        outer.remove(b);
        outer.add(r);
      }
      --m;
    } else {
      const HalfEdgeId h = outer[idx];
      if (rng.bernoulli(0.5)) {
        if (map.ear_removable(h)) {
          const HalfEdgeId b = map.next(h);
          const HalfEdgeId base = map.next(RootedMap::twin(h));
          map.remove_ear(h);
          outer.remove(h);
          outer.remove(b);
          outer.add(base);
          --m;
          ++s.deletions;
        }
      } else if (map.boundary_edge_removable(h)) {
        const HalfEdgeId a = map.next(RootedMap::twin(h));
        const HalfEdgeId b = map.next(a);
        map.remove_boundary_edge(h);
        outer.remove(h);
        outer.add(a);
        outer.add(b);
        ++m;
        ++s.deletions;
      }
    }

    if (m != m_before) {
      if (m_before == 3) excursion = 0;
      if (excursion >= 0) ++excursion;
      if (m == 3) on_return();
    }
    if (full) {
      if (map.inner_faces() > cfg.max_triangles) throw ResourceError("growth exceeded the triangle cap");
      ++s.euler_checks;
      const long long interior = map.edge_count() - map.boundary_length();
      if (map.vertex_count() - interior + map.inner_faces() != 1 + m || map.boundary_length() != m) ++s.euler_violations;
      if (cfg.validate_every > 0 && s.events % cfg.validate_every == 0) {
        map.validate();
        ++s.validations;
      }
    }
    if (t >= cfg.max_time) break;
  }
  s.time = t;
  s.final_m = m;
  if (full) {
    s.final_v = map.vertex_count();
    s.final_edges = map.edge_count();
    s.final_interior_edges = map.edge_count() - map.boundary_length();
    s.final_faces = map.inner_faces();
  }
  if (s.events >= cfg.max_events) s.horizon_reached = true;
  return s;
}

BoundaryLaw stationary_boundary_law(double lambda1, double lambda2, int k_max) {
  if (!(lambda1 > 0) || !(lambda2 > lambda1)) throw std::domain_error("stationary law needs 0 < lambda1 < lambda2");
  if (k_max < 3) throw std::invalid_argument("k_max must be at least 3");
  const double r = lambda1 / lambda2;
  BoundaryLaw law;
  law.probs.assign(static_cast<std::size_t>(k_max - 2), 0.0);
  law.probs[0] = 1.0;
  for (int k = 3; k < k_max; ++k) law.probs[k - 2] = law.probs[k - 3] * r * k / (k + 1.0);
  double z = 0;
  for (double p : law.probs) z += p;
  for (double& p : law.probs) p /= z;
  law.truncation_bound = law.probs.back() * r / (1 - r);
  return law;
}

std::vector<double> occupation_law(const TraceStats& s, int k_max) {
  std::vector<double> out(static_cast<std::size_t>(k_max - 2), 0.0);
  double z = 0;
  for (std::size_t m = 0; m < s.occupation_time.size(); ++m) z += s.occupation_time[m];
  for (int k = 3; k <= k_max; ++k)
    if (static_cast<std::size_t>(k) < s.occupation_time.size()) out[k - 3] = s.occupation_time[k] / z;
  return out;
}

double f_generating(double lambda1, double lambda2, double s) {
  return (lambda2 + lambda1 * s * s) / (lambda1 + lambda2);
}

std::vector<double> return_time_distribution(double lambda1, double lambda2, int n_max) {
  if (!(lambda1 > 0) || !(lambda2 > 0)) throw std::invalid_argument("rates must be positive");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  // g_N = 1 - f_N(0) avoids cancellation in the differences.
  std::vector<double> p(static_cast<std::size_t>(n_max + 1), 0.0);
  const double sum = lambda1 + lambda2;
  double g = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    p[n] = g * (lambda2 - lambda1 + lambda1 * g) / sum;
    g = lambda1 * g * (2.0 - g) / sum;
  }
  return p;
}

namespace {

/// Boundary ring of vertex degrees; the disk interior is not stored.
class Ring {
public:
  explicit Ring(CounterRng& rng) : rng_(rng) {
    for (int i = 0; i < 3; ++i) add_vertex();
    for (int i = 0; i < 3; ++i) {
      next_[i] = (i + 1) % 3;
      prev_[i] = (i + 2) % 3;
      deg_[i] = 2;
    }
  }
  int m() const { return static_cast<int>(list_.size()); }
  int degree(int v) const { return deg_[v]; }
  int walk(int v, int d) const {
    for (int i = 0; i < d; ++i) v = next_[v];
    return v;
  }

  double peek_wait(double l1, double l2) {
    const int mm = m();
    return rng_.exponential(l1 * mm + (mm >= 4 ? l2 * mm : 0.0));
  }

  /// Draws the event type and location; returns the new vertex or -1.
  int apply(double l1, double l2) {
    const int mm = m();
    const double up = l1 * mm;
    const double down = mm >= 4 ? l2 * mm : 0.0;
    const bool grow = rng_.uniform() * (up + down) < up;
    const int u = list_[rng_.below(static_cast<std::uint64_t>(mm))];
    if (grow) {
      const int v = next_[u];
      const int x = add_vertex();
      deg_[x] = 2;
      ++deg_[u];
      ++deg_[v];
      next_[u] = x;
      prev_[x] = u;
      next_[x] = v;
      prev_[v] = x;
      return x;
    }
    const int a = prev_[u];
    const int b = next_[u];
    ++deg_[a];
    ++deg_[b];
    next_[a] = b;
    prev_[b] = a;
    const int i = pos_[u];
    list_[i] = list_.back();
    pos_[list_[i]] = i;
    list_.pop_back();
    pos_[u] = -1;
    return -1;
  }

private:
  int add_vertex() {
    const int id = static_cast<int>(deg_.size());
    deg_.push_back(0);
    next_.push_back(-1);
    prev_.push_back(-1);
    pos_.push_back(static_cast<int>(list_.size()));
    list_.push_back(id);
    return id;
  }

  CounterRng& rng_;
  std::vector<int> deg_, next_, prev_, pos_, list_;
};

struct PendingRead {
  double when;
  int vertex;
  int partner; // -1 for single reads
  int slot;    // distance index for pair reads
};

/// Runs one ring until `panel` vertices born after burn-in have been read at
/// their age. `on_read` gets (vertex degree, partner degree or -1, slot).
template <class OnRead>
void run_ring(const CurvatureProtocol& proto, CounterRng& rng, long long panel, bool pairs, OnRead on_read) {
  Ring ring(rng);
  double t = 0;
  bool burned_in = false;
  long long registered = 0;
  std::deque<PendingRead> pending;
  while (registered < panel || !pending.empty()) {
    // Reads due before the next event see the current degrees.
    double t_next = t;
    const double wait = ring.peek_wait(proto.lambda1, proto.lambda2);
    t_next += wait;
    while (!pending.empty() && pending.front().when <= t_next) {
      const auto& pr = pending.front();
      on_read(ring.degree(pr.vertex), pr.partner >= 0 ? ring.degree(pr.partner) : -1, pr.slot);
      pending.pop_front();
    }
    const int born = ring.apply(proto.lambda1, proto.lambda2);
    t = t_next;
    if (!burned_in && ring.m() >= proto.burn_in_boundary) burned_in = true;
    if (born >= 0 && burned_in && registered < panel) {
      ++registered;
      pending.push_back({t + proto.age, born, -1, -1});
      if (pairs)
        for (std::size_t k = 0; k < proto.distances.size(); ++k)
          pending.push_back({t + proto.age, born, ring.walk(born, proto.distances[k]), static_cast<int>(k)});
    }
  }
}

} // namespace

CurvatureReport curvature_statistics(const CurvatureProtocol& proto) {
  if (!(proto.lambda1 > 0) || !(proto.lambda2 > 0)) throw std::invalid_argument("rates must be positive");
  CounterRng rng(proto.seed, 0, 1);
  CurvatureReport rep;
  rep.seed = proto.seed;
  std::vector<long long> hist(static_cast<std::size_t>(proto.max_degree + 1), 0);
  const std::size_t nd = proto.distances.size();
  std::vector<std::vector<double>> qa(nd), qb(nd);
  double curv_sum = 0;
  run_ring(proto, rng, proto.panel_vertices, true, [&](int q, int partner, int slot) {
    if (slot < 0) {
      hist[std::min(q, proto.max_degree)] += 1;
      curv_sum += curvature_value(q);
      ++rep.samples;
    } else {
      qa[slot].push_back(q);
      qb[slot].push_back(partner);
    }
  });
  const double n = static_cast<double>(rep.samples);
  rep.chi.assign(hist.size(), 0.0);
  rep.chi_se.assign(hist.size(), 0.0);
  for (std::size_t k = 0; k < hist.size(); ++k) {
    rep.chi[k] = hist[k] / n;
    rep.chi_se[k] = std::sqrt(rep.chi[k] * (1 - rep.chi[k]) / n);
    rep.chi_sum += rep.chi[k];
    if (k >= 1) rep.mean_curvature_plugin += curvature_value(static_cast<int>(k)) * rep.chi[k];
  }
  rep.mean_curvature = curv_sum / n;

  // Geometric tail past the mode, over cells with enough counts.
  const auto mode = static_cast<std::size_t>(std::max_element(hist.begin(), hist.end()) - hist.begin());
  std::vector<double> ks, logs;
  for (std::size_t k = mode + 1; k < hist.size(); ++k)
    if (hist[k] >= 30) {
      ks.push_back(static_cast<double>(k));
      logs.push_back(std::log(rep.chi[k]));
    }
  if (ks.size() >= 3) {
    const auto fit = linear_regression(ks, logs);
    rep.tail_rate = std::exp(fit.slope);
    rep.tail_rate_se = rep.tail_rate * fit.slope_se;
  }

  for (std::size_t k = 0; k < nd; ++k) {
    PairCorrelation pc;
    pc.distance = proto.distances[k];
    pc.pairs = static_cast<long long>(qa[k].size());
    if (qa[k].size() >= 3) {
      const auto c = covariance(qa[k], qb[k]);
      pc.covariance = c.cov;
      pc.covariance_se = c.se;
      std::map<std::pair<int, int>, double> joint;
      std::map<int, double> pa, pb;
      const double w = 1.0 / static_cast<double>(qa[k].size());
      for (std::size_t i = 0; i < qa[k].size(); ++i) {
        const int x = static_cast<int>(qa[k][i]);
        const int y = static_cast<int>(qb[k][i]);
        joint[{x, y}] += w;
        pa[x] += w;
        pb[y] += w;
      }
      for (const auto& [x, px] : pa)
        for (const auto& [y, py] : pb) {
          const auto it = joint.find({x, y});
          const double j = it == joint.end() ? 0.0 : it->second;
          pc.max_joint_deviation = std::max(pc.max_joint_deviation, std::fabs(j - px * py));
        }
    }
    rep.pairs.push_back(pc);
  }
  return rep;
}

CltReport clt_curvature(const CurvatureProtocol& proto, const std::vector<int>& region_sizes, int replicas) {
  if (region_sizes.empty() || replicas < 10) throw std::invalid_argument("need region sizes and >= 10 replicas");
  const int largest = *std::max_element(region_sizes.begin(), region_sizes.end());
  CltReport rep;
  rep.replicas = replicas;
  rep.seed = proto.seed;
  std::vector<std::vector<double>> sums(region_sizes.size());
  double pooled = 0;
  long long pooled_n = 0;
  for (int r = 0; r < replicas; ++r) {
    CounterRng rng(proto.seed, static_cast<std::uint64_t>(r), 2);
    std::vector<double> curv;
    curv.reserve(static_cast<std::size_t>(largest));
    run_ring(proto, rng, largest, false, [&](int q, int, int) { curv.push_back(curvature_value(q)); });
    // Reads arrive in birth order since every vertex is read at the same age.
    for (std::size_t i = 0; i < region_sizes.size(); ++i) {
      double s = 0;
      for (int k = 0; k < region_sizes[i]; ++k) s += curv[static_cast<std::size_t>(k)];
      sums[i].push_back(s);
    }
    for (double c : curv) pooled += c;
    pooled_n += static_cast<long long>(curv.size());
  }
  rep.k_hat = pooled / static_cast<double>(pooled_n);
  for (std::size_t i = 0; i < region_sizes.size(); ++i) {
    const double root = std::sqrt(static_cast<double>(region_sizes[i]));
    std::vector<double> z;
    z.reserve(sums[i].size());
    for (double s : sums[i]) z.push_back((s - rep.k_hat * region_sizes[i]) / root);
    const auto m = mean_ci(z);
    CltRegion reg;
    reg.size = region_sizes[i];
    reg.mean = m.mean;
    reg.variance = m.sd * m.sd;
    reg.ks_distance = ks_normal_fitted(z);
    rep.regions.push_back(reg);
  }
  return rep;
}

namespace {

struct State {
  RootedMap map;
  int n = 0;
  std::map<std::size_t, mpq_class> out; // target index -> rate
};

int automorphisms(const RootedMap& map) {
  const auto outer = map.outer_half_edges();
  const auto best = unrooted_code(map);
  int count = 0;
  for (HalfEdgeId h : outer) count += canonical_code_from(map, h) == best;
  return count;
}

bool deletable(const RootedMap& map) {
  for (HalfEdgeId h : map.outer_half_edges())
    if (map.ear_removable(h) || map.boundary_edge_removable(h)) return true;
  return false;
}

} // namespace

ReversibilityReport reversible_variant_check(double lambda, double mu, int n_max) {
  if (!(lambda > 0) || !(mu > 0)) throw std::invalid_argument("rates must be positive");
  if (n_max < 1 || n_max > 9) throw ResourceError("reversible check supports 1 <= n_max <= 9");
  const mpq_class lam(lambda), mu_q(mu);
  std::vector<State> states;
  std::map<CanonicalCode, std::size_t> index;
  auto intern = [&](const RootedMap& m) {
    auto code = unrooted_code(m);
    auto it = index.find(code);
    if (it != index.end()) return it->second;
    const std::size_t id = states.size();
    index.emplace(std::move(code), id);
    states.push_back({m, m.inner_faces(), {}});
    return id;
  };
  intern(tutte_move_2(new_edge_map(), new_edge_map()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    const RootedMap base = states[i].map;
    for (HalfEdgeId h : base.outer_half_edges()) {
      if (base.inner_faces() < n_max) {
        RootedMap a(base);
        a.attach_triangle(h);
        const std::size_t j = intern(a);
        states[i].out[j] += lam;
        if (base.boundary_length() >= 4) {
          RootedMap c(base);
          c.close_corner(h);
          const std::size_t k = intern(c);
          states[i].out[k] += lam;
        }
      }
      if (base.ear_removable(h)) {
        RootedMap e(base);
        e.remove_ear(h);
        const std::size_t j = intern(e);
        states[i].out[j] += mu_q;
      }
      if (base.boundary_edge_removable(h)) {
        RootedMap e(base);
        e.remove_boundary_edge(h);
        const std::size_t j = intern(e);
        states[i].out[j] += mu_q;
      }
    }
  }

  ReversibilityReport rep;
  rep.states = static_cast<long long>(states.size());
  auto rate = [&](std::size_t a, std::size_t b) -> mpq_class {
    const auto it = states[a].out.find(b);
    return it == states[a].out.end() ? mpq_class(0) : it->second;
  };
  for (std::size_t i = 0; i < states.size(); ++i) {
    rep.transitions += static_cast<long long>(states[i].out.size());
    if (i > 0 && !deletable(states[i].map)) ++rep.stuck_states;
  }

  // Potential along a BFS tree, then every edge must agree with it.
  std::vector<mpq_class> pi(states.size(), 0);
  std::vector<char> seen(states.size(), 0);
  std::deque<std::size_t> queue{0};
  pi[0] = 1;
  seen[0] = 1;
  while (!queue.empty()) {
    const std::size_t a = queue.front();
    queue.pop_front();
    for (const auto& [b, q] : states[a].out) {
      if (seen[b]) continue;
      const mpq_class back = rate(b, a);
      if (sgn(back) == 0) continue;
      pi[b] = pi[a] * q / back;
      seen[b] = 1;
      queue.push_back(b);
    }
  }
  for (std::size_t a = 0; a < states.size(); ++a)
    for (const auto& [b, q] : states[a].out)
      if (!seen[a] || !seen[b] || pi[a] * q != pi[b] * rate(b, a)) ++rep.balance_violations;

  rep.potential_matches_weight = true;
  const mpq_class ratio = lam / mu_q;
  mpq_class reference = 0;
  for (std::size_t a = 0; a < states.size(); ++a) {
    mpq_class w = pi[a] * automorphisms(states[a].map);
    for (int k = 0; k < states[a].n; ++k) w /= ratio;
    if (a == 0)
      reference = w;
    else if (w != reference)
      rep.potential_matches_weight = false;
  }

  for (std::size_t a = 0; a < states.size(); ++a)
    for (const auto& [b, qab] : states[a].out)
      for (const auto& [c, qbc] : states[b].out) {
        if (c == a) continue;
        for (const auto& [d, qcd] : states[c].out) {
          if (d == a || d == b) continue;
          const mpq_class qda = rate(d, a);
          if (sgn(qda) == 0) continue;
          ++rep.cycles4;
          if (qab * qbc * qcd * qda != rate(b, a) * rate(c, b) * rate(d, c) * rate(a, d)) ++rep.cycle4_violations;
        }
      }

  const auto maps = generate_maps(n_max);
  for (int n = 2; n <= n_max; ++n)
    for (const auto& m : maps[n]) {
      if (m.boundary_length() < 3) continue;
      ++rep.class_maps_checked;
      if (!deletable(m)) {
        ++rep.class_non_deletable;
        if (rep.smallest_non_deletable_n < 0) rep.smallest_non_deletable_n = n;
      }
    }
  return rep;
}

void write_csv(std::ostream& os, const TraceStats& s) {
  os << "m,occupation_time,events\n";
  os.precision(17);
  const std::size_t n = std::max(s.occupation_time.size(), s.event_counts.size());
  for (std::size_t m = 3; m < n; ++m)
    os << m << ',' << (m < s.occupation_time.size() ? s.occupation_time[m] : 0.0) << ','
       << (m < s.event_counts.size() ? s.event_counts[m] : 0) << '\n';
}

} // namespace pgrav
