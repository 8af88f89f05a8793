#include "pgrav/internal_dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include <gmpxx.h>

#include "pgrav/enumeration.hpp"
#include "pgrav/rng.hpp"

namespace pgrav {

namespace {

VertexId random_vertex(const RootedMap& map, CounterRng& rng) {
  const auto cap = static_cast<std::uint64_t>(map.vertex_capacity());
  while (true) {
    const auto v = static_cast<VertexId>(rng.below(cap));
    if (map.vertex_alive(v)) return v;
  }
}

HalfEdgeId random_half_edge(const RootedMap& map, CounterRng& rng) {
  const auto cap = static_cast<std::uint64_t>(map.half_edge_capacity());
  while (true) {
    const auto h = static_cast<HalfEdgeId>(rng.below(cap));
    if (map.is_alive(h)) return h;
  }
}

RootedMap initial_sphere(InitialSphere which, MapClass cls) {
  static constexpr std::array<std::array<int, 3>, 4> tetra{{{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}}};
  static constexpr std::array<std::array<int, 3>, 8> octa{
      {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 1}, {5, 2, 1}, {5, 3, 2}, {5, 4, 3}, {5, 1, 4}}};
  return which == InitialSphere::tetrahedron ? RootedMap::from_triangles(4, tetra, cls)
                                             : RootedMap::from_triangles(6, octa, cls);
}

int automorphisms(const RootedMap& map, const CanonicalCode& code) {
  int n = 0;
  for (HalfEdgeId h : map.live_half_edges()) n += canonical_code_from(map, h) == code;
  return n;
}

} // namespace

InternalTrace simulate_internal(const InternalConfig& cfg) {
  if (cfg.lambda < 0 || cfg.mu < 0 || cfg.lambda_flip < 0) throw std::invalid_argument("rates must be nonnegative");
  if (cfg.lambda + cfg.mu + cfg.lambda_flip <= 0) throw std::invalid_argument("all rates are zero");
  CounterRng rng(cfg.seed, cfg.replica, 4);
  RootedMap map = initial_sphere(cfg.initial, cfg.cls);
  InternalTrace tr;
  tr.seed = cfg.seed;
  const VertexId tracked = map.subdivide(random_half_edge(map, rng));
  int q = map.degree(tracked);
  tr.max_degree = q;
  double t = 0;
  double next_sample = 0;
  std::vector<VertexId> producers;
  const bool local = cfg.local_radius > 0;
  std::vector<long long> mark;
  long long stamp = 0;

  while (tr.events < cfg.max_events) {
    if (local) {
      // Breadth-first ball around the tracked vertex; stamps avoid clearing.
      ++stamp;
      if (mark.size() < static_cast<std::size_t>(map.vertex_capacity())) mark.resize(static_cast<std::size_t>(map.vertex_capacity()) * 2, 0);
      producers.assign(1, tracked);
      mark[tracked] = stamp;
      std::size_t begin = 0;
      for (int r = 0; r < cfg.local_radius; ++r) {
        const std::size_t end = producers.size();
        for (std::size_t i = begin; i < end; ++i)
          for (HalfEdgeId h : map.star(producers[i])) {
            const VertexId w = map.dest(h);
            if (mark[w] != stamp) {
              mark[w] = stamp;
              producers.push_back(w);
            }
          }
        begin = end;
      }
    }
    const double p = local ? static_cast<double>(producers.size()) : map.vertex_count();
    const double a_rate = cfg.lambda * p;
    const double inv_rate = cfg.mu * p;
    const double flip_rate = cfg.lambda_flip * map.edge_count();
    const double total = a_rate + inv_rate + flip_rate;
    const double dt = rng.exponential(total);
    if (cfg.trace_dt > 0)
      for (; next_sample <= std::min(t + dt, cfg.horizon); next_sample += cfg.trace_dt) tr.q_samples.emplace_back(next_sample, q);
    if (t + dt > cfg.horizon) {
      t = cfg.horizon;
      break;
    }
    t += dt;
    ++tr.events;
    const double u = rng.uniform() * total;
    auto producer = [&]() {
      return local ? producers[rng.below(producers.size())] : random_vertex(map, rng);
    };
    if (u < a_rate) {
      const VertexId v = producer();
      const auto s = map.star(v);
      const HalfEdgeId link = map.next(s[rng.below(s.size())]);
      const int before = map.vertex_count();
      map.subdivide(link);
      if (map.vertex_count() != before + 1) ++tr.vertex_step_violations;
      ++tr.a_moves;
      if (map.vertex_count() > cfg.max_vertices) throw ResourceError("internal dynamics exceeded the vertex cap");
    } else if (u < a_rate + inv_rate) {
      const VertexId v = producer();
      std::vector<VertexId> four;
      for (HalfEdgeId h : map.star(v))
        if (map.degree(map.dest(h)) == 4) four.push_back(map.dest(h));
      bool done = false;
      if (!four.empty()) {
        const VertexId x = four[rng.below(four.size())];
        int options[2];
        int n_opt = 0;
        for (int pairing = 0; pairing < 2; ++pairing)
          if (map.can_remove_degree4(x, pairing)) options[n_opt++] = pairing;
        if (n_opt > 0) {
          map.remove_degree4(x, options[rng.below(static_cast<std::uint64_t>(n_opt))]);
          ++tr.inverse_moves;
          done = true;
          if (x == tracked) {
            tr.tracked_alive = false;
            tr.disappear_time = t;
          }
        }
      }
      if (!done) ++tr.null_events;
    } else {
      const HalfEdgeId h = random_half_edge(map, rng);
      if (map.can_flip(h)) {
        map.flip(h);
        ++tr.flips;
      } else {
        ++tr.null_events;
      }
    }
    if (cfg.validate_every > 0 && tr.events % cfg.validate_every == 0) {
      map.validate();
      ++tr.validations;
      ++tr.gauss_bonnet_checks;
      if (gauss_bonnet_defect(map) != 12) ++tr.gauss_bonnet_violations;
    }
    if (!tr.tracked_alive) break;
    const int q_new = map.degree(tracked);
    if (q_new > q) ++tr.q_up;
    if (q_new < q) ++tr.q_down;
    q = q_new;
    tr.max_degree = std::max(tr.max_degree, q);
    if (cfg.stop_at_degree > 0 && q >= cfg.stop_at_degree) {
      tr.stopped_at_degree = true;
      break;
    }
  }
  tr.time = t;
  tr.final_degree = tr.tracked_alive ? q : 0;
  tr.final_vertices = map.vertex_count();
  return tr;
}

RootedMap random_sphere(int n_triangles, long long flips, CounterRng& rng) {
  if (n_triangles < 4 || n_triangles % 2 != 0) throw std::invalid_argument("sphere needs an even triangle count >= 4");
  RootedMap map = RootedMap::tetrahedron();
  while (map.inner_faces() < n_triangles) map.subdivide(random_half_edge(map, rng));
  for (long long i = 0; i < flips; ++i) {
    const HalfEdgeId h = random_half_edge(map, rng);
    if (map.can_flip(h)) map.flip(h);
  }
  return map;
}

std::vector<double> walk_transient(double lambda, int q0, double t, int k_max) {
  if (q0 < 3 || q0 > k_max) throw std::invalid_argument("start outside the walk range");
  const auto n = static_cast<std::size_t>(k_max - 2);
  std::vector<double> p(n, 0.0), next(n), out(n, 0.0);
  p[q0 - 3] = 1;
  if (t <= 0) return p;
  const double big = 2.0 * lambda * k_max;
  const double mean = big * t;
  // Poisson weights of the uniformized chain, accumulated until the tail is negligible.
  double cum = 0;
  for (long long k = 0; (cum < 1 - 1e-13 || k < mean) && k < 1'000'000; ++k) {
    if (k > 0) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (p[i] == 0) continue;
        const int state = static_cast<int>(i) + 3;
        const double up = state < k_max ? lambda * state / big : 0.0;
        const double down = state > 3 ? lambda * state / big : 0.0;
        if (up > 0) next[i + 1] += p[i] * up;
        if (down > 0) next[i - 1] += p[i] * down;
        next[i] += p[i] * (1 - up - down);
      }
      std::swap(p, next);
    }
    const double w = std::exp(-mean + static_cast<double>(k) * std::log(mean) - std::lgamma(static_cast<double>(k) + 1));
    for (std::size_t i = 0; i < n; ++i) out[i] += w * p[i];
    cum += w;
  }
  return out;
}

std::vector<WalkComparison> limiting_walk_compare(const WalkOptions& opt) {
  std::vector<WalkComparison> out;
  constexpr int k_max = 400;
  for (std::size_t idx = 0; idx < opt.n_triangles.size(); ++idx) {
    const int n = opt.n_triangles[idx];
    CounterRng rng(opt.seed, idx, 5);
    RootedMap map = random_sphere(n, 50LL * n, rng);
    WalkComparison wc;
    wc.n_triangles = n;
    std::vector<double> emp(k_max - 2, 0.0), half_a(k_max - 2, 0.0), half_b(k_max - 2, 0.0);
    std::map<int, long long> starts;
    std::vector<double> incs;
    auto run = [&](double span, VertexId watch) {
      double t = 0;
      const double rate = opt.lambda * map.edge_count();
      while (true) {
        t += rng.exponential(rate);
        if (t > span) break;
        const HalfEdgeId h = random_half_edge(map, rng);
        if (map.can_flip(h)) map.flip(h);
      }
      return watch >= 0 ? map.degree(watch) : 0;
    };
    for (long long s = 0; s < opt.samples; ++s) {
      const VertexId v = random_vertex(map, rng);
      const int q0 = map.degree(v);
      const int q1 = std::min(run(opt.t_small, v), k_max);
      ++starts[q0];
      emp[q1 - 3] += 1;
      (s % 2 ? half_b : half_a)[q1 - 3] += 1;
      incs.push_back(q1 - q0);
      run(opt.t_small, -1);
    }
    std::vector<double> mix(k_max - 2, 0.0);
    double walk_inc = 0;
    for (const auto& [q0, c] : starts) {
      const auto law = walk_transient(opt.lambda, q0, opt.t_small, k_max);
      for (std::size_t i = 0; i < law.size(); ++i) {
        mix[i] += law[i] * c / static_cast<double>(opt.samples);
        walk_inc += law[i] * (static_cast<double>(i) + 3 - q0) * c / static_cast<double>(opt.samples);
      }
    }
    double tv = 0, tv_half = 0;
    const double na = std::ceil(opt.samples / 2.0), nb = std::floor(opt.samples / 2.0);
    for (std::size_t i = 0; i < emp.size(); ++i) {
      tv += std::fabs(emp[i] / opt.samples - mix[i]);
      tv_half += std::fabs(half_a[i] / na - half_b[i] / nb);
    }
    wc.samples = opt.samples;
    wc.tv = 0.5 * tv;
    wc.tv_noise = 0.5 * tv_half;
    double sum = 0, ss = 0;
    for (double d : incs) sum += d;
    wc.mean_increment = sum / incs.size();
    for (double d : incs) ss += (d - wc.mean_increment) * (d - wc.mean_increment);
    wc.mean_increment_se = std::sqrt(ss / (incs.size() - 1) / incs.size());
    wc.walk_increment = walk_inc;
    out.push_back(wc);
  }
  return out;
}

RootedMap mirror(const RootedMap& sphere) {
  if (!sphere.closed()) throw std::invalid_argument("mirror needs a closed map");
  std::map<VertexId, int> relabel;
  for (VertexId v : sphere.live_vertices()) relabel.emplace(v, static_cast<int>(relabel.size()));
  std::vector<char> seen(static_cast<std::size_t>(sphere.half_edge_capacity()), 0);
  std::vector<std::array<int, 3>> faces;
  for (HalfEdgeId h : sphere.live_half_edges()) {
    if (seen[h]) continue;
    const HalfEdgeId b = sphere.next(h), c = sphere.next(b);
    seen[h] = seen[b] = seen[c] = 1;
    faces.push_back({relabel[sphere.origin(h)], relabel[sphere.origin(c)], relabel[sphere.origin(b)]});
  }
  return RootedMap::from_triangles(static_cast<int>(relabel.size()), faces, sphere.map_class());
}

ComponentReport component_reversibility(int vertices, MapClass cls, long long state_cap) {
  if (vertices < 6) throw std::invalid_argument("component check starts from the octahedron (6 vertices)");
  RootedMap start = initial_sphere(InitialSphere::octahedron, cls);
  while (start.vertex_count() < vertices) start.subdivide(start.live_half_edges().front());

  ComponentReport rep;
  rep.vertices = vertices;
  rep.triangles = start.inner_faces();
  std::vector<RootedMap> states;
  std::vector<int> aut;
  std::map<CanonicalCode, std::size_t> index;
  std::vector<std::map<std::size_t, long long>> moves;
  auto intern = [&](const RootedMap& m, CanonicalCode code) {
    auto it = index.find(code);
    if (it != index.end()) return it->second;
    if (static_cast<long long>(states.size()) >= state_cap) throw ResourceError("flip graph exceeded the state cap");
    const std::size_t id = states.size();
    aut.push_back(automorphisms(m, code));
    index.emplace(std::move(code), id);
    states.push_back(m);
    moves.emplace_back();
    return id;
  };
  intern(start, unrooted_code(start));
  for (std::size_t i = 0; i < states.size(); ++i) {
    const RootedMap base = states[i];
    const CanonicalCode own = unrooted_code(base);
    for (HalfEdgeId h : base.live_half_edges()) {
      if (h & 1) continue;
      if (!base.can_flip(h)) continue;
      RootedMap f(base);
      f.flip(h);
      auto code = unrooted_code(f);
      if (code == own) {
        ++rep.self_loops;
        continue;
      }
      const std::size_t j = intern(f, std::move(code));
      ++moves[i][j];
    }
  }
  rep.states = static_cast<long long>(states.size());
  std::vector<mpq_class> out_rate(states.size(), 0), inflow(states.size(), 0);
  for (std::size_t a = 0; a < states.size(); ++a)
    for (const auto& [b, mult] : moves[a]) {
      ++rep.directed_edges;
      const auto back = moves[b].find(a);
      if (back == moves[b].end()) {
        ++rep.reverse_missing;
        continue;
      }
      if (mult * aut[b] != back->second * aut[a]) ++rep.rate_mismatches;
      out_rate[a] += mpq_class(static_cast<long>(mult)) / aut[a];
      inflow[b] += mpq_class(static_cast<long>(mult)) / aut[a];
    }
  for (std::size_t a = 0; a < states.size(); ++a)
    if (out_rate[a] != inflow[a]) ++rep.stationarity_failures;

  std::set<CanonicalCode> classes;
  for (const auto& m : states) classes.insert(std::min(unrooted_code(m), unrooted_code(mirror(m))));
  rep.component_up_to_reflection = static_cast<long long>(classes.size());
  return rep;
}

void write_csv(std::ostream& os, const InternalTrace& t) {
  os << "t,q\n";
  os.precision(17);
  for (const auto& [time, q] : t.q_samples) os << time << ',' << q << '\n';
}

} // namespace pgrav
