#include "pgrav/one_dim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pgrav/enumeration.hpp"
#include "pgrav/rng.hpp"
#include "pgrav/stats.hpp"

namespace pgrav {

namespace {

constexpr std::uint64_t kQueueStream = 6;
constexpr std::uint64_t kCltStream = 7;
constexpr std::uint64_t kDiffusionStream = 8;

void check_dimension(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
}

double delta_of(int d, double mu) {
  const double delta = mu - mu_critical(d);
  if (!(delta > 0)) throw std::domain_error("mu must exceed mu_cr = ln 2d");
  return delta;
}

double tail_bound(double delta, int n_max) {
  return std::exp(-delta * (n_max + 1)) / -std::expm1(-delta);
}

// Distribution of the simple random walk on the box [-R, R]^d, R = n_max.
class Lattice {
public:
  Lattice(int d, int n_max) : d_(d), r_(n_max), side_(2 * n_max + 1) {
    double cells = 1;
    for (int k = 0; k < d; ++k) cells *= side_;
    if (cells > 2e8 || cells * n_max > 1e10) throw ResourceError("lattice walk table too large");
    stride_.resize(d);
    std::size_t s = 1;
    for (int k = 0; k < d; ++k) {
      stride_[k] = s;
      s *= static_cast<std::size_t>(side_);
    }
    cur_.assign(s, 0.0);
    nxt_.assign(s, 0.0);
    cur_[index_of_origin()] = 1.0;
  }

  std::size_t index(std::span<const int> x) const {
    std::size_t i = 0;
    for (int k = 0; k < d_; ++k) {
      if (std::abs(x[k]) > r_) return npos;
      i += static_cast<std::size_t>(x[k] + r_) * stride_[k];
    }
    return i;
  }
  double at(std::size_t i) const { return i == npos ? 0.0 : cur_[i]; }

  // Advances from step n to n + 1; only the sub-box of radius n is occupied.
  void step(int n) {
    std::fill(nxt_.begin(), nxt_.end(), 0.0);
    const double w = 1.0 / (2 * d_);
    scatter(d_ - 1, 0, n, w);
    std::swap(cur_, nxt_);
  }

  double mass(int n) const { return sum_box(d_ - 1, 0, n); }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  std::size_t index_of_origin() const {
    std::size_t i = 0;
    for (int k = 0; k < d_; ++k) i += static_cast<std::size_t>(r_) * stride_[k];
    return i;
  }

  void scatter(int axis, std::size_t base, int n, double w) {
    const int lo = r_ - n, hi = r_ + n;
    if (axis == 0) {
      for (int c = lo; c <= hi; ++c) {
        const std::size_t i = base + static_cast<std::size_t>(c);
        const double v = cur_[i];
        if (v == 0.0) continue;
        const double u = v * w;
        for (int k = 0; k < d_; ++k) {
          nxt_[i + stride_[k]] += u;
          nxt_[i - stride_[k]] += u;
        }
      }
      return;
    }
    for (int c = lo; c <= hi; ++c) scatter(axis - 1, base + static_cast<std::size_t>(c) * stride_[axis], n, w);
  }

  double sum_box(int axis, std::size_t base, int n) const {
    const int lo = r_ - n, hi = r_ + n;
    double s = 0;
    if (axis == 0) {
      for (int c = lo; c <= hi; ++c) s += cur_[base + static_cast<std::size_t>(c)];
      return s;
    }
    for (int c = lo; c <= hi; ++c) s += sum_box(axis - 1, base + static_cast<std::size_t>(c) * stride_[axis], n);
    return s;
  }

  int d_, r_, side_;
  std::vector<std::size_t> stride_;
  std::vector<double> cur_, nxt_;
};

std::vector<double> walk_mass(int d, int n_max) {
  Lattice lat(d, n_max);
  std::vector<double> m(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    m[n] = lat.mass(n);
    if (n < n_max) lat.step(n);
  }
  return m;
}

// Time-weighted statistics of the length over [burn_in, horizon].
class Occupation {
public:
  Occupation(double burn_in, double horizon, int batches)
      : t0_(burn_in), t1_(horizon), batches_(std::max(batches, 1)), batch_len_((horizon - burn_in) / batches_),
        batch_sum_(batches_, 0.0), batch_time_(batches_, 0.0) {}

  void add(int n, double a, double b) {
    a = std::max(a, t0_);
    b = std::min(b, t1_);
    while (a < b) {
      const int k = std::min(batches_ - 1, static_cast<int>((a - t0_) / batch_len_));
      const double end = k == batches_ - 1 ? b : std::min(b, t0_ + (k + 1) * batch_len_);
      const double dt = end - a;
      if (n >= static_cast<int>(occ_.size())) occ_.resize(n + 1, 0.0);
      occ_[n] += dt;
      batch_sum_[k] += n * dt;
      batch_time_[k] += dt;
      a = end;
    }
  }

  void finish(QueueStats& s) const {
    double total = 0, sum = 0;
    for (std::size_t n = 0; n < occ_.size(); ++n) {
      total += occ_[n];
      sum += static_cast<double>(n) * occ_[n];
    }
    if (total <= 0) return;
    s.occupation = occ_;
    for (double& v : s.occupation) v /= total;
    s.mean_length = sum / total;
    s.ratio = s.mean_length / (1 + s.mean_length);
    s.decay_rate = -std::log(s.ratio);
    std::vector<double> rs;
    for (int k = 0; k < batches_; ++k) {
      if (batch_time_[k] <= 0) continue;
      const double m = batch_sum_[k] / batch_time_[k];
      rs.push_back(m / (1 + m));
    }
    if (rs.size() > 1) {
      s.ratio_se = mean_ci(rs).se;
      s.decay_rate_se = s.ratio_se / s.ratio;
    }
  }

private:
  double t0_, t1_;
  int batches_;
  double batch_len_;
  std::vector<double> occ_;
  std::vector<double> batch_sum_, batch_time_;
};

void symbol_stats(const std::vector<std::uint8_t>& word, int alphabet, QueueStats& s) {
  const std::size_t bulk = word.size() * 4 / 5;
  s.bulk_symbols = static_cast<long long>(bulk);
  s.symbol_freq.assign(alphabet, 0.0);
  s.pair_freq.assign(static_cast<std::size_t>(alphabet) * alphabet, 0.0);
  if (bulk == 0) return;
  for (std::size_t i = 0; i < bulk; ++i) s.symbol_freq[word[i]] += 1;
  for (double& v : s.symbol_freq) v /= static_cast<double>(bulk);
  if (bulk < 2) return;
  for (std::size_t i = 0; i + 1 < bulk; ++i) s.pair_freq[word[i] * alphabet + word[i + 1]] += 1;
  for (double& v : s.pair_freq) v /= static_cast<double>(bulk - 1);
}

void check_queue(const QueueConfig& c) {
  if (!(c.lambda > 0) || !(c.nu > 0)) throw std::invalid_argument("rates must be positive");
  if (c.alphabet < 1 || c.alphabet > 256) throw std::invalid_argument("alphabet size must be in [1, 256]");
  if (!(c.horizon > c.burn_in) || c.burn_in < 0) throw std::invalid_argument("need 0 <= burn_in < horizon");
}

template <class Rates, class Apply>
QueueStats run_queue(const QueueConfig& c, Rates rates, Apply apply) {
  check_queue(c);
  QueueStats s;
  s.seed = c.seed;
  CounterRng rng(c.seed, c.replica, kQueueStream);
  Occupation occ(c.burn_in, c.horizon, c.batches);
  std::vector<std::uint8_t> word;
  double t = 0;
  while (true) {
    const int n = static_cast<int>(word.size());
    const auto [up, down] = rates(n);
    const double total = up + down;
    const double next = t + rng.exponential(total);
    if (next >= c.horizon) {
      occ.add(n, t, c.horizon);
      t = c.horizon;
      break;
    }
    occ.add(n, t, next);
    t = next;
    ++s.events;
    if (rng.uniform() * total < up) {
      apply(word, true, rng);
      ++s.insertions;
    } else {
      apply(word, false, rng);
      ++s.deletions;
    }
    s.max_length = std::max(s.max_length, static_cast<int>(word.size()));
    if (static_cast<int>(word.size()) >= c.max_length) break;
  }
  s.time = t;
  s.final_length = static_cast<int>(word.size());
  s.growth_rate = t > 0 ? s.final_length / t : 0;
  occ.finish(s);
  symbol_stats(word, c.alphabet, s);
  return s;
}

// Length at the sample times of a length-only chain started empty.
template <class Rates>
std::vector<int> length_path(Rates rates, std::span<const double> times, CounterRng& rng) {
  std::vector<int> out;
  out.reserve(times.size());
  int n = 0;
  double t = 0;
  std::size_t k = 0;
  while (k < times.size()) {
    const auto [up, down] = rates(n);
    const double next = t + rng.exponential(up + down);
    while (k < times.size() && times[k] <= next) {
      out.push_back(n);
      ++k;
    }
    t = next;
    if (rng.uniform() * (up + down) < up) ++n;
    else --n;
  }
  return out;
}

} // namespace

double mu_critical(int d) {
  check_dimension(d);
  return std::log(2.0 * d);
}

mpz_class path_counts(int d, int n, std::span<const int> x) {
  check_dimension(d);
  if (n < 0) throw std::invalid_argument("path length must be >= 0");
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("endpoint dimension mismatch");
  if (static_cast<double>(d) * n * n > 4e8) throw ResourceError("path count table too large");
  auto line = [](int j, int xk) -> mpz_class {
    const int a = std::abs(xk);
    if (a > j || (j - a) % 2) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), j, (j + a) / 2);
    return r;
  };
  std::vector<mpz_class> f(n + 1), g(n + 1);
  for (int j = 0; j <= n; ++j) f[j] = line(j, x[0]);
  std::vector<mpz_class> binom_row(n + 1);
  for (int k = 1; k < d; ++k) {
    std::vector<mpz_class> l(n + 1);
    for (int j = 0; j <= n; ++j) l[j] = line(j, x[k]);
    for (int m = 0; m <= n; ++m) {
      // binom_row holds C(m, j) for j <= m.
      binom_row[m] = 1;
      for (int j = m - 1; j >= 1; --j) binom_row[j] += binom_row[j - 1];
      binom_row[0] = 1;
      mpz_class s = 0;
      for (int j = 0; j <= m; ++j) {
        if (l[j] == 0 || f[m - j] == 0) continue;
        s += binom_row[j] * l[j] * f[m - j];
      }
      g[m] = s;
    }
    std::swap(f, g);
  }
  return f[n];
}

SeriesValue green_function(int d, double mu, std::span<const int> x, int n_max) {
  const double delta = delta_of(d, mu);
  if (n_max < 0) throw std::invalid_argument("cutoff must be >= 0");
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("endpoint dimension mismatch");
  Lattice lat(d, n_max);
  const std::size_t i = lat.index(x);
  SeriesValue out;
  out.n_max = n_max;
  for (int n = 0; n <= n_max; ++n) {
    out.value += lat.at(i) * std::exp(-delta * n);
    if (n < n_max) lat.step(n);
  }
  out.tail_bound = tail_bound(delta, n_max);
  return out;
}

double susceptibility(int d, double mu) {
  return 1.0 / -std::expm1(-delta_of(d, mu));
}

SeriesValue susceptibility_sum(int d, double mu, int n_max) {
  const double delta = delta_of(d, mu);
  if (n_max < 0) throw std::invalid_argument("cutoff must be >= 0");
  const auto m = walk_mass(d, n_max);
  SeriesValue out;
  out.n_max = n_max;
  for (int n = n_max; n >= 0; --n) out.value += m[n] * std::exp(-delta * n);
  out.tail_bound = tail_bound(delta, n_max);
  return out;
}

int cutoff_for(double delta, double tol) {
  if (!(delta > 0) || !(tol > 0)) throw std::invalid_argument("need delta > 0 and tol > 0");
  const double n = std::log(1.0 / (tol * -std::expm1(-delta))) / delta;
  return std::max(0, static_cast<int>(std::ceil(n)));
}

GammaFit gamma_fit(int d, double lo, double hi, int points, double tol) {
  check_dimension(d);
  if (!(lo > 0) || !(hi > lo) || points < 2) throw std::invalid_argument("bad gamma fit range");
  GammaFit fit;
  fit.points = points;
  fit.n_max = cutoff_for(lo, tol);
  const auto m = walk_mass(d, fit.n_max);
  std::vector<double> lx, ly;
  for (int i = 0; i < points; ++i) {
    const double delta = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    double chi = 0;
    for (int n = fit.n_max; n >= 0; --n) chi += m[n] * std::exp(-delta * n);
    lx.push_back(std::log(delta));
    ly.push_back(std::log(chi));
  }
  const auto r = linear_regression(lx, ly);
  fit.slope = r.slope;
  fit.slope_se = r.slope_se;
  return fit;
}

QueueStats lifo_queue_sim(const QueueConfig& c) {
  const int a = c.alphabet;
  return run_queue(
      c, [&](int n) { return std::pair{c.lambda, n > 0 ? c.nu : 0.0}; },
      [a](std::vector<std::uint8_t>& w, bool insert, CounterRng& rng) {
        if (insert) w.push_back(static_cast<std::uint8_t>(rng.below(a)));
        else w.pop_back();
      });
}

QueueStats context_free_sim(const QueueConfig& c) {
  const int a = c.alphabet;
  return run_queue(
      c, [&](int n) { return std::pair{c.lambda * (n + 1), c.nu * n}; },
      [a](std::vector<std::uint8_t>& w, bool insert, CounterRng& rng) {
        if (insert) {
          const auto pos = rng.below(w.size() + 1);
          w.insert(w.begin() + static_cast<std::ptrdiff_t>(pos), static_cast<std::uint8_t>(rng.below(a)));
        } else {
          w.erase(w.begin() + static_cast<std::ptrdiff_t>(rng.below(w.size())));
        }
      });
}

long long detailed_balance_failures(const mpq_class& lambda, const mpq_class& nu, int alphabet, int max_len) {
  if (lambda <= 0 || nu <= 0 || alphabet < 1) throw std::invalid_argument("bad rates");
  if (std::pow(static_cast<double>(alphabet), max_len) > 1e6) throw ResourceError("too many words");
  const mpq_class rho = lambda / (nu * alphabet);
  const mpq_class ins = lambda / alphabet;
  long long failures = 0;
  // Word measure, built symbol by symbol.
  std::vector<int> w;
  auto pi_of = [&](std::size_t len) {
    mpq_class p = 1;
    for (std::size_t i = 0; i < len; ++i) p *= rho;
    return p;
  };
  for (int len = 0; len < max_len; ++len) {
    w.assign(len, 0);
    while (true) {
      const mpq_class pw = pi_of(w.size());
      for (int s = 0; s < alphabet; ++s) {
        w.push_back(s);
        if (pw * ins != pi_of(w.size()) * nu) ++failures;
        w.pop_back();
      }
      int k = 0;
      while (k < len && ++w[k] == alphabet) w[k++] = 0;
      if (k == len) break;
    }
  }
  // Length chains: pi_n ~ (lambda / nu)^n.
  mpq_class pn = 1;
  for (int n = 0; n < max_len; ++n) {
    const mpq_class pn1 = pn * lambda / nu;
    if (pn * lambda != pn1 * nu) ++failures;
    if (pn * lambda * (n + 1) != pn1 * nu * (n + 1)) ++failures;
    mpq_class words = 1;
    for (int i = 0; i < n; ++i) words *= alphabet;
    if (words * pi_of(n) != pn) ++failures;
    pn = pn1;
  }
  return failures;
}

CriticalClt critical_clt(OneDimProcess process, double rate, double t, long long replicas, std::uint64_t seed) {
  if (!(rate > 0) || !(t > 0) || replicas < 2) throw std::invalid_argument("bad critical run");
  CriticalClt out;
  out.replicas = replicas;
  out.t = t;
  out.seed = seed;
  const double times[] = {t / 4, t};
  std::vector<double> early, late;
  early.reserve(replicas);
  late.reserve(replicas);
  for (long long r = 0; r < replicas; ++r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r), kCltStream);
    std::vector<int> n;
    if (process == OneDimProcess::lifo)
      n = length_path([rate](int k) { return std::pair{rate, k > 0 ? rate : 0.0}; }, times, rng);
    else
      n = length_path([rate](int k) { return std::pair{rate * (k + 1), rate * k}; }, times, rng);
    early.push_back(n[0] / std::sqrt(t / 4));
    late.push_back(n[1] / std::sqrt(t));
  }
  auto scale = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
  };
  out.scale = scale(late);
  const double e = scale(early);
  out.scale_ratio = e > 0 ? out.scale / e : 0;
  out.ks = ks_half_normal_fitted(late);
  return out;
}

std::vector<double> diffusion_scaling(int n_scale, double tau, long long replicas, std::uint64_t seed) {
  if (n_scale < 1 || !(tau > 0) || replicas < 1) throw std::invalid_argument("bad scaling run");
  const double lambda = 1.0, nu = 1.0 + 1.0 / std::sqrt(static_cast<double>(n_scale));
  const double times[] = {tau * n_scale};
  std::vector<double> out;
  out.reserve(replicas);
  for (long long r = 0; r < replicas; ++r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r), kDiffusionStream);
    const auto n = length_path([&](int k) { return std::pair{lambda, k > 0 ? nu : 0.0}; }, times, rng);
    out.push_back(n[0] / std::sqrt(static_cast<double>(n_scale)));
  }
  return out;
}

void write_csv(std::ostream& os, const QueueStats& s) {
  os << "n,occupation\n";
  for (std::size_t n = 0; n < s.occupation.size(); ++n) os << n << ',' << s.occupation[n] << '\n';
}

} // namespace pgrav
