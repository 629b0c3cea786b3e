#include "stiff/mc_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include "stiff/errors.hpp"

namespace stiff {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double sign_of(Side s) { return s == Side::plus ? 1.0 : -1.0; }

int step_count(double t, double dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  return t > 0.0 ? static_cast<int>(std::ceil(t / dt - 1e-12)) : 0;
}

}  // namespace

Rng child_rng(std::uint64_t master_seed, std::uint64_t index) {
  const std::uint64_t s = splitmix64(master_seed ^ splitmix64(index + 0x632BE59BD9B4E019ull));
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
  return Rng(seq);
}

LatticeWalk::LatticeWalk(const LinearOperator& op) : layout_(op.layout) {
  if (op.gen.coupling) throw DomainError("nonlocal barrier couplings have no lattice walk");
  const Eigen::Index n = op.size();
  const SplitGrid& g = layout_.grid();
  x1_.assign(n, 0.0);
  x2_.assign(n, 0.0);
  side_.assign(n, Side::plus);
  for (Side s : {Side::minus, Side::plus})
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i) {
        const Eigen::Index k = layout_.index(s, j, i);
        if (k < 0) continue;
        x1_[k] = g.x1(i);
        x2_[k] = sign_of(s) * j * g.dy();
        side_[k] = s;
      }

  const SparseMatrix& K = op.gen.stiffness;
  rate_.assign(n, 0.0);
  start_.assign(n + 1, 0);
  for (Eigen::Index a = 0; a < n; ++a) {
    double diag = 0.0, acc = 0.0;
    std::vector<std::pair<Eigen::Index, double>> out;
    for (SparseMatrix::InnerIterator it(K, a); it; ++it) {
      if (it.row() == a) diag = it.value();
      else if (it.value() < 0.0) out.emplace_back(it.row(), -it.value());
    }
    rate_[a] = diag / op.gen.mass[a];
    for (const auto& [b, c] : out) {
      acc += c / diag;
      target_.push_back(b);
      cumulative_.push_back(acc);
    }
    start_[a + 1] = static_cast<Eigen::Index>(target_.size());
  }
}

Eigen::Index LatticeWalk::node_of(const PathState& p) const {
  const SplitGrid& g = layout_.grid();
  const int i = std::clamp(static_cast<int>(std::lround((p.x1 + g.Lx) / g.dx())), 0, g.nx);
  const int j = std::clamp(static_cast<int>(std::lround(std::abs(p.x2) / g.dy())), 0, g.ny);
  const Eigen::Index k = layout_.index(p.component, j, i);
  if (k < 0) throw DomainError("start point sits on a fixed node");
  return k;
}

PathState LatticeWalk::run(const PathState& x0, double t, Rng& rng) const {
  std::exponential_distribution<double> hold(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::Index a = node_of(x0);
  PathState p = x0;
  double now = 0.0;
  while (rate_[a] > 0.0) {
    now += hold(rng) / rate_[a];
    if (now > t) break;
    const double u = unif(rng);
    const auto first = cumulative_.begin() + start_[a], last = cumulative_.begin() + start_[a + 1];
    const auto it = std::upper_bound(first, last, u);
    if (it == last) {
      p.alive = false;
      break;
    }
    a = target_[start_[a] + (it - first)];
  }
  p.x1 = x1_[a];
  p.x2 = x2_[a];
  p.component = side_[a];
  return p;
}

PathState simulate_eps(const PathState& x0, double t, const ScaleParams& s, const SplitGrid& grid, Rng& rng) {
  return LatticeWalk(assemble_eps_operator(grid, s)).run(x0, t, rng);
}

double local_time_band(double dt) { return 0.25 * std::sqrt(dt); }

double local_time_increment(double a, double b, double dt, double delta) {
  const double hits = (std::abs(a) < delta ? 1.0 : 0.0) + (std::abs(b) < delta ? 1.0 : 0.0);
  return 0.5 * dt * hits / (2.0 * delta);
}

SnobState simulate_snob(double x0, Side component, double t, double kappa, double dt, Rng& rng) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  const int n = step_count(t, dt);
  SnobState st{std::abs(x0), component, 0.0};
  if (n == 0) return st;
  const double h = t / n, sh = std::sqrt(h), delta = local_time_band(h);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < n; ++k) {
    const double y = std::abs(st.position + sh * z(rng));
    const double dl = local_time_increment(st.position, y, h, delta);
    st.position = y;
    if (dl > 0.0) {
      st.local_time += dl;
      // Odd number of flips of a rate-kappa/2 switching chain over dl.
      if (unif(rng) < -0.5 * std::expm1(-kappa * dl)) st.component = st.component == Side::plus ? Side::minus : Side::plus;
    }
  }
  return st;
}

PathState simulate_snob_product(const PathState& x0, double t, double kappa, double dt, Rng& rng) {
  const SnobState s = simulate_snob(x0.x2, x0.component, t, kappa, dt, rng);
  std::normal_distribution<double> z;
  PathState p = x0;
  p.x1 += std::sqrt(t) * z(rng);
  p.x2 = sign_of(s.component) * s.position;
  p.component = s.component;
  p.local_time += s.local_time;
  return p;
}

PathState simulate_type4(const PathState& x0, double t, double lambda, double dt, Rng& rng) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
  const int n = step_count(t, dt);
  PathState p = x0;
  if (n == 0) return p;
  const double h = t / n, sh = std::sqrt(h), delta = local_time_band(h);
  std::normal_distribution<double> z;
  const double l0 = p.local_time;
  for (int k = 0; k < n; ++k) {
    const double y = p.x2 + sh * z(rng);
    p.local_time += local_time_increment(p.x2, y, h, delta);
    p.x2 = y;
  }
  // Given the clock, the x1 increments are independent Gaussians: one draw of total
  // variance t + 2 lambda (L_t - L_0).
  p.x1 += std::sqrt(t + 2.0 * lambda * (p.local_time - l0)) * z(rng);
  p.component = p.x2 < 0.0 ? Side::minus : Side::plus;
  return p;
}

PathState simulate_basic(const PathState& x0, double t, BasicKind kind, double dt, Rng& rng) {
  const int n = step_count(t, dt);
  PathState p = x0;
  const double sgn = sign_of(p.component);
  double y = std::abs(p.x2);
  if (kind == BasicKind::absorbing && y == 0.0 && n > 0) p.alive = false;
  if (n == 0 || !p.alive) return p;
  const double h = t / n, sh = std::sqrt(h);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < n; ++k) {
    double yn = y + sh * z(rng);
    if (kind == BasicKind::reflecting) {
      yn = std::abs(yn);
    } else if (yn <= 0.0 || unif(rng) < std::exp(-2.0 * y * yn / h)) {
      p.alive = false;
      y = std::max(yn, 0.0);
      break;
    }
    y = yn;
  }
  p.x2 = sgn * y;
  // x1 is an independent Brownian motion; only its endpoint is observed.
  p.x1 += std::sqrt(t) * z(rng);
  return p;
}

SemigroupEstimate empirical_semigroup(const Observable& f, const std::vector<PathState>& starts, double t,
                                      int n_paths, const Sampler& sampler, std::uint64_t seed, int threads) {
  if (n_paths < 100) throw DomainError("empirical_semigroup needs at least 100 paths");
  const std::size_t total = starts.size() * static_cast<std::size_t>(n_paths);
  std::vector<double> values(total, 0.0);
  std::atomic<std::size_t> next{0};
  constexpr std::size_t block = 256;
  auto worker = [&] {
    for (std::size_t b = next.fetch_add(block); b < total; b = next.fetch_add(block))
      for (std::size_t k = b; k < std::min(total, b + block); ++k) {
        Rng rng = child_rng(seed, k);
        const PathState end = sampler(starts[k / n_paths], t, rng);
        values[k] = end.alive ? f(end) : 0.0;
      }
  };
  const int nt = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int w = 1; w < nt; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SemigroupEstimate e;
  e.starts = starts;
  e.n_paths = n_paths;
  e.seed = seed;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const double* v = values.data() + s * n_paths;
    double m = 0.0;
    for (int k = 0; k < n_paths; ++k) m += v[k];
    m /= n_paths;
    double ss = 0.0;
    for (int k = 0; k < n_paths; ++k) ss += (v[k] - m) * (v[k] - m);
    e.mean.push_back(m);
    e.se.push_back(std::sqrt(ss / (n_paths - 1) / n_paths));
  }
  return e;
}

SemigroupEstimate empirical_semigroup(const SplitField& f, const std::vector<PathState>& starts, double t,
                                      int n_paths, const Sampler& sampler, std::uint64_t seed, int threads) {
  const Observable obs = [&f](const PathState& p) { return sample_bilinear(f, p.component, p.x1, std::abs(p.x2)); };
  return empirical_semigroup(obs, starts, t, n_paths, sampler, seed, threads);
}

std::string to_json(const SemigroupEstimate& e) {
  std::ostringstream os;
  os << std::setprecision(17) << "[";
  for (std::size_t k = 0; k < e.starts.size(); ++k) {
    const PathState& s = e.starts[k];
    os << (k ? ", " : "") << "{\"x0\": [" << s.x1 << ", " << s.x2 << ", \""
       << (s.component == Side::plus ? "plus" : "minus") << "\"], \"mean\": " << e.mean[k]
       << ", \"se\": " << e.se[k] << ", \"n_paths\": " << e.n_paths << ", \"seed\": " << e.seed << "}";
  }
  os << "]";
  return os.str();
}

}  // namespace stiff
