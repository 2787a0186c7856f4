#include "normsim/simulators.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace normsim {

namespace {

constexpr double pi = std::numbers::pi;

// Fejer kernel sin^2(pi L u) / (L sin^2(pi u)), period 1, unit mass.
double fejer(double u, std::uint64_t L) {
  u -= std::round(u);
  const double s = std::sin(pi * u);
  if (std::abs(s) < 1e-12) return static_cast<double>(L);
  const double t = std::sin(pi * static_cast<double>(L) * u);
  return t * t / (static_cast<double>(L) * s * s);
}

double fejer_exact(std::uint64_t L, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0, 1);
  const double Ld = static_cast<double>(L);
  const double u0 = 1 / (2 * Ld);
  const double central = 1 / (2 - 1 / Ld);
  for (;;) {
    double u, env;
    if (U(rng) < central) {
      u = (2 * U(rng) - 1) * u0;
      env = Ld;
    } else {
      // density 1/(4 L u^2) on u0 < |u| < 1/2: 1/|u| is uniform
      double inv = 1 / u0 - U(rng) * (1 / u0 - 2);
      u = (U(rng) < 0.5 ? -1 : 1) / inv;
      env = 1 / (4 * Ld * u * u);
    }
    if (U(rng) * env <= fejer(u, L)) return u;
  }
}

double fejer_grid(std::uint64_t L, std::size_t points, std::mt19937_64& rng) {
  thread_local std::map<std::pair<std::uint64_t, std::size_t>, std::vector<double>> cache;
  auto& cdf = cache[{L, points}];
  if (cdf.empty()) {
    cdf.resize(points + 1);
    cdf[0] = 0;
    const double h = 1.0 / static_cast<double>(points);
    for (std::size_t i = 0; i < points; ++i) {
      double a = -0.5 + h * static_cast<double>(i);
      cdf[i + 1] = cdf[i] + 0.5 * h * (fejer(a, L) + fejer(a + h, L));
    }
    for (auto& c : cdf) c /= cdf.back();
  }
  double w = std::uniform_real_distribution<double>(0, 1)(rng);
  auto it = std::upper_bound(cdf.begin(), cdf.end(), w);
  std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf.begin() - 1, 0, static_cast<std::ptrdiff_t>(points) - 1));
  double span = cdf[i + 1] - cdf[i];
  double t = span > 0 ? (w - cdf[i]) / span : 0.5;
  return -0.5 + (static_cast<double>(i) + t) / static_cast<double>(points);
}

void check_args(std::uint64_t r, std::uint64_t M) {
  if (r == 0) throw std::invalid_argument("period must be positive");
  if (M < r) throw std::invalid_argument("window half-width must be at least the period");
}

}  // namespace

std::uint64_t comb_length(std::uint64_t r, std::uint64_t M, std::uint64_t s) {
  if (r == 0) throw std::invalid_argument("period must be positive");
  const auto R = static_cast<std::int64_t>(r), m = static_cast<std::int64_t>(M), o = static_cast<std::int64_t>(s % r);
  auto fdiv = [](std::int64_t a, std::int64_t b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); };
  std::int64_t hi = fdiv(m - o, R), lo = -fdiv(m + o, R);  // ceil((-M - o) / r)
  return hi >= lo ? static_cast<std::uint64_t>(hi - lo + 1) : 0;
}

double dirichlet_density(double p, std::uint64_t L, std::uint64_t r) { return fejer(p * static_cast<double>(r), L); }

double dirichlet_sample(std::uint64_t r, std::uint64_t M, std::mt19937_64& rng, const DirichletOptions& opt) {
  check_args(r, M);
  const auto m = static_cast<std::int64_t>(M);
  std::int64_t x = std::uniform_int_distribution<std::int64_t>(-m, m)(rng);
  const auto R = static_cast<std::int64_t>(r);
  const std::uint64_t L = comb_length(r, M, static_cast<std::uint64_t>(((x % R) + R) % R));
  double u = opt.method == DirichletOptions::Method::Exact ? fejer_exact(L, rng) : fejer_grid(L, opt.grid_points, rng);
  std::uint64_t k = std::uniform_int_distribution<std::uint64_t>(0, r - 1)(rng);
  double p = (static_cast<double>(k) + u) / static_cast<double>(r);
  return p - std::floor(p);
}

std::uint64_t dirichlet_min_length(std::uint64_t r, std::uint64_t M) {
  check_args(r, M);
  return 2 * (M / r);
}

double dirichlet_resolution(std::uint64_t r, std::uint64_t M) {
  return 1 / (static_cast<double>(dirichlet_min_length(r, M)) * static_cast<double>(r));
}

double dirichlet_peak_mass(std::uint64_t r, std::uint64_t M, double delta) {
  check_args(r, M);
  const double half = std::min(0.5, static_cast<double>(r) * delta / 2);
  double total = 0;
  for (std::uint64_t s = 0; s < r; ++s) {
    std::uint64_t L = comb_length(r, M, s);
    if (L == 0) continue;
    double in = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [L](double u) { return fejer(u, L); }, -half, half, 15, 1e-12);
    total += static_cast<double>(L) * in;
  }
  return total / static_cast<double>(2 * M + 1);
}

double dirichlet_total_mass(std::uint64_t r, std::uint64_t M) {
  check_args(r, M);
  double total = 0;
  for (std::uint64_t s = 0; s < r; ++s) {
    std::uint64_t L = comb_length(r, M, s);
    if (L == 0) continue;
    // periodic trapezoid, exact for this trigonometric polynomial
    const std::uint64_t n = 4 * L + 64;
    double sum = 0;
    for (std::uint64_t i = 0; i < n; ++i) sum += fejer(static_cast<double>(i) / static_cast<double>(n), L);
    total += static_cast<double>(L) * sum / static_cast<double>(n);
  }
  return total / static_cast<double>(2 * M + 1);
}

double discretization_check(std::uint64_t r, std::uint64_t M) {
  check_args(r, M);
  const std::uint64_t D = 2 * M + 1;
  const auto m = static_cast<std::int64_t>(M), R = static_cast<std::int64_t>(r), Di = static_cast<std::int64_t>(D);
  ElementaryGroup G = ElementaryGroup::cyclic({Integer(D)});
  double worst = 0;
  for (std::int64_t s = 0; s < R; ++s) {
    std::int64_t first = -m;
    while (((first % R) + R) % R != s) ++first;
    const std::uint64_t L = comb_length(r, M, static_cast<std::uint64_t>(s));
    if (L == 0) continue;
    DenseState st;
    st.group = G;
    st.amp = Eigen::VectorXcd::Zero(Di);
    for (std::int64_t x = first; x <= m; x += R) st.amp(((x % Di) + Di) % Di) = 1 / std::sqrt(static_cast<double>(L));
    dense_apply(st, QFTGate{{0}, {}});
    const double Ld = static_cast<double>(L), scale = 1 / std::sqrt(Ld * static_cast<double>(D));
    for (std::int64_t k = 0; k < Di; ++k) {
      const double p = static_cast<double>(k) / static_cast<double>(D);
      const std::complex<double> lead = std::polar(1.0, 2 * pi * p * static_cast<double>(first));
      const double den = std::sin(pi * p * static_cast<double>(r));
      std::complex<double> want;
      if (std::abs(den) < 1e-12)
        want = Ld * lead;
      else
        want = lead * std::polar(1.0, pi * p * static_cast<double>(r) * (Ld - 1)) *
               (std::sin(pi * Ld * p * static_cast<double>(r)) / den);
      worst = std::max(worst, std::abs(st.amp(k) - scale * want));
    }
  }
  return worst;
}

}  // namespace normsim
