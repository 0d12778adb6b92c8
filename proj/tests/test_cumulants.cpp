#include "edgelab/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brute_force.hpp"
#include "doctest.h"
#include "edgelab/errors.hpp"
#include "edgelab/oracle.hpp"
#include "edgelab/scenario.hpp"

using namespace edgelab;
using Complex = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

ChainSpec iid_coin(double p_one, int N) {
  ChainSpec spec;
  spec.horizon = N;
  spec.states.assign(static_cast<size_t>(N), 2);
  spec.initial = {1.0 - p_one, p_one};
  for (int n = 0; n + 1 < N; ++n) {
    Matrix k(2, 2);
    k(0, 0) = 1.0 - p_one;
    k(0, 1) = p_one;
    k(1, 0) = 1.0 - p_one;
    k(1, 1) = p_one;
    spec.kernels.push_back(std::move(k));
  }
  spec.values.assign(static_cast<size_t>(N), {0, 1});
  spec.value_bound = 1;
  return spec;
}

ChainSpec even_chain(unsigned seed, int N) {
  Scenario sc;
  sc.generator = "even-lattice";
  sc.seed = seed;
  sc.states = 3;
  return generate_scenario(sc, N);
}

ChainSpec sparse_odd_chain(double c, unsigned seed, int N) {
  Scenario sc;
  sc.generator = "sparse-odd";
  sc.seed = seed;
  sc.c = c;
  return generate_scenario(sc, N);
}

}  // namespace

TEST_CASE("mean_variance agrees with the pmf moments") {
  DeterministicRng rng(90);
  const ChainSpec spec = brute::random_spec(rng, 30, 3, 2);
  const auto [mean, var] = mean_variance(spec);
  const SumPmf pmf = sum_pmf(spec);
  CHECK(mean == doctest::Approx(pmf.mean()).epsilon(1e-12));
  CHECK(var == doctest::Approx(pmf.variance()).epsilon(1e-10));
}

TEST_CASE("cumulants_at_zero: symmetric fair coin has vanishing third derivative") {
  const CumulantData cums = cumulants_at_zero(iid_coin(0.5, 50), 1);
  CHECK(std::abs(cums.lambda_derivs[0]) < 1e-12);
}

TEST_CASE("cumulants_at_zero: iid biased coin matches cumulant additivity") {
  const double p = 0.25;
  const int N = 100;
  const CumulantData cums = cumulants_at_zero(iid_coin(p, N), 1);
  const double kappa3 = p * (1 - p) * (1 - 2 * p);        // per-step third cumulant
  const double v = N * p * (1 - p);
  const double expected = N * kappa3 / std::pow(v, 1.5);  // third cumulant of W_N
  CHECK(std::abs(cums.lambda_derivs[0]) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(std::abs(9.375 / std::pow(18.75, 1.5) - expected) < 1e-12);
  CHECK(cums.sigma == doctest::Approx(std::sqrt(v)).epsilon(1e-12));
}

TEST_CASE("cumulants_at_zero: jet route vs central finite differences of ln char_fn") {
  DeterministicRng rng(91);
  const ChainSpec spec = brute::random_spec(rng, 40, 3, 1);
  const CumulantData cums = cumulants_at_zero(spec, 2);

  const auto [mean, var] = mean_variance(spec);
  const double sigma = std::sqrt(var);
  auto f = [&](double h) {
    const Complex c = char_fn(spec, h / sigma) * std::polar(1.0, -h * mean / sigma);
    return std::log(c) + Complex(h * h / 2.0, 0.0);
  };
  const double h = 1e-3;
  const Complex f1 = f(h), f2 = f(2 * h), fm1 = f(-h), fm2 = f(-2 * h);
  const Complex d3 = (f2 - 2.0 * f1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h);
  CHECK(std::abs(d3 - cums.lambda_derivs[0]) / std::max(1e-3, std::abs(d3)) < 1e-6);

  // the fourth derivative needs a wider stencil step: at 1e-3 the h^-4
  // amplification puts the difference on the roundoff floor
  const double h4 = 0.05;
  const Complex g0 = f(0.0), g1 = f(h4), g2 = f(2 * h4), gm1 = f(-h4), gm2 = f(-2 * h4);
  const Complex d4 = (g2 - 4.0 * g1 + 6.0 * g0 - 4.0 * gm1 + gm2) / (h4 * h4 * h4 * h4);
  CHECK(std::abs(d4 - cums.lambda_derivs[1]) / std::max(1e-2, std::abs(d4)) < 1e-3);
}

TEST_CASE("cumulants_at_zero: degenerate variance throws") {
  ChainSpec spec = iid_coin(0.5, 5);
  spec.values.assign(5, {0, 0});
  CHECK_THROWS_AS(cumulants_at_zero(spec, 1), DegenerateVariance);
}

TEST_CASE("resonant_jet at t = 0 reduces to the centered jet with d = u = 0") {
  DeterministicRng rng(92);
  const ChainSpec spec = brute::random_spec(rng, 25, 3, 1);
  const ResonantJetData jd = resonant_jet(spec, 0.0, 2);
  CHECK(std::abs(jd.base - Complex(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(jd.d) < 1e-11);
  CHECK(std::abs(jd.u) < 1e-10);

  const CumulantData cums = cumulants_at_zero(spec, 2);
  for (int j = 3; j <= 4; ++j)
    CHECK(std::abs(jd.log_jet.derivative(j) - cums.lambda_derivs[static_cast<size_t>(j - 3)]) <
          1e-10);
}

TEST_CASE("resonant_jet at pi on an even-lattice chain equals the t = 0 jet") {
  const ChainSpec spec = even_chain(7, 120);
  const ResonantJetData at_pi = resonant_jet(spec, kPi, 2);
  const ResonantJetData at_zero = resonant_jet(spec, 0.0, 2);
  CHECK(std::abs(at_pi.base - Complex(1.0, 0.0)) < 1e-11);
  CHECK(std::abs(at_pi.d) < 1e-9);
  CHECK(std::abs(at_pi.u) < 1e-9);
  for (int k = 0; k <= 4; ++k)
    CHECK(std::abs(at_pi.log_jet.c[static_cast<size_t>(k)] -
                   at_zero.log_jet.c[static_cast<size_t>(k)]) < 1e-9);
}

TEST_CASE("resonant_jet base cross-checks char_fn and the sparse-odd product form") {
  const int N = 200;
  const double c = 0.5;
  const ChainSpec spec = sparse_odd_chain(c, 3, N);
  const ResonantJetData jd = resonant_jet(spec, kPi, 1);
  CHECK(std::abs(jd.base - char_fn(spec, kPi)) < 1e-12);

  // the odd indicator is state-independent by construction, so
  // E[(-1)^S] = prod_n (1 - 2 p_n) exactly
  double expected = 1.0;
  for (int n = 1; n <= N; ++n) expected *= 1.0 - 2.0 * std::min(c / n, 1.0 / 3.0);
  CHECK(jd.base.real() == doctest::Approx(expected).epsilon(1e-10));
  CHECK(std::abs(jd.base.imag()) < 1e-12);
}

TEST_CASE("resonant_jet: degenerate base throws and points to quadrature") {
  Scenario sc;
  sc.generator = "random-elliptic";
  sc.seed = 12;
  sc.states = 3;
  sc.value_bound = 1;
  const ChainSpec spec = generate_scenario(sc, 400);
  CHECK_THROWS_AS(resonant_jet(spec, kPi, 1), ResonantDegenerate);
}

TEST_CASE("jet/oracle consistency: exponentiated jet tracks the shifted characteristic function") {
  const ChainSpec spec = even_chain(11, 150);
  for (int r : {1, 2}) {
    const ResonantJetData jd = resonant_jet(spec, kPi, r);
    for (double h : {0.1, 0.5, 1.0, 2.0}) {
      const Complex predicted = std::exp(jd.log_jet.eval(Complex(h, 0.0)));
      const Complex exact = char_fn(spec, kPi + h / jd.sigma);
      const double budget = 50.0 * std::pow(jd.sigma, -(r + 1)) *
                            std::max(std::abs(h), std::pow(std::abs(h), (r + 2) * (r + 3)));
      CHECK(std::abs(predicted - exact) <= budget);
    }
    const Complex predicted = std::exp(jd.log_jet.eval(Complex(0.1, 0.0)));
    const Complex exact = char_fn(spec, kPi + 0.1 / jd.sigma);
    CHECK(std::abs(predicted - exact) < 1e-4 / jd.sigma);
  }
}

TEST_CASE("derivative growth: |L^(u)(0)| sigma^u / V stays stable across an N sweep") {
  std::vector<double> m3, m4;
  for (int N : {64, 256, 1024}) {
    const ChainSpec spec = sparse_odd_chain(0.5, 5, N);
    const ResonantJetData jd = resonant_jet(spec, kPi, 2);
    const double v = jd.sigma * jd.sigma;
    m3.push_back(std::abs(jd.log_jet.derivative(3)) * std::pow(jd.sigma, 3.0) / v);
    m4.push_back(std::abs(jd.log_jet.derivative(4)) * std::pow(jd.sigma, 4.0) / v);
  }
  for (const auto& m : {m3, m4}) {
    const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
    CHECK(*hi / std::max(*lo, 1e-30) < 10.0);
  }
}

TEST_CASE("correction smallness: |d| and |u| decay with N on aperiodic desk chains") {
  // fixed-mixture independent sparse-odd chain: every row identical, so the
  // tilt shift is a smooth deterministic function of N
  auto build = [](int N) {
    ChainSpec spec;
    spec.horizon = N;
    spec.states.assign(static_cast<size_t>(N), 3);
    spec.values.assign(static_cast<size_t>(N), {0, 1, 2});
    spec.value_bound = 2;
    auto podd = [](int n) { return std::min(0.5 / (n + 1.0), 1.0 / 3.0); };
    const double w = 0.6;
    spec.initial = {(1.0 - podd(0)) * w, podd(0), (1.0 - podd(0)) * (1.0 - w)};
    for (int n = 0; n + 1 < N; ++n) {
      Matrix k(3, 3);
      const double p = podd(n + 1);
      for (int x = 0; x < 3; ++x) {
        k(x, 0) = (1.0 - p) * w;
        k(x, 1) = p;
        k(x, 2) = (1.0 - p) * (1.0 - w);
      }
      spec.kernels.push_back(std::move(k));
    }
    return spec;
  };
  std::vector<double> ds, us;
  for (int N : {64, 256, 1024}) {
    const ResonantJetData jd = resonant_jet(build(N), kPi, 1);
    ds.push_back(std::abs(jd.d));
    us.push_back(std::abs(jd.u));
  }
  CHECK(ds[1] < ds[0]);
  CHECK(ds[2] < ds[1]);
  CHECK(us[1] < us[0]);
  CHECK(us[2] < us[1]);
}

TEST_CASE("conditional mean drift is bounded linearly in the pin count") {
  Scenario sc;
  sc.generator = "random-elliptic";
  sc.seed = 31;
  sc.states = 3;
  sc.value_bound = 1;
  const ChainSpec spec = generate_scenario(sc, 120);
  const auto rep = validate_chain(spec);
  REQUIRE(rep.mixing_fit.has_value());
  const auto [c1, delta] = *rep.mixing_fit;
  const double per_block = 2.0 * spec.value_bound * (1.0 + 2.0 * c1 / (1.0 - delta));
  const auto [mean, var] = mean_variance(spec);
  (void)var;

  DeterministicRng rng(93);
  for (int rep_i = 0; rep_i < 12; ++rep_i) {
    const int pins_count = 1 + rep_i % 2;
    PinSet pins;
    while (static_cast<int>(pins.size()) < pins_count)
      pins[rng.uniform_int(0, 119)] = rng.uniform_int(0, 2);
    const auto [cmean, cvar] = mean_variance(spec, pins);
    (void)cvar;
    CHECK(std::abs(cmean - mean) <= per_block * (pins_count + 1));
  }
}
