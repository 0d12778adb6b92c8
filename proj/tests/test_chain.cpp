#include "edgelab/chain.hpp"

#include <cmath>

#include "brute_force.hpp"
#include "doctest.h"
#include "edgelab/errors.hpp"
#include "edgelab/scenario.hpp"

using namespace edgelab;

namespace {

ChainSpec two_state(double a, int N, std::vector<double> initial = {0.5, 0.5}) {
  ChainSpec spec;
  spec.horizon = N;
  spec.states.assign(static_cast<size_t>(N), 2);
  spec.initial = std::move(initial);
  for (int n = 0; n + 1 < N; ++n) {
    Matrix k(2, 2);
    k(0, 0) = a;
    k(0, 1) = 1.0 - a;
    k(1, 0) = 1.0 - a;
    k(1, 1) = a;
    spec.kernels.push_back(std::move(k));
  }
  spec.values.assign(static_cast<size_t>(N), {0, 1});
  spec.value_bound = 1;
  return spec;
}

}  // namespace

TEST_CASE("marginals: deterministic start spreads in one step") {
  ChainSpec spec = two_state(0.5, 2, {1.0, 0.0});
  const auto mu = marginals(spec);
  CHECK(mu[1][0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mu[1][1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("marginals: iid chain keeps its law and matches enumeration") {
  ChainSpec spec = two_state(0.5, 6);
  const auto mu = marginals(spec);
  for (int n = 0; n < 6; ++n) {
    CHECK(mu[static_cast<size_t>(n)][0] == doctest::Approx(0.5).epsilon(1e-14));
  }

  DeterministicRng rng(2024);
  ChainSpec rnd = brute::random_spec(rng, 10, 3, 1);
  const auto mu2 = marginals(rnd);
  std::vector<double> mass(3, 0.0);
  brute::enumerate_paths(rnd, [&](const brute::Path& p) {
    mass[static_cast<size_t>(p.states[9])] += p.prob;
  });
  for (int x = 0; x < 3; ++x) CHECK(std::abs(mu2[9][static_cast<size_t>(x)] - mass[static_cast<size_t>(x)]) < 1e-14);
}

TEST_CASE("validate_chain: iid two-state has C = 1 and no mixing deviation") {
  ChainSpec spec = two_state(0.5, 10);
  const auto rep = validate_chain(spec);
  CHECK(rep.C == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& [k, dev] : rep.sup_deviation) CHECK(dev < 1e-14);
  CHECK(!rep.mixing_fit.has_value());
}

TEST_CASE("validate_chain: symmetric 0.9 kernel gives C = 5") {
  ChainSpec spec = two_state(0.9, 8);
  const auto rep = validate_chain(spec);
  CHECK(rep.C == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(rep.density_range[0].first == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(rep.density_range[0].second == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("validate_chain: zero entry with positive marginal is an ellipticity violation") {
  ChainSpec spec = two_state(0.5, 3);
  spec.kernels[0](0, 0) = 1.0;
  spec.kernels[0](0, 1) = 0.0;
  spec.kernels[0](1, 0) = 0.5;
  spec.kernels[0](1, 1) = 0.5;
  CHECK_THROWS_AS(validate_chain(spec), EllipticityViolation);
}

TEST_CASE("validate_chain: mixing fit dominates every computed deviation") {
  Scenario sc;
  sc.name = "re";
  sc.generator = "random-elliptic";
  sc.seed = 5;
  sc.eps0 = 0.4;
  sc.states = 3;
  const ChainSpec spec = generate_scenario(sc, 80);
  const auto rep = validate_chain(spec);
  REQUIRE(rep.mixing_fit.has_value());
  const auto [c1, delta] = *rep.mixing_fit;
  CHECK(delta > 0.0);
  CHECK(delta < 1.0);
  for (const auto& [k, dev] : rep.sup_deviation)
    CHECK(dev <= std::max(c1 * std::pow(delta, k) * (1.0 + 1e-12), 2.6e-14));
}

TEST_CASE("k_step_density: iid chain is flat, a=0.9 squared gives 1.64 on the diagonal") {
  ChainSpec iid = two_state(0.5, 6);
  const Matrix flat = k_step_density(iid, 1, 3);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) CHECK(flat(x, y) == doctest::Approx(1.0).epsilon(1e-12));

  ChainSpec spec = two_state(0.9, 6);
  const Matrix d2 = k_step_density(spec, 0, 2);
  CHECK(d2(0, 0) == doctest::Approx(1.64).epsilon(1e-12));
  CHECK(d2(0, 1) == doctest::Approx(0.36).epsilon(1e-12));

  CHECK_THROWS_AS(k_step_density(spec, 4, 2), LagOutOfRange);
}

TEST_CASE("k_step_density: long-lag densities approach 1 within the fitted envelope") {
  Scenario sc;
  sc.generator = "random-elliptic";
  sc.seed = 11;
  sc.eps0 = 0.4;
  sc.states = 3;
  const ChainSpec spec = generate_scenario(sc, 40);
  const auto rep = validate_chain(spec);
  REQUIRE(rep.mixing_fit.has_value());
  const auto [c1, delta] = *rep.mixing_fit;
  const int k = 20;
  const Matrix d = k_step_density(spec, 5, k);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      CHECK(std::abs(d(x, y) - 1.0) <= std::max(c1 * std::pow(delta, k) * (1.0 + 1e-12), 2.6e-14));
}

TEST_CASE("density sandwich: every k-step density lies in [1/C, C]") {
  DeterministicRng rng(77);
  const ChainSpec spec = brute::random_spec(rng, 12, 3, 2);
  const auto rep = validate_chain(spec);
  for (int n = 0; n < 11; ++n) {
    for (int k = 1; n + k < 12; ++k) {
      const Matrix d = k_step_density(spec, n, k);
      for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
          CHECK(d(x, y) >= 1.0 / rep.C - 1e-12);
          CHECK(d(x, y) <= rep.C + 1e-12);
        }
    }
  }
}

TEST_CASE("condition_chain: iid chain with one pin keeps the original kernels") {
  ChainSpec spec = two_state(0.5, 5);
  const ConditionedChain cc = condition_chain(spec, {{2, 1}});
  REQUIRE(cc.blocks.size() == 2);
  for (const auto& b : cc.blocks)
    for (const auto& k : b.chain.kernels)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) CHECK(k(x, y) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cc.pinned_sum == 1);
}

TEST_CASE("condition_chain: bridge blocks reproduce the brute-force conditional law") {
  DeterministicRng rng(3);
  const ChainSpec spec = brute::random_spec(rng, 6, 3, 1);
  const PinSet pins = {{1, 2}, {4, 0}};
  const ConditionedChain cc = condition_chain(spec, pins);

  // reconstruct the joint law of the unpinned coordinates from the blocks
  const auto brute_joint = brute::conditional_joint(spec, pins);
  double tv = 0.0;
  for (const auto& [states, p_brute] : brute_joint) {
    double p_blocks = 1.0;
    size_t idx = 0;
    for (const auto& b : cc.blocks) {
      std::vector<int> block_states(states.begin() + static_cast<long>(idx),
                                    states.begin() + static_cast<long>(idx) + b.chain.horizon);
      idx += static_cast<size_t>(b.chain.horizon);
      double p = b.chain.initial[static_cast<size_t>(block_states[0])];
      for (int n = 0; n + 1 < b.chain.horizon; ++n)
        p *= b.chain.kernels[static_cast<size_t>(n)](block_states[static_cast<size_t>(n)],
                                                     block_states[static_cast<size_t>(n + 1)]);
      p_blocks *= p;
    }
    tv += std::abs(p_brute - p_blocks);
  }
  CHECK(tv / 2.0 < 1e-12);
  CHECK(cc.pin_probability == doctest::Approx(brute::pin_probability(spec, pins)).epsilon(1e-12));
}

TEST_CASE("condition_chain: impossible pin throws") {
  ChainSpec spec = two_state(0.5, 4, {1.0, 0.0});
  // make state 1 unreachable at step 1
  spec.kernels[0](0, 0) = 1.0;
  spec.kernels[0](0, 1) = 0.0;
  spec.kernels[0](1, 0) = 1.0;
  spec.kernels[0](1, 1) = 0.0;
  CHECK_THROWS_AS(condition_chain(spec, {{1, 1}}), ImpossiblePin);
}

TEST_CASE("conditional ellipticity: block kernels pass validation with constant <= C^6") {
  DeterministicRng rng(9);
  const ChainSpec spec = brute::random_spec(rng, 10, 3, 1);
  const double C = validate_chain(spec).C;
  const ConditionedChain cc = condition_chain(spec, {{3, 1}, {7, 2}});
  for (const auto& b : cc.blocks) {
    if (b.chain.horizon < 2) continue;
    const auto rep = validate_chain(b.chain);
    CHECK(rep.C <= std::pow(C, 6.0) * (1.0 + 1e-9));
  }
}

TEST_CASE("covariance decay: exact covariances dominated by the fitted envelope") {
  Scenario sc;
  sc.generator = "random-elliptic";
  sc.seed = 21;
  sc.eps0 = 0.4;
  sc.states = 3;
  const ChainSpec spec = generate_scenario(sc, 60);
  const auto rep = validate_chain(spec);
  REQUIRE(rep.mixing_fit.has_value());
  const auto [c1, delta] = *rep.mixing_fit;
  const auto mu = marginals(spec);

  // g_n(x) = f_n(x); |Cov| <= ||g||_inf^2 * sup-dev(k) <= ||g||^2 C1 delta^k
  const double gsup = 1.0;
  const int n = 10;
  Matrix prod = spec.kernels[static_cast<size_t>(n)];
  for (int k = 1; k <= 30; ++k) {
    if (k >= 2) prod = mat_mul(prod, spec.kernels[static_cast<size_t>(n + k - 1)]);
    double mean_a = 0.0, mean_b = 0.0, joint = 0.0;
    for (int x = 0; x < 3; ++x) {
      mean_a += mu[static_cast<size_t>(n)][static_cast<size_t>(x)] * spec.values[static_cast<size_t>(n)][static_cast<size_t>(x)];
      mean_b += mu[static_cast<size_t>(n + k)][static_cast<size_t>(x)] * spec.values[static_cast<size_t>(n + k)][static_cast<size_t>(x)];
    }
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y)
        joint += mu[static_cast<size_t>(n)][static_cast<size_t>(x)] * prod(x, y) *
                 spec.values[static_cast<size_t>(n)][static_cast<size_t>(x)] *
                 spec.values[static_cast<size_t>(n + k)][static_cast<size_t>(y)];
    const double cov = joint - mean_a * mean_b;
    if (k >= 2)
      CHECK(std::abs(cov) <=
            std::max(gsup * gsup * c1 * std::pow(delta, k) * (1.0 + 1e-9), 2.6e-14));
  }
}

TEST_CASE("chain spec JSON round trip preserves validation") {
  DeterministicRng rng(31);
  const ChainSpec spec = brute::random_spec(rng, 5, 3, 2);
  const std::string text = chain_to_json_text(spec);
  const ChainSpec back = chain_from_json_text(text);
  CHECK(back.horizon == spec.horizon);
  CHECK(back.initial == spec.initial);
  CHECK(back.values == spec.values);
  for (size_t n = 0; n < spec.kernels.size(); ++n) CHECK(back.kernels[n].a == spec.kernels[n].a);
}
