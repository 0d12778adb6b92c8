// Test-only oracles: full path enumeration over small chains. Independent of
// the library's propagation code paths on purpose.
#ifndef EDGELAB_TESTS_BRUTE_FORCE_HPP
#define EDGELAB_TESTS_BRUTE_FORCE_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "edgelab/chain.hpp"
#include "edgelab/scenario.hpp"

namespace brute {

struct Path {
  std::vector<int> states;
  double prob = 0.0;
  long long score = 0;
};

inline void enumerate_paths(const edgelab::ChainSpec& spec,
                            const std::function<void(const Path&)>& visit) {
  Path path;
  path.states.resize(static_cast<size_t>(spec.horizon));
  std::function<void(int, double, long long)> rec = [&](int n, double p, long long s) {
    if (p == 0.0) return;
    if (n == spec.horizon) {
      path.prob = p;
      path.score = s;
      visit(path);
      return;
    }
    for (int x = 0; x < spec.states[static_cast<size_t>(n)]; ++x) {
      const double step_p =
          n == 0 ? spec.initial[static_cast<size_t>(x)]
                 : spec.kernels[static_cast<size_t>(n - 1)](path.states[static_cast<size_t>(n - 1)], x);
      if (step_p == 0.0) continue;
      path.states[static_cast<size_t>(n)] = x;
      rec(n + 1, p * step_p, s + spec.values[static_cast<size_t>(n)][static_cast<size_t>(x)]);
    }
  };
  rec(0, 1.0, 0);
}

inline std::map<long long, double> pmf(const edgelab::ChainSpec& spec,
                                       const edgelab::PinSet& pins = {}) {
  std::map<long long, double> out;
  double mass = 0.0;
  enumerate_paths(spec, [&](const Path& p) {
    for (const auto& [step, state] : pins)
      if (p.states[static_cast<size_t>(step)] != state) return;
    out[p.score] += p.prob;
    mass += p.prob;
  });
  if (mass > 0.0)
    for (auto& [k, v] : out) v /= mass;
  return out;
}

inline std::complex<double> char_fn(const edgelab::ChainSpec& spec, double t,
                                    const edgelab::PinSet& pins = {}) {
  std::complex<double> acc(0.0, 0.0);
  double mass = 0.0;
  enumerate_paths(spec, [&](const Path& p) {
    for (const auto& [step, state] : pins)
      if (p.states[static_cast<size_t>(step)] != state) return;
    acc += p.prob * std::polar(1.0, t * static_cast<double>(p.score));
    mass += p.prob;
  });
  return mass > 0.0 ? acc / mass : std::complex<double>(0.0, 0.0);
}

// joint conditional law of the unpinned coordinates given the pins
inline std::map<std::vector<int>, double> conditional_joint(const edgelab::ChainSpec& spec,
                                                            const edgelab::PinSet& pins) {
  std::map<std::vector<int>, double> out;
  double mass = 0.0;
  enumerate_paths(spec, [&](const Path& p) {
    for (const auto& [step, state] : pins)
      if (p.states[static_cast<size_t>(step)] != state) return;
    std::vector<int> unpinned;
    for (int n = 0; n < spec.horizon; ++n)
      if (pins.find(n) == pins.end()) unpinned.push_back(p.states[static_cast<size_t>(n)]);
    out[unpinned] += p.prob;
    mass += p.prob;
  });
  if (mass > 0.0)
    for (auto& [k, v] : out) v /= mass;
  return out;
}

inline double pin_probability(const edgelab::ChainSpec& spec, const edgelab::PinSet& pins) {
  double mass = 0.0;
  enumerate_paths(spec, [&](const Path& p) {
    for (const auto& [step, state] : pins)
      if (p.states[static_cast<size_t>(step)] != state) return;
    mass += p.prob;
  });
  return mass;
}

// small random spec helper shared by tests
inline edgelab::ChainSpec random_spec(edgelab::DeterministicRng& rng, int N, int states, int K) {
  edgelab::ChainSpec spec;
  spec.horizon = N;
  spec.states.assign(static_cast<size_t>(N), states);
  spec.value_bound = K;
  spec.initial.assign(static_cast<size_t>(states), 0.0);
  double mass = 0.0;
  for (double& v : spec.initial) {
    v = rng.uniform(0.1, 1.0);
    mass += v;
  }
  for (double& v : spec.initial) v /= mass;
  for (int n = 0; n + 1 < N; ++n) {
    edgelab::Matrix k(states, states);
    for (int x = 0; x < states; ++x) {
      double row = 0.0;
      for (int y = 0; y < states; ++y) {
        k(x, y) = rng.uniform(0.1, 1.0);
        row += k(x, y);
      }
      for (int y = 0; y < states; ++y) k(x, y) /= row;
    }
    spec.kernels.push_back(std::move(k));
  }
  spec.values.resize(static_cast<size_t>(N));
  for (int n = 0; n < N; ++n) {
    spec.values[static_cast<size_t>(n)].resize(static_cast<size_t>(states));
    for (int x = 0; x < states; ++x)
      spec.values[static_cast<size_t>(n)][static_cast<size_t>(x)] = rng.uniform_int(-K, K);
  }
  return spec;
}

}  // namespace brute

#endif  // EDGELAB_TESTS_BRUTE_FORCE_HPP
