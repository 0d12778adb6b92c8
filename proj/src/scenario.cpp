#include "edgelab/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "edgelab/errors.hpp"

namespace edgelab {

DeterministicRng::DeterministicRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

std::uint64_t DeterministicRng::next() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double DeterministicRng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double DeterministicRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int DeterministicRng::uniform_int(int lo, int hi) {
  return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
}

namespace {

void fill_random_kernels(ChainSpec& spec, DeterministicRng& rng, double eps0) {
  spec.initial.assign(static_cast<size_t>(spec.states[0]), 0.0);
  double mass = 0.0;
  for (double& v : spec.initial) {
    v = rng.uniform(eps0, 1.0);
    mass += v;
  }
  for (double& v : spec.initial) v /= mass;
  for (int n = 0; n + 1 < spec.horizon; ++n) {
    Matrix k(spec.states[n], spec.states[n + 1]);
    for (int x = 0; x < k.rows; ++x) {
      double row = 0.0;
      for (int y = 0; y < k.cols; ++y) {
        k(x, y) = rng.uniform(eps0, 1.0);
        row += k(x, y);
      }
      for (int y = 0; y < k.cols; ++y) k(x, y) /= row;
    }
    spec.kernels.push_back(std::move(k));
  }
}

}  // namespace

ChainSpec generate_scenario(const Scenario& scenario, int N) {
  if (N < 2) throw ParameterOutOfRange("scenario horizon must be >= 2");
  if (scenario.states < 2 || scenario.states > ChainSpec::kDefaultMaxStates)
    throw ParameterOutOfRange("scenario state count out of range");
  if (!(scenario.eps0 > 0.0) || scenario.eps0 > 1.0)
    throw ParameterOutOfRange("eps0 must be in (0, 1]");

  DeterministicRng rng(scenario.seed * 1000003ULL + static_cast<std::uint64_t>(N));

  ChainSpec spec;
  spec.horizon = N;
  spec.states.assign(static_cast<size_t>(N), scenario.states);

  if (scenario.generator == "random-elliptic") {
    if (scenario.value_bound < 1) throw ParameterOutOfRange("K must be >= 1");
    spec.value_bound = scenario.value_bound;
    fill_random_kernels(spec, rng, scenario.eps0);
    spec.values.resize(static_cast<size_t>(N));
    for (int n = 0; n < N; ++n) {
      auto& row = spec.values[static_cast<size_t>(n)];
      row.resize(static_cast<size_t>(scenario.states));
      bool varied = false;
      for (int x = 0; x < scenario.states; ++x) {
        row[static_cast<size_t>(x)] = rng.uniform_int(-spec.value_bound, spec.value_bound);
        if (row[static_cast<size_t>(x)] != row[0]) varied = true;
      }
      // keep per-step variance alive so sigma grows linearly in sqrt(N)
      if (!varied) row[0] = row[0] == spec.value_bound ? row[0] - 1 : row[0] + 1;
    }
    return spec;
  }

  if (scenario.generator == "even-lattice") {
    spec.value_bound = 2;
    fill_random_kernels(spec, rng, scenario.eps0);
    spec.values.resize(static_cast<size_t>(N));
    for (int n = 0; n < N; ++n) {
      auto& row = spec.values[static_cast<size_t>(n)];
      row.resize(static_cast<size_t>(scenario.states));
      bool varied = false;
      for (int x = 0; x < scenario.states; ++x) {
        row[static_cast<size_t>(x)] = 2 * rng.uniform_int(0, 1);
        if (row[static_cast<size_t>(x)] != row[0]) varied = true;
      }
      if (!varied) row[0] = 2 - row[0];
    }
    return spec;
  }

  if (scenario.generator == "sparse-odd") {
    if (!(scenario.c > 0.0)) throw ParameterOutOfRange("sparse-odd intensity c must be > 0");
    spec.value_bound = 2;
    spec.states.assign(static_cast<size_t>(N), 3);
    spec.values.assign(static_cast<size_t>(N), {0, 1, 2});
    auto podd = [&](int n) { return std::min(scenario.c / (n + 1.0), 1.0 / 3.0); };  // step n, 0-based
    spec.initial = {0.0, podd(0), 0.0};
    {
      const double w = rng.uniform(0.3, 0.7);
      spec.initial[0] = (1.0 - podd(0)) * w;
      spec.initial[2] = (1.0 - podd(0)) * (1.0 - w);
    }
    for (int n = 0; n + 1 < N; ++n) {
      // the odd column is state-independent, so 1-indicators across steps
      // are exactly independent with P = min(c/n, 1/3)
      Matrix k(3, 3);
      const double p = podd(n + 1);
      for (int x = 0; x < 3; ++x) {
        const double w = rng.uniform(0.3, 0.7);
        k(x, 0) = (1.0 - p) * w;
        k(x, 1) = p;
        k(x, 2) = (1.0 - p) * (1.0 - w);
      }
      spec.kernels.push_back(std::move(k));
    }
    return spec;
  }

  throw ParameterOutOfRange("unknown scenario generator: " + scenario.generator);
}

}  // namespace edgelab
