#ifndef EDGELAB_SCENARIO_HPP
#define EDGELAB_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "edgelab/chain.hpp"

namespace edgelab {

/// Deterministic chain-family generator. Regimes:
///   random-elliptic : kernel entries drawn in [eps0, 1], rows normalized;
///                     scores uniform in [-K, K]
///   even-lattice    : scores in {0, 2} (K = 2), kernels as random-elliptic
///   sparse-odd      : scores {0, 1, 2}; P(score = 1 at step n) = min(c/n, 1/3)
///                     exactly (the odd column is state-independent)
struct Scenario {
  std::string name;
  std::string generator;  // one of the regimes above
  std::uint64_t seed = 1;
  double eps0 = 0.5;
  int states = 3;
  int value_bound = 1;          // K (forced to 2 by even-lattice / sparse-odd)
  double c = 0.5;               // sparse-odd intensity
  std::vector<int> ladder = {64, 256, 1024, 4096};
  std::string regime_tag;       // aperiodic | periodic | sparse-odd | conditioned
};

/// Instantiate the family at horizon N. Deterministic given (scenario, N).
/// Throws ParameterOutOfRange for parameters outside documented ranges.
ChainSpec generate_scenario(const Scenario& scenario, int N);

/// Portable uniform doubles from splitmix/xorshift-free std::mt19937_64 with
/// explicit bit mapping, so outputs are identical across platforms.
struct DeterministicRng {
  explicit DeterministicRng(std::uint64_t seed);
  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  int uniform_int(int lo, int hi);       // inclusive
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

}  // namespace edgelab

#endif  // EDGELAB_SCENARIO_HPP
