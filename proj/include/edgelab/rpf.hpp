#ifndef EDGELAB_RPF_HPP
#define EDGELAB_RPF_HPP

#include <complex>
#include <string>
#include <vector>

#include "edgelab/chain.hpp"

namespace edgelab {

/// Per-step phase table u_n(x); empty means all phases zero.
using PhaseTable = std::vector<std::vector<double>>;

/// Sequential eigen-data of the perturbed transfer operators
///   R_z^(j) g(x) = E[e^{i u_{j+1}(X_{j+1}) + z f_{j+1}(X_{j+1})} g(X_{j+1}) | X_j = x].
/// lambda is defined for steps 0..N-2 (1 at the last step by convention).
struct RpfTriplet {
  int step = 0;
  std::complex<double> lambda{1.0, 0.0};
  std::vector<std::complex<double>> h;   // function over step-j states
  std::vector<std::complex<double>> nu;  // functional's weights over step-j states
  std::string to_json() const;
};

/// One application of R_z^(j): g lives on step j+1 states, the result on
/// step j states. Throws StepOutOfRange.
std::vector<std::complex<double>> transfer_apply(const ChainSpec& spec, int j,
                                                 std::complex<double> z,
                                                 const std::vector<std::complex<double>>& g,
                                                 const PhaseTable& phases = {});

/// Constructive finite-horizon triplets: h from backward normalized
/// products seeded with the constant function at step N-1, nu from forward
/// normalized dual products seeded by the initial law, lambda from the
/// normalization ratios. Exact in the horizon interior; boundary
/// contamination decays geometrically. Throws NoContraction when the
/// normalized products fail to stabilize (|z| too large).
std::vector<RpfTriplet> rpf_triplets(const ChainSpec& spec, std::complex<double> z,
                                     const PhaseTable& phases = {});

struct RpfVerifyReport {
  std::vector<double> primal_residual;  // per step j: ||R h_{j+1} - lambda_j h_j||_inf
  std::vector<double> dual_residual;    // per step j: ||R* nu_j - lambda_j nu_{j+1}||_inf
  double max_primal_mid = 0.0;          // maxima over the middle third of the horizon
  double max_dual_mid = 0.0;
  double decay_ratio = 1.0;     // fitted geometric ratio of ||R^{j,n} q / lambda_{j,n} - nu(q) h||
  double decay_residual = 0.0;  // fit residual (rms in log space)
  int decay_points = 0;
  std::string to_csv() const;  // columns j,primal_residual,dual_residual
};

RpfVerifyReport verify_rpf(const ChainSpec& spec, std::complex<double> z,
                           const std::vector<RpfTriplet>& triplets, const PhaseTable& phases = {},
                           unsigned seed = 12345);

}  // namespace edgelab

#endif  // EDGELAB_RPF_HPP
