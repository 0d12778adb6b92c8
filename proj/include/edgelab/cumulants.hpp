#ifndef EDGELAB_CUMULANTS_HPP
#define EDGELAB_CUMULANTS_HPP

#include <complex>
#include <string>
#include <vector>

#include "edgelab/chain.hpp"
#include "edgelab/jets.hpp"

namespace edgelab {

/// Derivatives at 0 of the normalized log-characteristic function
///   L(h) = ln E[e^{i h (S - E S) / sigma}] + h^2 / 2
/// (conditional on pins when they were supplied; mean and sigma are then the
/// conditional ones, so the linear and quadratic terms still cancel).
struct CumulantData {
  double mean = 0.0;
  double sigma = 0.0;
  int order = 0;                                    // r
  std::vector<std::complex<double>> lambda_derivs;  // L^(j)(0) for j = 3..r+2
  std::string to_json() const;
};

/// Order-(r+2) jet of h -> ln E[e^{i(t + h/sigma) S} | pins] anchored at the
/// principal log of the base value; mean and sigma are the unconditional
/// statistics of S (they set the h/sigma scale and the recentering).
struct ResonantJetData {
  double t = 0.0;
  std::complex<double> base;  // E[e^{i t S} | pins]
  Jet log_jet;                // order r+2
  std::complex<double> d;     // L'(0) - i * mean / sigma
  std::complex<double> u;     // L''(0) + 1
  double mean = 0.0;
  double sigma = 0.0;
  std::string to_json() const;
};

/// Jet of h -> E[e^{i t S} e^{i h scale S} | pins] computed by per-state jet
/// propagation with per-step renormalization; value = jet * e^{log_scale}.
struct ScaledJet {
  Jet jet;
  double log_scale = 0.0;
};
ScaledJet propagate_char_jet(const ChainSpec& spec, double t, int order, double scale,
                             const PinSet& pins = {});

/// L^(j)(0) for j = 3..r+2 via jet propagation to order r+2 and jet_log.
/// Throws DegenerateVariance when sigma < 1e-9.
CumulantData cumulants_at_zero(const ChainSpec& spec, int r, const PinSet& pins = {});

/// Shifted log-characteristic jet at a resonant point, with the correction
/// scalars d and u. Throws ResonantDegenerate when |base| <= 1e-9 (the
/// contribution must then be evaluated by direct quadrature instead).
ResonantJetData resonant_jet(const ChainSpec& spec, double t, int r, const PinSet& pins = {});

}  // namespace edgelab

#endif  // EDGELAB_CUMULANTS_HPP
