#ifndef EDGELAB_ORACLE_HPP
#define EDGELAB_ORACLE_HPP

#include <complex>
#include <string>
#include <vector>

#include "edgelab/chain.hpp"

namespace edgelab {

using Complex = std::complex<double>;

/// Exact lattice law of S_N: probs[j] = P(S_N = offset + j).
struct SumPmf {
  long long offset = 0;
  std::vector<double> probs;
  bool trimmed = false;  // set when sub-1e-300 mass was flushed to zero

  double at(long long k) const {
    const long long j = k - offset;
    if (j < 0 || j >= static_cast<long long>(probs.size())) return 0.0;
    return probs[static_cast<size_t>(j)];
  }
  long long min_support() const { return offset; }
  long long max_support() const { return offset + static_cast<long long>(probs.size()) - 1; }
  double total_mass() const;
  double mean() const;
  double variance() const;
  std::string to_csv() const;  // columns k,probability
};

/// Law of S_N mod m with its Fourier coefficients.
struct ResidueLaw {
  int modulus = 2;
  std::vector<double> masses;      // size m
  double tv_to_uniform = 0.0;      // (1/2) sum |mass - 1/m|
  std::vector<Complex> fourier;    // fourier[b] = sum_a masses[a] e^{2pi i a b / m}
  bool resonant = true;            // false when m exceeds 2K (allowed, flagged)
  std::string to_json() const;     // {m, masses, tv, fourier_re, fourier_im, resonant}
};

/// Exact law of S_N (conditional on pins when given) by dynamic programming
/// over (step, state, partial sum). Throws SupportOverflow when the support
/// would exceed support_cap entries.
SumPmf sum_pmf(const ChainSpec& spec, const PinSet& pins = {}, long long support_cap = 10'000'000);

/// Exact E[e^{i t S_N}] (conditional on pins when given) by complex vector
/// propagation.
Complex char_fn(const ChainSpec& spec, double t, const PinSet& pins = {});

/// char_fn on an equispaced grid t_j = 2 pi j / grid, j = 0..grid-1.
/// Single pass over the chain per grid point; used by invert_dft.
std::vector<Complex> char_fn_grid(const ChainSpec& spec, int grid, const PinSet& pins = {});

/// Recovers the law of S_N from characteristic-function samples on a grid of
/// at least 2*K*N+1 points (exact inverse DFT for a lattice variable).
SumPmf invert_dft(const ChainSpec& spec, const PinSet& pins = {},
                  long long support_cap = 10'000'000);

/// Composite Gauss-Legendre approximation of the oscillatory integral
///   int_{t_lo}^{t_hi} e^{-i t k} E[e^{i t S_N}] dt.
/// `nodes` requests a minimum node count; the routine raises it to resolve
/// the oscillation and refines until the estimated error is below
/// 1e-10 * (t_hi - t_lo). Throws NodeBudgetExceeded beyond node_cap.
Complex interval_contribution(const ChainSpec& spec, double t_lo, double t_hi, long long k,
                              int nodes = 0, int node_cap = 4'000'000);

/// Exact mod-m law of S_N (conditional on pins when given), its total
/// variation distance to uniform and all Fourier coefficients. Assembled
/// from char_fn at the m lattice frequencies, which is exact for an
/// integer-valued sum.
ResidueLaw residue_law(const ChainSpec& spec, int m, const PinSet& pins = {});

}  // namespace edgelab

#endif  // EDGELAB_ORACLE_HPP
