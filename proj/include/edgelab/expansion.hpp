#ifndef EDGELAB_EXPANSION_HPP
#define EDGELAB_EXPANSION_HPP

#include <complex>
#include <string>
#include <vector>

#include "edgelab/chain.hpp"
#include "edgelab/cumulants.hpp"
#include "edgelab/polynomials.hpp"

namespace edgelab {

/// Standard normal density.
double gaussian_density(double x);

/// Per-point correction data at a resonant frequency t: the coefficients
/// A_s of (1 + sum_j (h d)^j/j!)(1 + sum_j (h^2 u / 2)^j/j!) H(h) truncated
/// at w_r = 5r-2, and the assembled evaluator
///   k -> sigma^{-1} e^{-i t k} base g(khat) (1 + sum_s A_s (-i)^s He_s(khat))
/// with khat = (k - mean) / sigma.
struct ResonantContribution {
  double t = 0.0;
  std::complex<double> base;
  std::vector<std::complex<double>> A;  // A[s-1], s = 1..5r-2
  double mean = 0.0;
  double sigma = 0.0;
  double discarded_tail_max = 0.0;  // largest |coefficient| truncated past w_r
  Polynomial bracket;               // 1 + sum_s A_s (-i)^s He_s(x)

  std::complex<double> evaluate(long long k) const;
};

struct DropRule {
  double R = 10.0;
  bool enabled = false;
  bool use_nonmodal_statistic = false;  // default drives on the second-largest mass
};

/// Expansion table: P(S = k) ~ sum_{a,b} sigma^{-b} P_{a,b}(k_N) g(k_N) e^{2 pi i a k / J}
/// with k_N = (k - mean) / sigma.
struct GeneralizedExpansion {
  enum class SlotFlag { kept, dropped_by_mn_rule, degenerate_fallback };
  struct Term {
    long long a = 0;
    int b = 1;
    Polynomial p;
    SlotFlag flag = SlotFlag::kept;
  };

  int order = 1;
  int value_bound = 0;
  long long period = 1;  // J
  double mean = 0.0;
  double sigma = 1.0;
  std::vector<Term> terms;

  std::complex<double> evaluate(long long k) const;
  std::string to_json() const;
};

/// P_{1,N}..P_{r,N}: the sigma-graded pieces of
///   Q_{r,N}(t) = sum_{q=1..r} sigma^{-q} P_{q,N}(t),
/// assembled from the partition tuples over the jet derivatives.
std::vector<Polynomial> q_polynomial(const CumulantData& cums, int r);

/// 1 + Q_{r,N}(t) as a single polynomial (the char-side object of the
/// order-r expansion around 0).
Polynomial one_plus_q(const CumulantData& cums, int r);

/// H polynomial: partition weights applied to the derivatives of orders
/// 3..r+2 of the jet's tilde part.
Polynomial resonant_H(const ResonantJetData& jdata, int r);

/// A_s coefficients (s = 1..5r-2) of the d/u/H product; the truncated tail
/// is reported and checked against tail_budget_factor * sigma^{-(r+1)}.
ResonantContribution a_coefficients(const ResonantJetData& jdata, const Polynomial& H, int r,
                                    double tail_budget_factor = 10.0);

/// Full per-point pipeline: resonant jet -> H -> A coefficients.
ResonantContribution resonant_contribution(const ChainSpec& spec, double t, int r,
                                           const PinSet& pins = {});

/// Classical (a = 0) expansion table of order r obtained by Hermite
/// inversion of e^{-t^2/2}(1 + Q_{r,N}(t)).
GeneralizedExpansion classical_expansion(const ChainSpec& spec, int r);

/// Full trigonometric table with J = lcm(1..2K): the a = 0 slot from the
/// classical expansion plus one slot a = l*J/m per nonzero resonant point
/// 2*pi*l/m. Points whose modulus m satisfies the drop rule are zeroed and
/// flagged; degenerate points (|base| <= 1e-9) fall back to quadrature and
/// are flagged.
GeneralizedExpansion full_expansion(const ChainSpec& spec, int r, const DropRule& drop = {});

}  // namespace edgelab

#endif  // EDGELAB_EXPANSION_HPP
