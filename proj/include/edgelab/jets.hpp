#ifndef EDGELAB_JETS_HPP
#define EDGELAB_JETS_HPP

#include <complex>
#include <vector>

namespace edgelab {

/// Order-p truncated complex Taylor series: coeffs[k] = f^(k)(0) / k!.
/// Arithmetic is closed at fixed order; higher terms are truncated.
struct Jet {
  std::vector<std::complex<double>> c;

  Jet() = default;
  explicit Jet(int order) : c(static_cast<size_t>(order) + 1, {0.0, 0.0}) {}

  int order() const { return static_cast<int>(c.size()) - 1; }
  std::complex<double> coeff(int k) const { return c[static_cast<size_t>(k)]; }
  /// f^(k)(0) = k! * coeffs[k]
  std::complex<double> derivative(int k) const;

  static Jet constant(std::complex<double> v, int order);
  /// c0 + c1 * h at the given order
  static Jet linear(std::complex<double> c0, std::complex<double> c1, int order);

  std::complex<double> eval(std::complex<double> h) const;  // Horner
};

Jet jet_add(const Jet& a, const Jet& b);
Jet jet_sub(const Jet& a, const Jet& b);
Jet jet_scale(const Jet& a, std::complex<double> s);
Jet jet_mul(const Jet& a, const Jet& b);
/// exp of a truncated series (b_k = (1/k) sum_{j=1..k} j a_j b_{k-j})
Jet jet_exp(const Jet& a);
/// log of a truncated series; the constant term is the principal branch of
/// c0. Throws LogOfVanishingJet when |c0| <= 1e-13.
Jet jet_log(const Jet& a);

}  // namespace edgelab

#endif  // EDGELAB_JETS_HPP
