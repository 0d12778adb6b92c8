#ifndef EDGELAB_POLYNOMIALS_HPP
#define EDGELAB_POLYNOMIALS_HPP

#include <complex>
#include <vector>

namespace edgelab {

/// Complex polynomial, coefficients in ascending degree. The canonical zero
/// polynomial has an empty coefficient vector.
struct Polynomial {
  std::vector<std::complex<double>> c;

  Polynomial() = default;
  explicit Polynomial(std::vector<std::complex<double>> coeffs) : c(std::move(coeffs)) { trim(); }

  int degree() const { return static_cast<int>(c.size()) - 1; }
  std::complex<double> coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c.size())) ? c[static_cast<size_t>(k)]
                                                      : std::complex<double>(0.0, 0.0);
  }
  std::complex<double> eval(std::complex<double> x) const;
  void trim();  // drop exactly-zero trailing coefficients

  static Polynomial one() {
    return Polynomial(std::vector<std::complex<double>>{{1.0, 0.0}});
  }
};

Polynomial poly_add(const Polynomial& a, const Polynomial& b);
Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
Polynomial poly_scale(const Polynomial& a, std::complex<double> s);

/// Probabilists' Hermite polynomial He_k via the recurrence
/// He_{k+1}(x) = x He_k(x) - k He_{k-1}(x).
Polynomial hermite(int k);

/// Tuples (k_1..k_r) of nonnegative integers, not all zero, with
/// sum_j j*k_j <= r, grouped by q = sum_j j*k_j: result[q-1] holds the
/// tuples with weight exactly q.
std::vector<std::vector<std::vector<int>>> partition_tuples(int r);

}  // namespace edgelab

#endif  // EDGELAB_POLYNOMIALS_HPP
