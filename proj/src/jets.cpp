#include "edgelab/jets.hpp"

#include <cmath>

#include "edgelab/errors.hpp"

namespace edgelab {

using Complex = std::complex<double>;

Complex Jet::derivative(int k) const {
  double fact = 1.0;
  for (int j = 2; j <= k; ++j) fact *= j;
  return c[static_cast<size_t>(k)] * fact;
}

Jet Jet::constant(Complex v, int order) {
  Jet j(order);
  j.c[0] = v;
  return j;
}

Jet Jet::linear(Complex c0, Complex c1, int order) {
  Jet j(order);
  j.c[0] = c0;
  if (order >= 1) j.c[1] = c1;
  return j;
}

Complex Jet::eval(Complex h) const {
  Complex acc(0.0, 0.0);
  for (size_t k = c.size(); k-- > 0;) acc = acc * h + c[k];
  return acc;
}

Jet jet_add(const Jet& a, const Jet& b) {
  if (a.order() != b.order()) throw OrderMismatch("jet orders differ");
  Jet out(a.order());
  for (size_t k = 0; k < out.c.size(); ++k) out.c[k] = a.c[k] + b.c[k];
  return out;
}

Jet jet_sub(const Jet& a, const Jet& b) {
  if (a.order() != b.order()) throw OrderMismatch("jet orders differ");
  Jet out(a.order());
  for (size_t k = 0; k < out.c.size(); ++k) out.c[k] = a.c[k] - b.c[k];
  return out;
}

Jet jet_scale(const Jet& a, Complex s) {
  Jet out = a;
  for (auto& v : out.c) v *= s;
  return out;
}

Jet jet_mul(const Jet& a, const Jet& b) {
  if (a.order() != b.order()) throw OrderMismatch("jet orders differ");
  Jet out(a.order());
  const size_t n = out.c.size();
  for (size_t i = 0; i < n; ++i) {
    const Complex ai = a.c[i];
    if (ai == Complex(0.0, 0.0)) continue;
    for (size_t j = 0; i + j < n; ++j) out.c[i + j] += ai * b.c[j];
  }
  return out;
}

Jet jet_exp(const Jet& a) {
  Jet out(a.order());
  out.c[0] = std::exp(a.c[0]);
  const size_t n = out.c.size();
  for (size_t k = 1; k < n; ++k) {
    Complex acc(0.0, 0.0);
    for (size_t j = 1; j <= k; ++j) acc += static_cast<double>(j) * a.c[j] * out.c[k - j];
    out.c[k] = acc / static_cast<double>(k);
  }
  return out;
}

Jet jet_log(const Jet& a) {
  if (std::abs(a.c[0]) <= 1e-13) throw LogOfVanishingJet("log of jet with vanishing constant term");
  Jet out(a.order());
  out.c[0] = std::log(a.c[0]);
  const size_t n = out.c.size();
  for (size_t k = 1; k < n; ++k) {
    Complex acc = a.c[k];
    for (size_t j = 1; j < k; ++j) acc -= (static_cast<double>(j) / k) * out.c[j] * a.c[k - j];
    out.c[k] = acc / a.c[0];
  }
  return out;
}

}  // namespace edgelab
