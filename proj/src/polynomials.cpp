#include "edgelab/polynomials.hpp"

#include "edgelab/errors.hpp"

namespace edgelab {

using Complex = std::complex<double>;

Complex Polynomial::eval(Complex x) const {
  Complex acc(0.0, 0.0);
  for (size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

void Polynomial::trim() {
  while (!c.empty() && c.back() == Complex(0.0, 0.0)) c.pop_back();
}

Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  out.c.resize(std::max(a.c.size(), b.c.size()), Complex(0.0, 0.0));
  for (size_t k = 0; k < a.c.size(); ++k) out.c[k] += a.c[k];
  for (size_t k = 0; k < b.c.size(); ++k) out.c[k] += b.c[k];
  out.trim();
  return out;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  if (a.c.empty() || b.c.empty()) return Polynomial();
  Polynomial out;
  out.c.assign(a.c.size() + b.c.size() - 1, Complex(0.0, 0.0));
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i] == Complex(0.0, 0.0)) continue;
    for (size_t j = 0; j < b.c.size(); ++j) out.c[i + j] += a.c[i] * b.c[j];
  }
  out.trim();
  return out;
}

Polynomial poly_scale(const Polynomial& a, Complex s) {
  Polynomial out = a;
  for (auto& v : out.c) v *= s;
  out.trim();
  return out;
}

Polynomial hermite(int k) {
  if (k < 0) throw ParameterOutOfRange("hermite degree must be >= 0");
  Polynomial prev = Polynomial::one();            // He_0
  if (k == 0) return prev;
  Polynomial cur({{0.0, 0.0}, {1.0, 0.0}});       // He_1 = x
  for (int n = 1; n < k; ++n) {
    // He_{n+1} = x He_n - n He_{n-1}
    Polynomial next;
    next.c.assign(cur.c.size() + 1, Complex(0.0, 0.0));
    for (size_t j = 0; j < cur.c.size(); ++j) next.c[j + 1] = cur.c[j];
    for (size_t j = 0; j < prev.c.size(); ++j) next.c[j] -= static_cast<double>(n) * prev.c[j];
    next.trim();
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::vector<std::vector<std::vector<int>>> partition_tuples(int r) {
  if (r < 1) throw ParameterOutOfRange("order r must be >= 1");
  std::vector<std::vector<std::vector<int>>> grouped(static_cast<size_t>(r));
  std::vector<int> tuple(static_cast<size_t>(r), 0);
  // depth-first over k_1..k_r with running weight sum_j j*k_j
  auto rec = [&](auto&& self, int j, int weight) -> void {
    if (j > r) {
      if (weight >= 1) grouped[static_cast<size_t>(weight - 1)].push_back(tuple);
      return;
    }
    for (int kj = 0; j * kj + weight <= r; ++kj) {
      tuple[static_cast<size_t>(j - 1)] = kj;
      self(self, j + 1, weight + j * kj);
    }
    tuple[static_cast<size_t>(j - 1)] = 0;
  };
  rec(rec, 1, 0);
  return grouped;
}

}  // namespace edgelab
