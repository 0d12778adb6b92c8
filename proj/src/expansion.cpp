#include "edgelab/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "edgelab/errors.hpp"
#include "edgelab/resonance.hpp"
#include "json.hpp"

namespace edgelab {

using Complex = std::complex<double>;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex minus_i_pow(int s) {
  switch (((s % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Truncated exp of the tail sum_{j>=3} derivs[j-3] h^j / j!: the partition
// sum over tuples with sum_j j*k_j <= r, plain powers of h (the complex
// derivatives already carry the i factors).
Polynomial exp_tail_truncation(const std::vector<Complex>& derivs_from_3, int r) {
  Polynomial out = Polynomial::one();
  const auto grouped = partition_tuples(r);
  for (const auto& group : grouped) {
    for (const auto& tuple : group) {
      Complex weight(1.0, 0.0);
      int degree = 0;
      for (int j = 1; j <= r; ++j) {
        const int kj = tuple[static_cast<size_t>(j - 1)];
        if (kj == 0) continue;
        const Complex factor = derivs_from_3[static_cast<size_t>(j - 1)] / factorial(j + 2);
        for (int rep = 0; rep < kj; ++rep) weight *= factor;
        weight /= factorial(kj);
        degree += (j + 2) * kj;
      }
      Polynomial mono;
      mono.c.assign(static_cast<size_t>(degree) + 1, Complex(0.0, 0.0));
      mono.c.back() = weight;
      out = poly_add(out, mono);
    }
  }
  return out;
}

// sum_D p_D h^D  ->  sum_D p_D (-i)^D He_D(x), the Fourier image of the
// polynomial against the Gaussian.
Polynomial hermite_transform(const Polynomial& p) {
  Polynomial out;
  for (int d = 0; d <= p.degree(); ++d) {
    const Complex pd = p.coeff(d);
    if (pd == Complex(0.0, 0.0)) continue;
    out = poly_add(out, poly_scale(hermite(d), pd * minus_i_pow(d)));
  }
  return out;
}

Polynomial conj_poly(const Polynomial& p) {
  Polynomial out = p;
  for (auto& v : out.c) v = std::conj(v);
  return out;
}

}  // namespace

double gaussian_density(double x) { return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi); }

std::vector<Polynomial> q_polynomial(const CumulantData& cums, int r) {
  if (r < 1) throw ParameterOutOfRange("order r must be >= 1");
  if (static_cast<int>(cums.lambda_derivs.size()) < r)
    throw OrderMismatch("cumulant data has derivatives up to order " +
                        std::to_string(cums.lambda_derivs.size() + 2) + ", need " +
                        std::to_string(r + 2));

  // per-factor rescale keeps every weight O(1): sigma^q = prod_j sigma^{j k_j}
  std::vector<Complex> scaled(static_cast<size_t>(r));
  for (int j = 1; j <= r; ++j)
    scaled[static_cast<size_t>(j - 1)] =
        cums.lambda_derivs[static_cast<size_t>(j - 1)] * std::pow(cums.sigma, j);

  std::vector<Polynomial> out(static_cast<size_t>(r));
  const auto grouped = partition_tuples(r);
  for (int q = 1; q <= r; ++q) {
    Polynomial pq;
    for (const auto& tuple : grouped[static_cast<size_t>(q - 1)]) {
      Complex weight(1.0, 0.0);
      int degree = 0;
      for (int j = 1; j <= r; ++j) {
        const int kj = tuple[static_cast<size_t>(j - 1)];
        if (kj == 0) continue;
        const Complex factor = scaled[static_cast<size_t>(j - 1)] / factorial(j + 2);
        for (int rep = 0; rep < kj; ++rep) weight *= factor;
        weight /= factorial(kj);
        degree += (j + 2) * kj;
      }
      Polynomial mono;
      mono.c.assign(static_cast<size_t>(degree) + 1, Complex(0.0, 0.0));
      mono.c.back() = weight;
      pq = poly_add(pq, mono);
    }
    out[static_cast<size_t>(q - 1)] = std::move(pq);
  }
  return out;
}

Polynomial one_plus_q(const CumulantData& cums, int r) {
  if (static_cast<int>(cums.lambda_derivs.size()) < r)
    throw OrderMismatch("cumulant data too short for order r");
  return exp_tail_truncation(cums.lambda_derivs, r);
}

Polynomial resonant_H(const ResonantJetData& jdata, int r) {
  if (jdata.log_jet.order() < r + 2)
    throw OrderMismatch("resonant jet order below r+2");
  std::vector<Complex> derivs;
  for (int j = 3; j <= r + 2; ++j) derivs.push_back(jdata.log_jet.derivative(j));
  return exp_tail_truncation(derivs, r);
}

ResonantContribution a_coefficients(const ResonantJetData& jdata, const Polynomial& H, int r,
                                    double tail_budget_factor) {
  if (r < 1) throw ParameterOutOfRange("order r must be >= 1");
  if (jdata.log_jet.order() < r + 2) throw OrderMismatch("resonant jet order below r+2");
  const int w = 5 * r - 2;

  Polynomial pd = Polynomial::one();
  {
    Complex term(1.0, 0.0);
    for (int j = 1; j <= 3 * r - 2; ++j) {
      term *= jdata.d / static_cast<double>(j);
      Polynomial mono;
      mono.c.assign(static_cast<size_t>(j) + 1, Complex(0.0, 0.0));
      mono.c.back() = term;
      pd = poly_add(pd, mono);
    }
  }
  Polynomial pu = Polynomial::one();
  {
    Complex term(1.0, 0.0);
    for (int j = 1; j <= r; ++j) {
      term *= jdata.u / (2.0 * j);
      Polynomial mono;
      mono.c.assign(static_cast<size_t>(2 * j) + 1, Complex(0.0, 0.0));
      mono.c.back() = term;
      pu = poly_add(pu, mono);
    }
  }
  const Polynomial prod = poly_mul(poly_mul(pd, pu), H);

  ResonantContribution rc;
  rc.t = jdata.t;
  rc.base = jdata.base;
  rc.mean = jdata.mean;
  rc.sigma = jdata.sigma;
  for (int s = 1; s <= w; ++s) rc.A.push_back(prod.coeff(s));
  for (int s = w + 1; s <= prod.degree(); ++s)
    rc.discarded_tail_max = std::max(rc.discarded_tail_max, std::abs(prod.coeff(s)));

  const double budget = tail_budget_factor * std::pow(jdata.sigma, -(r + 1));
  if (rc.discarded_tail_max > budget)
    throw TailBudgetExceeded("discarded tail coefficient " +
                             std::to_string(rc.discarded_tail_max) + " exceeds budget " +
                             std::to_string(budget) + "; expansion order too high for this N");

  rc.bracket = Polynomial::one();
  for (int s = 1; s <= w; ++s)
    rc.bracket = poly_add(rc.bracket,
                          poly_scale(hermite(s), rc.A[static_cast<size_t>(s - 1)] * minus_i_pow(s)));
  return rc;
}

Complex ResonantContribution::evaluate(long long k) const {
  const double khat = (static_cast<double>(k) - mean) / sigma;
  const Complex phase = std::polar(1.0, -t * static_cast<double>(k));
  return phase * base * gaussian_density(khat) * bracket.eval(Complex(khat, 0.0)) / sigma;
}

ResonantContribution resonant_contribution(const ChainSpec& spec, double t, int r,
                                           const PinSet& pins) {
  const ResonantJetData jdata = resonant_jet(spec, t, r, pins);
  const Polynomial H = resonant_H(jdata, r);
  return a_coefficients(jdata, H, r);
}

GeneralizedExpansion classical_expansion(const ChainSpec& spec, int r) {
  const CumulantData cums = cumulants_at_zero(spec, r);
  const auto ps = q_polynomial(cums, r);

  GeneralizedExpansion ge;
  ge.order = r;
  ge.value_bound = spec.value_bound;
  ge.period = 1;
  for (int m = 1; m <= 2 * spec.value_bound; ++m) ge.period = std::lcm(ge.period, (long long)m);
  ge.mean = cums.mean;
  ge.sigma = cums.sigma;

  for (int b = 1; b <= r; ++b) {
    Polynomial p =
        (b == 1) ? Polynomial::one() : hermite_transform(ps[static_cast<size_t>(b - 2)]);
    if (b == r) {
      // fold the q = r piece (one sigma-order beyond the table depth) into
      // the last slot so the rendered sum equals the full order-r bracket
      p = poly_add(p, poly_scale(hermite_transform(ps[static_cast<size_t>(r - 1)]),
                                 Complex(1.0 / cums.sigma, 0.0)));
    }
    ge.terms.push_back({0, b, std::move(p), GeneralizedExpansion::SlotFlag::kept});
  }
  return ge;
}

GeneralizedExpansion full_expansion(const ChainSpec& spec, int r, const DropRule& drop) {
  GeneralizedExpansion ge = classical_expansion(spec, r);

  const double variance = ge.sigma * ge.sigma;
  std::vector<double> stat_by_m(static_cast<size_t>(2 * spec.value_bound) + 1, 0.0);
  double threshold = 0.0;
  if (drop.enabled) {
    if (variance <= 1.0) throw DegenerateVariance("drop rule needs V_N > 1");
    threshold = drop.R * std::log(variance);
    for (int m = 2; m <= 2 * spec.value_bound; ++m) {
      const ResidueProfile prof = residue_profile(spec, m);
      if (drop.use_nonmodal_statistic) {
        double s = 0.0;
        for (int n = 0; n < spec.horizon; ++n)
          s += 1.0 -
               prof.step_laws[static_cast<size_t>(n)][static_cast<size_t>(
                   prof.modal[static_cast<size_t>(n)])];
        stat_by_m[static_cast<size_t>(m)] = s;
      } else {
        stat_by_m[static_cast<size_t>(m)] = prof.total;
      }
    }
  }

  for (const ResonantPoint& pt : resonant_points(spec.value_bound)) {
    if (pt.l == 0) continue;
    const long long slot = pt.l * (ge.period / pt.m);
    GeneralizedExpansion::Term term;
    term.a = slot;
    term.b = 1;
    if (drop.enabled && stat_by_m[static_cast<size_t>(pt.m)] >= threshold) {
      term.flag = GeneralizedExpansion::SlotFlag::dropped_by_mn_rule;
      ge.terms.push_back(std::move(term));
      continue;
    }
    try {
      const ResonantContribution rc = resonant_contribution(spec, pt.t, r);
      // the evaluator pairs slot a with e^{+2 pi i a k / J}; the point's own
      // phase is e^{-i t k}, so the slot carries the conjugate bracket
      term.p = conj_poly(poly_scale(rc.bracket, rc.base));
      term.flag = GeneralizedExpansion::SlotFlag::kept;
    } catch (const ResonantDegenerate&) {
      term.flag = GeneralizedExpansion::SlotFlag::degenerate_fallback;
    }
    ge.terms.push_back(std::move(term));
  }
  return ge;
}

Complex GeneralizedExpansion::evaluate(long long k) const {
  const double kn = (static_cast<double>(k) - mean) / sigma;
  const double g = gaussian_density(kn);
  Complex acc(0.0, 0.0);
  for (const Term& term : terms) {
    if (term.p.c.empty()) continue;
    const long long rem = ((term.a * k) % period + period) % period;
    const Complex phase = std::polar(1.0, kTwoPi * static_cast<double>(rem) / static_cast<double>(period));
    acc += phase * term.p.eval(Complex(kn, 0.0)) * std::pow(sigma, -term.b) * g;
  }
  return acc;
}

std::string GeneralizedExpansion::to_json() const {
  nlohmann::json j;
  j["r"] = order;
  j["K"] = value_bound;
  j["J"] = period;
  j["a_N"] = mean;
  j["sigma_N"] = sigma;
  nlohmann::json terms_json = nlohmann::json::array();
  for (const Term& term : terms) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : term.p.c) coeffs.push_back({c.real(), c.imag()});
    const char* flag = term.flag == SlotFlag::kept ? "kept"
                       : term.flag == SlotFlag::dropped_by_mn_rule ? "dropped-by-M_N-rule"
                                                                   : "degenerate-fallback";
    terms_json.push_back(
        {{"a", term.a}, {"b", term.b}, {"coeffs", std::move(coeffs)}, {"flag", flag}});
  }
  j["terms"] = std::move(terms_json);
  return j.dump(2);
}

}  // namespace edgelab
