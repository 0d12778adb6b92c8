#include "edgelab/cumulants.hpp"

#include <algorithm>
#include <cmath>

#include "edgelab/errors.hpp"
#include "json.hpp"

namespace edgelab {

using Complex = std::complex<double>;

namespace {

// exp((i*t + i*scale*h) * f) as (scalar phase) * (jet in h)
Jet step_factor(double t, double scale, int f, int order) {
  Jet arg = Jet::linear(Complex(0.0, 0.0), Complex(0.0, scale * f), order);
  Jet e = jet_exp(arg);
  return jet_scale(e, std::polar(1.0, t * f));
}

// Per-state jet propagation over one (sub)chain; returns the total jet and
// the accumulated log scale from per-step renormalization.
ScaledJet propagate_block(const ChainSpec& spec, double t, int order, double scale) {
  std::vector<Jet> v(spec.states[0]);
  double log_scale = 0.0;
  for (int x = 0; x < spec.states[0]; ++x) {
    v[x] = jet_scale(step_factor(t, scale, spec.values[0][x], order), spec.initial[x]);
  }
  for (int n = 0; n + 1 < spec.horizon; ++n) {
    const Matrix& k = spec.kernels[n];
    const int sy = spec.states[n + 1];
    std::vector<Jet> w(sy, Jet(order));
    for (int x = 0; x < spec.states[n]; ++x) {
      for (int y = 0; y < sy; ++y) {
        const double p = k(x, y);
        if (p == 0.0) continue;
        for (int c = 0; c <= order; ++c) w[y].c[c] += p * v[x].c[c];
      }
    }
    for (int y = 0; y < sy; ++y)
      w[y] = jet_mul(w[y], step_factor(t, scale, spec.values[n + 1][y], order));

    // E[e^{theta S}] spans many orders of magnitude; keep coefficients in a
    // safe window and carry the scale in log form
    double mx = 0.0;
    for (const Jet& jy : w)
      for (const Complex& c : jy.c) mx = std::max(mx, std::abs(c));
    if (mx > 0.0 && (mx > 1e30 || mx < 1e-30)) {
      for (Jet& jy : w)
        for (Complex& c : jy.c) c /= mx;
      log_scale += std::log(mx);
    }
    v = std::move(w);
  }
  ScaledJet out;
  out.jet = Jet(order);
  for (const Jet& jx : v)
    for (int c = 0; c <= order; ++c) out.jet.c[c] += jx.c[c];
  out.log_scale = log_scale;
  return out;
}

}  // namespace

ScaledJet propagate_char_jet(const ChainSpec& spec, double t, int order, double scale,
                             const PinSet& pins) {
  spec.check_structure();
  if (pins.empty()) return propagate_block(spec, t, order, scale);

  const ConditionedChain cc = condition_chain(spec, pins);
  ScaledJet acc;
  acc.jet = step_factor(t, scale, static_cast<int>(cc.pinned_sum), order);
  acc.log_scale = 0.0;
  for (const auto& b : cc.blocks) {
    const ScaledJet bj = propagate_block(b.chain, t, order, scale);
    acc.jet = jet_mul(acc.jet, bj.jet);
    acc.log_scale += bj.log_scale;
    double mx = 0.0;
    for (const Complex& c : acc.jet.c) mx = std::max(mx, std::abs(c));
    if (mx > 0.0 && (mx > 1e30 || mx < 1e-30)) {
      for (Complex& c : acc.jet.c) c /= mx;
      acc.log_scale += std::log(mx);
    }
  }
  return acc;
}

CumulantData cumulants_at_zero(const ChainSpec& spec, int r, const PinSet& pins) {
  if (r < 1) throw ParameterOutOfRange("order r must be >= 1");
  const auto [mean, var] = mean_variance(spec, pins);
  if (var < 1e-18 || std::sqrt(var) < 1e-9) throw DegenerateVariance("sigma < 1e-9");
  const double sigma = std::sqrt(var);

  const int order = r + 2;
  ScaledJet sj = propagate_char_jet(spec, 0.0, order, 1.0 / sigma, pins);
  Jet L = jet_log(sj.jet);
  L.c[0] += sj.log_scale;
  // recenter: subtract i*mean*h/sigma, add h^2/2
  L.c[1] -= Complex(0.0, mean / sigma);
  L.c[2] += Complex(0.5, 0.0);

  CumulantData out;
  out.mean = mean;
  out.sigma = sigma;
  out.order = r;
  for (int j = 3; j <= order; ++j) out.lambda_derivs.push_back(L.derivative(j));
  return out;
}

ResonantJetData resonant_jet(const ChainSpec& spec, double t, int r, const PinSet& pins) {
  if (r < 1) throw ParameterOutOfRange("order r must be >= 1");
  const auto [mean, var] = mean_variance(spec);
  if (var < 1e-18 || std::sqrt(var) < 1e-9) throw DegenerateVariance("sigma < 1e-9");
  const double sigma = std::sqrt(var);

  const int order = r + 2;
  ScaledJet sj = propagate_char_jet(spec, t, order, 1.0 / sigma, pins);
  const double log_mag = sj.log_scale + std::log(std::abs(sj.jet.c[0]));
  if (!(log_mag > std::log(1e-9)))
    throw ResonantDegenerate("|E[e^{itS}]| <= 1e-9 at t=" + std::to_string(t) +
                             "; evaluate this point by quadrature");

  ResonantJetData out;
  out.t = t;
  out.base = sj.jet.c[0] * std::exp(sj.log_scale);
  out.log_jet = jet_log(sj.jet);
  out.log_jet.c[0] += sj.log_scale;
  out.mean = mean;
  out.sigma = sigma;
  out.d = out.log_jet.derivative(1) - Complex(0.0, mean / sigma);
  out.u = out.log_jet.derivative(2) + Complex(1.0, 0.0);
  return out;
}

std::string CumulantData::to_json() const {
  nlohmann::json j;
  j["mean"] = mean;
  j["sigma"] = sigma;
  j["order"] = order;
  nlohmann::json derivs = nlohmann::json::array();
  for (const auto& d : lambda_derivs) derivs.push_back({d.real(), d.imag()});
  j["lambda_derivs"] = std::move(derivs);
  return j.dump(2);
}

std::string ResonantJetData::to_json() const {
  nlohmann::json j;
  j["t"] = t;
  j["base"] = {base.real(), base.imag()};
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : log_jet.c) coeffs.push_back({c.real(), c.imag()});
  j["log_jet"] = std::move(coeffs);
  j["d"] = {d.real(), d.imag()};
  j["u"] = {u.real(), u.imag()};
  j["mean"] = mean;
  j["sigma"] = sigma;
  return j.dump(2);
}

}  // namespace edgelab
