#include "edgelab/rpf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "edgelab/errors.hpp"
#include "json.hpp"

namespace edgelab {

using Complex = std::complex<double>;

namespace {

Complex step_weight(const ChainSpec& spec, const PhaseTable& phases, int step, int state,
                    Complex z) {
  double phase = 0.0;
  if (!phases.empty()) phase = phases[static_cast<size_t>(step)][static_cast<size_t>(state)];
  return std::exp(Complex(0.0, phase) + z * static_cast<double>(spec.values[step][state]));
}

double sup_norm(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const Complex& c : v) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

std::vector<Complex> transfer_apply(const ChainSpec& spec, int j, Complex z,
                                    const std::vector<Complex>& g, const PhaseTable& phases) {
  spec.check_structure();
  if (j < 0 || j + 1 >= spec.horizon) throw StepOutOfRange("transfer step out of range");
  if (static_cast<int>(g.size()) != spec.states[j + 1])
    throw StepOutOfRange("argument dimension does not match step j+1");
  if (!phases.empty() && static_cast<int>(phases.size()) != spec.horizon)
    throw ParameterOutOfRange("phase table size mismatch");

  const Matrix& k = spec.kernels[j];
  std::vector<Complex> weighted(g.size());
  for (size_t y = 0; y < g.size(); ++y)
    weighted[y] = g[y] * step_weight(spec, phases, j + 1, static_cast<int>(y), z);
  std::vector<Complex> out(static_cast<size_t>(spec.states[j]), Complex(0.0, 0.0));
  for (int x = 0; x < spec.states[j]; ++x) {
    Complex acc(0.0, 0.0);
    for (int y = 0; y < spec.states[j + 1]; ++y) acc += k(x, y) * weighted[static_cast<size_t>(y)];
    out[static_cast<size_t>(x)] = acc;
  }
  return out;
}

std::vector<RpfTriplet> rpf_triplets(const ChainSpec& spec, Complex z, const PhaseTable& phases) {
  spec.check_structure();
  const int N = spec.horizon;

  // backward normalized products, seeded with the constant function
  std::vector<std::vector<Complex>> hraw(static_cast<size_t>(N));
  hraw[static_cast<size_t>(N - 1)].assign(static_cast<size_t>(spec.states[N - 1]),
                                          Complex(1.0, 0.0));
  for (int j = N - 2; j >= 0; --j) {
    auto v = transfer_apply(spec, j, z, hraw[static_cast<size_t>(j + 1)], phases);
    const double norm = sup_norm(v);
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw NoContraction("backward product vanished or blew up at step " + std::to_string(j));
    for (Complex& c : v) c /= norm;
    hraw[static_cast<size_t>(j)] = std::move(v);
  }

  // forward normalized dual products, seeded by the initial law; each step
  // renormalized so that nu_j(1) = 1
  std::vector<std::vector<Complex>> nu(static_cast<size_t>(N));
  nu[0].assign(spec.initial.begin(), spec.initial.end());
  for (int j = 0; j + 1 < N; ++j) {
    const Matrix& k = spec.kernels[j];
    std::vector<Complex> w(static_cast<size_t>(spec.states[j + 1]), Complex(0.0, 0.0));
    for (int x = 0; x < spec.states[j]; ++x) {
      const Complex wx = nu[static_cast<size_t>(j)][static_cast<size_t>(x)];
      if (wx == Complex(0.0, 0.0)) continue;
      for (int y = 0; y < spec.states[j + 1]; ++y) w[static_cast<size_t>(y)] += wx * k(x, y);
    }
    Complex mass(0.0, 0.0);
    for (int y = 0; y < spec.states[j + 1]; ++y) {
      w[static_cast<size_t>(y)] *= step_weight(spec, phases, j + 1, y, z);
      mass += w[static_cast<size_t>(y)];
    }
    if (std::abs(mass) < 1e-12 * std::max(1.0, sup_norm(w)))
      throw NoContraction("dual product mass vanished at step " + std::to_string(j) +
                          " (|z| too large)");
    for (Complex& c : w) c /= mass;
    nu[static_cast<size_t>(j + 1)] = std::move(w);
  }

  std::vector<RpfTriplet> out(static_cast<size_t>(N));
  for (int j = 0; j < N; ++j) {
    Complex scale(0.0, 0.0);  // nu_j(hraw_j)
    for (int x = 0; x < spec.states[j]; ++x)
      scale += nu[static_cast<size_t>(j)][static_cast<size_t>(x)] *
               hraw[static_cast<size_t>(j)][static_cast<size_t>(x)];
    if (std::abs(scale) < 1e-12)
      throw NoContraction("nu(h) vanished at step " + std::to_string(j) + " (|z| too large)");
    out[static_cast<size_t>(j)].step = j;
    out[static_cast<size_t>(j)].nu = nu[static_cast<size_t>(j)];
    out[static_cast<size_t>(j)].h = hraw[static_cast<size_t>(j)];
    for (Complex& c : out[static_cast<size_t>(j)].h) c /= scale;
  }
  for (int j = 0; j + 1 < N; ++j) {
    const auto rh = transfer_apply(spec, j, z, out[static_cast<size_t>(j + 1)].h, phases);
    Complex lambda(0.0, 0.0);
    for (int x = 0; x < spec.states[j]; ++x)
      lambda += out[static_cast<size_t>(j)].nu[static_cast<size_t>(x)] * rh[static_cast<size_t>(x)];
    out[static_cast<size_t>(j)].lambda = lambda;
  }

  // stabilization check on the horizon interior
  const int lo = N / 3, hi = std::max(lo + 1, 2 * N / 3);
  double worst = 0.0;
  for (int j = lo; j < std::min(hi, N - 1); ++j) {
    const auto rh = transfer_apply(spec, j, z, out[static_cast<size_t>(j + 1)].h, phases);
    double res = 0.0;
    for (int x = 0; x < spec.states[j]; ++x)
      res = std::max(res, std::abs(rh[static_cast<size_t>(x)] -
                                   out[static_cast<size_t>(j)].lambda *
                                       out[static_cast<size_t>(j)].h[static_cast<size_t>(x)]));
    worst = std::max(worst, res);
  }
  if (worst > 1e-3)
    throw NoContraction("normalized products failed to stabilize; last residual " +
                        std::to_string(worst));
  return out;
}

RpfVerifyReport verify_rpf(const ChainSpec& spec, Complex z,
                           const std::vector<RpfTriplet>& triplets, const PhaseTable& phases,
                           unsigned seed) {
  spec.check_structure();
  const int N = spec.horizon;
  RpfVerifyReport rep;
  rep.primal_residual.assign(static_cast<size_t>(N), 0.0);
  rep.dual_residual.assign(static_cast<size_t>(N), 0.0);

  for (int j = 0; j + 1 < N; ++j) {
    const auto& tj = triplets[static_cast<size_t>(j)];
    const auto& tn = triplets[static_cast<size_t>(j + 1)];
    const auto rh = transfer_apply(spec, j, z, tn.h, phases);
    double res = 0.0;
    for (int x = 0; x < spec.states[j]; ++x)
      res = std::max(res,
                     std::abs(rh[static_cast<size_t>(x)] - tj.lambda * tj.h[static_cast<size_t>(x)]));
    rep.primal_residual[static_cast<size_t>(j)] = res;

    // dual: (R^* nu_j)(y) = e^{psi_{j+1}(y)} sum_x nu_j(x) P(x,y)
    const Matrix& k = spec.kernels[j];
    double dres = 0.0;
    for (int y = 0; y < spec.states[j + 1]; ++y) {
      Complex acc(0.0, 0.0);
      for (int x = 0; x < spec.states[j]; ++x) acc += tj.nu[static_cast<size_t>(x)] * k(x, y);
      acc *= step_weight(spec, phases, j + 1, y, z);
      dres = std::max(dres, std::abs(acc - tj.lambda * tn.nu[static_cast<size_t>(y)]));
    }
    rep.dual_residual[static_cast<size_t>(j)] = dres;
  }

  const int lo = N / 3, hi = std::max(lo + 1, 2 * N / 3);
  for (int j = lo; j < std::min(hi, N - 1); ++j) {
    rep.max_primal_mid = std::max(rep.max_primal_mid, rep.primal_residual[static_cast<size_t>(j)]);
    rep.max_dual_mid = std::max(rep.max_dual_mid, rep.dual_residual[static_cast<size_t>(j)]);
  }

  // exponential convergence of R^{j,n} q / lambda_{j,n} toward nu_{j+n}(q) h_j
  const int nmax = std::min(N / 3, 48);
  if (nmax >= 4) {
    std::mt19937_64 rng(seed);
    auto unit = [&rng]() {
      return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    };
    const int end = std::min(N - 1, N / 3 + nmax);
    std::vector<Complex> q(static_cast<size_t>(spec.states[end]));
    for (Complex& c : q) c = Complex(unit(), unit());

    std::vector<double> xs, ys;
    std::vector<Complex> v = q;
    Complex lambda_prod(1.0, 0.0);
    Complex nu_q(0.0, 0.0);
    for (int x = 0; x < spec.states[end]; ++x)
      nu_q += triplets[static_cast<size_t>(end)].nu[static_cast<size_t>(x)] *
              q[static_cast<size_t>(x)];
    for (int s = end - 1; s >= end - nmax && s >= 0; --s) {
      v = transfer_apply(spec, s, z, v, phases);
      lambda_prod *= triplets[static_cast<size_t>(s)].lambda;
      const int n = end - s;
      double dev = 0.0;
      for (int x = 0; x < spec.states[s]; ++x)
        dev = std::max(dev, std::abs(v[static_cast<size_t>(x)] / lambda_prod -
                                     nu_q * triplets[static_cast<size_t>(s)].h[static_cast<size_t>(x)]));
      if (dev > 1e-15 && n >= 2) {
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(dev));
      }
    }
    if (xs.size() >= 3) {
      const size_t m = xs.size();
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
      }
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      const double icpt = (sy - slope * sx) / m;
      double rss = 0.0;
      for (size_t i = 0; i < m; ++i) {
        const double e = ys[i] - (icpt + slope * xs[i]);
        rss += e * e;
      }
      rep.decay_ratio = std::exp(slope);
      rep.decay_residual = std::sqrt(rss / m);
      rep.decay_points = static_cast<int>(m);
    }
  }
  return rep;
}

std::string RpfTriplet::to_json() const {
  nlohmann::json j;
  j["step"] = step;
  j["lambda"] = {lambda.real(), lambda.imag()};
  nlohmann::json hj = nlohmann::json::array(), nj = nlohmann::json::array();
  for (const Complex& c : h) hj.push_back({c.real(), c.imag()});
  for (const Complex& c : nu) nj.push_back({c.real(), c.imag()});
  j["h"] = std::move(hj);
  j["nu"] = std::move(nj);
  return j.dump(2);
}

std::string RpfVerifyReport::to_csv() const {
  std::ostringstream os;
  os << "j,primal_residual,dual_residual\n";
  char buf[96];
  for (size_t j = 0; j < primal_residual.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g\n", j, primal_residual[j], dual_residual[j]);
    os << buf;
  }
  return os.str();
}

}  // namespace edgelab
