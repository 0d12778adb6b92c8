#include "edgelab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "edgelab/errors.hpp"
#include "json.hpp"

namespace edgelab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFlush = 1e-300;

// Unconditional pmf of a (sub)chain by DP over (state, partial sum).
SumPmf block_pmf(const ChainSpec& spec, long long support_cap) {
  long long lo = 0, hi = 0;
  std::vector<long long> los(spec.horizon), his(spec.horizon);
  for (int n = 0; n < spec.horizon; ++n) {
    long long mn = spec.values[n][0], mx = spec.values[n][0];
    for (int x = 1; x < spec.states[n]; ++x) {
      mn = std::min<long long>(mn, spec.values[n][x]);
      mx = std::max<long long>(mx, spec.values[n][x]);
    }
    lo += mn;
    hi += mx;
    los[n] = lo;
    his[n] = hi;
  }
  if (his[spec.horizon - 1] - los[spec.horizon - 1] + 1 > support_cap)
    throw SupportOverflow("pmf support exceeds cap");

  // table[x][s - lo_n] = P(X_n = x, S_n = s)
  long long cur_lo = los[0];
  long long cur_len = his[0] - los[0] + 1;
  std::vector<std::vector<double>> table(spec.states[0],
                                         std::vector<double>(static_cast<size_t>(cur_len), 0.0));
  for (int x = 0; x < spec.states[0]; ++x)
    table[x][static_cast<size_t>(spec.values[0][x] - cur_lo)] = spec.initial[x];

  for (int n = 0; n + 1 < spec.horizon; ++n) {
    const Matrix& k = spec.kernels[n];
    const long long nxt_lo = los[n + 1];
    const long long nxt_len = his[n + 1] - los[n + 1] + 1;
    std::vector<std::vector<double>> nxt(spec.states[n + 1],
                                         std::vector<double>(static_cast<size_t>(nxt_len), 0.0));
    for (int x = 0; x < spec.states[n]; ++x) {
      const auto& row = table[x];
      for (int y = 0; y < spec.states[n + 1]; ++y) {
        const double p = k(x, y);
        if (p == 0.0) continue;
        const long long shift = cur_lo + spec.values[n + 1][y] - nxt_lo;
        auto& dst = nxt[y];
        for (long long s = 0; s < cur_len; ++s) {
          const double v = row[static_cast<size_t>(s)];
          if (v != 0.0) dst[static_cast<size_t>(s + shift)] += p * v;
        }
      }
    }
    table = std::move(nxt);
    cur_lo = nxt_lo;
    cur_len = nxt_len;
  }

  SumPmf out;
  out.offset = cur_lo;
  out.probs.assign(static_cast<size_t>(cur_len), 0.0);
  for (const auto& row : table)
    for (size_t s = 0; s < row.size(); ++s) out.probs[s] += row[s];
  for (double& p : out.probs) {
    if (p != 0.0 && p < kFlush) {
      p = 0.0;
      out.trimmed = true;
    }
  }
  return out;
}

SumPmf convolve(const SumPmf& a, const SumPmf& b) {
  SumPmf out;
  out.offset = a.offset + b.offset;
  out.trimmed = a.trimmed || b.trimmed;
  out.probs.assign(a.probs.size() + b.probs.size() - 1, 0.0);
  for (size_t i = 0; i < a.probs.size(); ++i) {
    const double av = a.probs[i];
    if (av == 0.0) continue;
    for (size_t j = 0; j < b.probs.size(); ++j) out.probs[i + j] += av * b.probs[j];
  }
  return out;
}

Complex block_char(const ChainSpec& spec, double t) {
  std::vector<Complex> v(spec.states[0]);
  for (int x = 0; x < spec.states[0]; ++x)
    v[x] = spec.initial[x] * std::polar(1.0, t * spec.values[0][x]);
  for (int n = 0; n + 1 < spec.horizon; ++n) {
    const Matrix& k = spec.kernels[n];
    std::vector<Complex> w(spec.states[n + 1], Complex(0.0, 0.0));
    for (int x = 0; x < spec.states[n]; ++x) {
      const Complex vx = v[x];
      if (vx == Complex(0.0, 0.0)) continue;
      for (int y = 0; y < spec.states[n + 1]; ++y) w[y] += vx * k(x, y);
    }
    for (int y = 0; y < spec.states[n + 1]; ++y)
      w[y] *= std::polar(1.0, t * spec.values[n + 1][y]);
    v = std::move(w);
  }
  Complex total(0.0, 0.0);
  for (const Complex& c : v) total += c;
  return total;
}

long long theoretical_span(const ChainSpec& spec) {
  return 2LL * spec.value_bound * spec.horizon + 1;
}

// 32-point Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};

const GaussRule& gauss32() {
  static const GaussRule rule = [] {
    GaussRule r;
    const int n = 32;
    r.x.resize(n);
    r.w.resize(n);
    // Newton iteration on Legendre polynomials
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      r.x[i] = -x;
      r.x[n - 1 - i] = x;
      r.w[i] = w;
      r.w[n - 1 - i] = w;
    }
    return r;
  }();
  return rule;
}

}  // namespace

double SumPmf::total_mass() const {
  double s = 0.0;
  for (double p : probs) s += p;
  return s;
}

double SumPmf::mean() const {
  double s = 0.0;
  for (size_t j = 0; j < probs.size(); ++j) s += probs[j] * (offset + static_cast<double>(j));
  return s;
}

double SumPmf::variance() const {
  const double m = mean();
  double s = 0.0;
  for (size_t j = 0; j < probs.size(); ++j) {
    const double d = offset + static_cast<double>(j) - m;
    s += probs[j] * d * d;
  }
  return s;
}

std::string SumPmf::to_csv() const {
  std::ostringstream os;
  os << "k,probability\n";
  char buf[64];
  for (size_t j = 0; j < probs.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%lld,%.12g\n", offset + static_cast<long long>(j), probs[j]);
    os << buf;
  }
  return os.str();
}

std::string ResidueLaw::to_json() const {
  nlohmann::json j;
  j["m"] = modulus;
  j["masses"] = masses;
  j["tv"] = tv_to_uniform;
  std::vector<double> re, im;
  for (const Complex& c : fourier) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  j["fourier_re"] = re;
  j["fourier_im"] = im;
  j["resonant"] = resonant;
  return j.dump(2);
}

SumPmf sum_pmf(const ChainSpec& spec, const PinSet& pins, long long support_cap) {
  spec.check_structure();
  if (theoretical_span(spec) > support_cap) throw SupportOverflow("pmf support exceeds cap");
  if (pins.empty()) return block_pmf(spec, support_cap);

  const ConditionedChain cc = condition_chain(spec, pins);
  SumPmf acc;
  acc.offset = cc.pinned_sum;
  acc.probs = {1.0};
  for (const auto& b : cc.blocks) acc = convolve(acc, block_pmf(b.chain, support_cap));
  for (double& p : acc.probs) {
    if (p != 0.0 && p < kFlush) {
      p = 0.0;
      acc.trimmed = true;
    }
  }
  return acc;
}

Complex char_fn(const ChainSpec& spec, double t, const PinSet& pins) {
  spec.check_structure();
  if (pins.empty()) return block_char(spec, t);
  const ConditionedChain cc = condition_chain(spec, pins);
  Complex total = std::polar(1.0, t * static_cast<double>(cc.pinned_sum));
  for (const auto& b : cc.blocks) total *= block_char(b.chain, t);
  return total;
}

std::vector<Complex> char_fn_grid(const ChainSpec& spec, int grid, const PinSet& pins) {
  std::vector<Complex> out(static_cast<size_t>(grid));
  for (int j = 0; j < grid; ++j) out[j] = char_fn(spec, kTwoPi * j / grid, pins);
  return out;
}

SumPmf invert_dft(const ChainSpec& spec, const PinSet& pins, long long support_cap) {
  spec.check_structure();
  const long long span = theoretical_span(spec);
  if (span > support_cap) throw SupportOverflow("pmf support exceeds cap");
  const int grid = static_cast<int>(span);
  const auto samples = char_fn_grid(spec, grid, pins);

  const long long kmin = -static_cast<long long>(spec.value_bound) * spec.horizon;
  SumPmf out;
  out.offset = kmin;
  out.probs.assign(static_cast<size_t>(span), 0.0);
  // p_k = (1/M) sum_j c_j e^{-2 pi i j k / M}; exact because the support of
  // S_N fits in M consecutive integers.
  std::vector<Complex> twiddle(static_cast<size_t>(grid));
  for (int j = 0; j < grid; ++j) twiddle[j] = std::polar(1.0, -kTwoPi * j / grid);
  for (long long idx = 0; idx < span; ++idx) {
    const long long k = kmin + idx;
    // e^{-2 pi i j k / M} = twiddle[j * k mod M]
    Complex acc(0.0, 0.0);
    long long pos = 0;
    const long long stride = ((k % grid) + grid) % grid;
    for (int j = 0; j < grid; ++j) {
      acc += samples[j] * twiddle[static_cast<size_t>(pos)];
      pos += stride;
      if (pos >= grid) pos -= grid;
    }
    out.probs[static_cast<size_t>(idx)] = acc.real() / grid;
  }
  return out;
}

Complex interval_contribution(const ChainSpec& spec, double t_lo, double t_hi, long long k,
                              int nodes, int node_cap) {
  spec.check_structure();
  if (!(t_lo < t_hi) || t_lo < 0.0 || t_hi > kTwoPi + 1e-12)
    throw ParameterOutOfRange("interval must satisfy 0 <= t_lo < t_hi <= 2*pi");
  const double width = t_hi - t_lo;
  const double freq =
      std::max<double>(std::abs(static_cast<double>(k)),
                       static_cast<double>(spec.value_bound) * spec.horizon) +
      1.0;
  const GaussRule& rule = gauss32();
  const int per_panel = static_cast<int>(rule.x.size());

  // at most ~half an oscillation per panel
  int panels = std::max<int>(1, static_cast<int>(std::ceil(width * freq / std::numbers::pi)));
  panels = std::max(panels, (nodes + per_panel - 1) / per_panel);

  auto integrate = [&](int np) {
    Complex acc(0.0, 0.0);
    const double h = width / np;
    for (int p = 0; p < np; ++p) {
      const double a = t_lo + p * h;
      const double mid = a + 0.5 * h;
      const double half = 0.5 * h;
      Complex panel(0.0, 0.0);
      for (int i = 0; i < per_panel; ++i) {
        const double t = mid + half * rule.x[i];
        panel += rule.w[i] * std::polar(1.0, -t * static_cast<double>(k)) * char_fn(spec, t);
      }
      acc += panel * half;
    }
    return acc;
  };

  if (static_cast<long long>(panels) * per_panel > node_cap)
    throw NodeBudgetExceeded("oscillation-resolving node count exceeds cap");
  Complex coarse = integrate(panels);
  const double tol = 1e-10 * width;
  for (;;) {
    const int refined_panels = panels * 2;
    if (static_cast<long long>(refined_panels) * per_panel > node_cap)
      throw NodeBudgetExceeded("quadrature refinement exceeds node cap");
    const Complex fine = integrate(refined_panels);
    if (std::abs(fine - coarse) <= tol) return fine;
    panels = refined_panels;
    coarse = fine;
  }
}

ResidueLaw residue_law(const ChainSpec& spec, int m, const PinSet& pins) {
  spec.check_structure();
  if (m < 2) throw ParameterOutOfRange("modulus must be >= 2");
  ResidueLaw law;
  law.modulus = m;
  law.resonant = m <= 2 * spec.value_bound;
  // hat(mu)(b) = E[e^{2 pi i b S_N / m}] exactly, for b = 0..m-1
  std::vector<Complex> hat(static_cast<size_t>(m));
  hat[0] = Complex(1.0, 0.0);
  for (int b = 1; b < m; ++b) hat[b] = char_fn(spec, kTwoPi * b / m, pins);
  law.masses.assign(static_cast<size_t>(m), 0.0);
  for (int a = 0; a < m; ++a) {
    Complex acc(0.0, 0.0);
    for (int b = 0; b < m; ++b) acc += hat[b] * std::polar(1.0, -kTwoPi * a * b / m);
    law.masses[a] = std::max(0.0, acc.real() / m);
  }
  double tv = 0.0;
  for (int a = 0; a < m; ++a) tv += std::abs(law.masses[a] - 1.0 / m);
  law.tv_to_uniform = 0.5 * tv;
  law.fourier = std::move(hat);
  return law;
}

}  // namespace edgelab
