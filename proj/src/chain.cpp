#include "edgelab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "edgelab/errors.hpp"
#include "json.hpp"

namespace edgelab {

namespace {

constexpr double kRowSumTol = 1e-12;

std::string at_step_row(int step, int row) {
  std::ostringstream os;
  os << "(step " << step << ", row " << row << ")";
  return os.str();
}

}  // namespace

Matrix mat_mul(const Matrix& x, const Matrix& y) {
  Matrix z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int k = 0; k < x.cols; ++k) {
      const double xv = x(i, k);
      if (xv == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) z(i, j) += xv * y(k, j);
    }
  }
  return z;
}

std::vector<double> vec_mat(const std::vector<double>& v, const Matrix& m) {
  std::vector<double> out(m.cols, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (int j = 0; j < m.cols; ++j) out[j] += vi * m(i, j);
  }
  return out;
}

void ChainSpec::check_structure(int max_states) const {
  if (horizon < 1) throw SpecError("horizon must be >= 1");
  if (static_cast<int>(states.size()) != horizon) throw SpecError("states size != horizon");
  if (value_bound < 0) throw SpecError("value bound K must be >= 0");
  for (int n = 0; n < horizon; ++n) {
    if (states[n] < 1 || states[n] > max_states)
      throw SpecError("state count out of range at step " + std::to_string(n));
  }
  if (static_cast<int>(initial.size()) != states[0]) throw SpecError("initial law size mismatch");
  double s0 = 0.0;
  for (int x = 0; x < states[0]; ++x) {
    if (initial[x] < 0.0) throw SpecError("negative initial mass at state " + std::to_string(x));
    s0 += initial[x];
  }
  if (std::abs(s0 - 1.0) > kRowSumTol) throw SpecError("initial law does not sum to 1");
  if (static_cast<int>(kernels.size()) != horizon - 1) throw SpecError("kernel count != N-1");
  for (int n = 0; n + 1 < horizon; ++n) {
    const Matrix& k = kernels[n];
    if (k.rows != states[n] || k.cols != states[n + 1])
      throw SpecError("kernel dimensions mismatch at step " + std::to_string(n));
    for (int x = 0; x < k.rows; ++x) {
      double s = 0.0;
      for (int y = 0; y < k.cols; ++y) {
        if (k(x, y) < 0.0) throw SpecError("negative kernel entry at " + at_step_row(n, x));
        s += k(x, y);
      }
      if (std::abs(s - 1.0) > kRowSumTol)
        throw SpecError("kernel row does not sum to 1 at " + at_step_row(n, x));
    }
  }
  if (static_cast<int>(values.size()) != horizon) throw SpecError("values size != horizon");
  for (int n = 0; n < horizon; ++n) {
    if (static_cast<int>(values[n].size()) != states[n])
      throw SpecError("values size mismatch at step " + std::to_string(n));
    for (int x = 0; x < states[n]; ++x) {
      if (std::abs(values[n][x]) > value_bound)
        throw SpecError("value exceeds bound K at " + at_step_row(n, x));
    }
  }
}

std::vector<std::vector<double>> marginals(const ChainSpec& spec) {
  spec.check_structure();
  std::vector<std::vector<double>> mu(spec.horizon);
  mu[0] = spec.initial;
  for (int n = 0; n + 1 < spec.horizon; ++n) mu[n + 1] = vec_mat(mu[n], spec.kernels[n]);
  return mu;
}

EllipticityReport validate_chain(const ChainSpec& spec) {
  spec.check_structure();
  const auto mu = marginals(spec);
  for (int n = 0; n < spec.horizon; ++n) {
    for (int y = 0; y < spec.states[n]; ++y) {
      if (mu[n][y] <= 0.0)
        throw DegenerateMarginal("marginal mass is zero at " + at_step_row(n, y));
    }
  }

  EllipticityReport rep;
  rep.density_range.reserve(std::max(0, spec.horizon - 1));
  for (int n = 0; n + 1 < spec.horizon; ++n) {
    double dmin = 0.0, dmax = 0.0;
    bool first = true;
    for (int x = 0; x < spec.states[n]; ++x) {
      for (int y = 0; y < spec.states[n + 1]; ++y) {
        const double d = spec.kernels[n](x, y) / mu[n + 1][y];
        if (d <= 0.0)
          throw EllipticityViolation("zero transition density at " + at_step_row(n, x) +
                                     " into state " + std::to_string(y));
        dmin = first ? d : std::min(dmin, d);
        dmax = first ? d : std::max(dmax, d);
        first = false;
        rep.C = std::max({rep.C, d, 1.0 / d});
      }
    }
    rep.density_range.emplace_back(dmin, dmax);
  }

  // sup_{n,x,y} |p_n^{(k)}(x,y) - 1| for k in [2, min(N-1, 64)]
  const int kmax = std::min(spec.horizon - 1, 64);
  for (int k = 2; k <= kmax; ++k) rep.sup_deviation.emplace_back(k, 0.0);
  for (int n = 0; n + 2 < spec.horizon && !rep.sup_deviation.empty(); ++n) {
    Matrix prod = spec.kernels[n];
    for (int k = 2; k <= kmax && n + k < spec.horizon; ++k) {
      prod = mat_mul(prod, spec.kernels[n + k - 1]);
      double dev = 0.0;
      for (int x = 0; x < prod.rows; ++x)
        for (int y = 0; y < prod.cols; ++y)
          dev = std::max(dev, std::abs(prod(x, y) / mu[n + k][y] - 1.0));
      auto& slot = rep.sup_deviation[k - 2];
      slot.second = std::max(slot.second, dev);
    }
  }

  // Geometric fit of log sup-dev against k; C1 is then inflated so that
  // sup-dev <= C1 * delta^k holds at every computed k.
  // keep only the geometric head; the tail sits on the roundoff floor
  std::vector<double> ks, logs;
  for (const auto& [k, dev] : rep.sup_deviation) {
    if (dev <= 2.5e-14) break;
    ks.push_back(static_cast<double>(k));
    logs.push_back(std::log(dev));
  }
  if (ks.size() >= 3) {
    const size_t m = ks.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < m; ++i) {
      sx += ks[i];
      sy += logs[i];
      sxx += ks[i] * ks[i];
      sxy += ks[i] * logs[i];
      syy += logs[i] * logs[i];
    }
    const double denx = m * sxx - sx * sx;
    const double deny = m * syy - sy * sy;
    if (denx > 0.0 && deny > 0.0) {
      const double slope = (m * sxy - sx * sy) / denx;
      const double corr = (m * sxy - sx * sy) / std::sqrt(denx * deny);
      const double delta = std::exp(slope);
      if (corr < -0.99 && delta > 0.0 && delta < 1.0) {
        // calibrate C1 on the geometric head so that C1 * delta^k dominates
        // every deviation above the roundoff floor
        double c1 = 0.0;
        for (size_t i = 0; i < ks.size(); ++i)
          c1 = std::max(c1, std::exp(logs[i]) / std::pow(delta, ks[i]));
        rep.mixing_fit = std::make_pair(c1, delta);
      }
    }
  }
  return rep;
}

Matrix k_step_density(const ChainSpec& spec, int n, int k) {
  spec.check_structure();
  if (k < 1 || n < 0 || n + k >= spec.horizon)
    throw LagOutOfRange("need 0 <= n < n+k <= N-1, got n=" + std::to_string(n) +
                        " k=" + std::to_string(k));
  const auto mu = marginals(spec);
  Matrix prod = spec.kernels[n];
  for (int j = 1; j < k; ++j) prod = mat_mul(prod, spec.kernels[n + j]);
  for (int x = 0; x < prod.rows; ++x) {
    for (int y = 0; y < prod.cols; ++y) {
      if (mu[n + k][y] <= 0.0)
        throw DegenerateMarginal("marginal mass is zero at " + at_step_row(n + k, y));
      prod(x, y) /= mu[n + k][y];
    }
  }
  return prod;
}

namespace {

// Product of kernels from step a to step b (P(X_b = y | X_a = x)); a < b.
Matrix step_product(const ChainSpec& spec, int a, int b) {
  Matrix prod = spec.kernels[a];
  for (int j = a + 1; j < b; ++j) prod = mat_mul(prod, spec.kernels[j]);
  return prod;
}

// Backward "hit probability" vectors h_n(x) = P(X_target = target_state | X_n = x)
// for n in [from, target].
std::vector<std::vector<double>> backward_hit(const ChainSpec& spec, int from, int target,
                                              int target_state) {
  std::vector<std::vector<double>> h(target - from + 1);
  h[target - from].assign(spec.states[target], 0.0);
  h[target - from][target_state] = 1.0;
  for (int n = target - 1; n >= from; --n) {
    const Matrix& k = spec.kernels[n];
    std::vector<double> cur(spec.states[n], 0.0);
    for (int x = 0; x < k.rows; ++x) {
      double s = 0.0;
      for (int y = 0; y < k.cols; ++y) s += k(x, y) * h[n + 1 - from][y];
      cur[x] = s;
    }
    h[n - from] = std::move(cur);
  }
  return h;
}

// Doob h-transform of the kernels on steps [lo, hi] conditioned to hit
// target_state at step hi+1; block initial law supplied by the caller.
void h_transform_block(const ChainSpec& spec, int lo, int hi, int pin_step, int pin_state,
                       ChainSpec& block) {
  const auto h = backward_hit(spec, lo, pin_step, pin_state);
  for (int n = lo; n < hi; ++n) {
    const Matrix& k = spec.kernels[n];
    Matrix kb(k.rows, k.cols);
    for (int x = 0; x < k.rows; ++x) {
      const double hx = h[n - lo][x];
      double row = 0.0;
      if (hx > 0.0) {
        for (int y = 0; y < k.cols; ++y) {
          kb(x, y) = k(x, y) * h[n + 1 - lo][y] / hx;
          row += kb(x, y);
        }
        // exact renormalization soaks up roundoff so downstream row-sum
        // checks hold at 1e-12
        if (row > 0.0)
          for (int y = 0; y < k.cols; ++y) kb(x, y) /= row;
      } else {
        // unreachable given the pin; keep the row stochastic
        kb(x, x % k.cols) = 1.0;
      }
    }
    block.kernels.push_back(std::move(kb));
  }
}

}  // namespace

ConditionedChain condition_chain(const ChainSpec& spec, const PinSet& pins) {
  spec.check_structure();
  for (const auto& [step, state] : pins) {
    if (step < 0 || step >= spec.horizon) throw ImpossiblePin("pin step out of range");
    if (state < 0 || state >= spec.states[step]) throw ImpossiblePin("pin state out of range");
  }

  ConditionedChain out;
  out.pins = pins;

  if (pins.empty()) {
    out.blocks.push_back({0, spec});
    out.pin_probability = 1.0;
    return out;
  }

  // Joint probability of the pinned configuration.
  {
    auto it = pins.begin();
    const auto mu = marginals(spec);
    double p = mu[it->first][it->second];
    auto prev = it;
    for (++it; it != pins.end(); ++it) {
      const Matrix t = step_product(spec, prev->first, it->first);
      p *= t(prev->second, it->second);
      prev = it;
    }
    if (p <= 0.0) throw ImpossiblePin("pinned configuration has probability zero");
    out.pin_probability = p;
  }

  for (const auto& [step, state] : pins) out.pinned_sum += spec.values[step][state];

  // Maximal unpinned blocks between consecutive pins (and the two ends).
  std::vector<int> pin_steps;
  for (const auto& [step, state] : pins) pin_steps.push_back(step);

  auto make_block = [&](int lo, int hi) {
    // block covers steps lo..hi inclusive, all unpinned
    ChainSpec block;
    block.horizon = hi - lo + 1;
    block.value_bound = spec.value_bound;
    for (int n = lo; n <= hi; ++n) {
      block.states.push_back(spec.states[n]);
      block.values.push_back(spec.values[n]);
    }

    const bool has_left = lo > 0 && pins.count(lo - 1) > 0;
    const bool has_right = hi + 1 < spec.horizon && pins.count(hi + 1) > 0;

    if (has_right) {
      const int pin_step = hi + 1;
      const int pin_state = pins.at(pin_step);
      const auto h = backward_hit(spec, lo, pin_step, pin_state);
      if (has_left) {
        const int a = pins.at(lo - 1);
        const Matrix& k0 = spec.kernels[lo - 1];
        const Matrix bridge = step_product(spec, lo - 1, pin_step);
        const double denom = bridge(a, pin_state);
        if (denom <= 0.0) throw ImpossiblePin("pinned pair is unreachable");
        block.initial.resize(spec.states[lo]);
        for (int x = 0; x < spec.states[lo]; ++x)
          block.initial[x] = k0(a, x) * h[0][x] / denom;
      } else {
        const auto mu = marginals(spec);
        block.initial.resize(spec.states[lo]);
        double denom = 0.0;
        for (int x = 0; x < spec.states[lo]; ++x) denom += mu[lo][x] * h[0][x];
        if (denom <= 0.0) throw ImpossiblePin("pin is unreachable");
        for (int x = 0; x < spec.states[lo]; ++x) block.initial[x] = mu[lo][x] * h[0][x] / denom;
      }
      h_transform_block(spec, lo, hi, pin_step, pin_state, block);
    } else {
      // trailing block: restart from the left pin, kernels unchanged
      if (has_left) {
        const int a = pins.at(lo - 1);
        const Matrix& k0 = spec.kernels[lo - 1];
        block.initial.resize(spec.states[lo]);
        for (int x = 0; x < spec.states[lo]; ++x) block.initial[x] = k0(a, x);
      } else {
        block.initial = spec.initial;  // no pins on either side
      }
      for (int n = lo; n < hi; ++n) block.kernels.push_back(spec.kernels[n]);
    }

    // normalize away accumulated roundoff in the initial law
    double s = 0.0;
    for (double v : block.initial) s += v;
    if (s <= 0.0) throw ImpossiblePin("conditional block law vanished");
    for (double& v : block.initial) v /= s;

    out.blocks.push_back({lo, std::move(block)});
  };

  int cursor = 0;
  for (int p : pin_steps) {
    if (cursor <= p - 1) make_block(cursor, p - 1);
    cursor = p + 1;
  }
  if (cursor <= spec.horizon - 1) make_block(cursor, spec.horizon - 1);
  return out;
}

std::pair<double, double> mean_variance(const ChainSpec& spec, const PinSet& pins) {
  if (!pins.empty()) {
    const ConditionedChain cc = condition_chain(spec, pins);
    double mean = static_cast<double>(cc.pinned_sum);
    double var = 0.0;
    for (const auto& b : cc.blocks) {
      const auto [m, v] = mean_variance(b.chain);
      mean += m;
      var += v;
    }
    return {mean, var};
  }

  spec.check_structure();
  const int s0 = spec.states[0];
  std::vector<double> mass(s0), m1(s0), m2(s0);
  for (int x = 0; x < s0; ++x) {
    const double f = static_cast<double>(spec.values[0][x]);
    mass[x] = spec.initial[x];
    m1[x] = spec.initial[x] * f;
    m2[x] = spec.initial[x] * f * f;
  }
  for (int n = 0; n + 1 < spec.horizon; ++n) {
    const Matrix& k = spec.kernels[n];
    const int sy = spec.states[n + 1];
    std::vector<double> nmass(sy, 0.0), nm1(sy, 0.0), nm2(sy, 0.0);
    for (int x = 0; x < k.rows; ++x) {
      if (mass[x] == 0.0 && m1[x] == 0.0 && m2[x] == 0.0) continue;
      for (int y = 0; y < sy; ++y) {
        const double p = k(x, y);
        if (p == 0.0) continue;
        nmass[y] += p * mass[x];
        nm1[y] += p * m1[x];
        nm2[y] += p * m2[x];
      }
    }
    for (int y = 0; y < sy; ++y) {
      const double f = static_cast<double>(spec.values[n + 1][y]);
      nm2[y] += 2.0 * f * nm1[y] + f * f * nmass[y];
      nm1[y] += f * nmass[y];
    }
    mass = std::move(nmass);
    m1 = std::move(nm1);
    m2 = std::move(nm2);
  }
  double e1 = 0.0, e2 = 0.0;
  for (size_t x = 0; x < m1.size(); ++x) {
    e1 += m1[x];
    e2 += m2[x];
  }
  return {e1, e2 - e1 * e1};
}

std::vector<std::pair<PinSet, double>> enumerate_pin_values(const ChainSpec& spec,
                                                            const std::vector<int>& pin_steps,
                                                            int pin_cap) {
  spec.check_structure();
  if (static_cast<int>(pin_steps.size()) > pin_cap)
    throw ParameterOutOfRange("pin count exceeds cap of " + std::to_string(pin_cap));
  std::vector<int> steps = pin_steps;
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  for (int s : steps)
    if (s < 0 || s >= spec.horizon) throw ParameterOutOfRange("pin step out of range");

  const auto mu = marginals(spec);
  std::vector<std::pair<PinSet, double>> out;
  if (steps.empty()) {
    out.emplace_back(PinSet{}, 1.0);
    return out;
  }

  // transition products between consecutive pinned steps
  std::vector<Matrix> trans;
  for (size_t i = 0; i + 1 < steps.size(); ++i)
    trans.push_back(step_product(spec, steps[i], steps[i + 1]));

  std::vector<int> assign(steps.size(), 0);
  while (true) {
    double p = mu[steps[0]][assign[0]];
    for (size_t i = 0; i + 1 < steps.size() && p > 0.0; ++i)
      p *= trans[i](assign[i], assign[i + 1]);
    if (p > 0.0) {
      PinSet ps;
      for (size_t i = 0; i < steps.size(); ++i) ps[steps[i]] = assign[i];
      out.emplace_back(std::move(ps), p);
    }
    size_t i = 0;
    for (; i < steps.size(); ++i) {
      if (++assign[i] < spec.states[steps[i]]) break;
      assign[i] = 0;
    }
    if (i == steps.size()) break;
  }
  return out;
}

ChainSpec chain_from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ChainSpec spec;
  spec.horizon = j.at("N").get<int>();
  spec.states = j.at("states").get<std::vector<int>>();
  spec.initial = j.at("initial").get<std::vector<double>>();
  for (const auto& jk : j.at("kernels")) {
    const auto rows = jk.get<std::vector<std::vector<double>>>();
    Matrix m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int x = 0; x < m.rows; ++x) {
      if (static_cast<int>(rows[x].size()) != m.cols)
        throw SpecError("ragged kernel row in spec file");
      for (int y = 0; y < m.cols; ++y) m(x, y) = rows[x][y];
    }
    spec.kernels.push_back(std::move(m));
  }
  spec.values = j.at("values").get<std::vector<std::vector<int>>>();
  spec.value_bound = j.at("K").get<int>();
  spec.check_structure();
  return spec;
}

std::string chain_to_json_text(const ChainSpec& spec) {
  nlohmann::json j;
  j["N"] = spec.horizon;
  j["states"] = spec.states;
  j["initial"] = spec.initial;
  nlohmann::json jks = nlohmann::json::array();
  for (const auto& k : spec.kernels) {
    nlohmann::json rows = nlohmann::json::array();
    for (int x = 0; x < k.rows; ++x) {
      nlohmann::json row = nlohmann::json::array();
      for (int y = 0; y < k.cols; ++y) row.push_back(k(x, y));
      rows.push_back(std::move(row));
    }
    jks.push_back(std::move(rows));
  }
  j["kernels"] = std::move(jks);
  j["values"] = spec.values;
  j["K"] = spec.value_bound;
  return j.dump(2);
}

ChainSpec load_chain_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open chain spec file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return chain_from_json_text(ss.str());
}

void save_chain_json(const ChainSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SpecError("cannot write chain spec file: " + path);
  out << chain_to_json_text(spec) << "\n";
}

}  // namespace edgelab
