#include "edgelab/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>

#include "edgelab/errors.hpp"
#include "json.hpp"

namespace edgelab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::vector<ResonantPoint> resonant_points(int value_bound) {
  std::vector<ResonantPoint> pts;
  pts.push_back({0, 1, 0.0});
  for (long long m = 2; m <= 2LL * value_bound; ++m) {
    for (long long l = 1; l < m; ++l) {
      if (std::gcd(l, m) != 1) continue;  // reduced fractions only; dedupes across m
      pts.push_back({l, m, kTwoPi * static_cast<double>(l) / static_cast<double>(m)});
    }
  }
  std::sort(pts.begin(), pts.end(), [](const ResonantPoint& a, const ResonantPoint& b) {
    return a.l * b.m < b.l * a.m;  // by t, exactly
  });
  return pts;
}

ResidueProfile residue_profile(const ChainSpec& spec, int m, const PinSet& pins) {
  if (m < 2) throw ParameterOutOfRange("modulus must be >= 2");
  spec.check_structure();

  ResidueProfile prof;
  prof.modulus = m;
  prof.step_laws.assign(static_cast<size_t>(spec.horizon), std::vector<double>(m, 0.0));

  auto fold_block = [&](const ChainSpec& block, int start_step) {
    const auto mu = marginals(block);
    for (int n = 0; n < block.horizon; ++n) {
      auto& law = prof.step_laws[static_cast<size_t>(start_step + n)];
      for (int x = 0; x < block.states[n]; ++x) {
        const int res = ((block.values[n][x] % m) + m) % m;
        law[static_cast<size_t>(res)] += mu[n][x];
      }
    }
  };

  if (pins.empty()) {
    fold_block(spec, 0);
  } else {
    const ConditionedChain cc = condition_chain(spec, pins);
    for (const auto& b : cc.blocks) fold_block(b.chain, b.start_step);
    for (const auto& [step, state] : pins) {
      const int res = ((spec.values[step][state] % m) + m) % m;
      prof.step_laws[static_cast<size_t>(step)][static_cast<size_t>(res)] = 1.0;
    }
  }

  prof.modal.resize(static_cast<size_t>(spec.horizon));
  prof.q.resize(static_cast<size_t>(spec.horizon));
  for (int n = 0; n < spec.horizon; ++n) {
    const auto& law = prof.step_laws[static_cast<size_t>(n)];
    int best = 0;
    for (int a = 1; a < m; ++a)
      if (law[static_cast<size_t>(a)] > law[static_cast<size_t>(best)]) best = a;
    double second = 0.0;
    for (int a = 0; a < m; ++a)
      if (a != best) second = std::max(second, law[static_cast<size_t>(a)]);
    prof.modal[static_cast<size_t>(n)] = best;
    prof.q[static_cast<size_t>(n)] = second;
    prof.total += second;
  }
  return prof;
}

std::string ResidueProfile::to_csv() const {
  std::ostringstream os;
  os << "n,m,m_n,q_n\n";
  char buf[96];
  for (size_t n = 0; n < q.size(); ++n) {
    std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%.12g\n", n, modulus, modal[n], q[n]);
    os << buf;
  }
  return os.str();
}

ProkhorovReport prokhorov_classify(const ChainSpec& spec, double R, bool use_nonmodal_statistic) {
  const auto [mean, var] = mean_variance(spec);
  (void)mean;
  if (var <= 1.0) throw DegenerateVariance("need V_N > 1 for the ln V_N threshold");

  ProkhorovReport rep;
  rep.variance = var;
  const double threshold = R * std::log(var);
  bool first = true;
  for (int m = 2; m <= 2 * spec.value_bound; ++m) {
    const ResidueProfile prof = residue_profile(spec, m);
    ProkhorovReport::Row row;
    row.m = m;
    row.stat_q = prof.total;
    for (int n = 0; n < spec.horizon; ++n) {
      const auto& law = prof.step_laws[static_cast<size_t>(n)];
      row.stat_nonmodal += 1.0 - law[static_cast<size_t>(prof.modal[static_cast<size_t>(n)])];
    }
    row.threshold = threshold;
    const double stat = use_nonmodal_statistic ? row.stat_nonmodal : row.stat_q;
    row.drop = stat >= threshold;
    rep.M_N = first ? row.stat_q : std::min(rep.M_N, row.stat_q);
    first = false;
    rep.rows.push_back(row);
  }
  return rep;
}

std::string ProkhorovReport::to_json() const {
  nlohmann::json j;
  j["V_N"] = variance;
  j["M_N"] = M_N;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"m", r.m},
                         {"M_N_m", r.stat_q},
                         {"nonmodal", r.stat_nonmodal},
                         {"threshold", r.threshold},
                         {"verdict", r.drop ? "drop" : "keep"}});
  }
  j["moduli"] = std::move(rows_json);
  return j.dump(2);
}

std::vector<CircleInterval> interval_partition(int value_bound, double delta) {
  const auto pts = resonant_points(value_bound);
  double min_gap = kTwoPi;
  if (pts.size() > 1) {
    for (size_t i = 0; i + 1 < pts.size(); ++i) min_gap = std::min(min_gap, pts[i + 1].t - pts[i].t);
    min_gap = std::min(min_gap, kTwoPi - pts.back().t);  // wrap gap back to 0
  }
  if (delta <= 0.0) delta = min_gap / 3.0;
  if (!(delta < min_gap / 2.0))
    throw DeltaTooLarge("delta must be below half the minimal resonant gap");

  std::vector<CircleInterval> out;
  const double half = delta / 2.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    out.push_back({pts[i].t - half, pts[i].t + half, static_cast<int>(i)});
    const double next = (i + 1 < pts.size()) ? pts[i + 1].t - half : kTwoPi - half;
    if (next > pts[i].t + half) out.push_back({pts[i].t + half, next, -1});
  }
  return out;
}

}  // namespace edgelab
