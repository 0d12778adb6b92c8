#ifndef EDGELAB_RESONANCE_HPP
#define EDGELAB_RESONANCE_HPP

#include <string>
#include <vector>

#include "edgelab/chain.hpp"

namespace edgelab {

/// Reduced fraction t = 2*pi*l/m with 0 <= l < m <= 2K; l = 0 only for the
/// point t = 0 (carried with m = 1).
struct ResonantPoint {
  long long l = 0;
  long long m = 1;
  double t = 0.0;
};

/// Deduplicated resonant points for the given score bound, sorted by t and
/// including t = 0.
std::vector<ResonantPoint> resonant_points(int value_bound);

/// Per-step residue statistics of Y_n = f_n(X_n) mod m.
struct ResidueProfile {
  int modulus = 2;
  std::vector<std::vector<double>> step_laws;  // [n][residue]
  std::vector<int> modal;                      // most likely residue, ties to smallest
  std::vector<double> q;                       // second largest residue mass per step
  double total = 0.0;                          // M_N(m) = sum_n q_n(m)
  std::string to_csv() const;                  // columns n,m,m_n,q_n
};

/// Residue profile of the chain (conditional on pins when given).
ResidueProfile residue_profile(const ChainSpec& spec, int m, const PinSet& pins = {});

/// Keep/drop classification of each modulus against R * ln V_N.
struct ProkhorovReport {
  struct Row {
    int m = 2;
    double stat_q = 0.0;         // sum_n q_n(m)
    double stat_nonmodal = 0.0;  // sum_n P(Y_n != m_n(m) mod m)
    double threshold = 0.0;      // R * ln V_N
    bool drop = false;
  };
  double variance = 0.0;
  double M_N = 0.0;  // min over m of stat_q
  std::vector<Row> rows;
  std::string to_json() const;  // [{m, M_N_m, verdict}, ...]
};

ProkhorovReport prokhorov_classify(const ChainSpec& spec, double R,
                                   bool use_nonmodal_statistic = false);

/// Partition of the circle into resonant and non-resonant intervals. The
/// interval around t = 0 wraps: its lo bound is negative and is understood
/// modulo 2*pi.
struct CircleInterval {
  double lo = 0.0;
  double hi = 0.0;
  int resonant_index = -1;  // index into resonant_points(K), -1 when non-resonant
  bool resonant() const { return resonant_index >= 0; }
};

/// Each resonant point strictly inside exactly one interval of width delta.
/// Throws DeltaTooLarge when delta is not below half the minimal gap.
/// delta <= 0 selects the default (one third of the minimal gap).
std::vector<CircleInterval> interval_partition(int value_bound, double delta = 0.0);

}  // namespace edgelab

#endif  // EDGELAB_RESONANCE_HPP
