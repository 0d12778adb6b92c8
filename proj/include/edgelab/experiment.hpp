#ifndef EDGELAB_EXPERIMENT_HPP
#define EDGELAB_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "edgelab/scenario.hpp"

namespace edgelab {

struct ExperimentParams {
  int order = 1;                    // r
  double R = 10.0;                  // drop-rule threshold factor
  std::vector<int> ladder;          // empty: use the scenario's ladder
  int max_pins = 2;                 // conditioning depth for pin sweeps
  int placement_sample = 32;        // random placements when exhaustive sweeps are too large
  int exhaustive_below = 256;       // exhaustive pin sweep for N <= this
  double decay_budget = 0.8;        // per-quadrupling ratio for "decays" verdicts
  unsigned seed = 7;                // placements / probe vectors
};

struct ExperimentReport {
  std::string id;
  std::string scenario_name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  struct Fit {
    std::string name;
    double exponent = 0.0;  // slope of log metric against log sigma
    double residual = 0.0;  // rms residual of the fit in log space
  };
  std::vector<Fit> fits;

  struct Verdict {
    std::string name;
    std::string metric;
    std::string anchor;  // which budget the verdict traces to
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
  };
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;

  bool all_pass() const;
  std::string to_csv() const;
  std::string to_json() const;
  std::string to_svg() const;  // log-log metric-vs-sigma plot
};

/// Experiment ids: llt-order-r, prokhorov, necessity, conditional-equivalence,
/// resonant-decomposition, rpf.
ExperimentReport run_experiment(const std::string& id, const Scenario& scenario,
                                const ExperimentParams& params);

/// Writes <id>_<scenario>_metrics.csv / _verdicts.json / _plot.svg per the
/// requested formats (csv, json, svg). Returns the written paths.
std::vector<std::string> emit_report(const ExperimentReport& report, const std::string& out_dir,
                                     const std::vector<std::string>& formats);

/// Structural validation of a report JSON against the shipped schema
/// (required keys and types). Returns an empty string when valid, else the
/// first problem found.
std::string validate_report_json(const std::string& json_text);

}  // namespace edgelab

#endif  // EDGELAB_EXPERIMENT_HPP
