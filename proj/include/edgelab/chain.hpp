#ifndef EDGELAB_CHAIN_HPP
#define EDGELAB_CHAIN_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace edgelab {

/// Dense row-major matrix, just large enough for per-step kernels and
/// k-step density tables (state counts are small).
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

Matrix mat_mul(const Matrix& x, const Matrix& y);
std::vector<double> vec_mat(const std::vector<double>& v, const Matrix& m);

/// Finite-horizon inhomogeneous chain with integer per-step scores.
/// Steps are 0-based: states[n] is the number of states at step n,
/// kernels[n](x, y) = P(X_{n+1} = y | X_n = x) for n = 0..N-2, and
/// values[n][x] is the integer score f_n(x) with |f_n(x)| <= value_bound.
struct ChainSpec {
  int horizon = 0;
  std::vector<int> states;
  std::vector<double> initial;
  std::vector<Matrix> kernels;
  std::vector<std::vector<int>> values;
  int value_bound = 0;

  static constexpr int kDefaultMaxStates = 16;

  /// Structural validation: dimensions, row sums within 1e-12 of 1,
  /// nonnegative entries, |values| <= value_bound. Throws SpecError with
  /// the offending (step, row) in the message.
  void check_structure(int max_states = kDefaultMaxStates) const;
};

struct EllipticityReport {
  double C = 1.0;
  // per transition step n (0..N-2): (min, max) of p_n(x,y) relative to mu_{n+1}
  std::vector<std::pair<double, double>> density_range;
  // sup_{n,x,y} |p_n^{(k)}(x,y) - 1| indexed by k (k = 2.. within the usable range)
  std::vector<std::pair<int, double>> sup_deviation;
  // geometric fit sup-dev <= C1 * delta^k; absent when the decay is not
  // cleanly geometric (residual correlation < 0.99) or there is no data
  std::optional<std::pair<double, double>> mixing_fit;  // (C1, delta)
};

/// Pinned coordinates: step index (0-based) -> state index at that step.
using PinSet = std::map<int, int>;

/// Exact conditional decomposition of a chain given pinned coordinates.
/// Unpinned indices split into maximal blocks that are conditionally
/// independent; each block is itself a chain whose kernels and initial
/// law are the exact bridge laws.
struct ConditionedChain {
  struct Block {
    int start_step = 0;  // step index of the block's first coordinate in the parent chain
    ChainSpec chain;
  };
  std::vector<Block> blocks;
  long long pinned_sum = 0;       // sum of f_n over pinned coordinates
  double pin_probability = 0.0;   // joint probability of the pinned configuration
  PinSet pins;
};

/// Ellipticity constant, per-step density ranges and the mixing-decay fit.
/// The constant is measured against the chain's own marginals. Throws
/// EllipticityViolation / DegenerateMarginal.
EllipticityReport validate_chain(const ChainSpec& spec);

/// Laws mu_0..mu_{N-1} by forward propagation.
std::vector<std::vector<double>> marginals(const ChainSpec& spec);

/// k-step transition density p_n^{(k)}(x,y) relative to mu_{n+k}.
Matrix k_step_density(const ChainSpec& spec, int n, int k);

/// Exact bridge decomposition given pins. Throws ImpossiblePin when the
/// pinned configuration has probability zero.
ConditionedChain condition_chain(const ChainSpec& spec, const PinSet& pins);

/// Exact mean and variance of S_N = sum f_n(X_n), optionally conditional
/// on pins. O(N * S^2), no pmf materialization.
std::pair<double, double> mean_variance(const ChainSpec& spec, const PinSet& pins = {});

/// Enumerate joint values of the pinned coordinates together with their
/// exact joint probabilities. Pin count capped (enumeration is |S|^|pins|).
std::vector<std::pair<PinSet, double>> enumerate_pin_values(const ChainSpec& spec,
                                                            const std::vector<int>& pin_steps,
                                                            int pin_cap = 8);

/// JSON (de)serialization of the chain-spec file format:
/// {"N", "states", "initial", "kernels", "values", "K"}.
ChainSpec load_chain_json(const std::string& path);
void save_chain_json(const ChainSpec& spec, const std::string& path);
ChainSpec chain_from_json_text(const std::string& text);
std::string chain_to_json_text(const ChainSpec& spec);

}  // namespace edgelab

#endif  // EDGELAB_CHAIN_HPP
