// Excursions away from zero: decomposition of sampled paths, Ito-measure tail
// estimates, straddling excursions, normalized shapes and longest excursions.

#ifndef LOTEX_EXCURSIONS_HPP
#define LOTEX_EXCURSIONS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lotex/paths.hpp"

namespace lotex {

struct Excursion {
  double start = 0.0;
  double end = 0.0;
  int sign = 1;
  Eigen::ArrayXd times;   ///< relative to start; empty unless values were kept
  Eigen::ArrayXd values;  ///< zero at both ends for complete excursions
  double V = 0.0;
  double M = 0.0;          ///< sup |values|
  double peak_time = 0.0;  ///< time of the grid maximum, relative to start
  bool complete = true;
};

struct ExcursionDecomposition {
  std::vector<Excursion> excursions;  ///< complete excursions in time order
  std::optional<Excursion> leading;   ///< piece before the first zero when the path starts off zero
  std::optional<Excursion> boundary;  ///< incomplete piece after the last zero
  double merged_time = 0.0;           ///< length of pieces too short to resolve
  double total_time = 0.0;
};

struct DecomposeOptions {
  /// Pieces shorter than this join the zero set; <= 0 means twice the local step.
  double min_length = 0.0;
  /// Replace grid maxima by the sampled maximum of the Brownian bridge over each step.
  bool bridge_max = false;
  /// Split same-sign steps at a zero with the Brownian-bridge crossing probability.
  bool bridge_zeros = false;
  /// Keep the sampled values of each excursion.
  bool keep_values = true;
  /// Seed of the bridge corrections.
  std::uint64_t seed = 0;
};

ExcursionDecomposition decompose(PathView path, const DecomposeOptions& options = {});

/// Excursion counts of one path above each threshold, with its local time at 0.
/// Lengths count excursions of both signs; heights are signed suprema, so only
/// positive excursions count towards a positive level.
struct ExcursionTally {
  Eigen::ArrayXd length_counts;
  Eigen::ArrayXd height_counts;
  double local_time = 0.0;
};

ExcursionTally tally_excursions(const ExcursionDecomposition& dec, const Eigen::ArrayXd& v_grid,
                                const Eigen::ArrayXd& a_grid, double local_time);

struct TailTable {
  Eigen::ArrayXd threshold;
  Eigen::ArrayXd rate;  ///< estimated n(. >= threshold)
  Eigen::ArrayXd se;
};

struct ItoTailEstimate {
  TailTable length;
  TailTable height;
  double mean_local_time = 0.0;
  std::size_t n_paths = 0;
};

/// Ratio estimates n(V >= v) = E[count] / E[L], standard errors by the delta method.
ItoTailEstimate ito_tail_estimates(std::span<const ExcursionTally> tallies, const Eigen::ArrayXd& v_grid,
                                   const Eigen::ArrayXd& a_grid, double min_mean_local_time = 1e-6);

/// Convenience form on whole paths observed up to their horizon, with the
/// centered local time at 0 of width eps. The excursion straddling the horizon
/// is dropped, which biases the rates low for thresholds that are not small
/// against the horizon.
ItoTailEstimate ito_tail_estimates(const std::vector<Path>& paths, const Eigen::ArrayXd& v_grid,
                                   const Eigen::ArrayXd& a_grid, double eps,
                                   const DecomposeOptions& options = {});

struct Straddle {
  Excursion excursion;
  double g = 0.0;
  double d = 0.0;          ///< infinite when the excursion is still running at the horizon
  bool found_zero = true;  ///< false when the path has no zero before t
};

/// The excursion straddling t.
Straddle straddling_excursion(PathView path, double t, const DecomposeOptions& options = {});

/// Brownian rescaling of a complete excursion to unit length.
Excursion normalized_shape(const Excursion& exc);

enum class Window { g_t, d_t, tau_l };

/// Longest complete excursion before g_t or tau_l, or up to d_t including the
/// straddler. `param` is t for the first two windows and l for tau_l. Returns
/// empty when the window is not reached on the path.
std::optional<double> longest_excursion(PathView path, Window window, double param,
                                        const DecomposeOptions& options = {});

}  // namespace lotex

#endif  // LOTEX_EXCURSIONS_HPP
