#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quadromech/model.hpp"
#include "quadromech/regression.hpp"
#include "quadromech/steady.hpp"

namespace quadromech {

enum class Spacing { Linear, Log };

/// One grid axis. `parameter` is one of J, delta, delta_m, epsilon, gamma_m,
/// n_th (rates in units of gamma_c) or tau (delay in units of 1/gamma_c).
/// A non-empty `explicit_values` list replaces min/max/count/spacing.
struct Axis {
  std::string parameter;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  Spacing spacing = Spacing::Linear;
  std::vector<double> explicit_values;

  std::vector<double> values() const;
};

/// target = factor * source, applied after the axis values are set.
struct ParameterLink {
  std::string target;
  std::string source;
  double factor = 1.0;
};

struct SweepSpec {
  std::string scenario = "custom";
  std::vector<Axis> axes;
  EffectiveParams fixed;
  std::vector<ParameterLink> links;
  TruncatedSpace space = TruncatedSpace::standard();
  /// Value columns to emit. Empty means all of them.
  std::vector<std::string> outputs;
  SteadyStateOptions steady;
  PropagationOptions propagation;
  /// When set, every point runs converge_truncation starting from `space`.
  std::optional<double> convergence_tol;

  bool has_tau_axis() const;
  /// Throws InvalidSpec on bad axes, unknown names or outputs.
  void validate() const;
};

struct SweepRow {
  std::vector<double> coordinates;
  std::vector<double> values;  ///< NaN where the point failed
  std::string error;           ///< "CODE: message" for failed points
};

struct Provenance {
  std::string code_version;
  int n_photon_max = 0;
  int n_phonon_max = 0;
  std::optional<double> convergence_tol;
  double steady_residual_tol_per_dim = 0.0;
  double degeneracy_tol = 0.0;
  std::string propagation_method;
  double rtol = 0.0;
  double atol = 0.0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<std::string> coordinate_columns;
  std::vector<std::string> value_columns;
  std::vector<SweepRow> rows;
  Provenance provenance;

  std::size_t failed_count() const;
  /// Column of values (coordinate or output) by name; throws Domain if absent.
  std::vector<double> column(std::string_view name) const;
};

/// Column header used for an axis parameter, e.g. J -> J_over_gc.
std::string axis_column_name(std::string_view parameter);

/// Evaluates every grid point independently on `parallelism` worker threads.
/// Rows are ordered with the first axis varying slowest and are identical for
/// any parallelism. Per-point failures are recorded, not thrown.
SweepResult run_sweep(const SweepSpec& spec, int parallelism = 1);

std::vector<std::string> builtin_scenario_names();
/// fig2a, fig2b, fig2c, fig2ef, fig3, fig4, fig5, fig6. Throws InvalidSpec otherwise.
SweepSpec builtin_scenario(std::string_view name);

enum class ExtremumKind { Min, Max };

struct Extremum {
  double location = 0.0;
  double value = 0.0;
  ExtremumKind kind = ExtremumKind::Min;
};

/// Interior strict local extrema by three-point comparison. A flat run that
/// is an extremum is reported at its smallest parameter value. Endpoints are
/// never reported. Throws Domain for fewer than three points.
std::vector<Extremum> find_extrema(std::span<const double> x, std::span<const double> y);
/// Same on a single-axis sweep result for the named value column.
std::vector<Extremum> find_extrema(const SweepResult& result, std::string_view field);

}  // namespace quadromech
