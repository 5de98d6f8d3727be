#include "quadromech/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "quadromech/correlations.hpp"
#include "quadromech/version.hpp"

namespace quadromech {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names = {"J",       "delta",   "delta_m",
                                                 "epsilon", "gamma_m", "n_th"};
  return names;
}

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> names = {"n_a", "n_b", "g2_aa_0", "g2_bb_0", "g2_ab_0"};
  return names;
}

const std::vector<std::string>& series_columns() {
  static const std::vector<std::string> names = {"g2_aa_tau", "g2_bb_tau", "g2_ab_tau"};
  return names;
}

bool contains(const std::vector<std::string>& list, std::string_view name) {
  return std::find(list.begin(), list.end(), name) != list.end();
}

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::InvalidSpec, message);
}

void set_parameter(EffectiveParams& ep, std::string_view name, double value) {
  if (name == "J") ep.J = value;
  else if (name == "delta") ep.delta = value;
  else if (name == "delta_m") ep.delta_m = value;
  else if (name == "epsilon") ep.epsilon = value;
  else if (name == "gamma_m") ep.gamma_m = value;
  else if (name == "n_th") ep.n_th = value;
  else invalid("unknown parameter '" + std::string(name) + "'");
}

double get_parameter(const EffectiveParams& ep, std::string_view name) {
  if (name == "J") return ep.J.real();
  if (name == "delta") return ep.delta;
  if (name == "delta_m") return ep.delta_m;
  if (name == "epsilon") return ep.epsilon;
  if (name == "gamma_m") return ep.gamma_m;
  if (name == "n_th") return ep.n_th;
  invalid("unknown parameter '" + std::string(name) + "'");
}

std::string describe(const Error& e) {
  return std::string(to_string(e.code())) + ": " + e.what();
}

std::string method_name(PropagationMethod m) {
  switch (m) {
    case PropagationMethod::Automatic: return "automatic";
    case PropagationMethod::MatrixExponential: return "expm";
    case PropagationMethod::RungeKutta: return "rk45";
  }
  return "?";
}

}  // namespace

std::vector<double> Axis::values() const {
  if (!explicit_values.empty()) return explicit_values;
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    const double f = count > 1 ? static_cast<double>(k) / (count - 1) : 0.0;
    double v = 0.0;
    if (spacing == Spacing::Log) {
      v = std::exp(std::log(min) + f * (std::log(max) - std::log(min)));
    } else {
      v = min + f * (max - min);
    }
    out[static_cast<std::size_t>(k)] = v;
  }
  // Pin the end points exactly.
  if (count >= 2) {
    out.front() = min;
    out.back() = max;
  }
  return out;
}

bool SweepSpec::has_tau_axis() const {
  return std::any_of(axes.begin(), axes.end(), [](const Axis& a) { return a.parameter == "tau"; });
}

void SweepSpec::validate() const {
  if (axes.empty()) invalid("sweep needs at least one axis");
  std::vector<std::string> seen;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const Axis& a = axes[k];
    if (a.parameter != "tau" && !contains(parameter_names(), a.parameter)) {
      invalid("unknown axis parameter '" + a.parameter + "'");
    }
    if (contains(seen, a.parameter)) invalid("axis '" + a.parameter + "' given twice");
    seen.push_back(a.parameter);
    if (a.parameter == "tau" && k + 1 != axes.size()) invalid("the tau axis must be the last axis");
    if (!a.explicit_values.empty()) {
      if (a.explicit_values.size() < 2) invalid("axis '" + a.parameter + "' needs at least 2 values");
      for (double v : a.explicit_values) {
        if (!std::isfinite(v)) invalid("axis '" + a.parameter + "' has a non-finite value");
      }
      continue;
    }
    if (a.count < 2) invalid("axis '" + a.parameter + "' needs count >= 2");
    if (!std::isfinite(a.min) || !std::isfinite(a.max) || !(a.min < a.max)) {
      invalid("axis '" + a.parameter + "' needs finite min < max");
    }
    if (a.spacing == Spacing::Log && !(a.min > 0.0)) {
      invalid("log-spaced axis '" + a.parameter + "' needs min > 0");
    }
  }
  for (const ParameterLink& link : links) {
    if (!contains(parameter_names(), link.target) || !contains(parameter_names(), link.source)) {
      invalid("link " + link.target + " <- " + link.source + " names an unknown parameter");
    }
    if (contains(seen, link.target)) invalid("link target '" + link.target + "' is also an axis");
    if (!std::isfinite(link.factor)) invalid("link factor must be finite");
  }
  const auto& allowed = has_tau_axis() ? series_columns() : record_columns();
  for (const std::string& out : outputs) {
    if (!contains(allowed, out)) invalid("output '" + out + "' is not available for this sweep");
  }
  if (convergence_tol && !(*convergence_tol > 0.0)) invalid("convergence tolerance must be positive");
  if (convergence_tol && has_tau_axis()) invalid("adaptive truncation is not supported for tau series");
  fixed.validate();
}

std::size_t SweepResult::failed_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); }));
}

std::vector<double> SweepResult::column(std::string_view name) const {
  const auto pick = [&](const std::vector<std::string>& cols, bool coords) -> std::optional<std::vector<double>> {
    const auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) return std::nullopt;
    const auto k = static_cast<std::size_t>(it - cols.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const SweepRow& r : rows) out.push_back(coords ? r.coordinates[k] : r.values[k]);
    return out;
  };
  if (auto c = pick(coordinate_columns, true)) return *c;
  if (auto c = pick(value_columns, false)) return *c;
  throw Error(ErrorCode::Domain, "no column named '" + std::string(name) + "'");
}

std::string axis_column_name(std::string_view parameter) {
  if (parameter == "n_th") return "n_th";
  if (parameter == "tau") return "tau_gc_over_2pi";
  return std::string(parameter) + "_over_gc";
}

namespace {

struct Point {
  std::vector<double> coordinates;  // raw axis values, tau excluded
};

std::vector<Point> grid_points(const std::vector<Axis>& axes) {
  std::vector<Point> points{Point{}};
  for (const Axis& axis : axes) {
    if (axis.parameter == "tau") continue;
    std::vector<Point> next;
    for (const Point& p : points) {
      for (double v : axis.values()) {
        Point q = p;
        q.coordinates.push_back(v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

EffectiveParams point_params(const SweepSpec& spec, const Point& point) {
  EffectiveParams ep = spec.fixed;
  std::size_t k = 0;
  for (const Axis& axis : spec.axes) {
    if (axis.parameter == "tau") continue;
    set_parameter(ep, axis.parameter, point.coordinates[k++]);
  }
  for (const ParameterLink& link : spec.links) {
    set_parameter(ep, link.target, link.factor * get_parameter(ep, link.source));
  }
  return ep;
}

std::vector<double> pick_values(const std::vector<double>& all,
                                const std::vector<std::string>& all_names,
                                const std::vector<std::string>& wanted) {
  std::vector<double> out;
  out.reserve(wanted.size());
  for (const std::string& name : wanted) {
    const auto it = std::find(all_names.begin(), all_names.end(), name);
    out.push_back(all[static_cast<std::size_t>(it - all_names.begin())]);
  }
  return out;
}

// Rows for one grid point: a single record, or one row per delay.
std::vector<SweepRow> evaluate_point(const SweepSpec& spec, const Point& point,
                                     const std::vector<std::string>& value_columns,
                                     const std::vector<double>& taus) {
  const std::size_t n_rows = spec.has_tau_axis() ? taus.size() : 1;
  std::vector<SweepRow> rows(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    rows[r].coordinates = point.coordinates;
    if (spec.has_tau_axis()) rows[r].coordinates.push_back(taus[r] / (2.0 * std::numbers::pi));
  }

  try {
    const EffectiveParams ep = point_params(spec, point);
    if (!spec.has_tau_axis()) {
      CorrelationRecord rec = [&] {
        if (spec.convergence_tol) {
          return record_from_state(ep, converge_truncation(ep, spec.space, *spec.convergence_tol).rho);
        }
        return record_from_state(ep, steady_state(build_liouvillian(ep, spec.space), spec.steady));
      }();
      const std::vector<double> all = {rec.n_a, rec.n_b, rec.g2_aa_0, rec.g2_bb_0, rec.g2_ab_0};
      rows[0].values = pick_values(all, record_columns(), value_columns);
      return rows;
    }

    const CsOperator l = build_liouvillian(ep, spec.space);
    const DensityMatrix rho = steady_state(l, spec.steady);
    std::vector<double> abs_taus(taus.size());
    std::transform(taus.begin(), taus.end(), abs_taus.begin(), [](double t) { return std::abs(t); });
    // Auto-correlations of a stationary state are even in tau.
    const auto aa = g2_tau(l, rho, CorrelationKind::aa, abs_taus, spec.propagation);
    const auto bb = g2_tau(l, rho, CorrelationKind::bb, abs_taus, spec.propagation);
    const auto ab = g2_tau(l, rho, CorrelationKind::ab, taus, spec.propagation);
    for (std::size_t r = 0; r < n_rows; ++r) {
      const std::vector<double> all = {aa.values[r], bb.values[r], ab.values[r]};
      rows[r].values = pick_values(all, series_columns(), value_columns);
    }
  } catch (const Error& e) {
    for (SweepRow& row : rows) {
      row.values.assign(value_columns.size(), kNaN);
      row.error = describe(e);
    }
  } catch (const std::exception& e) {
    for (SweepRow& row : rows) {
      row.values.assign(value_columns.size(), kNaN);
      row.error = std::string("INTERNAL_ERROR: ") + e.what();
    }
  }
  return rows;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, int parallelism) {
  spec.validate();
  if (parallelism < 1) invalid("parallelism must be at least 1");

  SweepResult result;
  result.spec = spec;
  for (const Axis& axis : spec.axes) result.coordinate_columns.push_back(axis_column_name(axis.parameter));
  result.value_columns = spec.outputs.empty()
                             ? (spec.has_tau_axis() ? series_columns() : record_columns())
                             : spec.outputs;
  result.provenance = Provenance{
      std::string(kVersionString),
      spec.space.n_photon_max(),
      spec.space.n_phonon_max(),
      spec.convergence_tol,
      spec.steady.residual_tol_per_dim,
      spec.steady.degeneracy_tol,
      method_name(spec.propagation.method),
      spec.propagation.rtol,
      spec.propagation.atol,
  };

  const std::vector<Point> points = grid_points(spec.axes);
  const std::vector<double> taus = spec.has_tau_axis() ? spec.axes.back().values() : std::vector<double>{};

  std::vector<std::vector<SweepRow>> per_point(points.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      per_point[i] = evaluate_point(spec, points[i], result.value_columns, taus);
    }
  };
  const auto n_threads = static_cast<std::size_t>(parallelism);
  if (n_threads == 1 || points.size() == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(n_threads, points.size()); ++t) pool.emplace_back(worker);
  }

  for (auto& rows : per_point) {
    for (SweepRow& row : rows) result.rows.push_back(std::move(row));
  }
  return result;
}

std::vector<std::string> builtin_scenario_names() {
  return {"fig2a", "fig2b", "fig2c", "fig2ef", "fig3", "fig4", "fig5", "fig6"};
}

SweepSpec builtin_scenario(std::string_view name) {
  // Weak-drive defaults shared by the blockade figures.
  EffectiveParams base;
  base.gamma_c = 1.0;
  base.gamma_m = 0.1;
  base.epsilon = 0.05;
  base.n_th = 1e-4;

  SweepSpec spec;
  spec.scenario = std::string(name);
  spec.fixed = base;
  constexpr double kJBlockade = 0.406;

  if (name == "fig2a") {
    spec.axes = {{"J", 0.05, 1.5, 60, Spacing::Log, {}}};
  } else if (name == "fig2b") {
    // omega_0 = omega_d, so delta_m = 0 and the optical detuning axis is delta.
    spec.fixed.J = kJBlockade;
    spec.axes = {{"delta", -2.0, 2.0, 101, Spacing::Linear, {}}};
  } else if (name == "fig2c") {
    spec.fixed.J = kJBlockade;
    spec.axes = {{"delta_m", -1.0, 1.0, 101, Spacing::Linear, {}}};
    spec.links = {{"delta", "delta_m", 2.0}};
  } else if (name == "fig2ef") {
    spec.fixed.J = kJBlockade;
    const double span = 2.0 * 2.0 * std::numbers::pi;  // two units of 2 pi / gamma_c
    spec.axes = {{"tau", -span, span, 513, Spacing::Linear, {}}};
  } else if (name == "fig3") {
    spec.fixed.J = kJBlockade;
    spec.axes = {{"n_th", 0, 0, 0, Spacing::Linear, {1e-3, 1e-2, 1e-1}},
                 {"epsilon", 0.005, 0.5, 60, Spacing::Log, {}}};
  } else if (name == "fig4") {
    spec.axes = {{"gamma_m", 0.02, 1.0, 20, Spacing::Linear, {}},
                 {"J", 0.2, 1.2, 20, Spacing::Linear, {}}};
  } else if (name == "fig5") {
    spec.fixed.J = 5.0;
    spec.axes = {{"delta_m", 3.0, 6.0, 150, Spacing::Linear, {}}};
    spec.links = {{"delta", "delta_m", 2.0}};
  } else if (name == "fig6") {
    spec.fixed.J = 5.0;
    spec.fixed.delta_m = 3.9;
    spec.fixed.delta = 7.8;
    spec.axes = {{"n_th", 0, 0, 0, Spacing::Linear, {1e-4, 1e-3, 1e-2}},
                 {"epsilon", 0.005, 0.5, 60, Spacing::Log, {}}};
  } else {
    invalid("unknown scenario '" + std::string(name) + "'");
  }
  return spec;
}

std::vector<Extremum> find_extrema(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::Shape, "extrema need matching x and y");
  if (y.size() < 3) throw Error(ErrorCode::Domain, "extrema need at least three points");

  std::vector<Extremum> out;
  const std::size_t n = y.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    // Flat run y[i..j] of equal values.
    std::size_t j = i;
    while (j + 1 < n && y[j + 1] == y[i]) ++j;
    if (j + 1 >= n) break;
    const double left = y[i - 1];
    const double right = y[j + 1];
    if (y[i] < left && y[i] < right) out.push_back({x[i], y[i], ExtremumKind::Min});
    else if (y[i] > left && y[i] > right) out.push_back({x[i], y[i], ExtremumKind::Max});
    i = j + 1;
  }
  return out;
}

std::vector<Extremum> find_extrema(const SweepResult& result, std::string_view field) {
  if (result.spec.axes.size() != 1) {
    throw Error(ErrorCode::Domain, "find_extrema needs a single-axis sweep");
  }
  const std::vector<double> y = result.column(field);
  std::vector<double> x = result.spec.axes.front().values();
  return find_extrema(x, y);
}

}  // namespace quadromech
