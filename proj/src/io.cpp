#include "quadromech/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace quadromech {

namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& message) {
  throw Error(ErrorCode::ConfigInvalid, message);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!obj.is_object()) bad_config(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) bad_config("unknown key '" + key + "' in " + where);
  }
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) bad_config(where + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) bad_config(where + " must be an integer");
  return v.get<int>();
}

std::string string(const json& v, const std::string& where) {
  if (!v.is_string()) bad_config(where + " must be a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const json& v, const std::string& where) {
  if (!v.is_array()) bad_config(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const json& item : v) out.push_back(string(item, where + "[]"));
  return out;
}

Axis parse_axis(const json& j) {
  reject_unknown_keys(j, {"parameter", "min", "max", "count", "spacing", "values"}, "axis");
  if (!j.contains("parameter")) bad_config("axis needs 'parameter'");
  Axis axis;
  axis.parameter = string(j.at("parameter"), "axis.parameter");
  if (j.contains("values")) {
    if (j.contains("min") || j.contains("max") || j.contains("count") || j.contains("spacing")) {
      bad_config("axis '" + axis.parameter + "' mixes 'values' with min/max/count/spacing");
    }
    if (!j.at("values").is_array()) bad_config("axis.values must be an array");
    for (const json& v : j.at("values")) axis.explicit_values.push_back(number(v, "axis.values[]"));
    return axis;
  }
  for (const char* key : {"min", "max", "count"}) {
    if (!j.contains(key)) bad_config("axis '" + axis.parameter + "' needs '" + key + "'");
  }
  axis.min = number(j.at("min"), "axis.min");
  axis.max = number(j.at("max"), "axis.max");
  axis.count = integer(j.at("count"), "axis.count");
  if (j.contains("spacing")) {
    const std::string s = string(j.at("spacing"), "axis.spacing");
    if (s == "linear") axis.spacing = Spacing::Linear;
    else if (s == "log") axis.spacing = Spacing::Log;
    else bad_config("axis.spacing must be 'linear' or 'log'");
  }
  return axis;
}

void parse_fixed(const json& j, EffectiveParams& ep) {
  reject_unknown_keys(j, {"J", "delta", "delta_m", "epsilon", "gamma_m", "n_th"}, "fixed");
  if (j.contains("J")) ep.J = number(j.at("J"), "fixed.J");
  if (j.contains("delta")) ep.delta = number(j.at("delta"), "fixed.delta");
  if (j.contains("delta_m")) ep.delta_m = number(j.at("delta_m"), "fixed.delta_m");
  if (j.contains("epsilon")) ep.epsilon = number(j.at("epsilon"), "fixed.epsilon");
  if (j.contains("gamma_m")) ep.gamma_m = number(j.at("gamma_m"), "fixed.gamma_m");
  if (j.contains("n_th")) ep.n_th = number(j.at("n_th"), "fixed.n_th");
}

void parse_solver(const json& j, SweepSpec& spec) {
  reject_unknown_keys(j, {"convergence_tol", "rtol", "atol", "propagation", "steady_residual_tol"},
                      "solver");
  if (j.contains("convergence_tol")) {
    spec.convergence_tol = number(j.at("convergence_tol"), "solver.convergence_tol");
  }
  if (j.contains("rtol")) spec.propagation.rtol = number(j.at("rtol"), "solver.rtol");
  if (j.contains("atol")) spec.propagation.atol = number(j.at("atol"), "solver.atol");
  if (j.contains("steady_residual_tol")) {
    spec.steady.residual_tol_per_dim = number(j.at("steady_residual_tol"), "solver.steady_residual_tol");
  }
  if (j.contains("propagation")) {
    const std::string m = string(j.at("propagation"), "solver.propagation");
    if (m == "automatic") spec.propagation.method = PropagationMethod::Automatic;
    else if (m == "expm") spec.propagation.method = PropagationMethod::MatrixExponential;
    else if (m == "rk45") spec.propagation.method = PropagationMethod::RungeKutta;
    else bad_config("solver.propagation must be automatic, expm or rk45");
  }
  if (!(spec.propagation.rtol > 0.0) || !(spec.propagation.atol > 0.0) ||
      !(spec.steady.residual_tol_per_dim > 0.0)) {
    bad_config("solver tolerances must be positive");
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string spacing_name(Spacing s) { return s == Spacing::Log ? "log" : "linear"; }

}  // namespace

RunConfig parse_run_config(const json& doc) {
  reject_unknown_keys(doc,
                      {"scenario", "axes", "fixed", "links", "truncation", "outputs", "solver",
                       "output", "parallelism", "seed"},
                      "config");
  RunConfig config;
  const std::string scenario = doc.contains("scenario") ? string(doc.at("scenario"), "scenario") : "custom";
  if (scenario == "custom") {
    if (!doc.contains("axes")) bad_config("a custom sweep needs 'axes'");
    config.spec.fixed.gamma_c = 1.0;
  } else {
    try {
      config.spec = builtin_scenario(scenario);
    } catch (const Error& e) {
      bad_config(e.what());
    }
  }
  config.spec.scenario = scenario;

  if (doc.contains("axes")) {
    if (!doc.at("axes").is_array()) bad_config("axes must be an array");
    config.spec.axes.clear();
    for (const json& a : doc.at("axes")) config.spec.axes.push_back(parse_axis(a));
  }
  if (doc.contains("fixed")) parse_fixed(doc.at("fixed"), config.spec.fixed);
  if (doc.contains("links")) {
    if (!doc.at("links").is_array()) bad_config("links must be an array");
    config.spec.links.clear();
    for (const json& l : doc.at("links")) {
      reject_unknown_keys(l, {"target", "source", "factor"}, "link");
      if (!l.contains("target") || !l.contains("source")) bad_config("link needs target and source");
      config.spec.links.push_back({string(l.at("target"), "link.target"),
                                   string(l.at("source"), "link.source"),
                                   l.contains("factor") ? number(l.at("factor"), "link.factor") : 1.0});
    }
  }
  if (doc.contains("truncation")) {
    const json& t = doc.at("truncation");
    reject_unknown_keys(t, {"n_photon_max", "n_phonon_max"}, "truncation");
    const int photons = t.contains("n_photon_max") ? integer(t.at("n_photon_max"), "truncation.n_photon_max")
                                                   : config.spec.space.n_photon_max();
    const int phonons = t.contains("n_phonon_max") ? integer(t.at("n_phonon_max"), "truncation.n_phonon_max")
                                                   : config.spec.space.n_phonon_max();
    try {
      config.spec.space = TruncatedSpace(photons, phonons);
    } catch (const Error& e) {
      bad_config(e.what());
    }
  }
  if (doc.contains("outputs")) config.spec.outputs = string_list(doc.at("outputs"), "outputs");
  if (doc.contains("solver")) parse_solver(doc.at("solver"), config.spec);
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    reject_unknown_keys(o, {"directory", "formats", "basename"}, "output");
    if (o.contains("directory")) config.output_directory = string(o.at("directory"), "output.directory");
    if (o.contains("formats")) config.formats = string_list(o.at("formats"), "output.formats");
    if (o.contains("basename")) config.basename = string(o.at("basename"), "output.basename");
  }
  if (doc.contains("parallelism")) config.parallelism = integer(doc.at("parallelism"), "parallelism");
  if (doc.contains("seed")) {
    const json& seed = doc.at("seed");
    if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0) bad_config("seed must be a non-negative integer");
    config.seed = doc.at("seed").get<std::uint64_t>();
  }

  if (config.parallelism < 1) bad_config("parallelism must be at least 1");
  if (config.formats.empty()) bad_config("output.formats must not be empty");
  for (const std::string& f : config.formats) {
    if (f != "csv" && f != "json") bad_config("unknown output format '" + f + "'");
  }
  try {
    config.spec.validate();
  } catch (const Error& e) {
    bad_config(e.what());
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::ConfigNotFound, "cannot open config file '" + path.string() + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, "config is not valid JSON: " + std::string(e.what()));
  }
  return parse_run_config(doc);
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string to_csv(const SweepResult& result) {
  const bool with_errors = result.failed_count() > 0;
  std::string out;
  bool first = true;
  const auto cell = [&](const std::string& s) {
    if (!first) out += ',';
    out += csv_field(s);
    first = false;
  };
  for (const auto& c : result.coordinate_columns) cell(c);
  for (const auto& c : result.value_columns) cell(c);
  if (with_errors) cell("error");
  out += '\n';
  for (const SweepRow& row : result.rows) {
    first = true;
    for (double v : row.coordinates) cell(format_double(v));
    for (double v : row.values) cell(format_double(v));
    if (with_errors) cell(row.error);
    out += '\n';
  }
  return out;
}

json to_json(const SweepResult& result) {
  const SweepSpec& spec = result.spec;
  json axes = json::array();
  for (const Axis& a : spec.axes) {
    json j = {{"parameter", a.parameter}};
    if (!a.explicit_values.empty()) {
      j["values"] = a.explicit_values;
    } else {
      j["min"] = a.min;
      j["max"] = a.max;
      j["count"] = a.count;
      j["spacing"] = spacing_name(a.spacing);
    }
    axes.push_back(std::move(j));
  }
  json links = json::array();
  for (const ParameterLink& l : spec.links) {
    links.push_back({{"target", l.target}, {"source", l.source}, {"factor", l.factor}});
  }
  const EffectiveParams& f = spec.fixed;
  json fixed = {{"J", f.J.real()},         {"delta", f.delta},     {"delta_m", f.delta_m},
                {"epsilon", f.epsilon},    {"gamma_c", f.gamma_c}, {"gamma_m", f.gamma_m},
                {"n_th", f.n_th}};

  const Provenance& p = result.provenance;
  json provenance = {
      {"code_version", p.code_version},
      {"truncation", {{"n_photon_max", p.n_photon_max}, {"n_phonon_max", p.n_phonon_max}}},
      {"convergence_tol", p.convergence_tol ? json(*p.convergence_tol) : json(nullptr)},
      {"steady_residual_tol_per_dim", p.steady_residual_tol_per_dim},
      {"degeneracy_tol", p.degeneracy_tol},
      {"propagation_method", p.propagation_method},
      {"rtol", p.rtol},
      {"atol", p.atol},
  };

  json columns = json::array();
  for (const auto& c : result.coordinate_columns) columns.push_back(c);
  for (const auto& c : result.value_columns) columns.push_back(c);

  json rows = json::array();
  for (const SweepRow& row : result.rows) {
    json r = json::object();
    for (std::size_t k = 0; k < row.coordinates.size(); ++k) {
      r[result.coordinate_columns[k]] = number_or_null(row.coordinates[k]);
    }
    for (std::size_t k = 0; k < row.values.size(); ++k) {
      r[result.value_columns[k]] = number_or_null(row.values[k]);
    }
    if (!row.error.empty()) r["error"] = row.error;
    rows.push_back(std::move(r));
  }

  return {{"scenario", spec.scenario},
          {"spec", {{"axes", axes}, {"links", links}, {"fixed", fixed}}},
          {"columns", columns},
          {"rows", rows},
          {"failed_points", result.failed_count()},
          {"provenance", provenance}};
}

std::vector<std::filesystem::path> write_outputs(const SweepResult& result, const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_directory, ec);
  if (ec) {
    throw Error(ErrorCode::Io, "cannot create output directory '" +
                                   config.output_directory.string() + "': " + ec.message());
  }
  const std::string base = config.basename.empty() ? result.spec.scenario : config.basename;
  std::vector<std::filesystem::path> written;
  for (const std::string& format : config.formats) {
    const std::filesystem::path path = config.output_directory / (base + "." + format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    if (format == "csv") {
      out << to_csv(result);
    } else {
      out << to_json(result).dump(2) << '\n';
    }
    if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
    written.push_back(path);
  }
  return written;
}

}  // namespace quadromech
