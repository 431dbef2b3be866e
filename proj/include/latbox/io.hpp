#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "latbox/errors.hpp"
#include "latbox/lattice.hpp"
#include "latbox/limit_laws.hpp"
#include "latbox/sampling.hpp"
#include "latbox/verify.hpp"

// Serialization: CSV emission with full-precision reals (17 significant
// digits, enough to reproduce any double exactly), JSON round trips for the
// result types, the piecewise density file format, and metadata sidecars
// that record how a data file was produced.

namespace latbox {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- output paths

// Relative output paths land in $LATBOX_OUT_DIR when it is set.
inline std::string resolve_output_path(const std::string& name) {
  namespace fs = std::filesystem;
  if (name.empty() || name == "-") return name;
  const fs::path p(name);
  if (p.is_absolute()) return name;
  const char* base = std::getenv("LATBOX_OUT_DIR");
  if (base == nullptr || *base == '\0') return name;
  return (fs::path(base) / p).string();
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open '" + path + "' for writing");
  return f;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open '" + path + "' for reading");
  return f;
}

// ---------------------------------------------------------------- CSV writers

inline void write_batch_csv(std::ostream& os, const SampleBatch& batch) {
  os << "index,t,delta,normalized_error\n";
  for (std::uint64_t i = 0; i < batch.n; ++i)
    os << i << ',' << format_real(batch.t_values[i]) << ','
       << format_real(batch.delta_samples[i]) << ','
       << format_real(batch.normalized_error_samples[i]) << '\n';
}

inline void write_curve_csv(std::ostream& os, const CurveTable& table) {
  validate(table);
  switch (table.kind) {
    case CurveKind::pdf: os << "z,pdf\n"; break;
    case CurveKind::cdf: os << "z,cdf\n"; break;
    case CurveKind::cf: os << "u,cf\n"; break;
  }
  for (std::size_t i = 0; i < table.arg.size(); ++i)
    os << format_real(table.arg[i]) << ',' << format_real(table.value[i]) << '\n';
}

inline void write_law_csv(std::ostream& os, const std::vector<double>& z,
                          const std::vector<double>& pdf,
                          const std::vector<double>& cdf) {
  if (z.size() != pdf.size() || z.size() != cdf.size())
    throw std::invalid_argument("write_law_csv: column lengths differ");
  os << "z,pdf,cdf\n";
  for (std::size_t i = 0; i < z.size(); ++i)
    os << format_real(z[i]) << ',' << format_real(pdf[i]) << ','
       << format_real(cdf[i]) << '\n';
}

inline void write_cf_csv(std::ostream& os, const EmpiricalCf& cf,
                         const std::vector<double>& law) {
  if (cf.u.size() != cf.real.size() || cf.u.size() != cf.imag.size() ||
      cf.u.size() != law.size())
    throw std::invalid_argument("write_cf_csv: column lengths differ");
  os << "u,empirical_re,empirical_im,law_cf,abs_gap\n";
  for (std::size_t i = 0; i < cf.u.size(); ++i) {
    const double gap = std::hypot(cf.real[i] - law[i], cf.imag[i]);
    os << format_real(cf.u[i]) << ',' << format_real(cf.real[i]) << ','
       << format_real(cf.imag[i]) << ',' << format_real(law[i]) << ','
       << format_real(gap) << '\n';
  }
}

inline void write_convergence_csv(std::ostream& os,
                                  const std::vector<ComparisonReport>& reports) {
  os << "T,n,seed,ks_delta,ks_error,cf_sup_gap,mean,variance\n";
  for (const auto& r : reports)
    os << format_real(r.T) << ',' << r.n << ',' << r.seed << ','
       << format_real(r.ks_delta) << ',' << format_real(r.ks_error) << ','
       << format_real(r.cf_sup_gap) << ',' << format_real(r.mean) << ','
       << format_real(r.variance) << '\n';
}

// ---------------------------------------------------------------- rho files

// Two-column CSV "knot,value" describing a piecewise linear density of the
// dilation fraction on [0, 1]; see RhoSpec::tabulated for the constraints.
inline RhoSpec parse_rho_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("rho file: empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "knot,value")
    throw std::invalid_argument("rho file: expected header 'knot,value', got '" + line + "'");
  std::vector<double> knots, values;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double k = 0.0, v = 0.0;
    char extra = '\0';
    const int got = std::sscanf(line.c_str(), "%lf,%lf %c", &k, &v, &extra);
    if (got < 2 || got == 3)
      throw std::invalid_argument("rho file: malformed row at line " +
                                  std::to_string(lineno) + ": '" + line + "'");
    knots.push_back(k);
    values.push_back(v);
  }
  return RhoSpec::tabulated(std::move(knots), std::move(values));
}

inline RhoSpec load_rho_csv(const std::string& path) {
  std::ifstream f = open_input(path);
  return parse_rho_csv(f);
}

// ---------------------------------------------------------------- JSON

inline void to_json(nlohmann::json& j, const RhoSpec& r) {
  if (r.is_uniform()) {
    j = nlohmann::json{{"kind", "uniform01"}};
  } else {
    j = nlohmann::json{{"kind", "tabulated"}, {"knots", r.knots()}, {"values", r.values()}};
  }
}

inline void from_json(const nlohmann::json& j, RhoSpec& r) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform01") {
    r = RhoSpec::uniform01();
  } else if (kind == "tabulated") {
    r = RhoSpec::tabulated(j.at("knots").get<std::vector<double>>(),
                           j.at("values").get<std::vector<double>>());
  } else {
    throw std::invalid_argument("RhoSpec: unknown kind '" + kind + "'");
  }
}

inline bool operator==(const RhoSpec& a, const RhoSpec& b) {
  return a.is_uniform() == b.is_uniform() && a.knots() == b.knots() &&
         a.values() == b.values();
}

inline void to_json(nlohmann::json& j, const Scenario& s) {
  j = nlohmann::json{{"kind", s.name()}, {"d", s.d}, {"x0", s.x0}, {"rho", s.rho}};
}

inline void from_json(const nlohmann::json& j, Scenario& s) {
  const std::string kind = j.at("kind").get<std::string>();
  RhoSpec rho = j.at("rho").get<RhoSpec>();
  const int d = j.at("d").get<int>();
  if (kind == "diagonal") {
    s = Scenario::diagonal(d, j.at("x0").get<double>(), std::move(rho));
  } else if (kind == "iid_uniform") {
    s = Scenario::iid_uniform(d, std::move(rho));
  } else {
    throw std::invalid_argument("Scenario: unknown kind '" + kind + "'");
  }
}

inline bool operator==(const Scenario& a, const Scenario& b) {
  return a.kind == b.kind && a.d == b.d && a.x0 == b.x0 && a.rho == b.rho;
}

inline void to_json(nlohmann::json& j, const SampleBatch& batch) {
  j = nlohmann::json{{"scenario", batch.scenario},
                     {"T", batch.T},
                     {"n", batch.n},
                     {"seed", batch.seed},
                     {"t", batch.t_values},
                     {"delta", batch.delta_samples},
                     {"normalized_error", batch.normalized_error_samples}};
}

inline void from_json(const nlohmann::json& j, SampleBatch& batch) {
  batch.scenario = j.at("scenario").get<Scenario>();
  batch.T = j.at("T").get<double>();
  batch.n = j.at("n").get<std::uint64_t>();
  batch.seed = j.at("seed").get<std::uint64_t>();
  batch.t_values = j.at("t").get<std::vector<double>>();
  batch.delta_samples = j.at("delta").get<std::vector<double>>();
  batch.normalized_error_samples = j.at("normalized_error").get<std::vector<double>>();
  if (batch.t_values.size() != batch.n || batch.delta_samples.size() != batch.n ||
      batch.normalized_error_samples.size() != batch.n)
    throw std::invalid_argument("SampleBatch: column lengths do not match n");
}

inline bool operator==(const SampleBatch& a, const SampleBatch& b) {
  return a.scenario == b.scenario && a.T == b.T && a.n == b.n && a.seed == b.seed &&
         a.t_values == b.t_values && a.delta_samples == b.delta_samples &&
         a.normalized_error_samples == b.normalized_error_samples;
}

inline void to_json(nlohmann::json& j, const EmpiricalCf& cf) {
  j = nlohmann::json{{"u", cf.u}, {"real", cf.real}, {"imag", cf.imag}};
}

inline void from_json(const nlohmann::json& j, EmpiricalCf& cf) {
  cf.u = j.at("u").get<std::vector<double>>();
  cf.real = j.at("real").get<std::vector<double>>();
  cf.imag = j.at("imag").get<std::vector<double>>();
  if (cf.u.size() != cf.real.size() || cf.u.size() != cf.imag.size())
    throw std::invalid_argument("EmpiricalCf: column lengths differ");
}

inline bool operator==(const EmpiricalCf& a, const EmpiricalCf& b) {
  return a.u == b.u && a.real == b.real && a.imag == b.imag;
}

inline void to_json(nlohmann::json& j, const ComparisonReport& r) {
  j = nlohmann::json{{"T", r.T},
                     {"n", r.n},
                     {"seed", r.seed},
                     {"ks_delta", r.ks_delta},
                     {"ks_error", r.ks_error},
                     {"cf_sup_gap", r.cf_sup_gap},
                     {"mean", r.mean},
                     {"variance", r.variance}};
}

inline void from_json(const nlohmann::json& j, ComparisonReport& r) {
  r.T = j.at("T").get<double>();
  r.n = j.at("n").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.ks_delta = j.at("ks_delta").get<double>();
  r.ks_error = j.at("ks_error").get<double>();
  r.cf_sup_gap = j.at("cf_sup_gap").get<double>();
  r.mean = j.at("mean").get<double>();
  r.variance = j.at("variance").get<double>();
}

inline bool operator==(const ComparisonReport& a, const ComparisonReport& b) {
  return a.T == b.T && a.n == b.n && a.seed == b.seed && a.ks_delta == b.ks_delta &&
         a.ks_error == b.ks_error && a.cf_sup_gap == b.cf_sup_gap && a.mean == b.mean &&
         a.variance == b.variance;
}

inline std::string curve_kind_name(CurveKind k) {
  switch (k) {
    case CurveKind::pdf: return "pdf";
    case CurveKind::cdf: return "cdf";
    case CurveKind::cf: return "cf";
  }
  return "pdf";
}

inline void to_json(nlohmann::json& j, const CurveTable& t) {
  j = nlohmann::json{{"kind", curve_kind_name(t.kind)}, {"arg", t.arg}, {"value", t.value}};
}

inline void from_json(const nlohmann::json& j, CurveTable& t) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "pdf") t.kind = CurveKind::pdf;
  else if (kind == "cdf") t.kind = CurveKind::cdf;
  else if (kind == "cf") t.kind = CurveKind::cf;
  else throw std::invalid_argument("CurveTable: unknown kind '" + kind + "'");
  t.arg = j.at("arg").get<std::vector<double>>();
  t.value = j.at("value").get<std::vector<double>>();
  validate(t);
}

inline bool operator==(const CurveTable& a, const CurveTable& b) {
  return a.kind == b.kind && a.arg == b.arg && a.value == b.value;
}

inline void to_json(nlohmann::json& j, const LatticeCountResult& r) {
  j = nlohmann::json{{"t", r.t},
                     {"count", r.count},
                     {"volume", r.volume},
                     {"error", r.error},
                     {"normalized_error", r.normalized_error},
                     {"per_axis_delta_tilde", r.per_axis_delta_tilde},
                     {"boundary_degenerate", r.boundary_degenerate}};
  if (std::isnan(r.delta)) j["delta"] = nullptr;
  else j["delta"] = r.delta;
}

inline void from_json(const nlohmann::json& j, LatticeCountResult& r) {
  r.t = j.at("t").get<double>();
  r.count = j.at("count").get<std::uint64_t>();
  r.volume = j.at("volume").get<double>();
  r.error = j.at("error").get<double>();
  r.normalized_error = j.at("normalized_error").get<double>();
  r.delta = j.at("delta").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                    : j.at("delta").get<double>();
  r.per_axis_delta_tilde = j.at("per_axis_delta_tilde").get<std::vector<double>>();
  r.boundary_degenerate = j.at("boundary_degenerate").get<bool>();
}

inline bool operator==(const LatticeCountResult& a, const LatticeCountResult& b) {
  const bool delta_eq = (std::isnan(a.delta) && std::isnan(b.delta)) || a.delta == b.delta;
  return a.t == b.t && a.count == b.count && a.volume == b.volume && a.error == b.error &&
         a.normalized_error == b.normalized_error && delta_eq &&
         a.per_axis_delta_tilde == b.per_axis_delta_tilde &&
         a.boundary_degenerate == b.boundary_degenerate;
}

inline void to_json(nlohmann::json& j, const CheckResult& r) {
  j = nlohmann::json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}};
}

// ---------------------------------------------------------------- sidecars

struct RunMetadata {
  std::string tool_version;
  std::string generator;
  std::uint64_t seed = 0;
  std::string scenario;
  double T = 0.0;
  std::uint64_t n = 0;
  std::string rho;
};

inline void to_json(nlohmann::json& j, const RunMetadata& m) {
  j = nlohmann::json{{"tool_version", m.tool_version}, {"generator", m.generator},
                     {"seed", m.seed},                 {"scenario", m.scenario},
                     {"T", m.T},                       {"N", m.n},
                     {"rho", m.rho}};
}

// Written next to a generated data file as <file>.meta.json; records enough
// to regenerate the file byte for byte.
inline void write_metadata_sidecar(const std::string& data_path, const RunMetadata& m) {
  std::ofstream f = open_output(data_path + ".meta.json");
  const nlohmann::json j = m;
  f << j.dump(2) << '\n';
  if (!f) throw io_error("failed writing metadata sidecar for '" + data_path + "'");
}

}  // namespace latbox
