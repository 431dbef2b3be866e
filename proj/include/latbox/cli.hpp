#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "latbox/errors.hpp"
#include "latbox/io.hpp"
#include "latbox/lattice.hpp"
#include "latbox/limit_laws.hpp"
#include "latbox/rng.hpp"
#include "latbox/sampling.hpp"
#include "latbox/verify.hpp"

// Command line front end. Subcommands:
//
//   count        exact count and discrepancies for one (d, a, t, X)
//   sample       Monte Carlo batch of Delta and normalized error draws
//   cf           empirical characteristic function against the limit law
//   law          analytic density / CDF / CF tables of a limit law
//   convergence  KS and CF gaps along an increasing window grid
//   verify       built-in self checks
//
// Exit codes: 0 success, 1 statistical or verification failure, 2 usage
// error, 3 I/O error.

namespace latbox {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr std::uint64_t kDefaultSeed = 1;

namespace detail {

template <class WriteFn>
void emit_output(const std::string& output, std::ostream& fallback, WriteFn&& fn,
                 const RunMetadata* meta = nullptr) {
  if (output.empty() || output == "-") {
    fn(fallback);
    return;
  }
  const std::string path = resolve_output_path(output);
  {
    std::ofstream f = open_output(path);
    fn(f);
    if (!f) throw io_error("failed writing '" + path + "'");
  }
  if (meta != nullptr) write_metadata_sidecar(path, *meta);
}

inline std::vector<double> build_u_grid(double umin, double umax, double ustep) {
  if (!(ustep > 0.0)) throw std::invalid_argument("u step must be positive");
  if (!(umax >= umin)) throw std::invalid_argument("u range is empty");
  const double span = (umax - umin) / ustep;
  if (span > 2e6) throw std::invalid_argument("u grid too large");
  const int n = static_cast<int>(std::floor(span + 1e-9)) + 1;
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) u[static_cast<std::size_t>(k)] = umin + ustep * k;
  return u;
}

inline RunMetadata batch_metadata(const Scenario& sc, double T, std::uint64_t n,
                                  std::uint64_t seed) {
  RunMetadata m;
  m.tool_version = kToolVersion;
  m.generator = kGeneratorName;
  m.seed = seed;
  m.scenario = sc.name();
  m.T = T;
  m.n = n;
  m.rho = sc.rho.describe();
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------- count

struct CountArgs {
  int d = 1;
  double a = 1.0;
  double t = 1.0;
  std::vector<double> x;
  bool bruteforce = false;
  std::string output = "-";
  std::string format = "json";
};

inline int run_count(const CountArgs& args, std::ostream& out, std::ostream& err) {
  const BoxSpec box(args.d, args.a);
  Translation x = args.x;
  if (x.empty()) x.assign(static_cast<std::size_t>(args.d), 0.0);
  const LatticeCountResult r = count_record(box, args.t, x);

  std::optional<std::uint64_t> bf;
  if (args.bruteforce) bf = count_points_bruteforce(box, args.t, x);

  detail::emit_output(args.output, out, [&](std::ostream& os) {
    if (args.format == "json") {
      nlohmann::json j = r;
      j["d"] = args.d;
      j["a"] = args.a;
      j["x"] = x;
      if (bf) {
        j["bruteforce_count"] = *bf;
        j["agree"] = *bf == r.count;
      }
      os << j.dump(2) << '\n';
    } else {
      os << "d,a,t,count,volume,error,normalized_error,delta,boundary_degenerate\n"
         << args.d << ',' << format_real(args.a) << ',' << format_real(r.t) << ','
         << r.count << ',' << format_real(r.volume) << ',' << format_real(r.error)
         << ',' << format_real(r.normalized_error) << ',' << format_real(r.delta)
         << ',' << (r.boundary_degenerate ? 1 : 0) << '\n';
    }
  });

  if (bf && *bf != r.count) {
    err << "count mismatch: closed form " << r.count << ", enumeration " << *bf << '\n';
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string scenario = "diagonal";
  int d = 1;
  double x0 = 0.0;
  double T = 100.0;
  std::uint64_t n = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::string rho_path;
  int workers = 1;
  std::string output = "-";
  std::string format = "csv";
};

inline Scenario make_scenario(const std::string& kind, int d, double x0,
                              const std::string& rho_path) {
  RhoSpec rho = rho_path.empty() ? RhoSpec::uniform01() : load_rho_csv(rho_path);
  if (kind == "diagonal") return Scenario::diagonal(d, x0, std::move(rho));
  if (kind == "iid_uniform") return Scenario::iid_uniform(d, std::move(rho));
  throw std::invalid_argument("unknown scenario '" + kind + "'");
}

inline int run_sample(const SampleArgs& args, std::ostream& out, std::ostream&) {
  const Scenario sc = make_scenario(args.scenario, args.d, args.x0, args.rho_path);
  GenerateOptions opts;
  opts.workers = args.workers;
  const SampleBatch batch = generate_batch(sc, args.T, args.n, args.seed, opts);
  const RunMetadata meta = detail::batch_metadata(sc, args.T, args.n, args.seed);

  detail::emit_output(args.output, out, [&](std::ostream& os) {
    if (args.format == "json") {
      const nlohmann::json j = batch;
      os << j.dump(2) << '\n';
    } else {
      write_batch_csv(os, batch);
    }
  }, &meta);
  return 0;
}

// ---------------------------------------------------------------- cf

struct CfArgs {
  std::string scenario = "diagonal";
  int d = 1;
  double x0 = 0.0;
  double T = 100.0;
  std::uint64_t n = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::string rho_path;
  int workers = 1;
  double umin = -20.0;
  double umax = 20.0;
  double ustep = 0.25;
  std::optional<double> tol;
  std::string output = "-";
  std::string format = "csv";
};

inline int run_cf(const CfArgs& args, std::ostream& out, std::ostream& err) {
  const Scenario sc = make_scenario(args.scenario, args.d, args.x0, args.rho_path);
  GenerateOptions opts;
  opts.workers = args.workers;
  const SampleBatch batch = generate_batch(sc, args.T, args.n, args.seed, opts);
  const LimitLaw law = limit_law_for(sc);

  const std::vector<double> u = detail::build_u_grid(args.umin, args.umax, args.ustep);
  const EmpiricalCf ecf = empirical_cf(batch.delta_samples, u);
  std::vector<double> law_vals(u.size());
  double sup_gap = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    law_vals[k] = law_cf(law, u[k]);
    sup_gap = std::max(sup_gap, std::hypot(ecf.real[k] - law_vals[k], ecf.imag[k]));
  }

  const RunMetadata meta = detail::batch_metadata(sc, args.T, args.n, args.seed);
  detail::emit_output(args.output, out, [&](std::ostream& os) {
    if (args.format == "json") {
      nlohmann::json j;
      j["u"] = ecf.u;
      j["empirical_re"] = ecf.real;
      j["empirical_im"] = ecf.imag;
      j["law_cf"] = law_vals;
      j["sup_gap"] = sup_gap;
      os << j.dump(2) << '\n';
    } else {
      write_cf_csv(os, ecf, law_vals);
    }
  }, &meta);

  if (args.tol && sup_gap > *args.tol) {
    err << "cf gap " << format_real(sup_gap) << " exceeds tolerance "
        << format_real(*args.tol) << '\n';
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------- law

struct LawArgs {
  std::string kind = "diagonal";
  int d = 1;
  std::optional<double> y;
  std::optional<double> x0;
  std::string curve = "both";  // both | pdf | cdf | cf
  std::optional<double> zmin;
  std::optional<double> zmax;
  int grid_n = 513;
  double umin = -20.0;
  double umax = 20.0;
  double ustep = 0.25;
  std::string output = "-";
  std::string format = "csv";
};

inline int run_law(const LawArgs& args, std::ostream& out, std::ostream&) {
  LimitLaw law = [&]() -> LimitLaw {
    if (args.kind == "diagonal") {
      if (args.y && args.x0)
        throw std::invalid_argument("give either y or x0, not both");
      if (args.y) return DiagonalLaw(args.d, *args.y);
      if (args.x0) return DiagonalLaw::from_translation(args.d, *args.x0);
      throw std::invalid_argument("diagonal law needs y or x0");
    }
    if (args.kind == "iid_uniform") {
      if (args.y || args.x0)
        throw std::invalid_argument("y and x0 apply to the diagonal law only");
      return IidUniformLaw(args.d);
    }
    throw std::invalid_argument("unknown law '" + args.kind + "'");
  }();

  if (args.grid_n < 2) throw std::invalid_argument("grid size must be >= 2");

  detail::emit_output(args.output, out, [&](std::ostream& os) {
    if (args.curve == "cf") {
      const std::vector<double> u = detail::build_u_grid(args.umin, args.umax, args.ustep);
      CurveTable t;
      t.kind = CurveKind::cf;
      t.arg = u;
      t.value.reserve(u.size());
      for (double ui : u) t.value.push_back(law_cf(law, ui));
      validate(t);
      if (args.format == "json") {
        const nlohmann::json j = t;
        os << j.dump(2) << '\n';
      } else {
        write_curve_csv(os, t);
      }
      return;
    }

    const double radius = law_support_radius(law);
    const double zmin = args.zmin.value_or(-radius);
    const double zmax = args.zmax.value_or(radius);
    if (!(zmax > zmin)) throw std::invalid_argument("z range is empty");
    std::vector<double> z(static_cast<std::size_t>(args.grid_n));
    for (int k = 0; k < args.grid_n; ++k)
      z[static_cast<std::size_t>(k)] =
          zmin + (zmax - zmin) * static_cast<double>(k) / (args.grid_n - 1);

    if (args.curve == "both") {
      std::vector<double> pdf(z.size()), cdf(z.size());
      for (std::size_t k = 0; k < z.size(); ++k) {
        pdf[k] = law_pdf(law, z[k]);
        cdf[k] = law_cdf(law, z[k]);
      }
      if (args.format == "json") {
        nlohmann::json j;
        j["z"] = z;
        j["pdf"] = pdf;
        j["cdf"] = cdf;
        j["variance"] = law_variance(law);
        j["support_radius"] = radius;
        os << j.dump(2) << '\n';
      } else {
        write_law_csv(os, z, pdf, cdf);
      }
      return;
    }

    CurveTable t;
    t.kind = args.curve == "pdf" ? CurveKind::pdf : CurveKind::cdf;
    t.arg = z;
    t.value.reserve(z.size());
    for (double zk : z)
      t.value.push_back(args.curve == "pdf" ? law_pdf(law, zk) : law_cdf(law, zk));
    validate(t);
    if (args.format == "json") {
      const nlohmann::json j = t;
      os << j.dump(2) << '\n';
    } else {
      write_curve_csv(os, t);
    }
  });
  return 0;
}

// ---------------------------------------------------------------- convergence

struct ConvergenceArgs {
  std::string scenario = "diagonal";
  int d = 1;
  double x0 = 0.0;
  std::vector<double> T = {100.0, 1000.0, 10000.0};
  std::uint64_t n = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::string rho_path;
  int workers = 1;
  std::optional<double> factor;  // require ks_delta[k+1] <= factor * ks_delta[k]
  std::string output = "-";
  std::string format = "csv";
};

inline int run_convergence(const ConvergenceArgs& args, std::ostream& out,
                           std::ostream& err) {
  const Scenario sc = make_scenario(args.scenario, args.d, args.x0, args.rho_path);
  GenerateOptions opts;
  opts.workers = args.workers;
  const std::vector<ComparisonReport> reports =
      convergence_sweep(sc, args.T, args.n, args.seed, opts);

  RunMetadata meta = detail::batch_metadata(sc, args.T.back(), args.n, args.seed);
  detail::emit_output(args.output, out, [&](std::ostream& os) {
    if (args.format == "json") {
      const nlohmann::json j = reports;
      os << j.dump(2) << '\n';
    } else {
      write_convergence_csv(os, reports);
    }
  }, &meta);

  if (args.factor) {
    for (std::size_t k = 1; k < reports.size(); ++k) {
      if (reports[k].ks_delta > *args.factor * reports[k - 1].ks_delta) {
        err << "ks distance rose from " << format_real(reports[k - 1].ks_delta)
            << " (T=" << format_real(reports[k - 1].T) << ") to "
            << format_real(reports[k].ks_delta) << " (T=" << format_real(reports[k].T)
            << "), beyond factor " << format_real(*args.factor) << '\n';
        return 1;
      }
    }
  }
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  bool full = false;
  std::uint64_t seed = 0x00C0FFEE5EEDULL;
  std::string output = "-";
  std::string format = "text";
};

inline int run_verify(const VerifyArgs& args, std::ostream& out, std::ostream&) {
  VerifyOptions opts;
  opts.full = args.full;
  opts.seed = args.seed;
  const std::vector<CheckResult> results = run_all_checks(opts);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass ? 1 : 0;

  detail::emit_output(args.output, out, [&](std::ostream& os) {
    if (args.format == "json") {
      nlohmann::json j;
      j["checks"] = results;
      j["passed"] = passed;
      j["total"] = results.size();
      os << j.dump(2) << '\n';
    } else {
      for (const auto& r : results)
        os << (r.pass ? "PASS " : "FAIL ") << r.name << " - " << r.detail << '\n';
      os << "passed " << passed << '/' << results.size() << " checks\n";
    }
  });
  return passed == results.size() ? 0 : 1;
}

// ---------------------------------------------------------------- dispatch

inline int cli_main(int argc, const char* const* argv, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"lattice points in dilated translated boxes: counts, limit laws, sampling"};
  app.name("latbox");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CountArgs count_args;
  auto* cmd_count = app.add_subcommand("count", "count lattice points in one box");
  cmd_count->add_option("--d", count_args.d, "dimension")->required();
  cmd_count->add_option("--a", count_args.a, "half side length (default 1)");
  cmd_count->add_option("--t", count_args.t, "dilation")->required();
  cmd_count->add_option("--x", count_args.x, "translation coordinates (default all 0)");
  cmd_count->add_flag("--bruteforce", count_args.bruteforce,
                      "cross-check against direct enumeration");
  cmd_count->add_option("--output,-o", count_args.output, "output path or '-'");
  cmd_count->add_option("--format", count_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  SampleArgs sample_args;
  auto* cmd_sample = app.add_subcommand("sample", "draw Delta and normalized error samples");
  cmd_sample->add_option("--scenario", sample_args.scenario, "diagonal or iid_uniform")
      ->check(CLI::IsMember({"diagonal", "iid_uniform"}));
  cmd_sample->add_option("--d", sample_args.d, "dimension")->required();
  cmd_sample->add_option("--x0", sample_args.x0, "axis translation (diagonal)");
  cmd_sample->add_option("--T", sample_args.T, "dilation window length")->required();
  cmd_sample->add_option("--n", sample_args.n, "number of samples")->required();
  cmd_sample->add_option("--seed", sample_args.seed, "master seed (default 1)");
  cmd_sample->add_option("--rho", sample_args.rho_path, "piecewise density CSV for t/T");
  cmd_sample->add_option("--workers", sample_args.workers, "worker threads (default 1)");
  cmd_sample->add_option("--output,-o", sample_args.output, "output path or '-'");
  cmd_sample->add_option("--format", sample_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CfArgs cf_args;
  auto* cmd_cf = app.add_subcommand("cf", "empirical vs limit characteristic function");
  cmd_cf->add_option("--scenario", cf_args.scenario, "diagonal or iid_uniform")
      ->check(CLI::IsMember({"diagonal", "iid_uniform"}));
  cmd_cf->add_option("--d", cf_args.d, "dimension")->required();
  cmd_cf->add_option("--x0", cf_args.x0, "axis translation (diagonal)");
  cmd_cf->add_option("--T", cf_args.T, "dilation window length")->required();
  cmd_cf->add_option("--n", cf_args.n, "number of samples")->required();
  cmd_cf->add_option("--seed", cf_args.seed, "master seed (default 1)");
  cmd_cf->add_option("--rho", cf_args.rho_path, "piecewise density CSV for t/T");
  cmd_cf->add_option("--workers", cf_args.workers, "worker threads (default 1)");
  cmd_cf->add_option("--umin", cf_args.umin, "grid start (default -20)");
  cmd_cf->add_option("--umax", cf_args.umax, "grid end (default 20)");
  cmd_cf->add_option("--ustep", cf_args.ustep, "grid step (default 0.25)");
  cmd_cf->add_option("--tol", cf_args.tol, "fail (exit 1) if sup gap exceeds this");
  cmd_cf->add_option("--output,-o", cf_args.output, "output path or '-'");
  cmd_cf->add_option("--format", cf_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  LawArgs law_args;
  auto* cmd_law = app.add_subcommand("law", "analytic limit law tables");
  cmd_law->add_option("--case", law_args.kind, "diagonal or iid_uniform")
      ->check(CLI::IsMember({"diagonal", "iid_uniform"}));
  cmd_law->add_option("--d", law_args.d, "dimension")->required();
  cmd_law->add_option("--y", law_args.y, "gap parameter in [0, 1] (diagonal)");
  cmd_law->add_option("--x0", law_args.x0, "axis translation, y = |1 - 2{x0}| (diagonal)");
  cmd_law->add_option("--curve", law_args.curve, "both, pdf, cdf, or cf")
      ->check(CLI::IsMember({"both", "pdf", "cdf", "cf"}));
  cmd_law->add_option("--zmin", law_args.zmin, "grid start (default -support)");
  cmd_law->add_option("--zmax", law_args.zmax, "grid end (default +support)");
  cmd_law->add_option("--grid-n", law_args.grid_n, "grid points (default 513)");
  cmd_law->add_option("--umin", law_args.umin, "cf grid start (default -20)");
  cmd_law->add_option("--umax", law_args.umax, "cf grid end (default 20)");
  cmd_law->add_option("--ustep", law_args.ustep, "cf grid step (default 0.25)");
  cmd_law->add_option("--output,-o", law_args.output, "output path or '-'");
  cmd_law->add_option("--format", law_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  ConvergenceArgs conv_args;
  auto* cmd_conv = app.add_subcommand("convergence", "statistics along a window grid");
  cmd_conv->add_option("--scenario", conv_args.scenario, "diagonal or iid_uniform")
      ->check(CLI::IsMember({"diagonal", "iid_uniform"}));
  cmd_conv->add_option("--d", conv_args.d, "dimension")->required();
  cmd_conv->add_option("--x0", conv_args.x0, "axis translation (diagonal)");
  cmd_conv->add_option("--T", conv_args.T, "window lengths (default 100 1000 10000)");
  cmd_conv->add_option("--n", conv_args.n, "samples per window")->required();
  cmd_conv->add_option("--seed", conv_args.seed, "master seed (default 1)");
  cmd_conv->add_option("--rho", conv_args.rho_path, "piecewise density CSV for t/T");
  cmd_conv->add_option("--workers", conv_args.workers, "worker threads (default 1)");
  cmd_conv->add_option("--factor", conv_args.factor,
                       "fail (exit 1) if ks_delta grows beyond this factor per step");
  cmd_conv->add_option("--output,-o", conv_args.output, "output path or '-'");
  cmd_conv->add_option("--format", conv_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  VerifyArgs verify_args;
  auto* cmd_verify = app.add_subcommand("verify", "run built-in self checks");
  cmd_verify->add_flag("--full", verify_args.full, "larger draw counts and denser grids");
  cmd_verify->add_option("--seed", verify_args.seed, "seed for randomized checks");
  cmd_verify->add_option("--output,-o", verify_args.output, "output path or '-'");
  cmd_verify->add_option("--format", verify_args.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cmd_count->parsed()) return run_count(count_args, out, err);
    if (cmd_sample->parsed()) return run_sample(sample_args, out, err);
    if (cmd_cf->parsed()) return run_cf(cf_args, out, err);
    if (cmd_law->parsed()) return run_law(law_args, out, err);
    if (cmd_conv->parsed()) return run_convergence(conv_args, out, err);
    if (cmd_verify->parsed()) return run_verify(verify_args, out, err);
    err << "no subcommand given\n";
    return 2;
  } catch (const io_error& e) {
    err << "io error: " << e.what() << '\n';
    return 3;
  } catch (const numeric_error& e) {
    err << "numeric error: " << e.what() << '\n';
    return 1;
  } catch (const resource_error& e) {
    err << "resource limit: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const std::overflow_error& e) {
    err << "overflow: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

inline int cli_main(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("latbox");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace latbox
