#include "mwrecon/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "mwrecon/cli/ablation.hpp"
#include "mwrecon/cli/settings.hpp"
#include "mwrecon/io.hpp"
#include "mwrecon/log.hpp"
#include "mwrecon/metrics.hpp"
#include "mwrecon/phantom.hpp"

namespace mwrecon::cli {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

namespace {

namespace fs = std::filesystem;

// Bad invocation: reported with exit status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Globals {
  std::string config;
  std::uint64_t seed = 42;
  bool seed_given = false;
  int jobs = 1;
  bool quiet = false;
  bool verbose = false;
};

struct PhantomArgs {
  int size = 128;
  int coils = 8;
  double snr = 0.0;
  bool has_snr = false;
  std::string out, clean_out;
};

struct PatternArgs {
  std::string input, out;
  int R = 0;
  int acs = 0;
};

struct ReconArgs {
  std::string method;
  std::vector<std::string> methods;
  std::string input, out, report, ref;
  int R = 0;
  int acs = 0;
  int iters = -1;
  std::string grappa_kernel;
  std::optional<double> ridge;
};

struct EvalArgs {
  std::string recon, ref, report;
};

struct AblateArgs {
  std::string out, curves;
};

RunConfig load_run_config(const Globals& g) {
  RunConfig rc = g.config.empty() ? RunConfig{} : RunConfig::from(ConfigFile::load(g.config));
  if (g.seed_given) rc.seed = g.seed;
  return rc;
}

std::uint64_t master_seed(const RunConfig& rc) { return rc.seed.value_or(42); }

// "bx:1,by:2" in either order; missing keys keep the configured value.
void apply_grappa_kernel(const std::string& text, ReconSettings& s) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    const std::string key = item.substr(0, colon);
    int v = -1;
    if (colon != std::string::npos) {
      const std::string value = item.substr(colon + 1);
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size()) v = -1;
    }
    if (key == "bx" && v >= 0) {
      s.grappa_bx_half = v;
    } else if (key == "by" && v >= 2) {
      s.grappa_by_taps = v;
    } else {
      throw UsageError("bad --grappa-kernel '" + text + "', expected bx:<half width>,by:<taps >= 2>");
    }
  }
}

RunConfig recon_run_config(const Globals& g, const ReconArgs& a) {
  RunConfig rc = load_run_config(g);
  if (a.iters > 0) rc.recon.optimizer.iterations = a.iters;
  if (!a.grappa_kernel.empty()) apply_grappa_kernel(a.grappa_kernel, rc.recon);
  if (a.ridge) {
    if (!(*a.ridge >= 0.0)) throw UsageError("--ridge must be non-negative");
    rc.recon.ridge = *a.ridge;
  }
  return rc;
}

Method method_arg(const std::string& name) {
  try {
    return parse_method(name);
  } catch (const std::invalid_argument&) {
    throw UsageError("unknown method '" + name + "'");
  }
}

void require_distinct(const std::string& in, const std::string& out) {
  if (in.empty() || out.empty()) return;
  std::error_code ec;
  if (fs::weakly_canonical(in, ec) == fs::weakly_canonical(out, ec)) {
    throw UsageError("output path " + out + " is the input path");
  }
}

SamplingPattern pattern_for(const MultiCoilKSpace& k, int R, int acs) {
  try {
    return SamplingPattern::uniform(k.ny(), R, static_cast<std::size_t>(acs));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open " + path + " for writing");
  return os;
}

const char* kReportHeader = "method,R,acs,seed,psnr,ssim,rmse,train_iters,wall_ms\n";

void report_row(std::ostream& os, const ReconConfig& cfg, const std::optional<MetricReport>& m, double wall_ms) {
  os << to_string(cfg.method) << ',' << cfg.pattern.acceleration() << ',' << cfg.pattern.acs_count() << ','
     << cfg.seed << ',';
  if (m) {
    os << format_double(m->psnr_db) << ',' << format_double(m->ssim) << ',' << format_double(m->rmse_pct);
  } else {
    os << ",,";
  }
  os << ',' << (is_network_method(cfg.method) ? cfg.optimizer.iterations : 0) << ',' << format_double(wall_ms)
     << '\n';
}

int cmd_phantom(const Globals& g, const PhantomArgs& a, std::ostream& out) {
  const RunConfig rc = load_run_config(g);
  if (a.size < 16) throw UsageError("--size must be at least 16");
  if (a.coils < 1) throw UsageError("--coils must be at least 1");
  const auto scan = make_phantom_scan(static_cast<std::size_t>(a.size), static_cast<std::size_t>(a.coils),
                                      a.has_snr ? std::optional<double>(a.snr) : std::nullopt, master_seed(rc));
  save_kspace(a.out, scan.noisy);
  if (!a.clean_out.empty()) save_kspace(a.clean_out, scan.clean);
  out << "wrote " << a.out << " (" << a.coils << " coils, " << a.size << "x" << a.size << ")\n";
  return kExitOk;
}

int cmd_undersample(const Globals&, const PatternArgs& a, const std::string& pattern_out, std::ostream& out) {
  require_distinct(a.input, a.out);
  const auto k = load_kspace(a.input);
  const auto pattern = pattern_for(k, a.R, a.acs);
  save_kspace(a.out, apply_pattern(k, pattern));
  if (!pattern_out.empty()) save_pattern(pattern_out, pattern);
  out << "kept " << pattern.acquired_count() << " of " << pattern.ny() << " rows\n";
  return kExitOk;
}

std::optional<MetricReport> metrics_against(const ReconResult& res, const std::string& ref_path) {
  if (ref_path.empty()) return std::nullopt;
  const auto ref = load_kspace(ref_path);
  if (!ref.same_shape(res.kspace)) throw DimensionError("reference and reconstruction differ in shape");
  return evaluate(res.sos, reconstruct_image(ref));
}

int cmd_recon(const Globals& g, const ReconArgs& a, std::ostream& out) {
  const Method method = method_arg(a.method);
  require_distinct(a.input, a.out);
  require_distinct(a.input, a.report);
  const RunConfig rc = recon_run_config(g, a);
  const auto k = load_kspace(a.input);
  const ReconConfig cfg = rc.recon.make(method, pattern_for(k, a.R, a.acs), master_seed(rc), g.jobs);
  const auto t0 = std::chrono::steady_clock::now();
  const ReconResult res = reconstruct(apply_pattern(k, cfg.pattern), cfg);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (!a.out.empty()) save_kspace(a.out, res.kspace);
  const auto m = metrics_against(res, a.ref);
  if (!a.report.empty()) {
    auto os = open_out(a.report);
    os << kReportHeader;
    report_row(os, cfg, m, ms);
  }
  out << to_string(method) << " done in " << format_double(std::round(ms)) << " ms";
  if (m) out << ", psnr " << format_double(m->psnr_db) << " ssim " << format_double(m->ssim) << " rmse "
             << format_double(m->rmse_pct);
  out << '\n';
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto recon = load_kspace(a.recon);
  const auto ref = load_kspace(a.ref);
  if (!recon.same_shape(ref)) throw DimensionError("reconstruction and reference differ in shape");
  const auto m = evaluate(reconstruct_image(recon), reconstruct_image(ref));
  std::ostringstream row;
  row << "psnr,ssim,rmse\n"
      << format_double(m.psnr_db) << ',' << format_double(m.ssim) << ',' << format_double(m.rmse_pct) << '\n';
  if (a.report.empty()) {
    out << row.str();
  } else {
    open_out(a.report) << row.str();
  }
  return kExitOk;
}

int cmd_compare(const Globals& g, const ReconArgs& a, std::ostream& out) {
  if (a.methods.empty()) throw UsageError("compare needs --method");
  std::vector<Method> methods;
  for (const auto& name : a.methods) methods.push_back(method_arg(name));
  require_distinct(a.input, a.report);
  const RunConfig rc = recon_run_config(g, a);
  const auto k = load_kspace(a.input);
  const auto pattern = pattern_for(k, a.R, a.acs);
  const auto measured = apply_pattern(k, pattern);
  std::ostringstream table;
  table << kReportHeader;
  for (Method m : methods) {
    const ReconConfig cfg = rc.recon.make(m, pattern, master_seed(rc), g.jobs);
    const auto t0 = std::chrono::steady_clock::now();
    const ReconResult res = reconstruct(measured, cfg);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    report_row(table, cfg, metrics_against(res, a.ref), ms);
  }
  if (a.report.empty()) {
    out << table.str();
  } else {
    open_out(a.report) << table.str();
  }
  return kExitOk;
}

int cmd_ablate(const Globals& g, const AblateArgs& a, std::ostream& out, std::ostream& err) {
  if (g.config.empty()) throw UsageError("ablate needs --config");
  require_distinct(g.config, a.out);
  require_distinct(g.config, a.curves);
  const RunConfig rc = load_run_config(g);
  rc.validate_ablation();
  const auto rows = run_ablation(rc, master_seed(rc), g.jobs);
  {
    auto os = open_out(a.out);
    write_results_csv(os, rows, rc.ablation.record_timings);
  }
  if (!a.curves.empty()) {
    auto os = open_out(a.curves);
    write_curves_csv(os, rows);
  }
  const auto failed = std::ranges::find_if(rows, [](const CellOutcome& r) { return !r.error.empty(); });
  const auto n_failed = std::ranges::count_if(rows, [](const CellOutcome& r) { return !r.error.empty(); });
  out << "wrote " << rows.size() << " rows to " << a.out << '\n';
  if (failed != rows.end()) {
    err << "error: " << n_failed << " of " << rows.size() << " cells failed; first: row "
        << (failed - rows.begin()) + 1 << " (" << to_string(failed->cell.method) << "): " << failed->error << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-weight scan-specific MRI reconstruction", "mwrecon"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "key = value config file");
  app.add_option("--seed", g.seed, "master seed")->each([&](const std::string&) { g.seed_given = true; });
  app.add_option("--jobs", g.jobs, "parallel workers")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "only print errors");
  app.add_flag("-v,--verbose", g.verbose, "progress messages");

  PhantomArgs ph;
  auto* phantom = app.add_subcommand("phantom", "simulate a multi-coil Shepp-Logan scan");
  phantom->add_option("--size", ph.size, "matrix size");
  phantom->add_option("--coils", ph.coils, "receive coils");
  phantom->add_option("--snr", ph.snr, "SNR in dB (noise free when omitted)")->each([&](const std::string&) {
    ph.has_snr = true;
  });
  phantom->add_option("--out", ph.out, "output MWKS")->required();
  phantom->add_option("--clean-out", ph.clean_out, "noise-free MWKS");

  PatternArgs pa;
  std::string pattern_out;
  auto* under = app.add_subcommand("undersample", "zero the rows a uniform pattern skips");
  under->add_option("--input", pa.input)->required();
  under->add_option("--R", pa.R, "acceleration")->required();
  under->add_option("--acs", pa.acs, "calibration rows")->required();
  under->add_option("--out", pa.out)->required();
  under->add_option("--pattern-out", pattern_out, "write the pattern as text");

  ReconArgs ra;
  auto* recon = app.add_subcommand("recon", "reconstruct undersampled k-space");
  recon->add_option("--method", ra.method, "grappa | raki | rraki | mw-raki | mw-rraki")->required();
  recon->add_option("--input", ra.input)->required();
  recon->add_option("--R", ra.R)->required();
  recon->add_option("--acs", ra.acs)->required();
  recon->add_option("--out", ra.out, "reconstructed MWKS");
  recon->add_option("--report", ra.report, "CSV report");
  recon->add_option("--ref", ra.ref, "fully sampled reference MWKS for metrics");
  auto add_recon_knobs = [](CLI::App* sub, ReconArgs& r) {
    sub->add_option("--iters", r.iters, "training iterations")->check(CLI::PositiveNumber);
    sub->add_option("--grappa-kernel", r.grappa_kernel, "GRAPPA footprint, e.g. bx:1,by:2");
    sub->add_option("--ridge", r.ridge, "GRAPPA ridge");
  };
  add_recon_knobs(recon, ra);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "PSNR, SSIM and RMSE of SOS images");
  eval->add_option("--recon", ea.recon)->required();
  eval->add_option("--ref", ea.ref)->required();
  eval->add_option("--report", ea.report);

  ReconArgs ca;
  auto* compare = app.add_subcommand("compare", "run several methods on one scan");
  compare->add_option("--method", ca.methods, "methods (repeat or comma separated)")->delimiter(',')->required();
  compare->add_option("--input", ca.input)->required();
  compare->add_option("--ref", ca.ref);
  compare->add_option("--R", ca.R)->required();
  compare->add_option("--acs", ca.acs)->required();
  compare->add_option("--report", ca.report);
  add_recon_knobs(compare, ca);

  AblateArgs aa;
  auto* ablate = app.add_subcommand("ablate", "run a parameter grid from --config");
  ablate->add_option("--out", aa.out, "results CSV")->required();
  ablate->add_option("--curves", aa.curves, "loss curve CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  log::set_level(g.quiet ? log::Level::quiet : g.verbose ? log::Level::info : log::Level::warn);
  std::ostream null_stream(nullptr);
  std::ostream& status = g.quiet ? null_stream : out;
  try {
    if (*phantom) return cmd_phantom(g, ph, status);
    if (*under) return cmd_undersample(g, pa, pattern_out, status);
    if (*recon) return cmd_recon(g, ra, status);
    if (*eval) return cmd_eval(ea, out);
    if (*compare) return cmd_compare(g, ca, out);
    if (*ablate) return cmd_ablate(g, aa, status, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace mwrecon::cli
