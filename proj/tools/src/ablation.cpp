#include "mwrecon/cli/ablation.hpp"

#include <atomic>
#include <chrono>
#include <map>
#include <thread>

#include "mwrecon/cli/cli.hpp"
#include "mwrecon/log.hpp"
#include "mwrecon/metrics.hpp"
#include "mwrecon/phantom.hpp"
#include "mwrecon/random.hpp"

namespace mwrecon::cli {
namespace {

struct Scan {
  MultiCoilKSpace noisy;  // float32 quantized, as `phantom` would save it
  RealImage reference;
};

template <class T>
std::vector<std::optional<T>> axis(const std::vector<T>& values) {
  if (values.empty()) return {std::nullopt};
  return {values.begin(), values.end()};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + '"';
}

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

}  // namespace

std::uint64_t phantom_seed(std::uint64_t master, int seed_index) {
  return mix_seed(master, {0x7068616eULL, static_cast<std::uint64_t>(seed_index)});
}

std::uint64_t cell_seed(std::uint64_t master, int seed_index, int acceleration, int acs) {
  return mix_seed(master, {static_cast<std::uint64_t>(seed_index), static_cast<std::uint64_t>(acceleration),
                           static_cast<std::uint64_t>(acs)});
}

std::vector<AblationCell> expand_cells(const RunConfig& cfg, std::uint64_t master) {
  cfg.validate_ablation();
  const auto& a = cfg.ablation;
  std::vector<AblationCell> cells;
  for (Method m : a.methods)
    for (int r : a.accelerations)
      for (int acs : a.acs)
        for (auto p : axis(a.exponents))
          for (auto l : axis(a.filter_counts))
            for (auto d : axis(a.depths))
              for (int s = 0; s < a.seeds; ++s)
                cells.push_back({m, r, acs, p, l, d, s, phantom_seed(master, s), cell_seed(master, s, r, acs)});
  return cells;
}

ReconConfig cell_config(const RunConfig& cfg, const AblationCell& cell, int threads) {
  const auto pattern = SamplingPattern::uniform(static_cast<std::size_t>(cfg.ablation.size), cell.acceleration,
                                                static_cast<std::size_t>(cell.acs));
  ReconConfig rc = cfg.recon.make(cell.method, pattern, cell.seed, threads);
  if (cell.exponent) rc.multiweight.high_pass = {FilterParams::high_pass(*cell.exponent)};
  if (cell.filter_count) rc.multiweight.high_pass.resize(static_cast<std::size_t>(*cell.filter_count));
  if (cell.depth) rc.layers = layers_for_depth(*cell.depth);
  return rc;
}

std::vector<CellOutcome> run_ablation(const RunConfig& cfg, std::uint64_t master, int jobs) {
  const auto cells = expand_cells(cfg, master);
  const auto& a = cfg.ablation;

  std::map<int, Scan> scans;
  for (int s = 0; s < a.seeds; ++s) {
    const auto ps = make_phantom_scan(static_cast<std::size_t>(a.size), static_cast<std::size_t>(a.coils), a.snr_db,
                                      phantom_seed(master, s));
    scans.emplace(s, Scan{quantize_float32(ps.noisy), reconstruct_image(quantize_float32(ps.clean))});
  }

  std::vector<CellOutcome> out(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      CellOutcome& o = out[i];
      o.cell = cells[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const ReconConfig rc = cell_config(cfg, o.cell, 1);
        const Scan& scan = scans.at(o.cell.seed_index);
        const ReconResult res = reconstruct(apply_pattern(scan.noisy, rc.pattern), rc);
        o.metrics = evaluate(res.sos, scan.reference);
        o.train_iters = is_network_method(rc.method) ? rc.optimizer.iterations : 0;
        o.mean_loss = res.mean_loss_history();
      } catch (const std::exception& e) {
        o.error = e.what();
      }
      o.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      log::info("cell " + std::to_string(i + 1) + "/" + std::to_string(cells.size()) + " " +
                to_string(o.cell.method) + (o.error.empty() ? " ok" : " failed: " + o.error));
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return out;
}

void write_results_csv(std::ostream& os, const std::vector<CellOutcome>& rows, bool record_timings) {
  os << "method,R,acs,seed,psnr,ssim,rmse,train_iters,wall_ms,P,L,depth,seed_index,phantom_seed,status\n";
  for (const auto& r : rows) {
    const auto& c = r.cell;
    os << to_string(c.method) << ',' << c.acceleration << ',' << c.acs << ',' << c.seed << ',';
    if (r.metrics) {
      os << format_double(r.metrics->psnr_db) << ',' << format_double(r.metrics->ssim) << ','
         << format_double(r.metrics->rmse_pct);
    } else {
      os << ",,";
    }
    os << ',' << r.train_iters << ',' << (record_timings ? format_double(r.wall_ms) : "") << ',' << opt(c.exponent)
       << ',' << opt(c.filter_count) << ',' << opt(c.depth) << ',' << c.seed_index << ',' << c.phantom_seed << ','
       << csv_field(r.error.empty() ? "ok" : "failed: " + r.error) << '\n';
  }
}

void write_curves_csv(std::ostream& os, const std::vector<CellOutcome>& rows) {
  os << "method,R,acs,seed,P,L,depth,seed_index,iteration,loss\n";
  for (const auto& r : rows) {
    const auto& c = r.cell;
    const std::string prefix = to_string(c.method) + ',' + std::to_string(c.acceleration) + ',' +
                               std::to_string(c.acs) + ',' + std::to_string(c.seed) + ',' + opt(c.exponent) + ',' +
                               opt(c.filter_count) + ',' + opt(c.depth) + ',' + std::to_string(c.seed_index) + ',';
    for (std::size_t i = 0; i < r.mean_loss.size(); ++i) {
      os << prefix << i + 1 << ',' << format_double(r.mean_loss[i]) << '\n';
    }
  }
}

}  // namespace mwrecon::cli
