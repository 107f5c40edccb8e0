#include "mwrecon/recon.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mwrecon/error.hpp"
#include "mwrecon/fft.hpp"
#include "mwrecon/log.hpp"

namespace mwrecon {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void check_measured(const MultiCoilKSpace& measured, const ReconConfig& cfg) {
  if (measured.empty()) throw DimensionError("measured k-space is empty");
  if (measured.ny() != cfg.pattern.ny()) {
    throw DimensionError("sampling pattern covers " + std::to_string(cfg.pattern.ny()) +
                         " rows but the data has " + std::to_string(measured.ny()));
  }
  if (cfg.pattern.fully_sampled()) throw Error("pattern is fully sampled: nothing to reconstruct");
  if (!measured.all_finite()) throw Error("measured k-space contains non-finite samples");
}

double normalization_scale(const MultiCoilKSpace& measured, const ReconConfig& cfg) {
  if (!cfg.normalize) return 1.0;
  const double s = max_abs(measured.data());
  return s > 0.0 ? s : 1.0;
}

MultiCoilKSpace scaled(const MultiCoilKSpace& k, double factor) {
  MultiCoilKSpace out = k;
  if (factor != 1.0) {
    for (auto& v : out.data()) v *= factor;
  }
  return out;
}

// Rescales the estimate and copies every acquired row from the input untouched.
ReconResult finish(const MultiCoilKSpace& measured, const MultiCoilKSpace& estimate, double scale,
                   const ReconConfig& cfg) {
  MultiCoilKSpace k = scaled(estimate, scale);
  for (std::size_t c = 0; c < k.n_coils(); ++c) {
    for (std::size_t y = 0; y < k.ny(); ++y) {
      if (cfg.pattern.acquired(y)) std::ranges::copy(measured.row(c, y), k.row(c, y).begin());
    }
  }
  CoilImage images = ifft2c(k);
  RealImage sos = sos_combine(images);
  return ReconResult{std::move(k), std::move(images), std::move(sos), {}, {}, cfg, scale};
}

// Runs job(i) for i in [0, n) on up to `threads` workers; rethrows the
// failure with the lowest index.
template <class Job>
void run_jobs(std::size_t n, int threads, Job job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Stride-R rows only, compacted and zero padded so a dilation-1 pass of
// the network yields one output row per lattice row.
Tensor4 lattice_input(const std::vector<MultiCoilKSpace>& branches, const NetworkArch& arch) {
  const auto f = arch.field();
  const auto& first = branches.front();
  const std::size_t nc = first.n_coils(), ny = first.ny(), nx = first.nx();
  const std::size_t R = static_cast<std::size_t>(arch.dilation);
  const std::size_t lattice = (ny + R - 1) / R;
  const std::size_t top = static_cast<std::size_t>(f.anchor_tap);
  const std::size_t left = static_cast<std::size_t>(f.center_col);
  const std::size_t rows = lattice + static_cast<std::size_t>(f.ky_taps - 1);
  const std::size_t cols = nx + static_cast<std::size_t>(f.kx_width - 1);
  Tensor4 t(branches.size(), 2 * nc, rows, cols);
  for (std::size_t b = 0; b < branches.size(); ++b) {
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t k = 0; k < lattice; ++k) {
        const auto row = branches[b].row(c, k * R);
        for (std::size_t x = 0; x < nx; ++x) {
          t(b, c, top + k, left + x) = row[x].real();
          t(b, nc + c, top + k, left + x) = row[x].imag();
        }
      }
    }
  }
  return t;
}

struct CoilOutcome {
  std::vector<double> loss_history;
};

// Shared core of raki_reconstruct and mw_reconstruct. With only the
// all-pass branch this is plain RAKI.
ReconResult network_reconstruct(const MultiCoilKSpace& measured, const ReconConfig& cfg,
                                const MultiWeightConfig& mw) {
  const auto t0 = Clock::now();
  check_measured(measured, cfg);
  mw.validate();
  const NetworkArch arch = cfg.network_arch(measured.n_coils());
  const std::size_t nc = measured.n_coils(), ny = measured.ny(), nx = measured.nx();
  const int R = cfg.pattern.acceleration();

  const double scale = normalization_scale(measured, cfg);
  const MultiCoilKSpace norm = apply_pattern(scaled(measured, 1.0 / scale), cfg.pattern);

  const std::vector<WeightFilter> filters = mw.materialize(ny, nx);
  const std::vector<MultiCoilKSpace> branches = build_mw_batch(norm, filters);
  std::vector<MultiCoilKSpace> acs;
  for (const auto& b : branches) acs.push_back(extract_acs(b, cfg.pattern));
  if (acs.front().ny() < min_training_rows(arch)) {
    throw Error("calibration block has " + std::to_string(acs.front().ny()) + " rows; the network needs at least " +
                std::to_string(min_training_rows(arch)));
  }

  const Tensor4 input = lattice_input(branches, arch);
  std::vector<MultiCoilKSpace> estimates(branches.size(), MultiCoilKSpace(nc, ny, nx));
  std::vector<CoilOutcome> outcomes(nc);
  std::mutex timing_mutex;
  double train_ms = 0.0, infer_ms = 0.0;

  run_jobs(nc, cfg.threads, [&](std::size_t coil) {
    const auto t_train = Clock::now();
    std::vector<TrainingSet> sets;
    for (const auto& a : acs) sets.push_back(build_training_pairs(a, arch, coil));
    const TrainingSet set = concat_sets(sets);
    ScanNetwork net = init_network(arch, cfg.seed + coil);
    TrainingResult trained;
    try {
      trained = train(std::move(net), set, cfg.optimizer);
    } catch (const TrainingError& e) {
      throw TrainingError(std::string(e.what()) + " (coil " + std::to_string(coil) + ")",
                          static_cast<int>(coil));
    }
    const double tt = ms_since(t_train);

    const auto t_infer = Clock::now();
    const Tensor4 out = forward(trained.net.with_dilation(1), input);
    for (std::size_t b = 0; b < branches.size(); ++b) {
      for (std::size_t y = 0; y < ny; ++y) {
        if (cfg.pattern.acquired(y)) continue;
        const std::size_t k = y / static_cast<std::size_t>(R);
        const std::size_t m = y % static_cast<std::size_t>(R) - 1;
        auto row = estimates[b].row(coil, y);
        for (std::size_t x = 0; x < nx; ++x) {
          row[x] = {out(b, m, k, x), out(b, static_cast<std::size_t>(R - 1) + m, k, x)};
        }
      }
    }
    const double ti = ms_since(t_infer);
    outcomes[coil].loss_history = std::move(trained.loss_history);
    log::debug("coil " + std::to_string(coil) + " trained");
    std::lock_guard lock(timing_mutex);
    train_ms += tt;
    infer_ms += ti;
  });

  // De-weight each branch and average over the branches valid at each sample.
  MultiCoilKSpace combined = estimates.front();
  if (branches.size() > 1) {
    std::vector<double> count(ny * nx, 1.0);
    for (std::size_t b = 1; b < branches.size(); ++b) {
      const Deweighted d = remove_filter(estimates[b], filters[b], deweight_eps(filters[b], mw.eps_rel));
      for (std::size_t i = 0; i < count.size(); ++i) count[i] += d.valid[i] ? 1.0 : 0.0;
      for (std::size_t c = 0; c < nc; ++c) {
        auto dst = combined.coil(c);
        auto src = d.kspace.coil(c);
        for (std::size_t i = 0; i < dst.size(); ++i) {
          if (d.valid[i]) dst[i] += src[i];
        }
      }
    }
    for (std::size_t c = 0; c < nc; ++c) {
      auto dst = combined.coil(c);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] /= count[i];
    }
  }

  ReconResult result = finish(measured, combined, scale, cfg);
  for (auto& o : outcomes) result.loss_histories.push_back(std::move(o.loss_history));
  result.timings.train_ms = train_ms;
  result.timings.infer_ms = infer_ms;
  result.timings.total_ms = ms_since(t0);
  return result;
}

}  // namespace

Method parse_method(std::string_view name) {
  std::string s(name);
  std::ranges::replace(s, '-', '_');
  if (s == "grappa") return Method::grappa;
  if (s == "raki") return Method::raki;
  if (s == "rraki") return Method::rraki;
  if (s == "mw_raki") return Method::mw_raki;
  if (s == "mw_rraki") return Method::mw_rraki;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::grappa: return "grappa";
    case Method::raki: return "raki";
    case Method::rraki: return "rraki";
    case Method::mw_raki: return "mw_raki";
    case Method::mw_rraki: return "mw_rraki";
  }
  return "?";
}

bool is_network_method(Method method) noexcept { return method != Method::grappa; }
bool is_multiweight(Method method) noexcept { return method == Method::mw_raki || method == Method::mw_rraki; }
bool is_residual(Method method) noexcept { return method == Method::rraki || method == Method::mw_rraki; }

MultiWeightConfig MultiWeightConfig::default_bank() {
  return {{FilterParams::high_pass(0.6), FilterParams::high_pass(0.2)}, 1e-6};
}

std::vector<WeightFilter> MultiWeightConfig::materialize(std::size_t ny, std::size_t nx) const {
  validate();
  std::vector<WeightFilter> out;
  out.push_back(WeightFilter::make(FilterParams::identity(), ny, nx));
  for (const auto& p : high_pass) out.push_back(WeightFilter::make(p, ny, nx));
  return out;
}

void MultiWeightConfig::validate() const {
  for (const auto& p : high_pass) {
    if (p.all_pass) throw std::invalid_argument("the all-pass branch is implicit; list only high-pass filters");
    p.validate();
  }
  if (!(eps_rel > 0.0 && eps_rel < 1.0)) throw std::invalid_argument("filter_eps must lie in (0, 1)");
}

ReconConfig::ReconConfig(Method m, SamplingPattern p) : method(m), pattern(std::move(p)) {}

KernelGeometry ReconConfig::grappa_geometry() const {
  return {grappa_bx_half, grappa_by_taps, pattern.acceleration()};
}

NetworkArch ReconConfig::network_arch(std::size_t n_coils) const {
  const int nc = static_cast<int>(n_coils);
  const int R = pattern.acceleration();
  const std::optional<ConvSpec> skip =
      is_residual(method) ? std::optional<ConvSpec>(ConvSpec{0, 2, 5, Activation::identity}) : std::nullopt;
  if (layers) return NetworkArch::build(nc, R, *layers, skip);
  if (method == Method::mw_raki) return NetworkArch::two_layer(nc, R);
  if (is_residual(method)) return NetworkArch::residual(nc, R);
  return NetworkArch::three_layer(nc, R);
}

MultiWeightConfig ReconConfig::effective_multiweight() const {
  if (is_multiweight(method)) return multiweight;
  return {{}, multiweight.eps_rel};
}

void ReconConfig::validate() const {
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (!(ridge >= 0.0)) throw std::invalid_argument("ridge must be non-negative");
  if (method == Method::grappa) {
    grappa_geometry().validate();
  } else {
    optimizer.validate();
    effective_multiweight().validate();
  }
}

std::vector<double> ReconResult::mean_loss_history() const {
  std::vector<double> mean;
  if (loss_histories.empty()) return mean;
  const std::size_t n = loss_histories.front().size();
  mean.assign(n, 0.0);
  for (const auto& h : loss_histories) {
    for (std::size_t i = 0; i < n && i < h.size(); ++i) mean[i] += h[i];
  }
  for (auto& v : mean) v /= static_cast<double>(loss_histories.size());
  return mean;
}

Tensor4 to_channels(const MultiCoilKSpace& k) {
  const std::size_t nc = k.n_coils();
  Tensor4 t(1, 2 * nc, k.ny(), k.nx());
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t y = 0; y < k.ny(); ++y) {
      for (std::size_t x = 0; x < k.nx(); ++x) {
        t(0, c, y, x) = k(c, y, x).real();
        t(0, nc + c, y, x) = k(c, y, x).imag();
      }
    }
  }
  return t;
}

std::size_t min_training_rows(const NetworkArch& arch) {
  return static_cast<std::size_t>((arch.field().ky_taps - 1) * arch.dilation + 1);
}

TrainingSet build_training_pairs(const MultiCoilKSpace& acs, const NetworkArch& arch, std::size_t target_coil) {
  arch.validate();
  if (static_cast<int>(acs.n_coils()) * 2 != arch.in_channels) {
    throw DimensionError("calibration data has " + std::to_string(acs.n_coils()) + " coils, network expects " +
                         std::to_string(arch.in_channels / 2));
  }
  if (target_coil >= acs.n_coils()) throw DimensionError("target coil out of range");
  const auto f = arch.field();
  const std::size_t need = min_training_rows(arch);
  if (acs.ny() < need) {
    throw Error("calibration block has " + std::to_string(acs.ny()) + " rows; at least " + std::to_string(need) +
                " are required");
  }
  if (acs.nx() < static_cast<std::size_t>(f.kx_width)) {
    throw Error("calibration block narrower than the network's " + std::to_string(f.kx_width) + " columns");
  }
  const std::size_t R = static_cast<std::size_t>(arch.dilation);
  const std::size_t rows = acs.ny() - (need - 1);
  const std::size_t cols = acs.nx() - static_cast<std::size_t>(f.kx_width - 1);
  const std::size_t dy = static_cast<std::size_t>(f.anchor_tap) * R;
  const std::size_t dx = static_cast<std::size_t>(f.center_col);

  TrainingSet set;
  set.sources = to_channels(acs);
  set.targets = Tensor4(1, 2 * (R - 1), rows, cols);
  set.dilation = arch.dilation;
  set.anchor_tap = f.anchor_tap;
  set.center_col = f.center_col;
  for (std::size_t m = 1; m < R; ++m) {
    for (std::size_t r = 0; r < rows; ++r) {
      const auto src = acs.row(target_coil, r + dy + m);
      for (std::size_t x = 0; x < cols; ++x) {
        set.targets(0, m - 1, r, x) = src[x + dx].real();
        set.targets(0, R - 1 + m - 1, r, x) = src[x + dx].imag();
      }
    }
  }
  return set;
}

std::vector<MultiCoilKSpace> build_mw_batch(const MultiCoilKSpace& data, std::span<const WeightFilter> filters) {
  std::vector<MultiCoilKSpace> out;
  out.reserve(filters.size());
  for (const auto& f : filters) {
    if (f.ny() != data.ny() || f.nx() != data.nx()) throw DimensionError("filter grid does not match the data");
    out.push_back(f.all_pass() ? data : apply_filter(data, f));
  }
  return out;
}

ReconResult grappa_reconstruct(const MultiCoilKSpace& measured, const ReconConfig& cfg) {
  const auto t0 = Clock::now();
  if (cfg.method != Method::grappa) throw std::invalid_argument("grappa_reconstruct needs method grappa");
  cfg.validate();
  check_measured(measured, cfg);
  const double scale = normalization_scale(measured, cfg);
  const MultiCoilKSpace norm = apply_pattern(scaled(measured, 1.0 / scale), cfg.pattern);
  const GrappaKernel kernel = calibrate(extract_acs(norm, cfg.pattern), cfg.grappa_geometry(), cfg.ridge);
  const double train_ms = ms_since(t0);
  const auto t1 = Clock::now();
  const MultiCoilKSpace filled = interpolate(kernel, norm, cfg.pattern);
  const double infer_ms = ms_since(t1);
  ReconResult result = finish(measured, filled, scale, cfg);
  result.timings = {train_ms, infer_ms, ms_since(t0)};
  return result;
}

ReconResult raki_reconstruct(const MultiCoilKSpace& measured, const ReconConfig& cfg) {
  if (cfg.method != Method::raki && cfg.method != Method::rraki) {
    throw std::invalid_argument("raki_reconstruct needs method raki or rraki");
  }
  cfg.validate();
  return network_reconstruct(measured, cfg, MultiWeightConfig{{}, cfg.multiweight.eps_rel});
}

ReconResult mw_reconstruct(const MultiCoilKSpace& measured, const ReconConfig& cfg) {
  if (!is_multiweight(cfg.method)) throw std::invalid_argument("mw_reconstruct needs method mw_raki or mw_rraki");
  cfg.validate();
  return network_reconstruct(measured, cfg, cfg.multiweight);
}

ReconResult reconstruct(const MultiCoilKSpace& measured, const ReconConfig& cfg) {
  switch (cfg.method) {
    case Method::grappa: return grappa_reconstruct(measured, cfg);
    case Method::raki:
    case Method::rraki: return raki_reconstruct(measured, cfg);
    case Method::mw_raki:
    case Method::mw_rraki: return mw_reconstruct(measured, cfg);
  }
  throw std::invalid_argument("unknown method");
}

RealImage reconstruct_image(const MultiCoilKSpace& kspace) { return sos_combine(ifft2c(kspace)); }

}  // namespace mwrecon
