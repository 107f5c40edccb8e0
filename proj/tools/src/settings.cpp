#include "mwrecon/cli/settings.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mwrecon::cli {
namespace {

FilterParams parse_filter(const ConfigEntry& e) {
  std::string text = e.value;
  std::ranges::replace(text, ',', ' ');
  std::istringstream in(text);
  std::vector<double> v;
  std::string tok;
  while (in >> tok) v.push_back(to_double({e.key, tok, e.line}));
  if (v.empty() || v.size() > 3) throw ConfigError(e.key, e.line, "expected 'P [M [D0]]'");
  FilterParams p = FilterParams::high_pass(v[0], v.size() > 1 ? v[1] : 1.0, v.size() > 2 ? v[2] : 1.0);
  try {
    p.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(e.key, e.line, ex.what());
  }
  return p;
}

int positive_int(const ConfigEntry& e, long long min = 1) {
  const long long v = to_int(e);
  if (v < min || v > 1'000'000'000) {
    throw ConfigError(e.key, e.line, "value " + e.value + " must be at least " + std::to_string(min));
  }
  return static_cast<int>(v);
}

}  // namespace

std::vector<FilterParams> ReconSettings::filter_bank() const {
  return filters ? *filters : MultiWeightConfig::default_bank().high_pass;
}

ReconConfig ReconSettings::make(Method method, const SamplingPattern& pattern, std::uint64_t seed, int threads) const {
  ReconConfig cfg(method, pattern);
  cfg.grappa_bx_half = grappa_bx_half;
  cfg.grappa_by_taps = grappa_by_taps;
  cfg.ridge = ridge;
  cfg.layers = layers;
  cfg.optimizer = optimizer;
  cfg.multiweight.high_pass = filter_bank();
  cfg.multiweight.eps_rel = filter_eps;
  cfg.normalize = normalize;
  cfg.seed = seed;
  cfg.threads = threads;
  return cfg;
}

std::vector<ConvSpec> layers_for_depth(int depth) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  if (depth == 1) return {ConvSpec{0, 2, 5, Activation::identity}};
  std::vector<ConvSpec> layers{ConvSpec{32, 2, 5, Activation::relu}};
  for (int i = 2; i < depth; ++i) layers.push_back({8, 1, 1, Activation::relu});
  layers.push_back({0, 2, 3, Activation::identity});
  return layers;
}

RunConfig RunConfig::from(const ConfigFile& file) {
  RunConfig rc;
  auto& r = rc.recon;
  auto& a = rc.ablation;
  bool filters_none = false;
  std::vector<FilterParams> filters;
  for (const auto& e : file.entries()) {
    const std::string& k = e.key;
    try {
      if (k == "layers") {
        r.layers = parse_layer_list(e.value);
      } else if (k == "optimizer") {
        r.optimizer.kind = parse_optimizer_kind(e.value);
      } else if (k == "lr") {
        r.optimizer.learning_rate = to_double(e);
      } else if (k == "momentum") {
        r.optimizer.momentum = to_double(e);
      } else if (k == "beta1") {
        r.optimizer.beta1 = to_double(e);
      } else if (k == "beta2") {
        r.optimizer.beta2 = to_double(e);
      } else if (k == "adam_eps") {
        r.optimizer.adam_eps = to_double(e);
      } else if (k == "iters") {
        r.optimizer.iterations = positive_int(e);
      } else if (k == "filter") {
        if (e.value == "none") {
          filters_none = true;
        } else {
          filters.push_back(parse_filter(e));
        }
      } else if (k == "filter_eps") {
        r.filter_eps = to_double(e);
        if (!(r.filter_eps > 0.0 && r.filter_eps < 1.0)) throw ConfigError(k, e.line, "must lie in (0, 1)");
      } else if (k == "normalize") {
        r.normalize = to_bool(e);
      } else if (k == "grappa_bx_half") {
        r.grappa_bx_half = positive_int(e, 0);
      } else if (k == "grappa_by_taps") {
        r.grappa_by_taps = positive_int(e);
      } else if (k == "ridge") {
        r.ridge = to_double(e);
        if (!(r.ridge >= 0.0)) throw ConfigError(k, e.line, "must be non-negative");
      } else if (k == "seed") {
        const long long s = to_int(e);
        if (s < 0) throw ConfigError(k, e.line, "must be non-negative");
        rc.seed = static_cast<std::uint64_t>(s);
      } else if (k == "method") {
        a.methods.push_back(parse_method(e.value));
      } else if (k == "R") {
        a.accelerations.push_back(positive_int(e, 2));
      } else if (k == "acs") {
        a.acs.push_back(positive_int(e, 0));
      } else if (k == "P") {
        const double p = to_double(e);
        if (!(p > 0.0)) throw ConfigError(k, e.line, "must be positive");
        a.exponents.push_back(p);
      } else if (k == "L") {
        a.filter_counts.push_back(positive_int(e, 0));
      } else if (k == "depth") {
        a.depths.push_back(positive_int(e));
      } else if (k == "seeds") {
        a.seeds = positive_int(e);
      } else if (k == "size") {
        a.size = positive_int(e, 16);
      } else if (k == "coils") {
        a.coils = positive_int(e);
      } else if (k == "snr") {
        a.snr_db = to_double(e);
      } else if (k == "record_timings") {
        a.record_timings = to_bool(e);
      } else {
        throw ConfigError(k, e.line, "unknown key");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError(k, e.line, ex.what());
    }
  }
  if (filters_none && !filters.empty()) {
    throw ConfigError("filter", 0, "'none' cannot be combined with filters");
  }
  if (filters_none || !filters.empty()) r.filters = filters;
  try {
    r.optimizer.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("optimizer", 0, ex.what());
  }
  return rc;
}

void RunConfig::validate_ablation() const {
  const auto& a = ablation;
  if (a.methods.empty()) throw ConfigError("method", 0, "ablation needs at least one method");
  if (a.accelerations.empty()) throw ConfigError("R", 0, "ablation needs at least one value");
  if (a.acs.empty()) throw ConfigError("acs", 0, "ablation needs at least one value");
  if (!a.exponents.empty() && !a.filter_counts.empty()) {
    throw ConfigError("P", 0, "the P and L axes cannot be combined");
  }
  const std::size_t bank = recon.filter_bank().size();
  for (int l : a.filter_counts) {
    if (static_cast<std::size_t>(l) > bank) {
      throw ConfigError("L", 0, "L = " + std::to_string(l) + " exceeds the " + std::to_string(bank) +
                                    " configured filters");
    }
  }
  const std::size_t widest = std::max({a.methods.size(), a.accelerations.size(), a.acs.size(), a.exponents.size(),
                                       a.filter_counts.size(), a.depths.size(), static_cast<std::size_t>(a.seeds)});
  if (widest < 2) throw ConfigError("", 0, "ablation needs at least one axis with two or more values");
}

}  // namespace mwrecon::cli
