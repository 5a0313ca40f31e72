#include "advland/advland.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "advland/attack.hpp"
#include "advland/error.hpp"
#include "advland/experiments.hpp"
#include "advland/landscape.hpp"
#include "advland/network.hpp"
#include "advland/serialize.hpp"

struct advland_network {
  advland::Network net;
};

struct advland_sweep_config {
  advland::SweepConfig config;
};

namespace {

thread_local std::string g_last_error;

advland_status status_of(advland::ErrorCode code) {
  using advland::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return ADVLAND_ERR_INVALID_ARGUMENT;
    case ErrorCode::InvalidDims: return ADVLAND_ERR_INVALID_DIMS;
    case ErrorCode::DimMismatch: return ADVLAND_ERR_DIM_MISMATCH;
    case ErrorCode::NotSmooth: return ADVLAND_ERR_NOT_SMOOTH;
    case ErrorCode::Unsupported: return ADVLAND_ERR_UNSUPPORTED;
    case ErrorCode::UnsupportedPower: return ADVLAND_ERR_UNSUPPORTED_POWER;
    case ErrorCode::ZeroGradient: return ADVLAND_ERR_ZERO_GRADIENT;
    case ErrorCode::DomainError: return ADVLAND_ERR_DOMAIN;
    case ErrorCode::PreconditionViolated: return ADVLAND_ERR_PRECONDITION;
    case ErrorCode::UnknownBound: return ADVLAND_ERR_UNKNOWN_BOUND;
    case ErrorCode::InvalidTrials: return ADVLAND_ERR_INVALID_TRIALS;
    case ErrorCode::InvalidConfig: return ADVLAND_ERR_INVALID_CONFIG;
    case ErrorCode::IoError: return ADVLAND_ERR_IO;
    case ErrorCode::ParseError: return ADVLAND_ERR_PARSE;
  }
  return ADVLAND_ERR_INTERNAL;
}

template <class F>
advland_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return ADVLAND_OK;
  } catch (const advland::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ADVLAND_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ADVLAND_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ADVLAND_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) advland::fail(advland::ErrorCode::InvalidArgument, what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

advland::Activation activation_of(advland_activation a) {
  switch (a) {
    case ADVLAND_ACTIVATION_RELU: return advland::kReLU;
    case ADVLAND_ACTIVATION_TANH: return advland::kTanh;
  }
  advland::fail(advland::ErrorCode::InvalidArgument, "unknown activation id");
}

advland::Vector input_of(const double* x, size_t n) {
  require(x != nullptr || n == 0, "null input pointer");
  return Eigen::Map<const advland::Vector>(x, static_cast<Eigen::Index>(n));
}

}  // namespace

extern "C" {

const char* advland_last_error(void) { return g_last_error.c_str(); }

const char* advland_status_string(advland_status status) {
  switch (status) {
    case ADVLAND_OK: return "ok";
    case ADVLAND_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ADVLAND_ERR_INVALID_DIMS: return "invalid dimensions";
    case ADVLAND_ERR_DIM_MISMATCH: return "dimension mismatch";
    case ADVLAND_ERR_NOT_SMOOTH: return "activation is not smooth";
    case ADVLAND_ERR_UNSUPPORTED: return "unsupported";
    case ADVLAND_ERR_UNSUPPORTED_POWER: return "unsupported moment power";
    case ADVLAND_ERR_ZERO_GRADIENT: return "zero gradient";
    case ADVLAND_ERR_DOMAIN: return "argument outside domain";
    case ADVLAND_ERR_PRECONDITION: return "precondition violated";
    case ADVLAND_ERR_UNKNOWN_BOUND: return "unknown bound";
    case ADVLAND_ERR_INVALID_TRIALS: return "invalid trial count";
    case ADVLAND_ERR_INVALID_CONFIG: return "invalid configuration";
    case ADVLAND_ERR_IO: return "i/o error";
    case ADVLAND_ERR_PARSE: return "parse error";
    case ADVLAND_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* advland_version(void) { return "0.1.0"; }

void advland_string_free(char* s) { std::free(s); }

advland_status advland_activation_from_name(const char* name, advland_activation* out) {
  return guarded([&] {
    require(name && out, "null argument");
    const auto kind = advland::parse_activation(name);
    if (!kind) advland::fail(advland::ErrorCode::InvalidArgument, std::string("unknown activation '") + name + "'");
    *out = *kind == advland::ActivationKind::ReLU ? ADVLAND_ACTIVATION_RELU : ADVLAND_ACTIVATION_TANH;
  });
}

advland_status advland_quantity_from_name(const char* name, advland_quantity* out) {
  return guarded([&] {
    require(name && out, "null argument");
    const auto q = advland::parse_quantity(name);
    if (!q) advland::fail(advland::ErrorCode::InvalidArgument, std::string("unknown quantity '") + name + "'");
    *out = static_cast<advland_quantity>(static_cast<int>(*q));
  });
}

advland_status advland_network_sample(uint32_t depth, uint64_t d, uint64_t k,
                                      advland_activation activation, uint64_t seed,
                                      advland_network** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = new advland_network{advland::Network::sample(depth, d, k, activation_of(activation), seed)};
  });
}

void advland_network_free(advland_network* net) { delete net; }

advland_status advland_network_dims(const advland_network* net, uint32_t* depth, uint64_t* d,
                                    uint64_t* k) {
  return guarded([&] {
    require(net != nullptr, "null network");
    if (depth) *depth = static_cast<uint32_t>(net->net.depth());
    if (d) *d = net->net.input_dim();
    if (k) *k = net->net.hidden_width();
  });
}

advland_status advland_network_save(const advland_network* net, const char* path) {
  return guarded([&] {
    require(net && path, "null argument");
    net->net.save(path);
  });
}

advland_status advland_network_load(const char* path, advland_network** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new advland_network{advland::Network::load(path)};
  });
}

advland_status advland_sample_input(uint64_t d, uint64_t seed, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    const auto x = advland::sample_input(d, seed);
    std::memcpy(out, x.coords.data(), sizeof(double) * d);
  });
}

advland_status advland_forward(const advland_network* net, const double* x, size_t n,
                               double* value) {
  return guarded([&] {
    require(net && value, "null argument");
    *value = net->net.forward(input_of(x, n));
  });
}

advland_status advland_gradient(const advland_network* net, const double* x, size_t n,
                                double* grad) {
  return guarded([&] {
    require(net && grad, "null argument");
    const auto g = net->net.gradient(input_of(x, n));
    std::memcpy(grad, g.data(), sizeof(double) * n);
  });
}

advland_status advland_single_step_attack(const advland_network* net, const double* x, size_t n,
                                          double eta_magnitude, advland_attack_outcome* out) {
  return guarded([&] {
    require(net && out, "null argument");
    const auto r = advland::single_step_attack(net->net, input_of(x, n), eta_magnitude);
    *out = advland_attack_outcome{r.eta, r.perturbation_norm, r.value_before, r.value_after,
                                  r.flipped ? 1 : 0};
  });
}

advland_status advland_smallest_flip_eta(const advland_network* net, const double* x, size_t n,
                                         double eta_max, uint64_t grid, int* found, double* eta) {
  return guarded([&] {
    require(net && found && eta, "null argument");
    const auto r = advland::smallest_flip_eta(net->net, input_of(x, n), eta_max, grid);
    *found = r ? 1 : 0;
    *eta = r.value_or(0.0);
  });
}

advland_status advland_universal_flip_eta(const advland_network* net, const double* x, size_t n,
                                          double eta_max, uint64_t grid, int* found, double* eta) {
  return guarded([&] {
    require(net && found && eta, "null argument");
    const auto r = advland::universal_flip_eta(net->net, input_of(x, n), eta_max, grid);
    *found = r ? 1 : 0;
    *eta = r.value_or(0.0);
  });
}

advland_status advland_smallest_flip_attack(const advland_network* net, const double* x,
                                            size_t n, double eta_max, uint64_t grid,
                                            advland_attack_outcome* out) {
  return guarded([&] {
    require(net && out, "null argument");
    const auto point = input_of(x, n);
    const auto eta = advland::smallest_flip_eta(net->net, point, eta_max, grid);
    const double before = net->net.forward(point);
    if (!eta) {
      *out = advland_attack_outcome{0.0, 0.0, before, before, 0};
      return;
    }
    const auto r = advland::single_step_attack(net->net, point, std::abs(*eta));
    *out = advland_attack_outcome{r.eta, r.perturbation_norm, r.value_before, r.value_after,
                                  r.flipped ? 1 : 0};
  });
}

advland_status advland_universal_flip_attack(const advland_network* net, const double* x,
                                             size_t n, double eta_max, uint64_t grid,
                                             advland_attack_outcome* out) {
  return guarded([&] {
    require(net && out, "null argument");
    const auto point = input_of(x, n);
    const auto eta = advland::universal_flip_eta(net->net, point, eta_max, grid);
    const double before = net->net.forward(point);
    if (!eta) {
      *out = advland_attack_outcome{0.0, 0.0, before, before, 0};
      return;
    }
    const advland::Vector u = advland::universal_direction(net->net);
    const double after = net->net.forward(point + *eta * u);
    *out = advland_attack_outcome{*eta, std::abs(*eta) * u.norm(), before, after,
                                  advland::sign_of(after) != advland::sign_of(before) ? 1 : 0};
  });
}

advland_status advland_multi_step_attack_json(const advland_network* net, const double* x,
                                              size_t n, double step_size, uint64_t max_steps,
                                              char** json) {
  return guarded([&] {
    require(net && json, "null argument");
    const auto t = advland::multi_step_attack(net->net, input_of(x, n), step_size, max_steps);
    *json = copy_string(advland::to_json(t).dump());
  });
}

advland_status advland_attack_outcome_json(const advland_attack_outcome* outcome, char** json) {
  return guarded([&] {
    require(outcome && json, "null argument");
    advland::AttackOutcome o{outcome->eta, outcome->perturbation_norm, outcome->value_before,
                             outcome->value_after, outcome->flipped != 0};
    *json = copy_string(advland::to_json(o).dump());
  });
}

void advland_landscape_request_init(advland_landscape_request* request) {
  if (!request) return;
  const advland::LandscapeRequest defaults;
  request->quantity = ADVLAND_QUANTITY_VALUE_ABS;
  request->activation = ADVLAND_ACTIVATION_RELU;
  request->d = 0;
  request->k = 0;
  request->trials = defaults.trials;
  request->seed = defaults.seed;
  request->radius = defaults.radius;
  request->iterations = defaults.iterations;
  request->num_dirs = defaults.num_dirs;
  request->num_radii = defaults.num_radii;
}

advland_status advland_estimate_landscape_json(const advland_landscape_request* req, char** json) {
  return guarded([&] {
    require(req && json, "null argument");
    require(req->quantity >= ADVLAND_QUANTITY_VALUE_ABS &&
                req->quantity <= ADVLAND_QUANTITY_FLIP_FRACTION,
            "unknown quantity id");
    advland::LandscapeRequest r;
    r.quantity = static_cast<advland::Quantity>(static_cast<int>(req->quantity));
    r.activation = activation_of(req->activation);
    r.d = req->d;
    r.k = req->k;
    r.trials = req->trials;
    r.seed = req->seed;
    r.radius = req->radius;
    r.iterations = req->iterations;
    r.num_dirs = req->num_dirs;
    r.num_radii = req->num_radii;
    *json = copy_string(advland::to_json(advland::estimate_landscape(r)).dump());
  });
}

advland_status advland_sweep_config_new(advland_sweep_config** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = new advland_sweep_config{};
  });
}

advland_status advland_sweep_config_load(const char* path, advland_sweep_config** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new advland_sweep_config{advland::load_sweep_config(path)};
  });
}

advland_status advland_sweep_config_set(advland_sweep_config* config, const char* key,
                                        const char* value) {
  return guarded([&] {
    require(config && key && value, "null argument");
    config->config.set(key, value);
  });
}

advland_status advland_sweep_config_output_path(const advland_sweep_config* config, char* buf,
                                                size_t len) {
  return guarded([&] {
    require(config && buf && len > 0, "null or empty buffer");
    const std::string& p = config->config.output_path;
    const size_t n = std::min(p.size(), len - 1);
    std::memcpy(buf, p.data(), n);
    buf[n] = '\0';
  });
}

void advland_sweep_config_free(advland_sweep_config* config) { delete config; }

advland_status advland_run_sweep_csv(const advland_sweep_config* config, char** csv) {
  return guarded([&] {
    require(config && csv, "null argument");
    *csv = copy_string(advland::format_csv(advland::run_sweep(config->config)));
  });
}

advland_status advland_run_bound_suite(const char* const* bounds, size_t n_bounds,
                                       const double* gammas, size_t n_gammas,
                                       const uint64_t* sizes, size_t n_sizes, uint64_t trials,
                                       uint64_t seed, char** jsonl, int* all_pass) {
  return guarded([&] {
    require(jsonl != nullptr, "null output pointer");
    require(n_bounds == 0 || bounds != nullptr, "null bounds array");
    advland::BoundSuiteConfig config;
    for (size_t i = 0; i < n_bounds; ++i) {
      require(bounds[i] != nullptr, "null bound label");
      config.bounds.emplace_back(bounds[i]);
    }
    if (n_gammas > 0) {
      require(gammas != nullptr, "null gamma array");
      config.gammas.assign(gammas, gammas + n_gammas);
    }
    if (n_sizes > 0) {
      require(sizes != nullptr, "null size array");
      config.sizes.assign(sizes, sizes + n_sizes);
    }
    config.trials = trials;
    config.seed = seed;
    const auto reports = advland::run_bound_suite(config, std::nullopt);
    std::string out;
    bool pass = true;
    for (const auto& r : reports) {
      out += advland::to_json(r).dump();
      out += '\n';
      pass = pass && r.pass;
    }
    *jsonl = copy_string(out);
    if (all_pass) *all_pass = pass ? 1 : 0;
  });
}

}  // extern "C"
