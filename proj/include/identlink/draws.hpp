#ifndef IDENTLINK_DRAWS_HPP
#define IDENTLINK_DRAWS_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "identlink/linalg.hpp"

namespace identlink {

// How a chain's coefficient vector is initialized.
struct InitSpec {
  enum class Kind { PriorDraw, Zero, Given };
  Kind kind = Kind::PriorDraw;
  Vector value;  // used when kind == Given
};

struct SamplerConfig {
  std::size_t burn_in = 5000;
  std::size_t keep = 5000;
  std::size_t thin = 1;
  std::size_t n_chains = 1;
  std::uint64_t seed = 0;
  InitSpec init;
  bool store_latents = false;

  void validate() const;
};

// Stored post-burn-in coefficient draws with provenance.  Row r holds
// draw r of the flattened (chain-major) sample; chain and sweep give
// its coordinates.  Latent blocks are filled only when a sampler was
// asked to store them.
struct DrawMatrix {
  std::size_t n_params = 0;
  std::vector<std::string> param_names;
  std::vector<double> values;         // rows x n_params, row-major
  std::vector<std::uint32_t> chain;   // per row
  std::vector<std::uint64_t> sweep;   // per row, post-burn-in sweep index
  std::uint64_t seed = 0;
  std::size_t n_chains = 0;

  // Metropolis metadata, empty for Gibbs samplers.
  std::vector<double> mh_final_steps;       // per chain, frozen post-burn-in step
  std::vector<double> mh_acceptance_rates;  // per chain, realized post-burn-in rate
  std::vector<double> mh_step_trace;        // per kept row, step in force at that sweep

  // Optional latent storage (Poisson sampler): n_latent columns per block.
  std::size_t n_latent = 0;
  std::vector<double> latent_u;
  std::vector<double> latent_v;

  std::size_t rows() const { return n_params == 0 ? 0 : values.size() / n_params; }
  double at(std::size_t row, std::size_t j) const { return values[row * n_params + j]; }

  // All draws of one coordinate, chain-major.
  Vector column(std::size_t j) const;
  // One chain's draws of one coordinate, in sweep order.
  Vector chain_column(std::uint32_t chain_id, std::size_t j) const;
};

}  // namespace identlink

#endif  // IDENTLINK_DRAWS_HPP
