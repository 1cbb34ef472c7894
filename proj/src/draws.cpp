#include "identlink/draws.hpp"

#include <stdexcept>

namespace identlink {

void SamplerConfig::validate() const {
  if (keep < 1) throw std::invalid_argument("sampler config: keep must be >= 1");
  if (thin < 1) throw std::invalid_argument("sampler config: thin must be >= 1");
  if (n_chains < 1) throw std::invalid_argument("sampler config: n_chains must be >= 1");
}

Vector DrawMatrix::column(std::size_t j) const {
  Vector out(rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = at(r, j);
  return out;
}

Vector DrawMatrix::chain_column(std::uint32_t chain_id, std::size_t j) const {
  Vector out;
  for (std::size_t r = 0; r < rows(); ++r)
    if (chain[r] == chain_id) out.push_back(at(r, j));
  return out;
}

}  // namespace identlink
