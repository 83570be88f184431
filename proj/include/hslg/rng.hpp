#pragma once

#include <array>
#include <cstdint>

namespace hslg {

/// Reproducible random stream identified by (seed, stream_id).
///
/// The generator is xoshiro256** whose 256-bit state is expanded from the
/// pair with SplitMix64. Distinct stream ids give unrelated initial states,
/// so replica k of an experiment uses stream k and never shares state with
/// another worker. All variate transforms live here (not in <random>) so a
/// given stream produces the same numbers with every standard library.
class RngState {
 public:
  RngState(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Independent child stream; `tag` namespaces different consumers.
  RngState derive(std::uint64_t tag) const;

  std::uint64_t next_u64();
  /// Uniform on the open interval (0,1).
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  /// log of a Gamma(shape, 1) variate; stays finite for tiny shapes.
  double log_gamma_variate(double shape);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> s_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Inverse-gamma(beta) draw: density x^{-beta-1} e^{-1/x} / Gamma(beta).
double sample_inverse_gamma(RngState& rng, double beta);
/// Natural log of an inverse-gamma(beta) draw.
double sample_log_inverse_gamma(RngState& rng, double beta);

}  // namespace hslg
