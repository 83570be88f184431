#pragma once

#include <cstdint>
#include <limits>

#include "hslg/rng.hpp"

namespace hslg::gibbs {

/// Soft-barrier law on [A, 0]: Brownian motion from `a` reweighted by
/// exp(-beta ((B(0) + eps) v 0) - L int_A^0 exp(-sqrt(L)(B(x) + kappa)) dx).
/// eps = +infinity selects the linear end term -beta B(0).
struct SoftBarrierSpec {
  double beta = 0.0;
  double L = 1.0;
  double epsilon = std::numeric_limits<double>::infinity();
  double kappa = 0.0;
  double a = 0.0;
  double A = -1.0;
  double diffusion = 1.0;

  void validate() const;
};

enum class CouplingCase { identical, start, beta, kappa };

struct GlauberResult {
  CouplingCase coupling_case = CouplingCase::identical;
  long long steps = 0;
  long long violations = 0;  // (step, site) pairs where the claimed order fails
  long long accepted_upper = 0;
  long long accepted_lower = 0;
};

/// Classifies the pair; throws ContractError unless spec1 dominates spec2 in
/// exactly one of: start (a1 >= a2), beta (beta1 <= beta2), kappa (kappa1 <= kappa2).
CouplingCase classify_coupling(const SoftBarrierSpec& spec1, const SoftBarrierSpec& spec2);

/// Two single-site flip chains on simple random walk paths over
/// [ceil(A N), 0] (time unit 1/N, space unit sqrt(diffusion / N)), sharing the
/// site, direction and uniform of every proposal. Counts ordering violations
/// S1 >= S2 (plus S2 >= S1 - (a1N - a2N) in the start case) after every step.
GlauberResult coupled_glauber_softbarrier(RngState& rng, const SoftBarrierSpec& spec1,
                                          const SoftBarrierSpec& spec2, long long steps, int N = 64);

}  // namespace hslg::gibbs
