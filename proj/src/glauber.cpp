#include "hslg/glauber.hpp"

#include <cmath>
#include <vector>

#include "hslg/errors.hpp"

namespace hslg::gibbs {

void SoftBarrierSpec::validate() const {
  HSLG_REQUIRE(A < 0.0, ContractError, "soft barrier interval needs A < 0");
  HSLG_REQUIRE(beta >= 0.0 && L > 0.0 && epsilon >= 0.0 && kappa >= 0.0, ContractError,
               "soft barrier needs beta >= 0, L > 0, eps >= 0, kappa >= 0");
  HSLG_REQUIRE(diffusion > 0.0, ContractError, "diffusion coefficient must be positive");
}

CouplingCase classify_coupling(const SoftBarrierSpec& s1, const SoftBarrierSpec& s2) {
  s1.validate();
  s2.validate();
  HSLG_REQUIRE(s1.L == s2.L && s1.A == s2.A && s1.diffusion == s2.diffusion && s1.epsilon == s2.epsilon,
               ContractError, "coupled specs must share L, A, eps and diffusion");
  const bool same_a = s1.a == s2.a, same_beta = s1.beta == s2.beta, same_kappa = s1.kappa == s2.kappa;
  if (same_a && same_beta && same_kappa) return CouplingCase::identical;
  if (!same_a && same_beta && same_kappa && s1.a > s2.a) return CouplingCase::start;
  if (same_a && !same_beta && same_kappa && s1.beta < s2.beta) return CouplingCase::beta;
  if (same_a && same_beta && !same_kappa && s1.kappa < s2.kappa) return CouplingCase::kappa;
  throw ContractError("spec pair is not one of the monotone coupling cases (start, beta, kappa)");
}

namespace {

struct Chain {
  const SoftBarrierSpec* spec;
  std::vector<long long> path;  // path[idx] = S(A_N + idx)
  double unit;                  // space scale sqrt(diffusion / N)
  double barrier_coeff;         // L / N

  double end_term(long long s) const {
    const double y = s * unit;
    if (std::isinf(spec->epsilon)) return -spec->beta * y;
    return -spec->beta * std::max(y + spec->epsilon, 0.0);
  }
  double barrier_term(long long s) const {
    return -barrier_coeff * std::exp(-std::sqrt(spec->L) * (s * unit + spec->kappa));
  }

  // log of the weight ratio for moving site idx to value v, or NaN if the
  // candidate is not a simple random walk path.
  double log_ratio(std::size_t idx, long long v) const {
    if (std::llabs(v - path[idx - 1]) != 1) return std::nan("");
    const bool last = idx + 1 == path.size();
    if (!last && std::llabs(path[idx + 1] - v) != 1) return std::nan("");
    if (last) return end_term(v) - end_term(path[idx]);
    return barrier_term(v) - barrier_term(path[idx]);
  }

  bool step(std::size_t idx, int sigma, double log_u) {
    const long long v = path[idx] + 2 * sigma;
    const double lr = log_ratio(idx, v);
    if (std::isnan(lr) || lr < log_u) return false;
    path[idx] = v;
    return true;
  }
};

}  // namespace

GlauberResult coupled_glauber_softbarrier(RngState& rng, const SoftBarrierSpec& spec1, const SoftBarrierSpec& spec2,
                                          long long steps, int N) {
  HSLG_REQUIRE(N >= 1 && steps >= 0, DomainError, "need N >= 1 and steps >= 0");
  GlauberResult out;
  out.coupling_case = classify_coupling(spec1, spec2);
  out.steps = steps;

  const long long A_N = static_cast<long long>(std::ceil(spec1.A * N));
  const std::size_t sites = static_cast<std::size_t>(-A_N) + 1;
  const double unit = std::sqrt(spec1.diffusion / N);

  const long long a1N = static_cast<long long>(std::floor(spec1.a / unit));
  long long a2N = a1N;
  if (out.coupling_case == CouplingCase::start) {
    a2N = static_cast<long long>(std::floor(spec2.a / unit));
    if ((a1N - a2N) % 2 != 0) ++a2N;
  }
  const long long offset = a1N - a2N;

  Chain upper{&spec1, std::vector<long long>(sites), unit, spec1.L / N};
  Chain lower{&spec2, std::vector<long long>(sites), unit, spec2.L / N};
  for (std::size_t idx = 0; idx < sites; ++idx) {
    upper.path[idx] = a1N + static_cast<long long>(idx % 2);
    lower.path[idx] = upper.path[idx] - offset;
  }

  const bool sandwich = out.coupling_case == CouplingCase::start;
  for (long long n = 0; n < steps; ++n) {
    const std::size_t idx = 1 + rng.uniform_index(sites - 1);
    const int sigma = rng.uniform() < 0.5 ? -1 : 1;
    const double log_u = std::log(rng.uniform());
    out.accepted_upper += upper.step(idx, sigma, log_u);
    out.accepted_lower += lower.step(idx, sigma, log_u);
    for (std::size_t s = 0; s < sites; ++s) {
      if (upper.path[s] < lower.path[s]) ++out.violations;
      else if (sandwich && lower.path[s] < upper.path[s] - offset) ++out.violations;
    }
  }
  return out;
}

}  // namespace hslg::gibbs
