#include "hslg/environment.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "hslg/errors.hpp"

namespace hslg {

namespace {

void check_params(double theta, double alpha) {
  HSLG_REQUIRE(theta > 0.0 && std::isfinite(theta), DomainError, "theta must be positive");
  HSLG_REQUIRE(alpha + theta > 0.0 && std::isfinite(alpha), DomainError, "alpha + theta must be positive");
}

std::string range_message(const char* what, int i, int j) {
  return std::string(what) + ": site (" + std::to_string(i) + "," + std::to_string(j) + ") outside the lattice";
}

}  // namespace

EnvHalfSpace::EnvHalfSpace(int n_max, double theta, double alpha, std::vector<double> log_w)
    : n_max_(n_max), theta_(theta), alpha_(alpha), log_w_(std::move(log_w)) {
  HSLG_REQUIRE(n_max >= 1, DomainError, "n_max must be at least 1");
  check_params(theta, alpha);
  HSLG_REQUIRE(log_w_.size() == static_cast<std::size_t>(n_max) * (n_max + 1) / 2, ContractError,
               "octant weight count does not match n_max");
  for (double v : log_w_) HSLG_REQUIRE(std::isfinite(v), DomainError, "non-finite log weight");
}

double EnvHalfSpace::log_w(int i, int j) const {
  if (!contains(i, j)) throw RangeError(range_message("EnvHalfSpace", i, j));
  return log_w_[index(i, j)];
}

EnvHalfSpace EnvHalfSpace::with_log_w(int i, int j, double value) const {
  if (!contains(i, j)) throw RangeError(range_message("EnvHalfSpace", i, j));
  auto copy = log_w_;
  copy[index(i, j)] = value;
  return EnvHalfSpace(n_max_, theta_, alpha_, std::move(copy));
}

EnvFullPerturbed::EnvFullPerturbed(int m_max, int n_max, double theta, double alpha, std::vector<double> log_w)
    : m_max_(m_max), n_max_(n_max), theta_(theta), alpha_(alpha), log_w_(std::move(log_w)) {
  HSLG_REQUIRE(m_max >= 1 && n_max >= 1, DomainError, "lattice dimensions must be positive");
  check_params(theta, alpha);
  HSLG_REQUIRE(log_w_.size() == static_cast<std::size_t>(m_max) * n_max, ContractError,
               "weight count does not match m_max * n_max");
}

double EnvFullPerturbed::log_w(int i, int j) const {
  if (i < 1 || j < 1 || i > m_max_ || j > n_max_) throw RangeError(range_message("EnvFullPerturbed", i, j));
  return log_w_[static_cast<std::size_t>(i - 1) * n_max_ + (j - 1)];
}

double SymmetrizedView::log_w(int i, int j) const {
  if (i < 1 || j < 1 || i > env_->n_max() || j > env_->n_max())
    throw RangeError(range_message("SymmetrizedView", i, j));
  if (i == j) return env_->log_w(i, i) - std::log(2.0);
  return j > i ? env_->log_w(j, i) : env_->log_w(i, j);
}

SymmetrizedView symmetrize(const EnvHalfSpace& env) { return SymmetrizedView(env); }

EnvHalfSpace build_half_env(RngState& rng, int n_max, double theta, double alpha) {
  HSLG_REQUIRE(n_max >= 1, DomainError, "n_max must be at least 1");
  check_params(theta, alpha);
  std::vector<double> log_w;
  log_w.reserve(static_cast<std::size_t>(n_max) * (n_max + 1) / 2);
  for (int i = 1; i <= n_max; ++i)
    for (int j = 1; j <= i; ++j) log_w.push_back(sample_log_inverse_gamma(rng, i == j ? alpha + theta : 2.0 * theta));
  return EnvHalfSpace(n_max, theta, alpha, std::move(log_w));
}

EnvFullPerturbed build_full_perturbed_env(RngState& rng, int m_max, int n_max, double theta, double alpha) {
  HSLG_REQUIRE(m_max >= 1 && n_max >= 1, DomainError, "lattice dimensions must be positive");
  check_params(theta, alpha);
  std::vector<double> log_w;
  log_w.reserve(static_cast<std::size_t>(m_max) * n_max);
  for (int i = 1; i <= m_max; ++i)
    for (int j = 1; j <= n_max; ++j) log_w.push_back(sample_log_inverse_gamma(rng, i == 1 ? alpha + theta : 2.0 * theta));
  return EnvFullPerturbed(m_max, n_max, theta, alpha, std::move(log_w));
}

void write_env_csv(std::ostream& os, const EnvHalfSpace& env) {
  os << "i,j,log_w\n" << std::setprecision(17);
  for (int i = 1; i <= env.n_max(); ++i)
    for (int j = 1; j <= i; ++j) os << i << ',' << j << ',' << env.log_w(i, j) << '\n';
}

void write_env_csv(std::ostream& os, const EnvFullPerturbed& env) {
  os << "i,j,log_w\n" << std::setprecision(17);
  for (int i = 1; i <= env.m_max(); ++i)
    for (int j = 1; j <= env.n_max(); ++j) os << i << ',' << j << ',' << env.log_w(i, j) << '\n';
}

EnvHalfSpace read_half_env_csv(std::istream& is, double theta, double alpha) {
  std::string line;
  HSLG_REQUIRE(std::getline(is, line) && line == "i,j,log_w", ContractError, "missing CSV header i,j,log_w");
  std::vector<std::tuple<int, int, double>> rows;
  int n_max = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    int i = 0, j = 0;
    double v = 0.0;
    char c1 = 0, c2 = 0;
    HSLG_REQUIRE((ss >> i >> c1 >> j >> c2 >> v) && c1 == ',' && c2 == ',', ContractError, "malformed CSV row: " + line);
    HSLG_REQUIRE(j >= 1 && j <= i, RangeError, "CSV row outside the octant: " + line);
    rows.emplace_back(i, j, v);
    n_max = std::max(n_max, i);
  }
  std::vector<double> log_w(static_cast<std::size_t>(n_max) * (n_max + 1) / 2, std::nan(""));
  for (auto [i, j, v] : rows) log_w[static_cast<std::size_t>(i) * (i - 1) / 2 + (j - 1)] = v;
  return EnvHalfSpace(n_max, theta, alpha, std::move(log_w));
}

namespace {

constexpr char kCacheMagic[8] = {'H', 'S', 'L', 'G', 'E', 'N', 'V', '1'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

EnvCache::EnvCache(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

std::filesystem::path EnvCache::path_for(std::uint64_t seed, std::uint64_t stream_id, int n_max, double theta,
                                         double alpha) const {
  std::ostringstream name;
  name << "env_" << seed << '_' << stream_id << '_' << n_max << '_' << std::hex << std::bit_cast<std::uint64_t>(theta)
       << '_' << std::bit_cast<std::uint64_t>(alpha) << ".bin";
  return dir_ / name.str();
}

EnvHalfSpace EnvCache::get_or_build(std::uint64_t seed, std::uint64_t stream_id, int n_max, double theta,
                                    double alpha) {
  const auto path = path_for(seed, stream_id, n_max, theta, alpha);
  if (std::ifstream in{path, std::ios::binary}) {
    char magic[8];
    in.read(magic, 8);
    const auto s = get<std::uint64_t>(in);
    const auto st = get<std::uint64_t>(in);
    const auto n = get<std::int32_t>(in);
    const auto th = get<double>(in);
    const auto al = get<double>(in);
    if (in && std::memcmp(magic, kCacheMagic, 8) == 0 && s == seed && st == stream_id && n == n_max && th == theta &&
        al == alpha) {
      std::vector<double> log_w(static_cast<std::size_t>(n_max) * (n_max + 1) / 2);
      in.read(reinterpret_cast<char*>(log_w.data()), static_cast<std::streamsize>(log_w.size() * sizeof(double)));
      if (in) return EnvHalfSpace(n_max, theta, alpha, std::move(log_w));
    }
  }
  RngState rng(seed, stream_id);
  EnvHalfSpace env = build_half_env(rng, n_max, theta, alpha);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  HSLG_REQUIRE(out, std::runtime_error, "cannot write environment cache " + path.string());
  out.write(kCacheMagic, 8);
  put<std::uint64_t>(out, seed);
  put<std::uint64_t>(out, stream_id);
  put<std::int32_t>(out, n_max);
  put<double>(out, theta);
  put<double>(out, alpha);
  out.write(reinterpret_cast<const char*>(env.raw().data()), static_cast<std::streamsize>(env.raw().size() * sizeof(double)));
  return env;
}

}  // namespace hslg
