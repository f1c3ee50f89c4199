#include "rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "numerics.hpp"

namespace vemove {
namespace {

uint64_t splitmix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

uint64_t derive_seed(uint64_t root, std::string_view tag) {
  uint64_t state = root ^ fnv1a(tag);
  return splitmix64(state);
}

uint64_t derive_seed(uint64_t root, std::string_view tag, uint64_t index) {
  uint64_t state = derive_seed(root, tag) ^ (0xA24BAED4963EE407ULL * (index + 1));
  return splitmix64(state);
}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  // (x >> 11 + 0.5) * 2^-53 is strictly inside (0, 1), so the log is finite.
  double u1 = (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

cd Rng::complex_normal() {
  double u1 = (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  double r = std::sqrt(-std::log(u1));  // -2 log u / 2: both branches carry half the power
  return cd(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
}

Vec Rng::complex_normal_vec(int n) {
  Vec out(n);
  for (int i = 0; i < n; ++i) out(i) = complex_normal();
  return out;
}

Vec Rng::complex_normal_with_cov(const Mat& cov) {
  const int n = static_cast<int>(cov.rows());
  Eigen::LLT<Mat> llt(hermitianize(cov));
  if (llt.info() != Eigen::Success) {
    // Semi-definite covariances are legitimate here; fall back to a shifted factor.
    llt.compute(hermitianize(cov) + 1e-12 * std::max(1.0, std::abs(cov.trace().real()) / n) *
                                        Mat::Identity(n, n));
    if (llt.info() != Eigen::Success) {
      throw ConditioningError("complex_normal_with_cov: covariance not PSD");
    }
  }
  return llt.matrixL() * complex_normal_vec(n);
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: hi < lo");
  uint64_t n = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
  uint64_t rem = (std::numeric_limits<uint64_t>::max() % n + 1) % n;
  uint64_t bound = std::numeric_limits<uint64_t>::max() - rem;
  uint64_t x;
  do {
    x = gen_();
  } while (x > bound);
  return lo + static_cast<int>(x % n);
}

}  // namespace vemove
