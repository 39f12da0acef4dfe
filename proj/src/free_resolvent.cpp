#include "dtl/free_resolvent.hpp"

#include <map>
#include <mutex>

namespace dtl {

namespace {

using Series = std::vector<Rational>;  // power series in kappa, truncated to its length

Series multiply(const Series& a, const Series& b) {
  Series out(a.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t k = 0; i + k < out.size(); ++k) out[i + k] += a[i] * b[k];
  }
  return out;
}

std::vector<Rational> compute_polynomial(int j) {
  const std::size_t len = static_cast<std::size_t>(j) + 2;  // orders kappa^0 .. kappa^{j+1}
  // (1 + kappa^2/4)^{-1/2}
  Series inv_s(len, Rational(0));
  Rational binom = 1;  // binom(-1/2, i) / 4^i
  for (std::size_t i = 0; 2 * i < len; ++i) {
    inv_s[2 * i] = binom;
    binom *= Rational(-(2 * static_cast<long>(i) + 1), 2 * (static_cast<long>(i) + 1)) / 4;
  }
  Series theta(len, Rational(0));
  for (std::size_t i = 0; 2 * i + 1 < len; ++i) theta[2 * i + 1] = inv_s[2 * i] / (2 * static_cast<long>(i) + 1);

  // kappa * R0 = exp(-|n| theta) * inv_s / 2, so G_j^0 is the kappa^{j+1} coefficient.
  Series power(len, Rational(0));  // theta^m / m!
  power[0] = 1;
  std::vector<Rational> coeffs;
  for (int m = 0; m <= j + 1; ++m) {
    const Series term = multiply(power, inv_s);
    const Rational sign = (m % 2 == 0) ? Rational(1) : Rational(-1);
    coeffs.push_back(sign * term[len - 1] / 2);
    power = multiply(power, theta);
    for (auto& x : power) x /= (m + 1);
  }
  while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
  return coeffs;
}

}  // namespace

const std::vector<Rational>& kernel_polynomial(int j) {
  static std::mutex lock;
  static std::map<int, std::vector<Rational>> cache;
  static const std::vector<Rational> empty;
  if (j < -1) return empty;
  std::lock_guard<std::mutex> guard(lock);
  auto it = cache.find(j);
  if (it == cache.end()) it = cache.emplace(j, compute_polynomial(j)).first;
  return it->second;
}

}  // namespace dtl
