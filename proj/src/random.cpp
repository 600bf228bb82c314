#include "cheeger/random.hpp"

#include <cmath>
#include <numbers>

namespace cheeger {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::result_type CounterRng::operator()() {
  const std::uint64_t key = splitmix64(seed_ ^ splitmix64(stream_));
  return splitmix64(key + splitmix64(counter_++));
}

double CounterRng::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector CounterRng::unit_vector(Eigen::Index n) {
  Vector v(n);
  double norm = 0.0;
  while (norm < 1e-8) {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    norm = v.norm();
  }
  return v / norm;
}

double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace cheeger
