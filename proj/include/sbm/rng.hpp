#pragma once

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/version.hpp>
#include <cmath>
#include <cstdint>
#include <string>

namespace sbm {

/// Random engine used everywhere. Boost.Random is used rather than <random> so that
/// variates are identical across standard library implementations.
using Engine = boost::random::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream `stream` of master seed `seed`.
inline Engine make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Engine(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

inline std::string rng_description() {
  return "boost::random::mt19937_64 seeded with splitmix64(splitmix64(seed) ^ "
         "splitmix64(stream + 0x632be59bd9b4e019)); boost " BOOST_LIB_VERSION;
}

/// Uniform on the open interval (0, 1) from the top 53 bits.
inline double uniform_open(Engine& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_exponential(Engine& rng) { return -std::log(uniform_open(rng)); }

inline double standard_normal(Engine& rng) {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

/// Chi-square with (possibly non-integer) `dof` degrees of freedom via 2 * Gamma(dof/2).
inline double chi_square(Engine& rng, double dof) {
  boost::random::gamma_distribution<double> dist(0.5 * dof, 1.0);
  return 2.0 * dist(rng);
}

}  // namespace sbm
