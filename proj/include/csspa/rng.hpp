#ifndef CSSPA_RNG_HPP
#define CSSPA_RNG_HPP

#include <cstdint>
#include <random>

namespace csspa {

// One seedable draw stream. Copies replay the identical sequence, which is
// what freezes a draw for finite-difference checks.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  // [0, 1)
  double uniform();
  // standard normal via Box-Muller; consumes two engine words per call
  double gaussian();
  // {0, ..., n-1}, n >= 1
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// The four per-iteration sample streams (xi, zeta, phi, psi). One shared
// seed, fixed stream offsets; drawing from one stream never advances the
// others.
class OracleRng {
 public:
  explicit OracleRng(std::uint64_t seed);

  RngStream& xi() { return xi_; }
  RngStream& zeta() { return zeta_; }
  RngStream& phi() { return phi_; }
  RngStream& psi() { return psi_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  RngStream xi_, zeta_, phi_, psi_;
};

}  // namespace csspa

#endif
