#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace deconv {

/// Mixes a master seed with stream identifiers (replication index, sample
/// size, purpose tag) into an independent 64-bit seed. Streams depend only on
/// their identifiers, never on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> ids);

inline std::mt19937_64 make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
  return std::mt19937_64(derive_seed(master, ids));
}

/// Purpose tags for derive_seed.
enum StreamTag : std::uint64_t {
  kTagData = 0x64617461,
  kTagBootstrap = 0x626f6f74,
  kTagRiskHull = 0x7269736b,
  kTagCovariance = 0x636f7661,
};

}  // namespace deconv
