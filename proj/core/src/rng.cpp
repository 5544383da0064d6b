#include "ctm/rng.hpp"

namespace ctm {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t RngState::next_u64() {
  const std::uint64_t k = counter_++;
  return mix64(mix64(seed_) ^ (k * 0xd1b54a32d192ed03ULL));
}

double RngState::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngState::below(std::uint64_t n) {
  // rejection sampling keeps the draw unbiased
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

RngState RngState::fork(std::uint64_t tag) const {
  return RngState(mix64(seed_ ^ mix64(tag + 0x632be59bd9b4e019ULL)), 0);
}

}  // namespace ctm
