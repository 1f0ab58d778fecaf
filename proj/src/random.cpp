#include "maopt/random.hpp"

namespace maopt {

namespace {

// splitmix64 finalizer; scrambles child indices into well-separated ids.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RandomStream RandomStream::substream(std::uint64_t index) const {
  return RandomStream(seed_, mix64(stream_id_ * 0x2545f4914f6cdd1dULL + index + 1));
}

std::mt19937_64 RandomStream::make_engine() const {
  std::seed_seq sequence{
      static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
      static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
  return std::mt19937_64(sequence);
}

RealVector sample_uniform(const RandomStream& stream, int count, Real lo, Real hi) {
  auto engine = stream.make_engine();
  RealVector out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * detail::uniform01(engine);
  }
  return out;
}

}  // namespace maopt
