#include <cmath>

#include "netspec/netsim.hpp"

namespace netspec::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view purpose, long node,
                     long time) {
  std::uint64_t key = seed;
  key = splitmix64(key) ^ fnv1a(purpose);
  key = splitmix64(key) ^ static_cast<std::uint64_t>(node + 1);
  key = splitmix64(key) ^ static_cast<std::uint64_t>(time + 1);
  (void)splitmix64(key);
  state_ = key;
}

std::uint64_t RngStream::next_raw() { return splitmix64(state_); }

double RngStream::uniform() {
  return static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  // Marsaglia polar method; draws come in pairs but the spare is dropped to
  // keep the stream position a pure function of the call count.
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

cplx RngStream::gaussian_complex() {
  const double re = gaussian();
  const double im = gaussian();
  return cplx(re * std::sqrt(0.5), im * std::sqrt(0.5));
}

std::uint64_t RngStream::integer(std::uint64_t bound) {
  if (bound == 0) return 0;
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = bound * (~0ULL / bound);
  for (;;) {
    const std::uint64_t r = next_raw();
    if (r < limit) return r % bound;
  }
}

void write_metrics_csv_header(std::ostream& out) {
  out << "t,consensus_rounds,scalar_messages,wall_rounds\n";
}

void append_metrics_csv(std::ostream& out, long t, const RoundMetrics& m) {
  out << t << "," << m.consensus_rounds << "," << m.scalar_messages << ","
      << m.wall_rounds << "\n";
}

}  // namespace netspec::sim
