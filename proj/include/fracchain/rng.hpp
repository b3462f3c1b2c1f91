#pragma once
// Counter-based random numbers: Philox4x32-10 (Salmon et al., SC'11).
//
// A Stream is addressed by (seed, stream id).  The 64-bit seed is the Philox
// key, the stream id fills the upper half of the 128-bit counter and the lower
// half counts blocks.  Two streams with different ids never overlap, and the
// values drawn by a replica depend only on (seed, replica index), never on the
// thread that runs it.

#include <array>
#include <cstdint>

namespace fc {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key);

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // uniform on the open interval (0,1), 53 random bits
  double uniform();
  // standard normal by Box-Muller on two uniforms
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32Counter buf_{};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fc
