#pragma once

#include <cmath>
#include <cstdint>

namespace aoigf {

inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Counter-based stream keyed by (seed, frame, slot, user): any user-slot can
// be regenerated independently, so draw order elsewhere never shifts the
// stream and parallel replays reproduce the serial run bit for bit.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t frame, uint64_t slot, uint64_t user) {
    state_ = mix64(seed + 0x9e3779b97f4a7c15ULL);
    state_ = mix64(state_ ^ (frame + 0xd1b54a32d192ed03ULL));
    state_ = mix64(state_ ^ (slot + 0x8cb92ba72f3d8dd7ULL));
    state_ = mix64(state_ ^ (user + 0x52dce729d3c4f2dbULL));
  }

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double exponential() { return -std::log1p(-uniform01()); }

  int uniform_int(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next()) *
                             static_cast<unsigned>(n)) >>
                            64);
  }

 private:
  uint64_t state_;
};

}  // namespace aoigf
