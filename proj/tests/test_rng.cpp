#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "gossip/rng.hpp"

using namespace gossip;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference values from the Random123 distribution (kat_vectors).
  auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);

  auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                       {0xa4093822u, 0x299f31d0u});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("counter rng is addressed by (seed, stream, step)") {
  CounterRng a(5, 3, 11), b(5, 3, 11);
  for (int i = 0; i < 50; ++i) CHECK(a.next_u64() == b.next_u64());

  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed : {0ull, 1ull})
    for (std::uint64_t stream : {0ull, 1ull, 1ull << 33})
      for (std::uint64_t step : {0ull, 1ull, 1ull << 35}) firsts.insert(CounterRng(seed, stream, step).next_u64());
  CHECK(firsts.size() == 18);
}

TEST_CASE("uniform and below stay in range and look uniform") {
  CounterRng rng(42, 0, 0);
  double sum = 0.0;
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    ++counts[rng.below(7)];
  }
  CHECK(sum / draws == doctest::Approx(0.5).epsilon(0.01));
  for (int c : counts) CHECK(std::abs(c - draws / 7) < 4 * 100);
}
