#include <doctest.h>

#include <set>

#include "isobandit/rng.hpp"

using namespace isobandit;

TEST_SUITE("rng") {
  // Known-answer vectors of the reference Philox4x32-10 implementation.
  TEST_CASE("philox known answers") {
    using B = Philox4x32::Block;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::block(B{0, 0, 0, 0}, K{0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("streams are disjoint and seeds reproduce") {
    Philox4x32 a(7, Stream::Noise), b(7, Stream::Noise), c(7, Stream::Algorithm), d(8, Stream::Noise);
    std::set<std::uint32_t> seen_c;
    for (int i = 0; i < 64; ++i) seen_c.insert(c());
    int shared = 0;
    for (int i = 0; i < 64; ++i) {
      const auto x = a();
      CHECK(x == b());
      shared += seen_c.count(x);
      CHECK(x != d());
    }
    CHECK(shared <= 1);
  }

  TEST_CASE("uniform01 range and mean") {
    Philox4x32 g(1, Stream::Harness);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double u = g.uniform01();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  }
}
