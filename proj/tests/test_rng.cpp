/*
   Copyright 2026 The genmis Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "genmis/rng.hpp"

using namespace genmis;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) ==
          C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::block(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            K{0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::block(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            K{0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("bit-to-unit mapping stays inside the open interval") {
    CHECK(bits_to_unit(0) == std::ldexp(1.0, -54));
    CHECK(bits_to_unit(~std::uint64_t{0}) == 1.0 - std::ldexp(1.0, -54));
    CHECK(bits_to_unit(std::uint64_t{1} << 63) == 0.5 + std::ldexp(1.0, -54));
}

TEST_CASE("variates are a pure function of seed, stream, lane and index") {
    const CounterRng a(RngSeed{42, 0});
    const CounterRng b(RngSeed{42, 0});
    CHECK(a.uniforms(1, 12345) == b.uniforms(1, 12345));
    CHECK(a.uniform(0, 7) == a.uniforms(0, 7)[0]);
    CHECK(a.seed() == RngSeed{42, 0});

    std::set<double> seen;
    seen.insert(a.uniform(0, 0));
    seen.insert(a.uniform(1, 0));
    seen.insert(a.uniform(0, 1));
    seen.insert(a.uniform(0, std::uint64_t{1} << 32));
    seen.insert(CounterRng(RngSeed{42, 1}).uniform(0, 0));
    seen.insert(CounterRng(RngSeed{43, 0}).uniform(0, 0));
    seen.insert(CounterRng(RngSeed{42ull | (1ull << 40), 0}).uniform(0, 0));
    CHECK(seen.size() == 7);
}

TEST_CASE("uniforms look uniform") {
    const CounterRng rng(RngSeed{7, 3});
    constexpr int kN = 200000;
    std::array<int, 10> bins{};
    double sum = 0, sum_pair = 0;
    for (int i = 0; i < kN; ++i) {
        const auto u = rng.uniforms(2, static_cast<std::uint64_t>(i));
        REQUIRE(u[0] > 0);
        REQUIRE(u[0] < 1);
        ++bins[static_cast<int>(u[0] * 10)];
        sum += u[0];
        sum_pair += (u[0] - 0.5) * (u[1] - 0.5);
    }
    CHECK(sum / kN == doctest::Approx(0.5).epsilon(0.005));
    CHECK(std::fabs(sum_pair / kN) < 0.003);
    double chi2 = 0;
    for (int c : bins) chi2 += (c - kN / 10.0) * (c - kN / 10.0) / (kN / 10.0);
    // 9 degrees of freedom; 0.999 quantile is 27.9.
    CHECK(chi2 < 27.9);
}
