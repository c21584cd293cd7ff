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

#pragma once

#include <array>
#include <cstdint>

namespace genmis {

/// (seed, stream) fully determines every variate drawn for a run.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint32_t stream = 0;

    bool operator==(const RngSeed&) const = default;
};

/// Philox4x32-10 counter-based generator.
///
/// Stateless: the block for a given (key, counter) is a pure function, so the
/// variates for (technique, sample index) never depend on evaluation order.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

/// Variates for one run. The counter is laid out as
/// (index low word, index high word, lane, stream) and the key is the seed.
class CounterRng {
public:
    explicit CounterRng(RngSeed seed) noexcept;

    /// Two independent uniforms in the open interval (0, 1), 53 bits each.
    std::array<double, 2> uniforms(std::uint32_t lane, std::uint64_t index) const noexcept;

    double uniform(std::uint32_t lane, std::uint64_t index) const noexcept {
        return uniforms(lane, index)[0];
    }

    RngSeed seed() const noexcept { return seed_; }

private:
    RngSeed seed_;
    Philox4x32::Key key_;
};

/// Maps 64 random bits to (0, 1): the top 53 bits, centred in their cell.
double bits_to_unit(std::uint64_t bits) noexcept;

} // namespace genmis
