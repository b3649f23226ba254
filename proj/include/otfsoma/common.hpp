// SPDX-License-Identifier: Apache-2.0
//
// otfs-oma-lab — uplink spectral efficiency of OTFS multiple-access schemes
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <armadillo>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace otfsoma {

using cx = std::complex<double>;
using arma::cx_cube;
using arma::cx_mat;
using arma::cx_vec;
using arma::uword;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cx kJ{0.0, 1.0};

/// sin(pi*x) with exact argument reduction, so that near-integer x does not
/// lose precision to the pi multiplication.
inline double sinpi(double x) {
    const double m = std::round(x);
    const double r = x - m;
    const double s = std::sin(kPi * r);
    return (static_cast<std::int64_t>(m) & 1) ? -s : s;
}

/// cos(pi*x) with the same reduction as sinpi.
inline double cospi(double x) {
    const double m = std::round(x);
    const double r = x - m;
    const double c = std::cos(kPi * r);
    return (static_cast<std::int64_t>(m) & 1) ? -c : c;
}

/// e^{j*pi*x}
inline cx cis_pi(double x) { return {cospi(x), sinpi(x)}; }

/// e^{j*2*pi*x}
inline cx cis(double x) { return cis_pi(2.0 * x); }

/// e^{j*2*pi*num/den} for integer num/den, reduced in integer arithmetic.
inline cx cis_frac(std::int64_t num, std::int64_t den) {
    num %= den;
    return cis(static_cast<double>(num) / static_cast<double>(den));
}

/// Floored modulo: smallest non-negative integer congruent to a (mod m).
inline std::int64_t imod(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

inline void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

// ----- deterministic stream keying --------------------------------------
// SplitMix64 step; used to derive independent RNG keys from
// (seed, trial, ut) so Monte Carlo trials are order independent.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (0xA0761D6478BD642FULL + a));
    h = splitmix64(h ^ (0xE7037ED1A0B428DBULL + b));
    return h;
}

}  // namespace otfsoma
