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

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "otfsoma/kernels.hpp"

using namespace otfsoma;

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration in
// long double. Independent quadrature oracle for the ratio kernels.
void gauss_legendre(int n, std::vector<long double>& nodes, std::vector<long double>& weights) {
    nodes.assign(n, 0.0L);
    weights.assign(n, 0.0L);
    const long double pi = 3.141592653589793238462643L;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        long double x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
        long double pp = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            long double p0 = 1.0L, p1 = 0.0L;
            for (int j = 0; j < n; ++j) {
                const long double p2 = p1;
                p1 = p0;
                p0 = ((2.0L * j + 1.0L) * x * p1 - j * p2) / (j + 1.0L);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0L);
            const long double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-19L) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0L / ((1.0L - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

// integral_0^a e^{j 2 pi xi t} dt by composite Gauss-Legendre
std::complex<long double> quadrature_phase_integral(double xi, double a) {
    static std::vector<long double> nodes, weights;
    if (nodes.empty()) gauss_legendre(16, nodes, weights);
    const int panels = 2 + static_cast<int>(std::abs(xi) * a);
    const long double pi = 3.141592653589793238462643L;
    std::complex<long double> acc{0.0L, 0.0L};
    for (int p = 0; p < panels; ++p) {
        const long double lo = a * static_cast<long double>(p) / panels;
        const long double hi = a * static_cast<long double>(p + 1) / panels;
        const long double half = 0.5L * (hi - lo), mid = 0.5L * (hi + lo);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const long double t = mid + half * nodes[i];
            const long double arg = 2.0L * pi * static_cast<long double>(xi) * t;
            acc += weights[i] * half * std::complex<long double>(std::cos(arg), std::sin(arg));
        }
    }
    return acc;
}

std::complex<double> direct_geometric_sum(double x, std::int64_t P) {
    std::complex<double> acc{0.0, 0.0};
    for (std::int64_t n = 0; n < P; ++n) acc += cis(static_cast<double>(n) * x);
    return acc;
}

}  // namespace

TEST_CASE("phase_ratio limit and analytic values") {
    CHECK(std::abs(phase_ratio(0.0, 0.7) - cx{0.7, 0.0}) < 1e-15);
    CHECK(std::abs(phase_ratio(1e-12, 0.7) - cx{0.7, 0.0}) < 1e-10);

    // (e^{j pi} - 1)/(j pi) = 2j/pi
    const cx v = phase_ratio(0.5, 1.0);
    CHECK(std::abs(v - cx{0.0, 2.0 / kPi}) < 1e-15);

    // integer xi with a = 1 closes the full turn
    CHECK(std::abs(phase_ratio(3.0, 1.0)) < 1e-15);
}

TEST_CASE("phase_ratio matches high-precision quadrature") {
    const double xis[] = {1e-7, -1e-7, 1e-6, -2e-6, 0.3,  -0.3, 1.0,  2.0,
                          5.25, -17.8, 33.3, 0.001, -3e-4, 12.0, -7.0, 0.0};
    const double as[] = {0.0, 0.05, 0.3, 0.7, 1.0};
    for (double xi : xis)
        for (double a : as) {
            const auto q = quadrature_phase_integral(xi, a);
            const cx expect(static_cast<double>(q.real()), static_cast<double>(q.imag()));
            CAPTURE(xi, a);
            CHECK(std::abs(phase_ratio(xi, a) - expect) < 1e-12);
        }

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uxi(-40.0, 40.0), ua(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double xi = uxi(rng), a = ua(rng);
        const auto q = quadrature_phase_integral(xi, a);
        const cx expect(static_cast<double>(q.real()), static_cast<double>(q.imag()));
        CAPTURE(xi, a);
        REQUIRE(std::abs(phase_ratio(xi, a) - expect) < 1e-12);
    }
}

TEST_CASE("dirichlet_ratio closed form equals the geometric sum") {
    CHECK(std::abs(dirichlet_ratio(0.0, 9) - cx{9.0, 0.0}) < 1e-13);
    CHECK(std::abs(dirichlet_ratio(0.25, 4)) < 1e-13);
    CHECK(std::abs(dirichlet_ratio(0.37, 6) - direct_geometric_sum(0.37, 6)) < 1e-14);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-20.0, 20.0);
    std::uniform_int_distribution<std::int64_t> up(1, 36);
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t P = up(rng);
        double x = ux(rng);
        if (i % 5 == 0) x = std::round(x);               // exact integer
        if (i % 7 == 0) x = std::round(x) + 1e-10;       // just inside the fallback
        const cx got = dirichlet_ratio(x, P);
        const cx want = direct_geometric_sum(x, P);
        CAPTURE(x, P);
        REQUIRE(std::abs(got - want) < 1e-12 * std::max(1.0, static_cast<double>(P)));
        REQUIRE(std::isfinite(got.real()));
        REQUIRE(std::isfinite(got.imag()));
    }
}

TEST_CASE("geometric_sum offset windows") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double x = (i % 4 == 0) ? std::round(ux(rng)) : ux(rng);
        const std::int64_t a = static_cast<std::int64_t>(i % 7) - 3;
        const std::int64_t len = 1 + (i % 12);
        cx want{0.0, 0.0};
        for (std::int64_t n = a; n < a + len; ++n) want += cis(static_cast<double>(n) * x);
        REQUIRE(std::abs(geometric_sum(x, a, len) - want) < 1e-12);
    }
    CHECK(geometric_sum(0.3, 2, 0) == cx{0.0, 0.0});
}
