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

#include "otfsoma/waveform_oracle.hpp"

using namespace otfsoma;

namespace {

const FrameConfig cfg8 = FrameConfig::from_spacing(8, 8, 15e3);
const FrameConfig cfg9 = FrameConfig::from_spacing(9, 9, 15e3);

UtChannel flat_channel() { return UtChannel{{{cx{1.0, 0.0}, 0.0, 0.0}}}; }

UtChannel random_channel(std::uint64_t seed, uword paths, double max_delay_frac, double nu_max,
                         const FrameConfig& cfg) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    UtChannel ch;
    for (uword i = 0; i < paths; ++i) {
        ChannelPath p;
        p.gain = cx(u(rng) - 0.5, u(rng) - 0.5);
        p.delay = u(rng) * max_delay_frac * cfg.T;
        p.doppler = nu_max * std::cos(kTwoPi * u(rng));
        ch.paths.push_back(p);
    }
    return ch;
}

cx_vec random_symbols(uword dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    cx_vec v(dim);
    for (auto& x : v) x = cx(g(rng), g(rng));
    return v;
}

// oversampled Riemann approximation of the matched-filter integral; only
// used to confirm that the closed-form integrals are the limit
cx riemann_integral(const PiecewiseExpSignal& sig, double t0, double t1, double F, int steps) {
    cx acc{0.0, 0.0};
    const double dt = (t1 - t0) / steps;
    for (int i = 0; i < steps; ++i) {
        const double t = t0 + (i + 0.5) * dt;
        acc += sig.value_at(t) * cis(-F * t) * dt;
    }
    return acc;
}

}  // namespace

TEST_CASE("synthesis of trivial grids") {
    const MaScheme scheme = GbDoppler{1, 0};
    cx_vec zero(symbols_per_ut(scheme, cfg8), arma::fill::zeros);
    CHECK(synthesize_tx(scheme, 0, zero, cfg8).empty());

    // one TF symbol -> one rectangular segment at amplitude 1/sqrt(T)
    TfGrid tf(cfg8);
    tf.values(0, 0) = 1.0;
    const auto sig = synthesize_from_tf(tf, cfg8);
    REQUIRE(sig.breakpoints.size() == 2);
    CHECK(sig.breakpoints[0] == 0.0);
    CHECK(sig.breakpoints[1] == Catch::Approx(cfg8.T));
    REQUIRE(sig.segments[0].size() == 1);
    CHECK(sig.segments[0][0].freq == cx{0.0, 0.0});
    CHECK(std::abs(sig.segments[0][0].amp - cx{1.0 / std::sqrt(cfg8.T), 0.0}) < 1e-9);
}

TEST_CASE("apply_channel structure") {
    const MaScheme scheme = GbDoppler{1, 0};
    const cx_vec sym = random_symbols(symbols_per_ut(scheme, cfg8), 1);
    const auto sig = synthesize_tx(scheme, 0, sym, cfg8);

    // identity channel keeps values
    const auto same = apply_channel(sig, flat_channel(), cfg8);
    for (double t : {1e-5, 3e-4, 4.2e-4})
        CHECK(std::abs(same.value_at(t) - sig.value_at(t)) < 1e-9);

    // pure delay shifts all breakpoints
    const double tau = 5e-6;
    const auto delayed = apply_channel(sig, UtChannel{{{cx{1.0, 0.0}, tau, 0.0}}}, cfg8);
    REQUIRE(delayed.breakpoints.size() == sig.breakpoints.size());
    for (std::size_t i = 0; i < sig.breakpoints.size(); ++i)
        CHECK(delayed.breakpoints[i] == Catch::Approx(sig.breakpoints[i] + tau));

    // two paths superpose linearly
    const UtChannel two{{{cx{0.4, 0.1}, 2e-6, 150.0}, {cx{-0.2, 0.7}, 11e-6, -90.0}}};
    const auto both = apply_channel(sig, two, cfg8);
    const auto first = apply_channel(sig, UtChannel{{two.paths[0]}}, cfg8);
    const auto second = apply_channel(sig, UtChannel{{two.paths[1]}}, cfg8);
    for (double t : {1e-5, 2.7e-4, 5.0e-4}) {
        CHECK(std::abs(both.value_at(t) - first.value_at(t) - second.value_at(t)) <
              1e-14 * std::abs(both.value_at(t)) + 1e-12);
    }
}

TEST_CASE("closed-form integrals are the Riemann limit") {
    const MaScheme scheme = GbDelay{3, 1};
    const cx_vec sym = random_symbols(symbols_per_ut(scheme, cfg9), 2);
    const auto ch = random_channel(3, 3, 0.6, 900.0, cfg9);
    const auto rx = apply_channel(synthesize_tx(scheme, 1, sym, cfg9, ch.max_delay()), ch, cfg9);
    const double F = 2.0 * cfg9.delta_f;
    const cx exact = integrate_against(rx, 0.0, cfg9.T, F);
    const cx at1 = riemann_integral(rx, 0.0, cfg9.T, F, 4000);
    const cx at2 = riemann_integral(rx, 0.0, cfg9.T, F, 8000);
    // halving the step halves the checker's error; the oracle value is fixed
    CHECK(std::abs(at2 - exact) < 0.75 * std::abs(at1 - exact));
    CHECK(std::abs(at2 - exact) < 1e-3 * std::abs(exact));
}

TEST_CASE("loopback recovers the symbols for every scheme") {
    for (const MaScheme scheme : {MaScheme{Iddma{2, 2}}, MaScheme{Itfma{2, 2}}, MaScheme{GbDoppler{2, 1}},
                                  MaScheme{GbDelay{2, 1}}}) {
        const uword dim = symbols_per_ut(scheme, cfg8);
        for (uword q = 0; q < ut_count(scheme); ++q) {
            const cx_vec sym = random_symbols(dim, 17 + q);
            const auto rx = propagate(scheme, q, sym, flat_channel(), cfg8);
            const cx_vec got = receive_dd(scheme, q, rx, cfg8);
            CAPTURE(scheme_name(scheme), q);
            REQUIRE(arma::abs(got - sym).max() < 1e-10);
        }
    }
}

TEST_CASE("receive chain is linear") {
    const MaScheme scheme = Iddma{2, 2};
    const uword dim = symbols_per_ut(scheme, cfg8);
    const auto ch = random_channel(5, 3, 0.8, 1000.0, cfg8);
    const cx_vec a = random_symbols(dim, 31), b = random_symbols(dim, 32);
    const cx alpha{0.3, -1.1}, beta{-0.7, 0.2};
    const cx_vec lhs = receive_dd(scheme, 1, propagate(scheme, 0, cx_vec(alpha * a + beta * b), ch, cfg8), cfg8);
    const cx_vec rhs = alpha * receive_dd(scheme, 1, propagate(scheme, 0, a, ch, cfg8), cfg8) +
                       beta * receive_dd(scheme, 1, propagate(scheme, 0, b, ch, cfg8), cfg8);
    CHECK(arma::abs(lhs - rhs).max() < 1e-12 * arma::abs(lhs).max() + 1e-12);
}

TEST_CASE("oracle matrix flat-channel identity") {
    for (const MaScheme scheme : {MaScheme{Iddma{2, 2}}, MaScheme{Itfma{2, 2}}, MaScheme{GbDoppler{3, 1}},
                                  MaScheme{GbDelay{3, 1}}}) {
        const FrameConfig& cfg = std::holds_alternative<Iddma>(scheme) || std::holds_alternative<Itfma>(scheme)
                                     ? cfg8
                                     : cfg9;
        const uword Q = ut_count(scheme);
        const uword dim = symbols_per_ut(scheme, cfg);
        for (uword q = 0; q < Q; ++q)
            for (uword qp = 0; qp < Q; ++qp) {
                const cx_mat H = oracle_matrix(scheme, q, qp, flat_channel(), cfg);
                const cx_mat want = (q == qp) ? arma::eye<cx_mat>(dim, dim) : cx_mat(dim, dim, arma::fill::zeros);
                CAPTURE(scheme_name(scheme), q, qp);
                REQUIRE(arma::abs(H - want).max() < 1e-10);
            }
    }
}

TEST_CASE("oracle matrix is linear in the path gains") {
    const MaScheme scheme = GbDoppler{3, 1};
    auto ch = random_channel(8, 2, 0.5, 700.0, cfg9);
    const cx c{1.7, -0.4};
    const cx_mat base = oracle_matrix(scheme, 0, 1, ch, cfg9);
    for (auto& p : ch.paths) p.gain *= c;
    const cx_mat scaled = oracle_matrix(scheme, 0, 1, ch, cfg9);
    CHECK(arma::abs(scaled - c * base).max() < 1e-12 * arma::abs(scaled).max() + 1e-14);
}

TEST_CASE("delay spill reaches the next receive window") {
    // single path with a delay close to T: the second receive window of the
    // same UT must pick up energy from the first transmitted slot
    const MaScheme scheme = GbDoppler{1, 0};
    const uword dim = symbols_per_ut(scheme, cfg8);
    cx_vec sym(dim, arma::fill::zeros);
    // excite one DD symbol, giving TF symbols spread over all slots
    sym(3) = 1.0;
    const UtChannel ch{{{cx{1.0, 0.0}, 0.9 * cfg8.T, 0.0}}};
    const auto rx = propagate(scheme, 0, sym, ch, cfg8);
    const cx w1 = integrate_against(rx, cfg8.T, 2.0 * cfg8.T, 0.0);
    CHECK(std::abs(w1) > 0.0);
    // the spill term vanishes when the delay does
    const auto rx0 = propagate(scheme, 0, sym, flat_channel(), cfg8);
    const cx direct = integrate_against(rx0, 0.0, cfg8.T, 0.0);
    CHECK(std::abs(direct) > 0.0);
}

TEST_CASE("ideal pulse matrices") {
    // flat channel: identity for self, zero across
    for (const MaScheme scheme : {MaScheme{Iddma{2, 2}}, MaScheme{GbDoppler{3, 1}}, MaScheme{GbDelay{3, 2}}}) {
        const FrameConfig& cfg = std::holds_alternative<Iddma>(scheme) ? cfg8 : cfg9;
        const uword dim = symbols_per_ut(scheme, cfg);
        const cx_mat self = ideal_pulse_matrix(scheme, 0, 0, flat_channel(), cfg);
        CAPTURE(scheme_name(scheme));
        REQUIRE(arma::abs(self - arma::eye<cx_mat>(dim, dim)).max() < 1e-10);
        const cx_mat cross = ideal_pulse_matrix(scheme, 1, 0, flat_channel(), cfg);
        REQUIRE(arma::abs(cross).max() < 1e-10);
    }

    // DD-interleaved cross-UT coupling is exactly zero even for rich channels
    const cx_mat z = ideal_pulse_matrix(MaScheme{Iddma{2, 2}}, 2, 1, random_channel(12, 4, 0.9, 1200.0, cfg8), cfg8);
    CHECK(arma::abs(z).max() == 0.0);

    // guard-band schemes keep multi-user coupling under ideal pulses
    const auto ch = random_channel(13, 3, 0.5, 900.0, cfg9);
    const cx_mat gb_cross = ideal_pulse_matrix(MaScheme{GbDoppler{3, 0}}, 1, 0, ch, cfg9);
    CHECK(arma::abs(gb_cross).max() > 1e-6);

    CHECK_THROWS_AS(ideal_pulse_matrix(MaScheme{Itfma{2, 2}}, 0, 0, flat_channel(), cfg8),
                    std::invalid_argument);
}

TEST_CASE("tx energy matches the scheme's power convention") {
    // average energy of the DD-interleaved transmit signal over random unit
    // variance symbols approaches E_T / Q^2 per frame
    const Iddma s{2, 2};
    const MaScheme scheme{s};
    const uword dim = symbols_per_ut(scheme, cfg8);
    const uword Q = 4;
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g;
    const int draws = 400;
    double acc = 0.0;
    for (int i = 0; i < draws; ++i) {
        cx_vec sym(dim);
        for (auto& x : sym) x = cx(g(rng), g(rng)) / std::sqrt(2.0);  // unit variance
        acc += signal_energy(synthesize_tx(scheme, 1, sym, cfg8));
    }
    const double expect = 1.0 / static_cast<double>(Q * Q);
    CHECK(acc / draws == Catch::Approx(expect).epsilon(0.15));
}
