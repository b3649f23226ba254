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
#include <set>

#include "otfsoma/grid.hpp"

using namespace otfsoma;

namespace {

cx_mat random_grid(uword rows, uword cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    cx_mat m(rows, cols);
    for (auto& v : m) v = cx(g(rng), g(rng));
    return m;
}

// contractual definition of the transform pair, as plain double sums
TfGrid naive_isfft(const DdGrid& dd, const FrameConfig& cfg) {
    TfGrid out(cfg);
    for (uword n = 0; n < cfg.N; ++n)
        for (uword m = 0; m < cfg.M; ++m) {
            cx acc{0.0, 0.0};
            for (uword k = 0; k < cfg.N; ++k)
                for (uword l = 0; l < cfg.M; ++l)
                    acc += dd.values(k, l) *
                           cis(-static_cast<double>(m * l) / cfg.M + static_cast<double>(n * k) / cfg.N);
            out.values(n, m) = acc / static_cast<double>(cfg.mn());
        }
    return out;
}

DdGrid naive_sfft(const TfGrid& tf, const FrameConfig& cfg) {
    DdGrid out(cfg);
    for (uword k = 0; k < cfg.N; ++k)
        for (uword l = 0; l < cfg.M; ++l) {
            cx acc{0.0, 0.0};
            for (uword n = 0; n < cfg.N; ++n)
                for (uword m = 0; m < cfg.M; ++m)
                    acc += tf.values(n, m) *
                           cis(static_cast<double>(m * l) / cfg.M - static_cast<double>(n * k) / cfg.N);
            out.values(k, l) = acc;
        }
    return out;
}

}  // namespace

TEST_CASE("frame config invariants") {
    CHECK_NOTHROW(FrameConfig::from_spacing(36, 18, 15e3));
    CHECK_THROWS_AS(FrameConfig(36, 18, 15e3, 1.0 / 14e3), std::invalid_argument);
    CHECK_THROWS_AS(FrameConfig(0, 18, 15e3, 1.0 / 15e3), std::invalid_argument);
}

TEST_CASE("isfft impulse and constant grids") {
    const auto cfg = FrameConfig::from_spacing(4, 4, 15e3);
    DdGrid dd(cfg);
    dd.values(0, 0) = 1.0;
    const TfGrid flat = isfft(dd, cfg);
    for (auto& v : flat.values) CHECK(std::abs(v - cx{1.0 / 16.0, 0.0}) < 1e-15);

    DdGrid ones(cfg);
    ones.values.fill(cx{1.0, 0.0});
    const TfGrid delta = isfft(ones, cfg);
    for (uword n = 0; n < 4; ++n)
        for (uword m = 0; m < 4; ++m) {
            const cx want = (n == 0 && m == 0) ? cx{1.0, 0.0} : cx{0.0, 0.0};
            CHECK(std::abs(delta.values(n, m) - want) < 1e-14);
        }
}

TEST_CASE("sfft impulse grid") {
    const auto cfg = FrameConfig::from_spacing(4, 4, 15e3);
    TfGrid tf(cfg);
    tf.values(0, 0) = 1.0;
    const DdGrid dd = sfft(tf, cfg);
    for (auto& v : dd.values) CHECK(std::abs(v - cx{1.0, 0.0}) < 1e-14);
}

TEST_CASE("transforms match the naive double sums") {
    const auto cfg8 = FrameConfig::from_spacing(8, 8, 15e3);
    const DdGrid dd(random_grid(8, 8, 1));
    const TfGrid fast = isfft(dd, cfg8);
    const TfGrid slow = naive_isfft(dd, cfg8);
    CHECK(arma::abs(fast.values - slow.values).max() < 1e-12);

    const auto cfg6 = FrameConfig::from_spacing(6, 6, 15e3);
    const TfGrid tf(random_grid(6, 6, 2));
    CHECK(arma::abs(sfft(tf, cfg6).values - naive_sfft(tf, cfg6).values).max() < 1e-12);
}

TEST_CASE("sfft and isfft invert each other") {
    const auto cfg = FrameConfig::from_spacing(4, 4, 15e3);
    const DdGrid dd(random_grid(4, 4, 3));
    CHECK(arma::abs(sfft(isfft(dd, cfg), cfg).values - dd.values).max() < 1e-12);

    const TfGrid tf(random_grid(4, 4, 4));
    CHECK(arma::abs(isfft(DdGrid(sfft(tf, cfg).values), cfg).values - tf.values).max() < 1e-12);

    CHECK_THROWS_AS(isfft(DdGrid(random_grid(3, 4, 5)), cfg), std::invalid_argument);
    CHECK_THROWS_AS(sfft(TfGrid(random_grid(4, 3, 6)), cfg), std::invalid_argument);
}

TEST_CASE("scheme validation names the violated constraint") {
    const auto cfg = FrameConfig::from_spacing(36, 18, 15e3);
    CHECK_THROWS_WITH(validate_scheme(Iddma{5, 2}, cfg), Catch::Matchers::ContainsSubstring("g1 must divide M"));
    CHECK_THROWS_WITH(validate_scheme(Iddma{3, 4}, cfg), Catch::Matchers::ContainsSubstring("g2 must divide N"));
    CHECK_THROWS_WITH(validate_scheme(GbDoppler{4, 0}, cfg), Catch::Matchers::ContainsSubstring("Q must divide N"));
    CHECK_THROWS_WITH(validate_scheme(GbDoppler{6, 3}, cfg), Catch::Matchers::ContainsSubstring("G must be smaller"));
    CHECK_NOTHROW(validate_scheme(GbDelay{12, 2}, cfg));
}

TEST_CASE("iddma allocation set") {
    const auto cfg = FrameConfig::from_spacing(8, 8, 15e3);
    const MaScheme scheme = Iddma{2, 2};
    const auto set0 = allocation_set(scheme, 0, cfg);
    REQUIRE(set0.size() == 16);
    for (auto [k, l] : set0) {
        CHECK(k % 2 == 0);
        CHECK(l % 2 == 0);
    }

    // degenerate single UT covers the whole grid
    const auto full = allocation_set(MaScheme{Iddma{1, 1}}, 0, cfg);
    CHECK(full.size() == 64);

    CHECK_THROWS_AS(allocation_set(scheme, 4, cfg), std::invalid_argument);
}

TEST_CASE("gb allocation sets") {
    const auto cfg = FrameConfig::from_spacing(9, 9, 15e3);
    const auto rows = allocation_set(MaScheme{GbDoppler{3, 2}}, 1, cfg);
    REQUIRE(rows.size() == 9);
    for (auto [k, l] : rows) CHECK(k == 3);
    std::set<uword> ls;
    for (auto [k, l] : rows) ls.insert(l);
    CHECK(ls.size() == 9);

    const auto cols = allocation_set(MaScheme{GbDelay{3, 2}}, 2, cfg);
    REQUIRE(cols.size() == 9);
    for (auto [k, l] : cols) CHECK((l == 6 || l == 7 || l == 8));
    // with G = 2 only the first M/Q - G = 1 column of the block remains
    for (auto [k, l] : cols) CHECK(l == 6);
}

TEST_CASE("allocation sets are disjoint with the expected complement") {
    const auto cfg = FrameConfig::from_spacing(8, 8, 15e3);
    for (const MaScheme scheme :
         {MaScheme{Iddma{2, 2}}, MaScheme{Iddma{4, 2}}, MaScheme{GbDoppler{4, 1}}, MaScheme{GbDelay{2, 1}}}) {
        const uword Q = ut_count(scheme);
        std::set<std::pair<uword, uword>> seen;
        for (uword q = 0; q < Q; ++q) {
            for (auto kl : allocation_set(scheme, q, cfg)) {
                CAPTURE(scheme_name(scheme), q);
                REQUIRE(seen.insert(kl).second);  // pairwise disjoint
            }
        }
        if (std::holds_alternative<Iddma>(scheme)) {
            CHECK(seen.size() == cfg.mn());
        } else if (const auto* s = std::get_if<GbDoppler>(&scheme)) {
            CHECK(cfg.mn() - seen.size() == cfg.M * s->G * s->Q);
        } else if (const auto* s = std::get_if<GbDelay>(&scheme)) {
            CHECK(cfg.mn() - seen.size() == cfg.N * s->G * s->Q);
        }
    }
}

TEST_CASE("vector index maps are inverse bijections") {
    const auto cfg = FrameConfig::from_spacing(8, 8, 15e3);
    for (const MaScheme scheme : {MaScheme{Iddma{2, 4}}, MaScheme{Itfma{2, 2}}, MaScheme{GbDoppler{2, 1}},
                                  MaScheme{GbDelay{4, 1}}}) {
        for (uword q = 0; q < ut_count(scheme); ++q)
            for (uword r = 0; r < symbols_per_ut(scheme, cfg); ++r) {
                const auto [k, l] = dd_index_of(scheme, q, r, cfg);
                REQUIRE(vector_index_of(scheme, q, k, l, cfg) == r);
            }
    }
}

TEST_CASE("itfma occupancy partitions the TF grid") {
    const Itfma s{2, 2};
    for (uword n = 0; n < 8; ++n)
        for (uword m = 0; m < 8; ++m) {
            CHECK(itfma_tfre_occupied(s, 0, n, m) == (n % 2 == 0 && m % 2 == 0));
        }
    CHECK(itfma_tfre_occupied(Itfma{1, 1}, 0, 5, 3));

    for (const Itfma sc : {Itfma{2, 2}, Itfma{2, 4}, Itfma{4, 2}, Itfma{8, 1}}) {
        for (uword n = 0; n < 8; ++n)
            for (uword m = 0; m < 8; ++m) {
                uword owners = 0;
                for (uword q = 0; q < sc.g3 * sc.g4; ++q)
                    if (itfma_tfre_occupied(sc, q, n, m)) ++owners;
                REQUIRE(owners == 1);  // disjoint and covering
            }
    }
}

TEST_CASE("iddma TF block is translation invariant up to phase") {
    const auto cfg = FrameConfig::from_spacing(8, 8, 15e3);
    const Iddma s{2, 2};
    const uword pn = cfg.N / s.g2, pm = cfg.M / s.g1;
    const cx_mat x = random_grid(pn, pm, 9);
    for (uword q = 0; q < 4; ++q) {
        for (std::int64_t t1 = -2; t1 <= 2; ++t1)
            for (std::int64_t t2 = -2; t2 <= 2; ++t2)
                for (std::int64_t n = 0; n < static_cast<std::int64_t>(pn); ++n)
                    for (std::int64_t m = 0; m < static_cast<std::int64_t>(pm); ++m) {
                        const cx base = iddma_tf_symbol(s, q, x, n, m, cfg);
                        const cx moved = iddma_tf_symbol(s, q, x, n + t1 * static_cast<std::int64_t>(pn),
                                                         m + t2 * static_cast<std::int64_t>(pm), cfg);
                        const cx phase = cis(-(static_cast<double>(t2) * (q % s.g1)) / s.g1 +
                                             (static_cast<double>(t1) * (q / s.g1)) / s.g2);
                        CAPTURE(q, t1, t2, n, m);
                        REQUIRE(std::abs(moved - phase * base) < 1e-12);
                    }
    }
}

TEST_CASE("iddma TF block agrees with the full-grid transform") {
    const auto cfg = FrameConfig::from_spacing(8, 8, 15e3);
    const Iddma s{2, 2};
    const MaScheme scheme{s};
    const uword pn = cfg.N / s.g2, pm = cfg.M / s.g1;
    for (uword q = 0; q < 4; ++q) {
        const cx_mat x = random_grid(pn, pm, 20 + q);
        DdGrid dd(cfg);
        for (uword r = 0; r < pn * pm; ++r) {
            const auto [k, l] = dd_index_of(scheme, q, r, cfg);
            dd.values(k, l) = x(r % pn, r / pn);
        }
        const TfGrid full = isfft(dd, cfg);
        for (uword n = 0; n < cfg.N; ++n)
            for (uword m = 0; m < cfg.M; ++m) {
                const cx block = iddma_tf_symbol(s, q, x, static_cast<std::int64_t>(n),
                                                 static_cast<std::int64_t>(m), cfg);
                REQUIRE(std::abs(block - full.values(n, m)) < 1e-12);
            }
    }
}
