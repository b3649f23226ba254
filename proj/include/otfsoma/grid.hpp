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

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "otfsoma/common.hpp"

namespace otfsoma {

// ----- frame geometry ----------------------------------------------------

/// OTFS frame geometry. The delay-Doppler grid has N bins along Doppler
/// (index k) and M bins along delay (index l); the time-frequency grid has
/// N slots of duration T and M subcarriers spaced delta_f = 1/T.
struct FrameConfig {
    uword M = 36;
    uword N = 18;
    double delta_f = 15e3;
    double T = 1.0 / 15e3;

    FrameConfig() = default;
    FrameConfig(uword M_, uword N_, double delta_f_, double T_)
        : M(M_), N(N_), delta_f(delta_f_), T(T_) {
        require(M >= 1 && N >= 1, "FrameConfig: M and N must be positive");
        require(delta_f > 0.0 && T > 0.0, "FrameConfig: delta_f and T must be positive");
        require(std::abs(T * delta_f - 1.0) <= 1e-12, "FrameConfig: T * delta_f must equal 1");
    }

    static FrameConfig from_spacing(uword M_, uword N_, double delta_f_) {
        return FrameConfig(M_, N_, delta_f_, 1.0 / delta_f_);
    }

    uword mn() const { return M * N; }
    double frame_duration() const { return static_cast<double>(N) * T; }
};

/// Delay-Doppler grid, values(k, l) with k = 0..N-1, l = 0..M-1.
struct DdGrid {
    cx_mat values;

    DdGrid() = default;
    explicit DdGrid(const FrameConfig& cfg) : values(cfg.N, cfg.M, arma::fill::zeros) {}
    explicit DdGrid(cx_mat v) : values(std::move(v)) {}

    void check_dims(const FrameConfig& cfg) const {
        require(values.n_rows == cfg.N && values.n_cols == cfg.M, "DdGrid: dimensions must be N x M");
    }
};

/// Time-frequency grid, values(n, m) with n = 0..N-1, m = 0..M-1.
struct TfGrid {
    cx_mat values;

    TfGrid() = default;
    explicit TfGrid(const FrameConfig& cfg) : values(cfg.N, cfg.M, arma::fill::zeros) {}
    explicit TfGrid(cx_mat v) : values(std::move(v)) {}

    void check_dims(const FrameConfig& cfg) const {
        require(values.n_rows == cfg.N && values.n_cols == cfg.M, "TfGrid: dimensions must be N x M");
    }
};

// ----- pulse shapes ------------------------------------------------------

/// Rectangular: amplitude 1/sqrt(T) on [0, T), zero elsewhere (unit energy).
/// Ideal: fictitious bi-orthogonal pulse pair (reference mode only).
enum class PulseShape { kRectangular, kIdeal };

inline const char* pulse_name(PulseShape p) {
    return p == PulseShape::kRectangular ? "rect" : "ideal";
}

// ----- multiple-access schemes -------------------------------------------

/// UTs interleaved on the DD grid, contiguous blocks on the TF grid.
struct Iddma {
    uword g1 = 1;  ///< delay-domain interleave factor, divides M
    uword g2 = 1;  ///< Doppler-domain interleave factor, divides N
};

/// UTs quasi-periodically repeated on the DD grid, interleaved on the TF grid.
struct Itfma {
    uword g3 = 1;  ///< frequency-domain interleave factor, divides M
    uword g4 = 1;  ///< time-domain interleave factor, divides N
};

/// UTs separated by G blank Doppler rows per allocation block.
struct GbDoppler {
    uword Q = 1;
    uword G = 0;
};

/// UTs separated by G blank delay columns per allocation block.
struct GbDelay {
    uword Q = 1;
    uword G = 0;
};

using MaScheme = std::variant<Iddma, Itfma, GbDoppler, GbDelay>;

inline uword ut_count(const MaScheme& scheme) {
    return std::visit(
        [](const auto& s) -> uword {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Iddma>) return s.g1 * s.g2;
            else if constexpr (std::is_same_v<S, Itfma>) return s.g3 * s.g4;
            else return s.Q;
        },
        scheme);
}

inline std::string scheme_name(const MaScheme& scheme) {
    return std::visit(
        [](const auto& s) -> std::string {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Iddma>) return "iddma";
            else if constexpr (std::is_same_v<S, Itfma>) return "itfma";
            else if constexpr (std::is_same_v<S, GbDoppler>) return "gb_doppler";
            else return "gb_delay";
        },
        scheme);
}

inline void validate_scheme(const MaScheme& scheme, const FrameConfig& cfg) {
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Iddma>) {
                require(s.g1 >= 1 && s.g2 >= 1, "iddma: g1 and g2 must be positive");
                require(cfg.M % s.g1 == 0, "iddma: g1 must divide M");
                require(cfg.N % s.g2 == 0, "iddma: g2 must divide N");
            } else if constexpr (std::is_same_v<S, Itfma>) {
                require(s.g3 >= 1 && s.g4 >= 1, "itfma: g3 and g4 must be positive");
                require(cfg.M % s.g3 == 0, "itfma: g3 must divide M");
                require(cfg.N % s.g4 == 0, "itfma: g4 must divide N");
            } else if constexpr (std::is_same_v<S, GbDoppler>) {
                require(s.Q >= 1, "gb_doppler: Q must be positive");
                require(cfg.N % s.Q == 0, "gb_doppler: Q must divide N");
                require(s.G < cfg.N / s.Q, "gb_doppler: G must be smaller than N/Q");
            } else {
                require(s.Q >= 1, "gb_delay: Q must be positive");
                require(cfg.M % s.Q == 0, "gb_delay: Q must divide M");
                require(s.G < cfg.M / s.Q, "gb_delay: G must be smaller than M/Q");
            }
        },
        scheme);
}

/// Number of information symbols per UT; also the dimension of every
/// effective channel matrix of the scheme.
inline uword symbols_per_ut(const MaScheme& scheme, const FrameConfig& cfg) {
    return std::visit(
        [&](const auto& s) -> uword {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Iddma>) return cfg.mn() / (s.g1 * s.g2);
            else if constexpr (std::is_same_v<S, Itfma>) return cfg.mn() / (s.g3 * s.g4);
            else if constexpr (std::is_same_v<S, GbDoppler>) return cfg.M * (cfg.N / s.Q - s.G);
            else return cfg.N * (cfg.M / s.Q - s.G);
        },
        scheme);
}

// ----- symbol vector <-> DD index maps ------------------------------------
// All bijections between effective-channel vector positions and DD grid
// indices live here. Vectors are laid out with the Doppler-side index
// running fastest, matching the matrix element placement used throughout.

/// DD index (k, l) of vector position r of UT q.
inline std::pair<uword, uword> dd_index_of(const MaScheme& scheme, uword q, uword r,
                                           const FrameConfig& cfg) {
    return std::visit(
        [&](const auto& s) -> std::pair<uword, uword> {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Iddma>) {
                const uword pn = cfg.N / s.g2;
                const uword u = r % pn, v = r / pn;
                return {q / s.g1 + s.g2 * u, q % s.g1 + s.g1 * v};
            } else if constexpr (std::is_same_v<S, Itfma>) {
                const uword pn = cfg.N / s.g4;
                return {r % pn, r / pn};
            } else if constexpr (std::is_same_v<S, GbDoppler>) {
                const uword rows = cfg.N / s.Q - s.G;
                return {q * (cfg.N / s.Q) + r % rows, r / rows};
            } else {
                const uword cols = cfg.M / s.Q - s.G;
                return {r / cols, q * (cfg.M / s.Q) + r % cols};
            }
        },
        scheme);
}

/// Vector position of DD index (k, l) of UT q. Requires (k, l) to belong to
/// the UT's allocation.
inline uword vector_index_of(const MaScheme& scheme, uword q, uword k, uword l,
                             const FrameConfig& cfg) {
    return std::visit(
        [&](const auto& s) -> uword {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Iddma>) {
                const uword pn = cfg.N / s.g2;
                const uword u = (k - q / s.g1) / s.g2;
                const uword v = (l - q % s.g1) / s.g1;
                return u + v * pn;
            } else if constexpr (std::is_same_v<S, Itfma>) {
                return k + l * (cfg.N / s.g4);
            } else if constexpr (std::is_same_v<S, GbDoppler>) {
                const uword rows = cfg.N / s.Q - s.G;
                return (k - q * (cfg.N / s.Q)) + l * rows;
            } else {
                const uword cols = cfg.M / s.Q - s.G;
                return k * cols + (l - q * (cfg.M / s.Q));
            }
        },
        scheme);
}

/// DDREs allocated to UT q, listed in vector-index order. For the
/// TF-interleaved scheme every UT occupies the full grid; the listed pairs
/// are its base DDREs (one per information symbol).
inline std::vector<std::pair<uword, uword>> allocation_set(const MaScheme& scheme, uword q,
                                                           const FrameConfig& cfg) {
    validate_scheme(scheme, cfg);
    require(q < ut_count(scheme), "allocation_set: UT index out of range");
    const uword dim = std::holds_alternative<Itfma>(scheme) ? cfg.mn() : symbols_per_ut(scheme, cfg);
    std::vector<std::pair<uword, uword>> out;
    if (std::holds_alternative<Itfma>(scheme)) {
        // full DD grid, Doppler index fastest
        out.reserve(dim);
        for (uword l = 0; l < cfg.M; ++l)
            for (uword k = 0; k < cfg.N; ++k) out.emplace_back(k, l);
        return out;
    }
    out.reserve(dim);
    for (uword r = 0; r < symbols_per_ut(scheme, cfg); ++r) out.push_back(dd_index_of(scheme, q, r, cfg));
    return out;
}

/// Occupied TFREs of UT q under the TF-interleaved scheme: true iff
/// (m - (q mod g3)) mod g3 == 0 and (n - floor(q/g3)) mod g4 == 0.
inline bool itfma_tfre_occupied(const Itfma& s, uword q, uword n, uword m) {
    require(q < s.g3 * s.g4, "itfma_tfre_occupied: UT index out of range");
    const auto dm = imod(static_cast<std::int64_t>(m) - static_cast<std::int64_t>(q % s.g3),
                         static_cast<std::int64_t>(s.g3));
    const auto dn = imod(static_cast<std::int64_t>(n) - static_cast<std::int64_t>(q / s.g3),
                         static_cast<std::int64_t>(s.g4));
    return dm == 0 && dn == 0;
}

// ----- symplectic transform pair ------------------------------------------

/// X[n,m] = (1/(NM)) sum_{k,l} dd[k,l] e^{-j2pi(ml/M - nk/N)}.
/// Evaluated with FFT kernels; contractually equal to the double sum.
inline TfGrid isfft(const DdGrid& dd, const FrameConfig& cfg) {
    dd.check_dims(cfg);
    // forward DFT along l, inverse DFT along k
    cx_mat f_l = arma::fft(dd.values.st());              // (M x N), rows m, cols k
    cx_mat x = arma::ifft(f_l.st());                     // (N x M), rows n, cols m
    x /= static_cast<double>(cfg.M);
    return TfGrid(std::move(x));
}

/// x[k,l] = sum_{n,m} tf[n,m] e^{+j2pi(ml/M - nk/N)} (unnormalized, so that
/// sfft(isfft(x)) = x exactly).
inline DdGrid sfft(const TfGrid& tf, const FrameConfig& cfg) {
    tf.check_dims(cfg);
    cx_mat f_m = arma::ifft(tf.values.st());             // (M x N), rows l, cols n
    f_m *= static_cast<double>(cfg.M);
    cx_mat x = arma::fft(f_m.st());                      // (N x M), rows k, cols l
    return DdGrid(std::move(x));
}

// ----- block-interleaved TF synthesis --------------------------------------

/// TF symbol of UT q of the DD-interleaved scheme at (possibly out-of-range)
/// integer TF index (n, m), from its information symbols x(u, v) of size
/// (N/g2) x (M/g1). The expression is quasi-periodic: translations by N/g2
/// and M/g1 only rotate the phase.
inline cx iddma_tf_symbol(const Iddma& s, uword q, const cx_mat& x, std::int64_t n, std::int64_t m,
                          const FrameConfig& cfg) {
    const uword pn = cfg.N / s.g2, pm = cfg.M / s.g1;
    require(x.n_rows == pn && x.n_cols == pm, "iddma_tf_symbol: symbol block must be (N/g2) x (M/g1)");
    const auto iM = static_cast<std::int64_t>(cfg.M), iN = static_cast<std::int64_t>(cfg.N);
    const cx lambda = cis_frac(-(m * static_cast<std::int64_t>(q % s.g1)) * iN +
                                   (n * static_cast<std::int64_t>(q / s.g1)) * iM,
                               iM * iN) /
                      static_cast<double>(cfg.mn());
    cx acc{0.0, 0.0};
    for (uword u = 0; u < pn; ++u)
        for (uword v = 0; v < pm; ++v)
            acc += x(u, v) * cis_frac(-(m * static_cast<std::int64_t>(v)) * static_cast<std::int64_t>(pn) +
                                          (n * static_cast<std::int64_t>(u)) * static_cast<std::int64_t>(pm),
                                      static_cast<std::int64_t>(pn * pm));
    return lambda * acc;
}

}  // namespace otfsoma
