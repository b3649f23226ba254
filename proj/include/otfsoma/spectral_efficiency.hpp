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
//
// Interference covariance, log-det spectral efficiency, SNR conventions,
// guard-band optimization and the Monte Carlo experiment driver.

#pragma once

#include <atomic>
#include <thread>
#include <vector>

#include "otfsoma/effective_channel.hpp"

namespace otfsoma {

// ----- noise and SNR conventions ------------------------------------------------

/// Symbol energy, noise spectral density, and the derived ratio
/// rho = E_T / (M N N0).
struct NoiseSignalConfig {
    double E_T = 1.0;
    double N0 = 1.0;
    double rho = 1.0;

    static NoiseSignalConfig make(double E_T, double N0, const FrameConfig& cfg) {
        require(E_T > 0.0 && N0 > 0.0, "NoiseSignalConfig: E_T and N0 must be positive");
        NoiseSignalConfig c;
        c.E_T = E_T;
        c.N0 = N0;
        c.rho = E_T / (static_cast<double>(cfg.mn()) * N0);
        return c;
    }
};

/// Variance of the receiver's DD-domain noise samples. The DD-interleaved
/// receiver is the scaled exact inverse of its transmit map, which puts its
/// noise at g1 g2 M N N0 (the unnormalized-receiver figure divided by
/// (g1 g2)^2 belongs to the other normalization; spectral efficiencies are
/// identical under either).
inline double dd_noise_variance(const MaScheme& scheme, const FrameConfig& cfg, double N0) {
    const double mn = static_cast<double>(cfg.mn());
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Iddma>) return static_cast<double>(s.g1 * s.g2) * mn * N0;
            else if constexpr (std::is_same_v<S, Itfma>) return mn * N0 / static_cast<double>(s.g3 * s.g4);
            else return mn * N0;
        },
        scheme);
}

enum class SnrConvention { kReceived, kTransmit };

/// Inverts each scheme's average received SNR expression (rho/Q^2, rho,
/// rho(1/Q - G/N), rho(1/Q - G/M)) to the per-symbol energy E_T. Under the
/// transmit convention every scheme uses E_T = snr * M N N0.
inline double snr_to_energy(const MaScheme& scheme, double snr_linear, const FrameConfig& cfg, double N0,
                            SnrConvention conv = SnrConvention::kReceived) {
    require(snr_linear > 0.0, "snr_to_energy: snr must be positive");
    const double base = snr_linear * static_cast<double>(cfg.mn()) * N0;
    if (conv == SnrConvention::kTransmit) return base;
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Iddma>) {
                const double Q = static_cast<double>(s.g1 * s.g2);
                return base * Q * Q;
            } else if constexpr (std::is_same_v<S, Itfma>) {
                return base;
            } else if constexpr (std::is_same_v<S, GbDoppler>) {
                const double f = 1.0 / static_cast<double>(s.Q) -
                                 static_cast<double>(s.G) / static_cast<double>(cfg.N);
                require(f > 0.0, "snr_to_energy: guard band leaves no usable resource");
                return base / f;
            } else {
                const double f = 1.0 / static_cast<double>(s.Q) -
                                 static_cast<double>(s.G) / static_cast<double>(cfg.M);
                require(f > 0.0, "snr_to_energy: guard band leaves no usable resource");
                return base / f;
            }
        },
        scheme);
}

// ----- covariance and log-det SE ---------------------------------------------------

/// K = sigma2 I + E_T sum_j H_j H_j^H over the interference matrices.
inline cx_mat interference_covariance(const EffectiveChannel& eff, double E_T, double sigma2) {
    const uword n = eff.dim();
    cx_mat K(n, n, arma::fill::zeros);
    K.diag() += sigma2;
    for (const auto& it : eff.interferers) K += E_T * (it.matrix * it.matrix.t());
    return 0.5 * (K + K.t());  // exact Hermitian symmetry for the solvers
}

/// (1/MN) log2 |I + E_T H^H K^{-1} H| via Cholesky whitening of K followed
/// by a Hermitian eigen decomposition; the log runs over eigenvalues so no
/// raw determinant can overflow.
inline double spectral_efficiency(const cx_mat& useful, const cx_mat& K, double E_T,
                                  const FrameConfig& cfg) {
    cx_mat L;
    if (!arma::chol(L, K, "lower"))
        throw std::runtime_error("spectral_efficiency: covariance is not positive definite (dim " +
                                 std::to_string(K.n_rows) + ")");
    const cx_mat B = arma::solve(arma::trimatl(L), useful);
    arma::vec ev;
    cx_mat gram = B.t() * B;
    gram = 0.5 * (gram + gram.t());
    if (!arma::eig_sym(ev, gram))
        throw std::runtime_error("spectral_efficiency: eigen decomposition failed");
    double acc = 0.0;
    for (double l : ev) acc += std::log2(1.0 + E_T * std::max(l, 0.0));
    return acc / static_cast<double>(cfg.mn());
}

/// Per-UT and summed SE of one realization.
struct SeResult {
    std::vector<double> per_ut_se;
    double sum_se = 0.0;
};

// ----- per-receiver spectra -----------------------------------------------------------
// |I + E_T H^H K^{-1} H| = |sigma2 I + E_T (S + H H^H)| / |sigma2 I + E_T S|
// with S the interference Gram sum, so two Hermitian eigenvalue sets per
// receiver cover every E_T on the SNR grid.

struct UtSpectrum {
    arma::vec with_useful;     ///< eigenvalues of S + H H^H
    arma::vec without_useful;  ///< eigenvalues of S
    double sigma2 = 0.0;
    bool has_interference = false;
};

inline UtSpectrum make_ut_spectrum(const EffectiveChannel& eff, double sigma2) {
    const uword n = eff.dim();
    UtSpectrum sp;
    sp.sigma2 = sigma2;
    sp.has_interference = !eff.interferers.empty();
    cx_mat S(n, n, arma::fill::zeros);
    for (const auto& it : eff.interferers) S += it.matrix * it.matrix.t();
    cx_mat A = S + eff.useful * eff.useful.t();
    A = 0.5 * (A + A.t());
    if (!arma::eig_sym(sp.with_useful, A))
        throw std::runtime_error("make_ut_spectrum: eigen decomposition failed");
    if (sp.has_interference) {
        S = 0.5 * (S + S.t());
        if (!arma::eig_sym(sp.without_useful, S))
            throw std::runtime_error("make_ut_spectrum: eigen decomposition failed");
    } else {
        sp.without_useful.zeros(n);
    }
    return sp;
}

inline double se_from_spectrum(const UtSpectrum& sp, double E_T, const FrameConfig& cfg) {
    double acc = 0.0;
    for (uword i = 0; i < sp.with_useful.n_elem; ++i) {
        acc += std::log2(sp.sigma2 + E_T * std::max(sp.with_useful(i), 0.0));
        acc -= std::log2(sp.sigma2 + E_T * std::max(sp.without_useful(i), 0.0));
    }
    return acc / static_cast<double>(cfg.mn());
}

// ----- experiment driver ------------------------------------------------------------

struct ExperimentOptions {
    double N0 = 1.0;
    SnrConvention convention = SnrConvention::kReceived;
    uword threads = 0;  ///< 0 = hardware concurrency
    PowerDelayProfile profile = etu_profile();
};

/// Averaged curve over Monte Carlo trials.
struct SeCurve {
    std::vector<double> snr_grid_db;
    std::vector<double> mean_sum_se;
    std::vector<double> stderr_sum_se;
    std::vector<double> mean_per_ut_se;
    std::vector<uword> used_G;  ///< guard size per grid point (0 for non-GB schemes)
    MaScheme scheme;
    PulseShape pulse = PulseShape::kRectangular;
    double nu_max = 0.0;
    uword trials = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline uword resolve_threads(uword requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

template <typename Fn>
void parallel_for(uword count, uword threads, Fn&& fn) {
    threads = std::min<uword>(std::max<uword>(threads, 1), count == 0 ? 1 : count);
    if (threads <= 1) {
        for (uword i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<uword> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (uword t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                const uword i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

inline std::vector<UtChannel> draw_channels(uword Q, double nu_max, const FrameConfig& cfg,
                                            const ExperimentOptions& opt, std::uint64_t seed, uword trial) {
    std::vector<UtChannel> channels;
    channels.reserve(Q);
    for (uword ut = 0; ut < Q; ++ut) {
        RngStream rng(seed, trial, ut);
        channels.push_back(sample_channel(opt.profile, nu_max, cfg, rng));
    }
    return channels;
}

/// One trial's channel realizations plus per-transmitter kernel tables,
/// shared across receivers, guard sizes, and pulse variants.
struct TrialContext {
    FrameConfig cfg;
    std::vector<UtChannel> channels;
    std::vector<std::vector<GbPathTables>> gb;
    std::vector<IdealGbKernel> gb_ideal;
    std::vector<std::vector<ItfmaPathTables>> itfma;

    TrialContext(FrameConfig c, std::vector<UtChannel> ch) : cfg(c), channels(std::move(ch)) {}

    const std::vector<GbPathTables>& gb_tables(uword q) {
        if (gb.empty()) {
            gb.reserve(channels.size());
            for (const auto& ch : channels) gb.push_back(make_gb_tables(ch, cfg));
        }
        return gb[q];
    }
    const IdealGbKernel& ideal_kernel(uword q) {
        if (gb_ideal.empty()) {
            gb_ideal.reserve(channels.size());
            for (const auto& ch : channels) gb_ideal.push_back(make_ideal_gb_kernel(ch, cfg));
        }
        return gb_ideal[q];
    }
    const std::vector<ItfmaPathTables>& itfma_tables(uword q, const Itfma& s) {
        if (itfma.empty()) {
            itfma.reserve(channels.size());
            for (const auto& ch : channels) itfma.push_back(make_itfma_tables(ch, s, cfg));
        }
        return itfma[q];
    }
};

/// Same result as build_effective_channel, served from the context caches.
inline EffectiveChannel build_cached(TrialContext& ctx, const MaScheme& scheme, uword q_prime,
                                     PulseShape pulse) {
    const uword Q = ut_count(scheme);
    EffectiveChannel eff;
    eff.scheme = scheme;
    eff.q_prime = q_prime;
    eff.pulse = pulse;
    const bool gb = std::holds_alternative<GbDoppler>(scheme) || std::holds_alternative<GbDelay>(scheme);

    if (pulse == PulseShape::kIdeal && gb) {
        eff.useful = ideal_gb_matrix_from(ctx.ideal_kernel(q_prime), q_prime, q_prime, scheme, ctx.cfg);
        for (uword q = 0; q < Q; ++q) {
            if (q == q_prime) continue;
            eff.interferers.push_back(
                {q, InterfererTag::kCross, ideal_gb_matrix_from(ctx.ideal_kernel(q), q, q_prime, scheme, ctx.cfg)});
        }
        return eff;
    }
    if (gb && pulse == PulseShape::kRectangular) {
        eff.useful = gb_dd_matrix_from(ctx.gb_tables(q_prime), q_prime, q_prime, scheme, ctx.cfg);
        for (uword q = 0; q < Q; ++q) {
            if (q == q_prime) continue;
            eff.interferers.push_back(
                {q, InterfererTag::kCross, gb_dd_matrix_from(ctx.gb_tables(q), q, q_prime, scheme, ctx.cfg)});
        }
        return eff;
    }
    if (const auto* s = std::get_if<Itfma>(&scheme); s != nullptr && pulse == PulseShape::kRectangular) {
        for (uword q = 0; q < Q; ++q) {
            cx_mat H = itfma_dd_matrix_from(ctx.itfma_tables(q, *s), q, q_prime, *s, ctx.cfg);
            if (q == q_prime) eff.useful = std::move(H);
            else eff.interferers.push_back({q, InterfererTag::kCross, std::move(H)});
        }
        return eff;
    }
    return build_effective_channel(scheme, q_prime, ctx.channels, ctx.cfg, pulse);
}

/// Sum SE over receivers for one realization, evaluated on the whole grid.
inline std::vector<double> trial_sum_se(const MaScheme& scheme, PulseShape pulse, TrialContext& ctx,
                                        const std::vector<double>& snr_grid_db,
                                        const ExperimentOptions& opt) {
    const uword Q = ut_count(scheme);
    const double sigma2 = dd_noise_variance(scheme, ctx.cfg, opt.N0);
    std::vector<UtSpectrum> spectra;
    spectra.reserve(Q);
    for (uword qp = 0; qp < Q; ++qp)
        spectra.push_back(make_ut_spectrum(build_cached(ctx, scheme, qp, pulse), sigma2));
    std::vector<double> out(snr_grid_db.size(), 0.0);
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
        const double snr = std::pow(10.0, snr_grid_db[i] / 10.0);
        const double E_T = snr_to_energy(scheme, snr, ctx.cfg, opt.N0, opt.convention);
        double sum = 0.0;
        for (const auto& sp : spectra) sum += se_from_spectrum(sp, E_T, ctx.cfg);
        out[i] = sum;
    }
    return out;
}

inline MaScheme with_guard(const MaScheme& family, uword G) {
    if (const auto* s = std::get_if<GbDoppler>(&family)) return GbDoppler{s->Q, G};
    if (const auto* s = std::get_if<GbDelay>(&family)) return GbDelay{s->Q, G};
    return family;
}

inline uword guard_candidates(const MaScheme& family, const FrameConfig& cfg) {
    if (const auto* s = std::get_if<GbDoppler>(&family)) return cfg.N / s->Q;
    if (const auto* s = std::get_if<GbDelay>(&family)) return cfg.M / s->Q;
    return 1;
}

}  // namespace detail

/// Monte Carlo sum-SE curve for a fixed scheme (fixed guard size for the
/// guard-band schemes). Channels are redrawn per trial and per UT from the
/// (seed, trial, ut)-keyed streams; effective channels are built once per
/// trial and reused across the SNR grid. Aggregation is an ordered
/// reduction over trial indices, so results do not depend on the worker
/// count.
inline SeCurve run_experiment(const MaScheme& scheme, PulseShape pulse,
                              const std::vector<double>& snr_grid_db, double nu_max,
                              const FrameConfig& cfg, uword trials, std::uint64_t seed,
                              const ExperimentOptions& opt = {}) {
    validate_scheme(scheme, cfg);
    require(trials >= 1, "run_experiment: need at least one trial");
    require(!snr_grid_db.empty(), "run_experiment: SNR grid must be nonempty");
    const uword Q = ut_count(scheme);
    std::vector<std::vector<double>> per_trial(trials);
    detail::parallel_for(trials, detail::resolve_threads(opt.threads), [&](uword t) {
        detail::TrialContext ctx(cfg, detail::draw_channels(Q, nu_max, cfg, opt, seed, t));
        per_trial[t] = detail::trial_sum_se(scheme, pulse, ctx, snr_grid_db, opt);
    });

    SeCurve curve;
    curve.snr_grid_db = snr_grid_db;
    curve.scheme = scheme;
    curve.pulse = pulse;
    curve.nu_max = nu_max;
    curve.trials = trials;
    curve.seed = seed;
    const uword G = std::visit(
        [](const auto& s) -> uword {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, GbDoppler> || std::is_same_v<S, GbDelay>) return s.G;
            else return 0;
        },
        scheme);
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
        double mean = 0.0;
        for (uword t = 0; t < trials; ++t) mean += per_trial[t][i];
        mean /= static_cast<double>(trials);
        double var = 0.0;
        for (uword t = 0; t < trials; ++t) var += (per_trial[t][i] - mean) * (per_trial[t][i] - mean);
        const double stderr_v = trials > 1 ? std::sqrt(var / (trials - 1.0) / trials) : 0.0;
        curve.mean_sum_se.push_back(mean);
        curve.stderr_sum_se.push_back(stderr_v);
        curve.mean_per_ut_se.push_back(mean / static_cast<double>(Q));
        curve.used_G.push_back(G);
    }
    return curve;
}

/// Guard-band curve with the guard size chosen per SNR point by exhaustive
/// search over G (common random numbers across candidates: every G sees the
/// same channel realizations). Ties break toward the smaller G.
inline SeCurve run_experiment_gb_optimized(const MaScheme& family, PulseShape pulse,
                                           const std::vector<double>& snr_grid_db, double nu_max,
                                           const FrameConfig& cfg, uword trials, std::uint64_t seed,
                                           const ExperimentOptions& opt = {}) {
    require(std::holds_alternative<GbDoppler>(family) || std::holds_alternative<GbDelay>(family),
            "run_experiment_gb_optimized: scheme must be a guard-band scheme");
    require(trials >= 1, "run_experiment_gb_optimized: need at least one trial");
    require(!snr_grid_db.empty(), "run_experiment_gb_optimized: SNR grid must be nonempty");
    const uword n_g = detail::guard_candidates(family, cfg);
    const uword Q = ut_count(family);
    const std::size_t n_snr = snr_grid_db.size();

    // per_trial[t] is (n_snr x n_g)
    std::vector<arma::mat> per_trial(trials);
    detail::parallel_for(trials, detail::resolve_threads(opt.threads), [&](uword t) {
        detail::TrialContext ctx(cfg, detail::draw_channels(Q, nu_max, cfg, opt, seed, t));
        arma::mat sums(n_snr, n_g);
        for (uword g = 0; g < n_g; ++g) {
            const MaScheme scheme = detail::with_guard(family, g);
            const auto se = detail::trial_sum_se(scheme, pulse, ctx, snr_grid_db, opt);
            for (std::size_t i = 0; i < n_snr; ++i) sums(i, g) = se[i];
        }
        per_trial[t] = std::move(sums);
    });

    arma::mat mean(n_snr, n_g, arma::fill::zeros);
    for (uword t = 0; t < trials; ++t) mean += per_trial[t];
    mean /= static_cast<double>(trials);

    SeCurve curve;
    curve.snr_grid_db = snr_grid_db;
    curve.scheme = family;
    curve.pulse = pulse;
    curve.nu_max = nu_max;
    curve.trials = trials;
    curve.seed = seed;
    for (std::size_t i = 0; i < n_snr; ++i) {
        uword best = 0;
        for (uword g = 1; g < n_g; ++g)
            if (mean(i, g) > mean(i, best)) best = g;
        double var = 0.0;
        for (uword t = 0; t < trials; ++t)
            var += (per_trial[t](i, best) - mean(i, best)) * (per_trial[t](i, best) - mean(i, best));
        curve.mean_sum_se.push_back(mean(i, best));
        curve.stderr_sum_se.push_back(trials > 1 ? std::sqrt(var / (trials - 1.0) / trials) : 0.0);
        curve.mean_per_ut_se.push_back(mean(i, best) / static_cast<double>(Q));
        curve.used_G.push_back(best);
    }
    return curve;
}

struct GuardBandChoice {
    uword g_star = 0;
    double mean_sum_se = 0.0;
    double stderr_sum_se = 0.0;
    std::vector<double> per_g_mean;  ///< mean sum SE of every candidate G
};

/// Exhaustive guard search at a single SNR point.
inline GuardBandChoice optimize_guard_band(const MaScheme& family, double snr_db, double nu_max,
                                           const FrameConfig& cfg, uword trials, std::uint64_t seed,
                                           PulseShape pulse = PulseShape::kRectangular,
                                           const ExperimentOptions& opt = {}) {
    const uword n_g = detail::guard_candidates(family, cfg);
    GuardBandChoice choice;
    choice.per_g_mean.resize(n_g);
    SeCurve best;
    for (uword g = 0; g < n_g; ++g) {
        const auto curve =
            run_experiment(detail::with_guard(family, g), pulse, {snr_db}, nu_max, cfg, trials, seed, opt);
        choice.per_g_mean[g] = curve.mean_sum_se[0];
        if (g == 0 || curve.mean_sum_se[0] > choice.mean_sum_se) {
            choice.g_star = g;
            choice.mean_sum_se = curve.mean_sum_se[0];
            choice.stderr_sum_se = curve.stderr_sum_se[0];
        }
    }
    return choice;
}

/// Per-UT SE values of one realization under the pinned covariance and
/// log-det path (reference evaluation, used by tests and small studies).
inline SeResult spectral_efficiency_once(const MaScheme& scheme, const std::vector<UtChannel>& channels,
                                         double snr_db, const FrameConfig& cfg,
                                         PulseShape pulse = PulseShape::kRectangular,
                                         const ExperimentOptions& opt = {}) {
    const double snr = std::pow(10.0, snr_db / 10.0);
    const double E_T = snr_to_energy(scheme, snr, cfg, opt.N0, opt.convention);
    const double sigma2 = dd_noise_variance(scheme, cfg, opt.N0);
    SeResult res;
    for (uword qp = 0; qp < ut_count(scheme); ++qp) {
        const auto eff = build_effective_channel(scheme, qp, channels, cfg, pulse);
        const cx_mat K = interference_covariance(eff, E_T, sigma2);
        res.per_ut_se.push_back(spectral_efficiency(eff.useful, K, E_T, cfg));
        res.sum_se += res.per_ut_se.back();
    }
    return res;
}

}  // namespace otfsoma
