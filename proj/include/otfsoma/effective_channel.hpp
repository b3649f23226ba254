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
// Closed-form effective DD channel matrices for the four access schemes.
// Everything is built from two primitives: phase_ratio (pulse-overlap
// integrals) and dirichlet_ratio (finite slot/carrier sums). Structural
// zeros come only from the schemes' congruence rules, never from
// thresholding.

#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "otfsoma/channel.hpp"
#include "otfsoma/grid.hpp"
#include "otfsoma/kernels.hpp"
#include "otfsoma/waveform_oracle.hpp"

namespace otfsoma {

// ----- TF coupling tensors ---------------------------------------------------

/// Per-pair TF coupling tensor, indexed values(m, n~, m~).
struct TfCoupling {
    enum class Kind { kH1, kH2, kH3, kHdd1, kHdd2 };
    Kind kind = Kind::kH1;
    cx_cube values;
};

struct IddmaTfCoupling {
    TfCoupling h1, h2, h3;
};

/// TF couplings of the block-contiguous receiver for the pair (q, q').
/// h1/h2 carry the same-block congruence (q = q' mod g2), h3 the
/// previous-block congruence with its first-window selector; outside the
/// congruence the tensors are structurally zero.
inline IddmaTfCoupling iddma_tf_coupling(uword q, uword q_prime, const UtChannel& ch, const Iddma& s,
                                         const FrameConfig& cfg) {
    validate_scheme(MaScheme{s}, cfg);
    check_channel(ch, cfg);
    const uword pn = cfg.N / s.g2, pm = cfg.M / s.g1;
    IddmaTfCoupling out;
    out.h1 = {TfCoupling::Kind::kH1, cx_cube(pm, pn, pm, arma::fill::zeros)};
    out.h2 = {TfCoupling::Kind::kH2, cx_cube(pm, pn, pm, arma::fill::zeros)};
    out.h3 = {TfCoupling::Kind::kH3, cx_cube(pm, pn, pm, arma::fill::zeros)};
    const bool same_block = (q % s.g2) == (q_prime % s.g2);
    const bool prev_block =
        imod(static_cast<std::int64_t>(q), s.g2) ==
        imod(static_cast<std::int64_t>(q_prime) - 1, static_cast<std::int64_t>(s.g2));
    const auto blk = static_cast<std::int64_t>(q / s.g2) - static_cast<std::int64_t>(q_prime / s.g2);
    for (const auto& p : ch.paths) {
        const double tau_T = p.delay * cfg.delta_f;
        const double nu_df = p.doppler / cfg.delta_f;
        for (uword mt = 0; mt < pm; ++mt) {
            const cx rx_phase =
                p.gain * cis(-(static_cast<double>(mt) + static_cast<double>(pm) * (q_prime / s.g2)) * tau_T);
            for (uword m = 0; m < pm; ++m) {
                const double xi = static_cast<double>(static_cast<std::int64_t>(m) -
                                                      static_cast<std::int64_t>(mt) +
                                                      static_cast<std::int64_t>(pm) * blk) +
                                  nu_df;
                const cx pr1 = phase_ratio(xi, 1.0 - tau_T);
                const cx pr2 = cis(xi) * phase_ratio(-xi, tau_T);
                for (uword nt = 0; nt < pn; ++nt) {
                    const double slot = static_cast<double>(pn) * (q % s.g2);
                    if (same_block) {
                        out.h1.values(m, nt, mt) +=
                            rx_phase * cis(nu_df * (static_cast<double>(nt) + slot)) * pr1;
                        out.h2.values(m, nt, mt) +=
                            rx_phase * cis(nu_df * (static_cast<double>(nt) - 1.0 + slot)) * pr2;
                    }
                    if (prev_block && nt == 0) {
                        out.h3.values(m, nt, mt) +=
                            rx_phase * cis(nu_df * (static_cast<double>(pn) * (q % s.g2 + 1) - 1.0)) * pr2;
                    }
                }
            }
        }
    }
    return out;
}

struct SharedTfCoupling {
    TfCoupling hdd1, hdd2;
};

/// TF couplings of the full-grid receiver (used by the TF-interleaved and
/// guard-band schemes), indexed values(m, n~, m~) over the whole grid.
inline SharedTfCoupling shared_tf_coupling(const UtChannel& ch, const FrameConfig& cfg) {
    check_channel(ch, cfg);
    SharedTfCoupling out;
    out.hdd1 = {TfCoupling::Kind::kHdd1, cx_cube(cfg.M, cfg.N, cfg.M, arma::fill::zeros)};
    out.hdd2 = {TfCoupling::Kind::kHdd2, cx_cube(cfg.M, cfg.N, cfg.M, arma::fill::zeros)};
    for (const auto& p : ch.paths) {
        const double tau_T = p.delay * cfg.delta_f;
        const double nu_df = p.doppler / cfg.delta_f;
        for (uword mt = 0; mt < cfg.M; ++mt) {
            const cx rx_phase = p.gain * cis(-static_cast<double>(mt) * tau_T);
            for (uword m = 0; m < cfg.M; ++m) {
                const double xi1 =
                    static_cast<double>(static_cast<std::int64_t>(m) - static_cast<std::int64_t>(mt)) + nu_df;
                const cx pr1 = phase_ratio(xi1, 1.0 - tau_T);
                const cx pr2 = cis(xi1) * phase_ratio(-xi1, tau_T);
                for (uword nt = 0; nt < cfg.N; ++nt) {
                    out.hdd1.values(m, nt, mt) += rx_phase * cis(nu_df * static_cast<double>(nt)) * pr1;
                    out.hdd2.values(m, nt, mt) +=
                        rx_phase * cis(nu_df * (static_cast<double>(nt) - 1.0)) * pr2;
                }
            }
        }
    }
    return out;
}

// ----- DD-interleaved scheme ----------------------------------------------------

struct IddmaDdPair {
    cx_mat h1, h2;
};

/// Effective DD matrices of the pair (q, q') for the DD-interleaved scheme.
/// h1 requires q = q' (mod g2); h2 requires q = q'-1 (mod g2); outside the
/// congruence the corresponding matrix is structurally zero. The receive
/// map is the exact inverse of the transmit map (allocation-phase SFFT
/// scaled by g1 g2), so a flat channel yields the identity.
inline IddmaDdPair iddma_dd_matrices(uword q, uword q_prime, const UtChannel& ch, const Iddma& s,
                                     const FrameConfig& cfg) {
    validate_scheme(MaScheme{s}, cfg);
    check_channel(ch, cfg);
    const uword pn = cfg.N / s.g2, pm = cfg.M / s.g1;
    const uword dim = pn * pm;
    IddmaDdPair out{cx_mat(dim, dim, arma::fill::zeros), cx_mat(dim, dim, arma::fill::zeros)};
    const bool same_block = (q % s.g2) == (q_prime % s.g2);
    const bool prev_block =
        imod(static_cast<std::int64_t>(q), s.g2) ==
        imod(static_cast<std::int64_t>(q_prime) - 1, static_cast<std::int64_t>(s.g2));
    if (!same_block && !prev_block) return out;

    const auto iM = static_cast<std::int64_t>(cfg.M);
    const auto ig1 = static_cast<std::int64_t>(s.g1), ig2 = static_cast<std::int64_t>(s.g2);
    const auto ipm = static_cast<std::int64_t>(pm), ipn = static_cast<std::int64_t>(pn);
    const std::int64_t blk = static_cast<std::int64_t>(q / s.g2) - static_cast<std::int64_t>(q_prime / s.g2);
    const double pref = static_cast<double>(s.g1 * s.g2) / static_cast<double>(cfg.mn());

    const std::int64_t q_g1 = static_cast<std::int64_t>(q % s.g1);
    const std::int64_t qp_g1 = static_cast<std::int64_t>(q_prime % s.g1);
    const std::int64_t q_div = static_cast<std::int64_t>(q / s.g1);
    const std::int64_t qp_div = static_cast<std::int64_t>(q_prime / s.g1);

    for (const auto& p : ch.paths) {
        const double tau_T = p.delay * cfg.delta_f;
        const double nu_df = p.doppler / cfg.delta_f;
        const cx coeff = pref * p.gain * cis(nu_df * static_cast<double>(ipn * (q % s.g2))) *
                         cis(-static_cast<double>(ipm * (q_prime / s.g2)) * tau_T);

        // pulse-overlap ratios as a function of the carrier offset d = m - m~
        std::vector<cx> pr1(2 * pm - 1), pr2(2 * pm - 1);
        for (std::int64_t d = -(ipm - 1); d <= ipm - 1; ++d) {
            const double xi = static_cast<double>(d + ipm * blk) + nu_df;
            pr1[static_cast<std::size_t>(d + ipm - 1)] = phase_ratio(xi, 1.0 - tau_T);
            pr2[static_cast<std::size_t>(d + ipm - 1)] = cis(xi) * phase_ratio(-xi, tau_T);
        }

        // carrier double sums S1/S2 over (v~, v), reduced along d
        cx_mat S1(pm, pm, arma::fill::zeros), S2(pm, pm, arma::fill::zeros);
        std::vector<std::vector<cx>> geo(2 * pm - 1, std::vector<cx>(2 * pm - 1));
        for (std::int64_t dv = -(ipm - 1); dv <= ipm - 1; ++dv) {
            const double x =
                static_cast<double>(qp_g1 - q_g1 + ig1 * dv) / static_cast<double>(cfg.M) - tau_T;
            for (std::int64_t d = -(ipm - 1); d <= ipm - 1; ++d) {
                const std::int64_t a = std::max<std::int64_t>(0, -d);
                const std::int64_t len = ipm - std::abs(d);
                geo[static_cast<std::size_t>(dv + ipm - 1)][static_cast<std::size_t>(d + ipm - 1)] =
                    geometric_sum(x, a, len);
            }
        }
        for (uword vt = 0; vt < pm; ++vt)
            for (uword v = 0; v < pm; ++v) {
                const std::int64_t dv = static_cast<std::int64_t>(vt) - static_cast<std::int64_t>(v);
                cx s1{0.0, 0.0}, s2{0.0, 0.0};
                for (std::int64_t d = -(ipm - 1); d <= ipm - 1; ++d) {
                    const cx ph = cis_frac(-d * (q_g1 + ig1 * static_cast<std::int64_t>(v)), iM);
                    const cx g = geo[static_cast<std::size_t>(dv + ipm - 1)]
                                    [static_cast<std::size_t>(d + ipm - 1)];
                    s1 += pr1[static_cast<std::size_t>(d + ipm - 1)] * ph * g;
                    s2 += pr2[static_cast<std::size_t>(d + ipm - 1)] * ph * g;
                }
                S1(vt, v) = s1;
                S2(vt, v) = s2;
            }

        // Doppler slot sums and per-u phases
        std::vector<cx> dsum(2 * pn - 1);
        for (std::int64_t du = -(ipn - 1); du <= ipn - 1; ++du) {
            const double psi =
                static_cast<double>(q_div - qp_div + ig2 * du) / static_cast<double>(cfg.N) + nu_df;
            dsum[static_cast<std::size_t>(du + ipn - 1)] = dirichlet_ratio(psi, ipn);
        }
        std::vector<cx> e_neg(pn), e_last(pn);
        for (uword u = 0; u < pn; ++u) {
            const double A =
                static_cast<double>(q_div + ig2 * static_cast<std::int64_t>(u)) / static_cast<double>(cfg.N) +
                nu_df;
            e_neg[u] = cis(-A);
            e_last[u] = cis(static_cast<double>(ipn - 1) * A);
        }

        for (uword ut = 0; ut < pn; ++ut)
            for (uword u = 0; u < pn; ++u) {
                const std::int64_t du = static_cast<std::int64_t>(u) - static_cast<std::int64_t>(ut);
                const cx D = dsum[static_cast<std::size_t>(du + ipn - 1)];
                for (uword vt = 0; vt < pm; ++vt)
                    for (uword v = 0; v < pm; ++v) {
                        const uword row = ut + vt * pn, col = u + v * pn;
                        if (same_block)
                            out.h1(row, col) +=
                                coeff * (S1(vt, v) * D + S2(vt, v) * (D - 1.0) * e_neg[u]);
                        if (prev_block) out.h2(row, col) += coeff * e_last[u] * S2(vt, v);
                    }
            }
    }
    if (!same_block) out.h1.zeros();
    if (!prev_block) out.h2.zeros();
    return out;
}

// ----- TF-interleaved scheme ------------------------------------------------------

/// Per-path lookup tables shared by every (q, q') pair of one transmitter.
struct ItfmaPathTables {
    std::vector<cx> pr1, pr2;  ///< indexed by delta + (M-1), delta = carrier offset
    std::vector<cx> d4;        ///< indexed by dk + (N/g4 - 1), dk = k' - k~
    cx_mat geo;                ///< carrier window sums, (dl + pm-1, d + pm-1)
    double tau_T = 0.0;
    double nu_df = 0.0;
    cx gain{0.0, 0.0};
};

inline std::vector<ItfmaPathTables> make_itfma_tables(const UtChannel& ch, const Itfma& s,
                                                      const FrameConfig& cfg) {
    check_channel(ch, cfg);
    const auto iM = static_cast<std::int64_t>(cfg.M);
    const auto ipn = static_cast<std::int64_t>(cfg.N / s.g4);
    const auto ipm = static_cast<std::int64_t>(cfg.M / s.g3);
    std::vector<ItfmaPathTables> tabs;
    tabs.reserve(ch.paths.size());
    for (const auto& p : ch.paths) {
        ItfmaPathTables t;
        t.tau_T = p.delay * cfg.delta_f;
        t.nu_df = p.doppler / cfg.delta_f;
        t.gain = p.gain;
        t.pr1.resize(2 * cfg.M - 1);
        t.pr2.resize(2 * cfg.M - 1);
        for (std::int64_t d = -(iM - 1); d <= iM - 1; ++d) {
            const double kappa = static_cast<double>(d) + t.nu_df;
            t.pr1[static_cast<std::size_t>(d + iM - 1)] = phase_ratio(kappa, 1.0 - t.tau_T);
            t.pr2[static_cast<std::size_t>(d + iM - 1)] = cis(kappa) * phase_ratio(-kappa, t.tau_T);
        }
        t.d4.resize(2 * (cfg.N / s.g4) - 1);
        for (std::int64_t dk = -(ipn - 1); dk <= ipn - 1; ++dk) {
            t.d4[static_cast<std::size_t>(dk + ipn - 1)] = dirichlet_ratio(
                static_cast<double>(s.g4) * (t.nu_df + static_cast<double>(dk) / static_cast<double>(cfg.N)),
                ipn);
        }
        t.geo.set_size(2 * cfg.M / s.g3 - 1, 2 * cfg.M / s.g3 - 1);
        for (std::int64_t dl = -(ipm - 1); dl <= ipm - 1; ++dl) {
            const double w = static_cast<double>(static_cast<std::int64_t>(s.g3) * dl) /
                                 static_cast<double>(cfg.M) -
                             static_cast<double>(s.g3) * t.tau_T;
            for (std::int64_t d = -(ipm - 1); d <= ipm - 1; ++d) {
                const std::int64_t a = std::max<std::int64_t>(0, -d);
                const std::int64_t len = ipm - std::abs(d);
                t.geo(static_cast<uword>(dl + ipm - 1), static_cast<uword>(d + ipm - 1)) =
                    geometric_sum(w, a, len);
            }
        }
        tabs.push_back(std::move(t));
    }
    return tabs;
}

/// Effective DD matrix of the pair (q, q') for the TF-interleaved scheme;
/// defined for every pair (all-pairs multi-user interference).
inline cx_mat itfma_dd_matrix_from(const std::vector<ItfmaPathTables>& tabs, uword q, uword q_prime,
                                   const Itfma& s, const FrameConfig& cfg) {
    const uword pn = cfg.N / s.g4, pm = cfg.M / s.g3;
    const uword dim = pn * pm;
    cx_mat H(dim, dim, arma::fill::zeros);
    const auto iM = static_cast<std::int64_t>(cfg.M), iN = static_cast<std::int64_t>(cfg.N);
    const auto ig3 = static_cast<std::int64_t>(s.g3), ipm = static_cast<std::int64_t>(pm);
    const std::int64_t q_g3 = static_cast<std::int64_t>(q % s.g3);
    const std::int64_t qp_g3 = static_cast<std::int64_t>(q_prime % s.g3);
    const std::int64_t slot_off = static_cast<std::int64_t>(q / s.g3) - static_cast<std::int64_t>(q_prime / s.g3);
    // UT q reaches receiver slots congruent to its own slot class or the
    // next one (delay spill); other slot classes never couple.
    const bool main_term = imod(slot_off, s.g4) == 0;
    const bool spill_term = imod(slot_off + 1, s.g4) == 0;
    if (!main_term && !spill_term) return H;
    const double pref = static_cast<double>(s.g3 * s.g4) / static_cast<double>(cfg.mn());

    for (const auto& t : tabs) {
        // carrier double sums over (l~, l'), reduced along d = c - m'
        cx_mat W1(pm, pm, arma::fill::zeros), W2(pm, pm, arma::fill::zeros);
        for (uword lt = 0; lt < pm; ++lt)
            for (uword lp = 0; lp < pm; ++lp) {
                const std::int64_t dl = static_cast<std::int64_t>(lt) - static_cast<std::int64_t>(lp);
                cx w1{0.0, 0.0}, w2{0.0, 0.0};
                for (std::int64_t d = -(ipm - 1); d <= ipm - 1; ++d) {
                    const std::int64_t delta = q_g3 - qp_g3 + d * ig3;
                    const cx ph = cis_frac(-d * ig3 * static_cast<std::int64_t>(lp), iM);
                    const cx g = t.geo(static_cast<uword>(dl + ipm - 1), static_cast<uword>(d + ipm - 1));
                    w1 += t.pr1[static_cast<std::size_t>(delta + iM - 1)] * ph * g;
                    w2 += t.pr2[static_cast<std::size_t>(delta + iM - 1)] * ph * g;
                }
                const cx lead = cis_frac(-q_g3 * static_cast<std::int64_t>(lp), iM);
                W1(lt, lp) = lead * w1;
                W2(lt, lp) = lead * w2;
            }

        for (uword kp = 0; kp < pn; ++kp) {
            const double carrier_arg = t.nu_df + static_cast<double>(kp) / static_cast<double>(cfg.N);
            const cx lead_k = t.gain * cis(carrier_arg * static_cast<double>(q_prime / s.g3)) *
                              cis(-static_cast<double>(qp_g3) * t.tau_T);
            const cx spill_rot = cis(-carrier_arg);
            for (uword kt = 0; kt < pn; ++kt) {
                const std::int64_t dk = static_cast<std::int64_t>(kp) - static_cast<std::int64_t>(kt);
                const cx d4 = t.d4[static_cast<std::size_t>(dk + static_cast<std::int64_t>(pn) - 1)];
                for (uword lt = 0; lt < pm; ++lt) {
                    const cx row_phase =
                        cis_frac(qp_g3 * static_cast<std::int64_t>(lt) * iN -
                                     static_cast<std::int64_t>(kt) * static_cast<std::int64_t>(q_prime / s.g3) * iM,
                                 iM * iN);
                    for (uword lp = 0; lp < pm; ++lp) {
                        cx brace{0.0, 0.0};
                        if (main_term) brace += W1(lt, lp);
                        if (spill_term) brace += spill_rot * W2(lt, lp);
                        H(kt + lt * pn, kp + lp * pn) += pref * row_phase * lead_k * d4 * brace;
                    }
                }
            }
        }
    }
    return H;
}

inline cx_mat itfma_dd_matrix(uword q, uword q_prime, const UtChannel& ch, const Itfma& s,
                              const FrameConfig& cfg) {
    validate_scheme(MaScheme{s}, cfg);
    require(q < s.g3 * s.g4 && q_prime < s.g3 * s.g4, "itfma_dd_matrix: UT index out of range");
    return itfma_dd_matrix_from(make_itfma_tables(ch, s, cfg), q, q_prime, s, cfg);
}

// ----- guard-band schemes -----------------------------------------------------------

/// Per-path kernel tables of one transmitter; the DD kernel itself has no
/// (q, q') dependence, the pair only selects row and column ranges. Shared
/// by both guard-band schemes and every guard size.
struct GbPathTables {
    cx_mat G1, G2;       ///< (l~, l) carrier sums, M x M
    std::vector<cx> dn;  ///< Doppler sum, indexed dk + (N-1), dk = k - k~
};

inline std::vector<GbPathTables> make_gb_tables(const UtChannel& ch, const FrameConfig& cfg) {
    check_channel(ch, cfg);
    const auto iM = static_cast<std::int64_t>(cfg.M), iN = static_cast<std::int64_t>(cfg.N);
    std::vector<GbPathTables> tabs;
    tabs.reserve(ch.paths.size());
    for (const auto& p : ch.paths) {
        const double tau_T = p.delay * cfg.delta_f;
        const double nu_df = p.doppler / cfg.delta_f;
        GbPathTables t;
        std::vector<cx> pr1(2 * cfg.M - 1), pr2(2 * cfg.M - 1);
        for (std::int64_t d = -(iM - 1); d <= iM - 1; ++d) {
            const double xi1 = static_cast<double>(d) + nu_df;
            pr1[static_cast<std::size_t>(d + iM - 1)] = phase_ratio(xi1, 1.0 - tau_T);
            pr2[static_cast<std::size_t>(d + iM - 1)] = phase_ratio(-xi1, tau_T);
        }
        t.G1.set_size(cfg.M, cfg.M);
        t.G2.set_size(cfg.M, cfg.M);
        std::vector<std::vector<cx>> geo(2 * cfg.M - 1, std::vector<cx>(2 * cfg.M - 1));
        for (std::int64_t dl = -(iM - 1); dl <= iM - 1; ++dl) {
            const double x = static_cast<double>(dl) / static_cast<double>(cfg.M) - tau_T;
            for (std::int64_t d = -(iM - 1); d <= iM - 1; ++d) {
                const std::int64_t a = std::max<std::int64_t>(0, -d);
                const std::int64_t len = iM - std::abs(d);
                geo[static_cast<std::size_t>(dl + iM - 1)][static_cast<std::size_t>(d + iM - 1)] =
                    geometric_sum(x, a, len);
            }
        }
        for (uword lt = 0; lt < cfg.M; ++lt)
            for (uword l = 0; l < cfg.M; ++l) {
                const std::int64_t dl = static_cast<std::int64_t>(lt) - static_cast<std::int64_t>(l);
                cx g1{0.0, 0.0}, g2{0.0, 0.0};
                for (std::int64_t d = -(iM - 1); d <= iM - 1; ++d) {
                    const cx ph = cis_frac(-d * static_cast<std::int64_t>(l), iM);
                    const cx g = geo[static_cast<std::size_t>(dl + iM - 1)]
                                    [static_cast<std::size_t>(d + iM - 1)];
                    g1 += pr1[static_cast<std::size_t>(d + iM - 1)] * ph * g;
                    g2 += pr2[static_cast<std::size_t>(d + iM - 1)] * ph * g;
                }
                t.G1(lt, l) = p.gain * g1;
                t.G2(lt, l) = p.gain * g2;
            }
        t.dn.resize(2 * cfg.N - 1);
        for (std::int64_t dk = -(iN - 1); dk <= iN - 1; ++dk) {
            t.dn[static_cast<std::size_t>(dk + iN - 1)] =
                dirichlet_ratio(static_cast<double>(dk) / static_cast<double>(cfg.N) + nu_df, iN);
        }
        tabs.push_back(std::move(t));
    }
    return tabs;
}

/// Effective DD matrix of the pair (q, q') for a guard-band scheme: the
/// shared kernel restricted to rows in the receiver's allocation and
/// columns in the transmitter's.
inline cx_mat gb_dd_matrix_from(const std::vector<GbPathTables>& tabs, uword q, uword q_prime,
                                const MaScheme& scheme, const FrameConfig& cfg) {
    const uword dim = symbols_per_ut(scheme, cfg);
    cx_mat H(dim, dim, arma::fill::zeros);
    const auto iN = static_cast<std::int64_t>(cfg.N);
    const double pref = 1.0 / static_cast<double>(cfg.mn());
    for (uword r = 0; r < dim; ++r) {
        const auto [kt, lt] = dd_index_of(scheme, q_prime, r, cfg);
        for (uword c = 0; c < dim; ++c) {
            const auto [k, l] = dd_index_of(scheme, q, c, cfg);
            const std::int64_t dk = static_cast<std::int64_t>(k) - static_cast<std::int64_t>(kt);
            const cx col_rot = cis_frac(-static_cast<std::int64_t>(k), iN);
            cx acc{0.0, 0.0};
            for (const auto& t : tabs)
                acc += t.dn[static_cast<std::size_t>(dk + iN - 1)] *
                       (t.G1(lt, l) + col_rot * t.G2(lt, l));
            H(r, c) = pref * acc;
        }
    }
    return H;
}

inline cx_mat gb_dd_matrix(uword q, uword q_prime, const UtChannel& ch, const MaScheme& scheme,
                           const FrameConfig& cfg) {
    validate_scheme(scheme, cfg);
    require(std::holds_alternative<GbDoppler>(scheme) || std::holds_alternative<GbDelay>(scheme),
            "gb_dd_matrix: scheme must be a guard-band scheme");
    require(q < ut_count(scheme) && q_prime < ut_count(scheme), "gb_dd_matrix: UT index out of range");
    return gb_dd_matrix_from(make_gb_tables(ch, cfg), q, q_prime, scheme, cfg);
}

// ----- per-receiver bundle -----------------------------------------------------------

enum class InterfererTag { kH1, kH2, kCross };

/// Useful matrix plus every interference matrix seen by one receiver, with
/// the scheme's vector layout.
struct EffectiveChannel {
    MaScheme scheme;
    uword q_prime = 0;
    PulseShape pulse = PulseShape::kRectangular;
    cx_mat useful;
    struct Interferer {
        uword source_ut;
        InterfererTag tag;
        cx_mat matrix;
    };
    std::vector<Interferer> interferers;

    uword dim() const { return useful.n_rows; }
    std::pair<uword, uword> dd_index_of_row(uword r, const FrameConfig& cfg) const {
        return dd_index_of(scheme, q_prime, r, cfg);
    }
};

/// Assembles the receiver-side bundle for UT q'. The DD-interleaved scheme
/// enumerates its two congruence families (the previous-block family
/// includes q = q' when g2 = 1, whose wrap-around self-interference is
/// treated as noise); the other schemes see every q != q'.
inline EffectiveChannel build_effective_channel(const MaScheme& scheme, uword q_prime,
                                                const std::vector<UtChannel>& channels,
                                                const FrameConfig& cfg,
                                                PulseShape pulse = PulseShape::kRectangular) {
    validate_scheme(scheme, cfg);
    const uword Q = ut_count(scheme);
    require(channels.size() == Q, "build_effective_channel: need one channel per UT");
    require(q_prime < Q, "build_effective_channel: UT index out of range");
    EffectiveChannel eff;
    eff.scheme = scheme;
    eff.q_prime = q_prime;
    eff.pulse = pulse;

    if (pulse == PulseShape::kIdeal) {
        require(!std::holds_alternative<Itfma>(scheme), "build_effective_channel: no ideal-pulse mode for itfma");
        eff.useful = ideal_pulse_matrix(scheme, q_prime, q_prime, channels[q_prime], cfg);
        if (!std::holds_alternative<Iddma>(scheme)) {
            for (uword q = 0; q < Q; ++q) {
                if (q == q_prime) continue;
                eff.interferers.push_back(
                    {q, InterfererTag::kCross, ideal_pulse_matrix(scheme, q, q_prime, channels[q], cfg)});
            }
        }
        return eff;
    }

    if (const auto* s = std::get_if<Iddma>(&scheme)) {
        for (uword q = 0; q < Q; ++q) {
            const bool same_block = (q % s->g2) == (q_prime % s->g2);
            const bool prev_block =
                imod(static_cast<std::int64_t>(q), s->g2) ==
                imod(static_cast<std::int64_t>(q_prime) - 1, static_cast<std::int64_t>(s->g2));
            if (!same_block && !prev_block) continue;
            IddmaDdPair pair = iddma_dd_matrices(q, q_prime, channels[q], *s, cfg);
            if (q == q_prime) eff.useful = std::move(pair.h1);
            else if (same_block) eff.interferers.push_back({q, InterfererTag::kH1, std::move(pair.h1)});
            if (prev_block) eff.interferers.push_back({q, InterfererTag::kH2, std::move(pair.h2)});
        }
        return eff;
    }

    if (const auto* s = std::get_if<Itfma>(&scheme)) {
        for (uword q = 0; q < Q; ++q) {
            cx_mat H = itfma_dd_matrix_from(make_itfma_tables(channels[q], *s, cfg), q, q_prime, *s, cfg);
            if (q == q_prime) eff.useful = std::move(H);
            else eff.interferers.push_back({q, InterfererTag::kCross, std::move(H)});
        }
        return eff;
    }

    for (uword q = 0; q < Q; ++q) {
        cx_mat H = gb_dd_matrix_from(make_gb_tables(channels[q], cfg), q, q_prime, scheme, cfg);
        if (q == q_prime) eff.useful = std::move(H);
        else eff.interferers.push_back({q, InterfererTag::kCross, std::move(H)});
    }
    return eff;
}

/// Debug dump as CSV rows (row, col, re, im).
inline void dump_matrix_csv(const std::string& path, const cx_mat& m) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    require(f != nullptr, "dump_matrix_csv: cannot open output file");
    std::fprintf(f, "row,col,re,im\n");
    for (uword r = 0; r < m.n_rows; ++r)
        for (uword c = 0; c < m.n_cols; ++c)
            std::fprintf(f, "%llu,%llu,%.17g,%.17g\n", static_cast<unsigned long long>(r),
                         static_cast<unsigned long long>(c), m(r, c).real(), m(r, c).imag());
    std::fclose(f);
}

}  // namespace otfsoma
