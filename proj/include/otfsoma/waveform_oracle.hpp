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
// Waveform-level reference receiver. Transmit signals with rectangular
// pulses are piecewise complex-exponential, so every matched-filter
// integral has a closed form; nothing here is quadrature. Effective
// channel matrices are obtained by exciting one information symbol at a
// time, which keeps this path independent of the analytic kernel algebra
// it is used to validate.

#pragma once

#include <algorithm>
#include <vector>

#include "otfsoma/channel.hpp"
#include "otfsoma/grid.hpp"
#include "otfsoma/kernels.hpp"

namespace otfsoma {

// ----- piecewise complex-exponential signals --------------------------------

/// One a * e^{j*2*pi*f*t} contribution supported on [t0, t1).
struct ExpAtom {
    double t0 = 0.0;
    double t1 = 0.0;
    cx amp{0.0, 0.0};
    cx freq{0.0, 0.0};  ///< Hz; imaginary part admitted but unused in practice
};

/// Signal represented as breakpoints plus per-interval exponential terms.
/// Zero outside [breakpoints.front(), breakpoints.back()).
struct PiecewiseExpSignal {
    std::vector<double> breakpoints;                  ///< strictly increasing
    std::vector<std::vector<ExpAtom>> segments;       ///< terms live on [b_i, b_{i+1})

    bool empty() const { return breakpoints.size() < 2; }
    double support_begin() const { return empty() ? 0.0 : breakpoints.front(); }
    double support_end() const { return empty() ? 0.0 : breakpoints.back(); }

    cx value_at(double t) const {
        cx acc{0.0, 0.0};
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
            if (t < breakpoints[i] || t >= breakpoints[i + 1]) continue;
            for (const auto& a : segments[i]) acc += a.amp * std::exp(kJ * kTwoPi * a.freq * t);
        }
        return acc;
    }
};

namespace detail {

/// exp(w) - 1 without cancellation for small |w|.
inline cx expm1c(cx w) {
    if (w.real() == 0.0) {
        const double s = std::sin(0.5 * w.imag());
        return {-2.0 * s * s, std::sin(w.imag())};
    }
    return std::exp(w) - cx{1.0, 0.0};
}

/// integral of amp * e^{j2pi f t} over [a, b]
inline cx integrate_atom(const ExpAtom& atom, double a, double b) {
    if (b <= a) return {0.0, 0.0};
    const cx z = kJ * kTwoPi * atom.freq;
    const cx base = atom.amp * std::exp(z * a);
    const cx w = z * (b - a);
    if (std::abs(w) < 1e-3) {
        cx s{1.0, 0.0}, term{1.0, 0.0};
        for (int n = 1; n < 10; ++n) {
            term *= w / static_cast<double>(n + 1);
            s += term;
        }
        return base * (b - a) * s;
    }
    return base * expm1c(w) / z;
}

}  // namespace detail

/// Assembles the canonical breakpoint representation from a raw atom list.
inline PiecewiseExpSignal compile_signal(std::vector<ExpAtom> atoms, double merge_eps) {
    PiecewiseExpSignal sig;
    std::vector<double> pts;
    for (const auto& a : atoms) {
        if (a.t1 - a.t0 <= merge_eps) continue;
        pts.push_back(a.t0);
        pts.push_back(a.t1);
    }
    if (pts.empty()) return sig;
    std::sort(pts.begin(), pts.end());
    for (double p : pts) {
        if (sig.breakpoints.empty() || p - sig.breakpoints.back() > merge_eps) sig.breakpoints.push_back(p);
    }
    if (sig.breakpoints.size() < 2) return PiecewiseExpSignal{};
    sig.segments.assign(sig.breakpoints.size() - 1, {});
    for (const auto& a : atoms) {
        if (a.t1 - a.t0 <= merge_eps) continue;
        for (std::size_t i = 0; i + 1 < sig.breakpoints.size(); ++i) {
            const double lo = sig.breakpoints[i], hi = sig.breakpoints[i + 1];
            const double mid = 0.5 * (lo + hi);
            if (mid >= a.t0 && mid < a.t1) sig.segments[i].push_back({lo, hi, a.amp, a.freq});
        }
    }
    return sig;
}

inline double merge_eps_for(const FrameConfig& cfg) { return 1e-12 * cfg.T; }

/// integral of sig(t) * e^{-j2pi F t} over [t0, t1], exact per term
inline cx integrate_against(const PiecewiseExpSignal& sig, double t0, double t1, double F) {
    cx acc{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < sig.breakpoints.size(); ++i) {
        const double lo = std::max(t0, sig.breakpoints[i]);
        const double hi = std::min(t1, sig.breakpoints[i + 1]);
        if (hi <= lo) continue;
        for (const auto& a : sig.segments[i]) {
            ExpAtom shifted = a;
            shifted.freq = a.freq - F;
            acc += detail::integrate_atom(shifted, lo, hi);
        }
    }
    return acc;
}

/// integral of |sig|^2 over the whole support
inline double signal_energy(const PiecewiseExpSignal& sig) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < sig.breakpoints.size(); ++i) {
        const double lo = sig.breakpoints[i], hi = sig.breakpoints[i + 1];
        for (const auto& a : sig.segments[i])
            for (const auto& b : sig.segments[i]) {
                ExpAtom cross{lo, hi, a.amp * std::conj(b.amp), a.freq - std::conj(b.freq)};
                acc += detail::integrate_atom(cross, lo, hi).real();
            }
    }
    return acc;
}

inline PiecewiseExpSignal add_signals(const PiecewiseExpSignal& a, const PiecewiseExpSignal& b,
                                      double merge_eps) {
    std::vector<ExpAtom> atoms;
    auto collect = [&](const PiecewiseExpSignal& s) {
        for (const auto& seg : s.segments)
            for (const auto& atom : seg) atoms.push_back(atom);
    };
    collect(a);
    collect(b);
    return compile_signal(std::move(atoms), merge_eps);
}

// ----- transmit synthesis ----------------------------------------------------

/// Heisenberg transform with rectangular pulses: each TF symbol becomes one
/// exponential on its slot. Carrier phase references at slot starts are
/// exact integers on this grid, so amplitudes carry no residual rotation.
inline PiecewiseExpSignal synthesize_from_tf(const TfGrid& tf, const FrameConfig& cfg) {
    tf.check_dims(cfg);
    std::vector<ExpAtom> atoms;
    const double amp_scale = 1.0 / std::sqrt(cfg.T);
    for (uword n = 0; n < cfg.N; ++n)
        for (uword m = 0; m < cfg.M; ++m) {
            const cx a = tf.values(n, m);
            if (a == cx{0.0, 0.0}) continue;
            atoms.push_back({static_cast<double>(n) * cfg.T, static_cast<double>(n + 1) * cfg.T,
                             a * amp_scale, cx(static_cast<double>(m) * cfg.delta_f, 0.0)});
        }
    return compile_signal(std::move(atoms), merge_eps_for(cfg));
}

/// Copies the last cp_len seconds of the frame to [-cp_len, 0). Only valid
/// before the channel, where every carrier is a multiple of delta_f and the
/// copied amplitudes are unchanged.
inline PiecewiseExpSignal attach_cyclic_prefix(const PiecewiseExpSignal& sig, double cp_len,
                                               const FrameConfig& cfg) {
    if (cp_len <= 0.0) return sig;
    const double frame_end = cfg.frame_duration();
    std::vector<ExpAtom> atoms;
    for (const auto& seg : sig.segments)
        for (const auto& a : seg) {
            atoms.push_back(a);
            const double lo = std::max(a.t0, frame_end - cp_len);
            if (a.t1 > lo) atoms.push_back({lo - frame_end, a.t1 - frame_end, a.amp, a.freq});
        }
    return compile_signal(std::move(atoms), merge_eps_for(cfg));
}

/// Folds signal content beyond the frame end back onto the frame start.
/// Every folded amplitude rotates by e^{j2pi freq N T}; `rotation` supplies
/// the non-integer remainder of that rotation (the carrier part is an exact
/// integer number of turns on this grid).
inline PiecewiseExpSignal wrap_tail_into_frame(const PiecewiseExpSignal& sig, const FrameConfig& cfg,
                                               cx rotation) {
    const double frame_end = cfg.frame_duration();
    std::vector<ExpAtom> atoms;
    for (const auto& seg : sig.segments)
        for (const auto& a : seg) {
            if (a.t0 < frame_end)
                atoms.push_back({a.t0, std::min(a.t1, frame_end), a.amp, a.freq});
            if (a.t1 > frame_end) {
                const double lo = std::max(a.t0, frame_end);
                atoms.push_back({lo - frame_end, a.t1 - frame_end, a.amp * rotation, a.freq});
            }
        }
    return compile_signal(std::move(atoms), merge_eps_for(cfg));
}

/// Builds the DD grid of UT q from its information symbol vector, following
/// the scheme's allocation (zero elsewhere). For the TF-interleaved scheme
/// the symbols are quasi-periodically replicated with their phase ramp.
inline DdGrid place_symbols(const MaScheme& scheme, uword q, const cx_vec& symbols,
                            const FrameConfig& cfg) {
    validate_scheme(scheme, cfg);
    require(symbols.n_elem == symbols_per_ut(scheme, cfg), "place_symbols: symbol count mismatch");
    DdGrid dd(cfg);
    if (const auto* s = std::get_if<Itfma>(&scheme)) {
        const uword pn = cfg.N / s->g4, pm = cfg.M / s->g3;
        for (uword kp = 0; kp < pn; ++kp)
            for (uword lp = 0; lp < pm; ++lp) {
                const cx v = symbols(kp + lp * pn);
                for (uword d1 = 0; d1 < s->g4; ++d1)
                    for (uword c1 = 0; c1 < s->g3; ++c1) {
                        const cx ramp =
                            cis_frac(static_cast<std::int64_t>(c1) * static_cast<std::int64_t>(q % s->g3) *
                                             static_cast<std::int64_t>(s->g4) -
                                         static_cast<std::int64_t>(d1) * static_cast<std::int64_t>(q / s->g3) *
                                             static_cast<std::int64_t>(s->g3),
                                     static_cast<std::int64_t>(s->g3 * s->g4));
                        dd.values(kp + d1 * pn, lp + c1 * pm) = v * ramp;
                    }
            }
        return dd;
    }
    for (uword r = 0; r < symbols.n_elem; ++r) {
        const auto [k, l] = dd_index_of(scheme, q, r, cfg);
        dd.values(k, l) = symbols(r);
    }
    return dd;
}

/// Transmit signal of UT q for the given information symbols. The
/// DD-interleaved scheme modulates only its contiguous TF block; the others
/// modulate the full-grid ISFFT output. A cyclic prefix of length cp_len is
/// prepended when requested.
inline PiecewiseExpSignal synthesize_tx(const MaScheme& scheme, uword q, const cx_vec& symbols,
                                        const FrameConfig& cfg, double cp_len = 0.0) {
    validate_scheme(scheme, cfg);
    require(q < ut_count(scheme), "synthesize_tx: UT index out of range");
    PiecewiseExpSignal sig;
    if (const auto* s = std::get_if<Iddma>(&scheme)) {
        const uword pn = cfg.N / s->g2, pm = cfg.M / s->g1;
        require(symbols.n_elem == pn * pm, "synthesize_tx: symbol count mismatch");
        cx_mat block(pn, pm);
        for (uword r = 0; r < symbols.n_elem; ++r) block(r % pn, r / pn) = symbols(r);
        std::vector<ExpAtom> atoms;
        const double amp_scale = 1.0 / std::sqrt(cfg.T);
        const uword slot0 = pn * (q % s->g2), carrier0 = pm * (q / s->g2);
        for (uword n = 0; n < pn; ++n)
            for (uword m = 0; m < pm; ++m) {
                const cx a = iddma_tf_symbol(*s, q, block, static_cast<std::int64_t>(n),
                                             static_cast<std::int64_t>(m), cfg);
                const double t0 = static_cast<double>(slot0 + n) * cfg.T;
                atoms.push_back({t0, t0 + cfg.T, a * amp_scale,
                                 cx(static_cast<double>(carrier0 + m) * cfg.delta_f, 0.0)});
            }
        sig = compile_signal(std::move(atoms), merge_eps_for(cfg));
    } else {
        sig = synthesize_from_tf(isfft(place_symbols(scheme, q, symbols, cfg), cfg), cfg);
    }
    return cp_len > 0.0 ? attach_cyclic_prefix(sig, cp_len, cfg) : sig;
}

// ----- channel application ----------------------------------------------------

/// sum_i h_i e^{-j2pi nu_i tau_i} (delay by tau_i, modulate by e^{j2pi nu_i t});
/// the output is still piecewise exponential.
inline PiecewiseExpSignal apply_channel(const PiecewiseExpSignal& sig, const UtChannel& ch,
                                        const FrameConfig& cfg) {
    check_channel(ch, cfg);
    std::vector<ExpAtom> atoms;
    for (const auto& p : ch.paths) {
        for (const auto& seg : sig.segments)
            for (const auto& a : seg) {
                ExpAtom out;
                out.t0 = a.t0 + p.delay;
                out.t1 = a.t1 + p.delay;
                out.freq = a.freq + p.doppler;
                out.amp = a.amp * p.gain * std::exp(-kJ * kTwoPi * out.freq * p.delay);
                atoms.push_back(out);
            }
    }
    return compile_signal(std::move(atoms), merge_eps_for(cfg));
}

/// Noiseless received signal for the unit-excitation oracle. The
/// DD-interleaved receiver model folds each path's tail cyclically with its
/// Doppler phasor continuing from the original frame position; the other
/// receivers see a physically prefixed copy, whose phasor runs at the
/// actual receive time. Both reduce to the same thing when nu = 0.
inline PiecewiseExpSignal propagate(const MaScheme& scheme, uword q, const cx_vec& symbols,
                                    const UtChannel& ch, const FrameConfig& cfg) {
    const double eps = merge_eps_for(cfg);
    if (std::holds_alternative<Iddma>(scheme)) {
        PiecewiseExpSignal tx = synthesize_tx(scheme, q, symbols, cfg, 0.0);
        PiecewiseExpSignal rx;
        for (const auto& p : ch.paths) {
            UtChannel single{{p}};
            PiecewiseExpSignal one = apply_channel(tx, single, cfg);
            one = wrap_tail_into_frame(one, cfg, cis(p.doppler * cfg.frame_duration()));
            rx = rx.empty() ? one : add_signals(rx, one, eps);
        }
        return rx;
    }
    PiecewiseExpSignal tx = synthesize_tx(scheme, q, symbols, cfg, ch.max_delay());
    return apply_channel(tx, ch, cfg);
}

// ----- reception ----------------------------------------------------------------

/// Matched-filter TF output over the full grid: Y(n, m) integrates the
/// window [nT, (n+1)T) against carrier m. Slot-start reference phases are
/// exact integers and drop out.
inline cx_mat receive_tf_full(const PiecewiseExpSignal& rx, const FrameConfig& cfg) {
    cx_mat Y(cfg.N, cfg.M, arma::fill::zeros);
    const double scale = 1.0 / std::sqrt(cfg.T);
    for (uword n = 0; n < cfg.N; ++n) {
        const double t0 = static_cast<double>(n) * cfg.T, t1 = static_cast<double>(n + 1) * cfg.T;
        for (uword m = 0; m < cfg.M; ++m)
            Y(n, m) = scale * integrate_against(rx, t0, t1, static_cast<double>(m) * cfg.delta_f);
    }
    return Y;
}

/// TF output of the DD-interleaved receiver of UT q': its own block of
/// slots and carriers, indexed locally.
inline cx_mat receive_tf_iddma(const Iddma& s, uword q_prime, const PiecewiseExpSignal& rx,
                               const FrameConfig& cfg) {
    const uword pn = cfg.N / s.g2, pm = cfg.M / s.g1;
    const uword slot0 = pn * (q_prime % s.g2), carrier0 = pm * (q_prime / s.g2);
    cx_mat Y(pn, pm, arma::fill::zeros);
    const double scale = 1.0 / std::sqrt(cfg.T);
    for (uword n = 0; n < pn; ++n) {
        const double t0 = static_cast<double>(slot0 + n) * cfg.T;
        for (uword m = 0; m < pm; ++m)
            Y(n, m) = scale * integrate_against(rx, t0, t0 + cfg.T,
                                                static_cast<double>(carrier0 + m) * cfg.delta_f);
    }
    return Y;
}

/// TF-to-DD demap of receiver q' applied to a full-grid TF symbol matrix
/// (global indices). The DD-interleaved demap is the exact inverse of its
/// transmit map — the allocation's DDRE-phase SFFT scaled by g1 g2 — so a
/// flat channel reproduces the symbols identically; the TF-interleaved
/// demap reads only the UT's occupied TFREs; the guard-band demap is the
/// plain SFFT restricted to the UT's rows.
inline cx_vec dd_demap(const MaScheme& scheme, uword q_prime, const cx_mat& Y, const FrameConfig& cfg) {
    validate_scheme(scheme, cfg);
    require(q_prime < ut_count(scheme), "dd_demap: UT index out of range");
    require(Y.n_rows == cfg.N && Y.n_cols == cfg.M, "dd_demap: TF matrix must be N x M");
    const auto iM = static_cast<std::int64_t>(cfg.M), iN = static_cast<std::int64_t>(cfg.N);

    if (const auto* s = std::get_if<Iddma>(&scheme)) {
        const uword pn = cfg.N / s->g2, pm = cfg.M / s->g1;
        const uword slot0 = pn * (q_prime % s->g2), carrier0 = pm * (q_prime / s->g2);
        cx_vec y(pn * pm, arma::fill::zeros);
        const double scale = static_cast<double>(s->g1 * s->g2);
        for (uword r = 0; r < y.n_elem; ++r) {
            const auto [k, l] = dd_index_of(scheme, q_prime, r, cfg);
            cx acc{0.0, 0.0};
            for (uword nn = 0; nn < pn; ++nn)
                for (uword mm = 0; mm < pm; ++mm)
                    acc += Y(slot0 + nn, carrier0 + mm) *
                           cis_frac(static_cast<std::int64_t>(mm) * static_cast<std::int64_t>(l) * iN -
                                        static_cast<std::int64_t>(nn) * static_cast<std::int64_t>(k) * iM,
                                    iM * iN);
            y(r) = scale * acc;
        }
        return y;
    }

    if (const auto* s = std::get_if<Itfma>(&scheme)) {
        const uword pn = cfg.N / s->g4, pm = cfg.M / s->g3;
        cx_vec y(pn * pm, arma::fill::zeros);
        for (uword kt = 0; kt < pn; ++kt)
            for (uword lt = 0; lt < pm; ++lt) {
                cx acc{0.0, 0.0};
                for (uword np = 0; np < pn; ++np)
                    for (uword mp = 0; mp < pm; ++mp) {
                        const auto n = static_cast<std::int64_t>(q_prime / s->g3 + np * s->g4);
                        const auto m = static_cast<std::int64_t>(q_prime % s->g3 + mp * s->g3);
                        acc += Y(static_cast<uword>(n), static_cast<uword>(m)) *
                               cis_frac(m * static_cast<std::int64_t>(lt) * iN -
                                            n * static_cast<std::int64_t>(kt) * iM,
                                        iM * iN);
                    }
                y(kt + lt * pn) = acc;
            }
        return y;
    }

    const DdGrid dd = sfft(TfGrid(Y), cfg);
    const uword dim = symbols_per_ut(scheme, cfg);
    cx_vec y(dim, arma::fill::zeros);
    for (uword r = 0; r < dim; ++r) {
        const auto [k, l] = dd_index_of(scheme, q_prime, r, cfg);
        y(r) = dd.values(k, l);
    }
    return y;
}

/// DD-domain symbols of UT q' from a received waveform. Every Wigner
/// integral is closed form; the demap stage is shared with dd_demap.
inline cx_vec receive_dd(const MaScheme& scheme, uword q_prime, const PiecewiseExpSignal& rx,
                         const FrameConfig& cfg) {
    return dd_demap(scheme, q_prime, receive_tf_full(rx, cfg), cfg);
}

/// Effective channel of the pair (transmitter q, receiver q') by unit
/// excitation: column j is the noiseless response to the j-th information
/// symbol of UT q.
inline cx_mat oracle_matrix(const MaScheme& scheme, uword q, uword q_prime, const UtChannel& ch,
                            const FrameConfig& cfg) {
    const uword dim = symbols_per_ut(scheme, cfg);
    cx_mat H(dim, dim, arma::fill::zeros);
    for (uword j = 0; j < dim; ++j) {
        cx_vec e(dim, arma::fill::zeros);
        e(j) = 1.0;
        const PiecewiseExpSignal rx = propagate(scheme, q, e, ch, cfg);
        H.col(j) = receive_dd(scheme, q_prime, rx, cfg);
    }
    return H;
}

// ----- ideal-pulse reference -----------------------------------------------------

/// Twisted-convolution DD kernel under bi-orthogonal pulses, tabulated over
/// the index offsets (dk = k - k~, dl = l~ - l); shared by every (q, q')
/// pair and guard size of one transmitter.
struct IdealGbKernel {
    cx_mat table;  ///< (2N-1) x (2M-1), entry [dk + N-1, dl + M-1]
};

inline IdealGbKernel make_ideal_gb_kernel(const UtChannel& ch, const FrameConfig& cfg) {
    check_channel(ch, cfg);
    IdealGbKernel out;
    out.table.zeros(2 * cfg.N - 1, 2 * cfg.M - 1);
    const auto iN = static_cast<std::int64_t>(cfg.N), iM = static_cast<std::int64_t>(cfg.M);
    for (const auto& p : ch.paths) {
        const double tau_T = p.delay * cfg.delta_f;
        const double nu_df = p.doppler / cfg.delta_f;
        const cx lead = p.gain * cis(-p.doppler * p.delay) / static_cast<double>(cfg.mn());
        std::vector<cx> dn(2 * cfg.N - 1), dm(2 * cfg.M - 1);
        for (std::int64_t dk = -(iN - 1); dk <= iN - 1; ++dk)
            dn[static_cast<std::size_t>(dk + iN - 1)] =
                dirichlet_ratio(static_cast<double>(dk) / static_cast<double>(cfg.N) + nu_df, iN);
        for (std::int64_t dl = -(iM - 1); dl <= iM - 1; ++dl)
            dm[static_cast<std::size_t>(dl + iM - 1)] =
                dirichlet_ratio(static_cast<double>(dl) / static_cast<double>(cfg.M) - tau_T, iM);
        for (uword a = 0; a < out.table.n_rows; ++a)
            for (uword b = 0; b < out.table.n_cols; ++b) out.table(a, b) += lead * dn[a] * dm[b];
    }
    return out;
}

inline cx_mat ideal_gb_matrix_from(const IdealGbKernel& kernel, uword q, uword q_prime,
                                   const MaScheme& scheme, const FrameConfig& cfg) {
    const uword dim = symbols_per_ut(scheme, cfg);
    cx_mat H(dim, dim);
    const auto iN = static_cast<std::int64_t>(cfg.N), iM = static_cast<std::int64_t>(cfg.M);
    for (uword r = 0; r < dim; ++r) {
        const auto [kt, lt] = dd_index_of(scheme, q_prime, r, cfg);
        for (uword c = 0; c < dim; ++c) {
            const auto [k, l] = dd_index_of(scheme, q, c, cfg);
            const std::int64_t dk = static_cast<std::int64_t>(k) - static_cast<std::int64_t>(kt);
            const std::int64_t dl = static_cast<std::int64_t>(lt) - static_cast<std::int64_t>(l);
            H(r, c) = kernel.table(static_cast<uword>(dk + iN - 1), static_cast<uword>(dl + iM - 1));
        }
    }
    return H;
}

/// Effective DD matrix under bi-orthogonal pulses, where the TF channel is
/// multiplicative per TFRE: Y[n,m] = X[n,m] sum_i h_i e^{j2pi nu_i n T}
/// e^{-j2pi(nu_i + m delta_f) tau_i}. Supported for the DD-interleaved and
/// guard-band schemes. DD-interleaved cross-UT matrices are exactly zero
/// because the occupied TF blocks are disjoint.
inline cx_mat ideal_pulse_matrix(const MaScheme& scheme, uword q, uword q_prime, const UtChannel& ch,
                                 const FrameConfig& cfg) {
    validate_scheme(scheme, cfg);
    check_channel(ch, cfg);
    require(!std::holds_alternative<Itfma>(scheme), "ideal_pulse_matrix: unsupported scheme");
    const uword dim = symbols_per_ut(scheme, cfg);

    if (const auto* s = std::get_if<Iddma>(&scheme)) {
        cx_mat H(dim, dim, arma::fill::zeros);
        if (q != q_prime) return H;  // disjoint TF blocks
        const uword pn = cfg.N / s->g2, pm = cfg.M / s->g1;
        const double pref = static_cast<double>(s->g1 * s->g2) / static_cast<double>(cfg.mn());
        const auto ipn = static_cast<std::int64_t>(pn), ipm = static_cast<std::int64_t>(pm);
        for (const auto& p : ch.paths) {
            const double tau_T = p.delay * cfg.delta_f;
            const double nu_df = p.doppler / cfg.delta_f;
            const cx consts =
                pref * p.gain * cis(nu_df * static_cast<double>(pn * (q % s->g2))) *
                cis(-(static_cast<double>(pm * (q / s->g2)) * cfg.delta_f + p.doppler) * p.delay);
            std::vector<cx> dm(2 * pm - 1), dn(2 * pn - 1);
            for (std::int64_t dv = -(ipm - 1); dv <= ipm - 1; ++dv)
                dm[static_cast<std::size_t>(dv + ipm - 1)] = dirichlet_ratio(
                    static_cast<double>(s->g1) * static_cast<double>(dv) / static_cast<double>(cfg.M) - tau_T,
                    ipm);
            for (std::int64_t du = -(ipn - 1); du <= ipn - 1; ++du)
                dn[static_cast<std::size_t>(du + ipn - 1)] = dirichlet_ratio(
                    static_cast<double>(s->g2) * static_cast<double>(du) / static_cast<double>(cfg.N) + nu_df,
                    ipn);
            for (uword r = 0; r < dim; ++r) {
                const uword ut = r % pn, vt = r / pn;
                for (uword c = 0; c < dim; ++c) {
                    const uword u = c % pn, v = c / pn;
                    const std::int64_t dv = static_cast<std::int64_t>(vt) - static_cast<std::int64_t>(v);
                    const std::int64_t du = static_cast<std::int64_t>(u) - static_cast<std::int64_t>(ut);
                    H(r, c) += consts * dm[static_cast<std::size_t>(dv + ipm - 1)] *
                               dn[static_cast<std::size_t>(du + ipn - 1)];
                }
            }
        }
        return H;
    }

    return ideal_gb_matrix_from(make_ideal_gb_kernel(ch, cfg), q, q_prime, scheme, cfg);
}

}  // namespace otfsoma
