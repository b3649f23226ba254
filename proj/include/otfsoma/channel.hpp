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

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "otfsoma/grid.hpp"

namespace otfsoma {

// ----- multipath delay-Doppler channel -------------------------------------

struct ChannelPath {
    cx gain{0.0, 0.0};
    double delay = 0.0;    ///< seconds, in [0, T)
    double doppler = 0.0;  ///< Hz, |doppler| <= nu_max <= delta_f
};

struct UtChannel {
    std::vector<ChannelPath> paths;

    double max_delay() const {
        double d = 0.0;
        for (const auto& p : paths) d = std::max(d, p.delay);
        return d;
    }
};

inline void check_channel(const UtChannel& ch, const FrameConfig& cfg) {
    require(!ch.paths.empty(), "UtChannel: must have at least one path");
    for (const auto& p : ch.paths) {
        require(p.delay >= 0.0 && p.delay < cfg.T, "ChannelPath: delay must lie in [0, T)");
        require(std::abs(p.doppler) <= cfg.delta_f, "ChannelPath: |doppler| must not exceed delta_f");
    }
}

/// Tap delays and normalized linear power weights of a tapped-delay-line
/// profile. Powers sum to 1, delays are strictly increasing.
struct PowerDelayProfile {
    std::vector<double> delays;  ///< seconds
    std::vector<double> powers;  ///< linear, sum to 1

    void check() const {
        require(delays.size() == powers.size() && !delays.empty(),
                "PowerDelayProfile: delays and powers must have equal nonzero length");
        double sum = 0.0;
        for (std::size_t i = 0; i < delays.size(); ++i) {
            if (i > 0) require(delays[i] > delays[i - 1], "PowerDelayProfile: delays must increase");
            sum += powers[i];
        }
        require(std::abs(sum - 1.0) <= 1e-12, "PowerDelayProfile: powers must sum to 1");
    }
};

/// 3GPP Extended Typical Urban profile: tap delays
/// [0, 50, 120, 200, 230, 500, 1600, 2300, 5000] ns with relative powers
/// [-1, -1, -1, 0, 0, 0, -3, -5, -7] dB, normalized to unit total power.
inline PowerDelayProfile etu_profile() {
    PowerDelayProfile p;
    p.delays = {0e-9, 50e-9, 120e-9, 200e-9, 230e-9, 500e-9, 1600e-9, 2300e-9, 5000e-9};
    const double db[] = {-1, -1, -1, 0, 0, 0, -3, -5, -7};
    double sum = 0.0;
    for (double d : db) {
        p.powers.push_back(std::pow(10.0, d / 10.0));
        sum += p.powers.back();
    }
    for (double& w : p.powers) w /= sum;
    // absorb rounding so the unit-sum invariant holds exactly
    double s2 = 0.0;
    for (double w : p.powers) s2 += w;
    p.powers.back() += 1.0 - s2;
    p.check();
    return p;
}

/// Single tap at zero delay with unit power (flat-fading reference).
inline PowerDelayProfile flat_profile() {
    PowerDelayProfile p;
    p.delays = {0.0};
    p.powers = {1.0};
    return p;
}

// ----- deterministic random stream -----------------------------------------
// Keyed by (master seed, trial index, UT index); draw order is fixed, so
// channel realizations are bit-exact for a given seed regardless of how
// trials are scheduled across workers.

class RngStream {
  public:
    explicit RngStream(std::uint64_t key) : engine_(key) {}
    RngStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t ut)
        : engine_(derive_key(seed, trial, ut)) {}

    /// uniform double in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// standard circular complex Gaussian, variance 1 (Box-Muller)
    cx gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1));
        return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
    }

  private:
    std::mt19937_64 engine_;
};

/// Draws one multipath realization: gain_i ~ CN(0, powers[i]), delays copied
/// from the profile, doppler_i = nu_max cos(theta_i) with theta_i uniform on
/// [0, 2pi). Requires nu_max < delta_f.
inline UtChannel sample_channel(const PowerDelayProfile& profile, double nu_max,
                                const FrameConfig& cfg, RngStream& rng) {
    profile.check();
    require(nu_max >= 0.0, "sample_channel: nu_max must be non-negative");
    require(nu_max < cfg.delta_f, "sample_channel: nu_max must be smaller than delta_f");
    UtChannel ch;
    ch.paths.resize(profile.delays.size());
    for (std::size_t i = 0; i < profile.delays.size(); ++i) {
        auto& p = ch.paths[i];
        p.gain = std::sqrt(profile.powers[i]) * rng.gaussian();
        p.delay = profile.delays[i];
        const double theta = kTwoPi * rng.uniform();
        p.doppler = nu_max * std::cos(theta);
    }
    check_channel(ch, cfg);
    return ch;
}

// ----- realization fixtures -------------------------------------------------

struct ChannelRecord {
    uword trial = 0;
    uword ut = 0;
    UtChannel channel;
};

/// Writes realizations as CSV rows (trial, ut, path, re_gain, im_gain,
/// delay_ns, doppler_hz).
inline void dump_channels_csv(const std::string& path, const std::vector<ChannelRecord>& records) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    require(f != nullptr, "dump_channels_csv: cannot open output file");
    std::fprintf(f, "trial,ut,path,re_gain,im_gain,delay_ns,doppler_hz\n");
    for (const auto& rec : records) {
        for (std::size_t i = 0; i < rec.channel.paths.size(); ++i) {
            const auto& p = rec.channel.paths[i];
            std::fprintf(f, "%llu,%llu,%zu,%.17g,%.17g,%.17g,%.17g\n",
                         static_cast<unsigned long long>(rec.trial),
                         static_cast<unsigned long long>(rec.ut), i, p.gain.real(), p.gain.imag(),
                         p.delay * 1e9, p.doppler);
        }
    }
    std::fclose(f);
}

inline std::vector<ChannelRecord> load_channels_csv(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    require(f != nullptr, "load_channels_csv: cannot open input file");
    std::vector<ChannelRecord> records;
    char line[512];
    bool header = true;
    while (std::fgets(line, sizeof line, f)) {
        if (header) {
            header = false;
            continue;
        }
        unsigned long long trial = 0, ut = 0, pidx = 0;
        double re = 0, im = 0, delay_ns = 0, doppler = 0;
        if (std::sscanf(line, "%llu,%llu,%llu,%lg,%lg,%lg,%lg", &trial, &ut, &pidx, &re, &im,
                        &delay_ns, &doppler) != 7)
            continue;
        if (records.empty() || records.back().trial != trial || records.back().ut != ut) {
            records.push_back({static_cast<uword>(trial), static_cast<uword>(ut), {}});
        }
        records.back().channel.paths.push_back({cx(re, im), delay_ns * 1e-9, doppler});
    }
    std::fclose(f);
    return records;
}

}  // namespace otfsoma
