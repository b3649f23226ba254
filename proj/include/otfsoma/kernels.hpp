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

#include "otfsoma/common.hpp"

namespace otfsoma {

/// Scalar arguments of the per-path coupling kernels. xi drives the
/// pulse-overlap integrals of the block-contiguous receiver, xi1/kappa the
/// full-grid and interleaved receivers, psi the Doppler-slot sums; epsilon
/// is the integer time-slot offset of the interleaved receiver.
struct KernelArgs {
    double xi = 0.0;
    double xi1 = 0.0;
    double psi = 0.0;
    double kappa = 0.0;
    std::int64_t epsilon = 0;
};

/// (e^{j*2*pi*xi*a} - 1) / (j*2*pi*xi) for a in [0, 1].
///
/// The removable singularity at xi = 0 is evaluated by a 3-term Taylor
/// expansion for |xi| < 1e-6 (value -> a as xi -> 0). Away from the
/// singularity the numerator is formed as (-2 sin^2(theta/2), sin(theta)),
/// which avoids cancellation for small angles.
inline cx phase_ratio(double xi, double a) {
    const double theta = kTwoPi * xi * a;
    if (std::abs(xi) < 1e-6) {
        const cx jt = kJ * theta;
        return a * (1.0 + jt / 2.0 + jt * jt / 6.0);
    }
    const double s = std::sin(0.5 * theta);
    const cx numerator(-2.0 * s * s, std::sin(theta));
    return numerator / (kJ * kTwoPi * xi);
}

/// Finite geometric sum sum_{n=0}^{P-1} e^{j*2*pi*n*x}, evaluated in closed
/// form as P e^{j*pi*(P-1)x} sinc(Px)/sinc(x) with sinc(x)=sin(pi x)/(pi x).
/// Near-integer x (|x - round(x)| < 1e-9) falls back to the series of the
/// sin ratio so the sum equals P exactly at integer x.
inline cx dirichlet_ratio(double x, std::int64_t P) {
    // the sum is 1-periodic; reducing x first keeps P*x reductions exact
    const double r = x - std::round(x);
    double ratio;
    if (std::abs(r) < 1e-9) {
        const double t = kPi * r;
        const double p2 = static_cast<double>(P) * static_cast<double>(P);
        ratio = static_cast<double>(P) * (1.0 - t * t * (p2 - 1.0) / 6.0);
    } else {
        ratio = sinpi(static_cast<double>(P) * r) / std::sin(kPi * r);
    }
    return cis_pi(static_cast<double>(P - 1) * r) * ratio;
}

/// sum_{n=a}^{a+len-1} e^{j*2*pi*n*x}
inline cx geometric_sum(double x, std::int64_t a, std::int64_t len) {
    if (len <= 0) return {0.0, 0.0};
    return cis(static_cast<double>(a) * x) * dirichlet_ratio(x, len);
}

}  // namespace otfsoma
