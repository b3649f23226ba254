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
// Reproduction presets. The tables below are the single source of truth
// for every published-figure configuration this tool regenerates.

#pragma once

#include "otfsoma/experiment_spec.hpp"

namespace otfsoma {

inline std::vector<std::string> preset_names() {
    return {"fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"};
}

/// Per-UT-count interleave factors used by the study configurations.
inline UtFactors factors_for_ut_count(uword Q) {
    switch (Q) {
        case 6: return {6, 3, 2};
        case 9: return {9, 3, 3};
        case 12: return {12, 4, 3};
        case 18: return {18, 6, 3};
        default: throw std::invalid_argument("factors_for_ut_count: unsupported UT count");
    }
}

inline ExperimentSpec make_preset(const std::string& name) {
    ExperimentSpec spec;
    spec.name = name;
    spec.frame = FrameConfig::from_spacing(36, 18, 15e3);
    spec.trials = 100;
    spec.snr_grid_db = snr_grid(0.0, 30.0, 2.5);

    const CurveSpec iddma_rect{SchemeKind::kIddma, PulseShape::kRectangular, true, 0};
    const CurveSpec itfma_rect{SchemeKind::kItfma, PulseShape::kRectangular, true, 0};
    const CurveSpec gbdplr_rect{SchemeKind::kGbDoppler, PulseShape::kRectangular, true, 0};
    const CurveSpec gbdly_rect{SchemeKind::kGbDelay, PulseShape::kRectangular, true, 0};
    const CurveSpec iddma_ideal{SchemeKind::kIddma, PulseShape::kIdeal, true, 0};
    const CurveSpec gbdplr_ideal{SchemeKind::kGbDoppler, PulseShape::kIdeal, true, 0};
    const CurveSpec gbdly_ideal{SchemeKind::kGbDelay, PulseShape::kIdeal, true, 0};

    const std::vector<CurveSpec> full_set{iddma_rect, itfma_rect,  gbdplr_rect, gbdly_rect,
                                          iddma_ideal, gbdplr_ideal, gbdly_ideal};

    if (name == "fig4") {
        spec.factors = factors_for_ut_count(6);
        spec.nu_max_list = {300.0};
        spec.curves = full_set;
    } else if (name == "fig5") {
        spec.factors = factors_for_ut_count(6);
        spec.nu_max_list = {600.0};
        spec.curves = full_set;
    } else if (name == "fig6") {
        spec.factors = factors_for_ut_count(6);
        spec.nu_max_list = {1200.0};
        spec.curves = full_set;
    } else if (name == "fig7") {
        spec.factors = factors_for_ut_count(9);
        spec.nu_max_list = {300.0};
        spec.curves = full_set;
    } else if (name == "fig8") {
        spec.factors = factors_for_ut_count(18);
        spec.nu_max_list = {300.0};
        spec.curves = full_set;
    } else if (name == "fig9") {
        spec.factors = factors_for_ut_count(6);
        spec.nu_max_list = {0.0, 300.0, 600.0, 1200.0};
        spec.curves = {iddma_rect, itfma_rect};
    } else if (name == "fig10") {
        // per-UT SE against the UT count at a fixed operating point
        spec.nu_max_list = {600.0};
        spec.snr_grid_db = {23.0};
        spec.ut_sweep = {factors_for_ut_count(6), factors_for_ut_count(9), factors_for_ut_count(12),
                         factors_for_ut_count(18)};
        spec.curves = {iddma_rect, itfma_rect, gbdplr_rect, gbdly_rect, iddma_ideal};
    } else {
        throw std::invalid_argument("make_preset: unknown preset '" + name + "'");
    }
    spec.validate();
    return spec;
}

}  // namespace otfsoma
