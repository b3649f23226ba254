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
// CSV and SVG emission plus the preset/config runner. CSV is the canonical
// output; the SVG overlay is drawn with plain polyline primitives so the
// artifact has no plotting dependency. Identical spec and seed produce
// byte-identical files.

#pragma once

#include <filesystem>
#include <fstream>

#include "otfsoma/experiment_spec.hpp"
#include "otfsoma/presets.hpp"

namespace otfsoma {

// ----- CSV ------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "scheme,snr_db,nu_max_hz,Q,g1_or_g3,g2_or_g4,G,pulse,trials,sum_se_mean,sum_se_stderr,per_ut_se_mean";

struct CsvRow {
    std::string scheme;
    double snr_db = 0.0;
    double nu_max_hz = 0.0;
    uword Q = 0;
    uword f1 = 0;  ///< 0 for guard-band schemes
    uword f2 = 0;
    uword G = 0;
    std::string pulse;
    uword trials = 0;
    double sum_se_mean = 0.0;
    double sum_se_stderr = 0.0;
    double per_ut_se_mean = 0.0;
};

inline void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    require(f != nullptr, "write_csv: cannot open output file");
    std::fprintf(f, "%s\n", kCsvHeader);
    for (const auto& r : rows) {
        std::fprintf(f, "%s,%.10g,%.10g,%llu,%llu,%llu,%llu,%s,%llu,%.10g,%.10g,%.10g\n",
                     r.scheme.c_str(), r.snr_db, r.nu_max_hz, static_cast<unsigned long long>(r.Q),
                     static_cast<unsigned long long>(r.f1), static_cast<unsigned long long>(r.f2),
                     static_cast<unsigned long long>(r.G), r.pulse.c_str(),
                     static_cast<unsigned long long>(r.trials), r.sum_se_mean, r.sum_se_stderr,
                     r.per_ut_se_mean);
    }
    std::fclose(f);
}

// ----- SVG ------------------------------------------------------------------

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// 1000 x 700 px overlay plot with linear axes, tick labels and a legend.
inline void write_svg(const std::string& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<PlotSeries>& series) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#17becf", "#e377c2", "#7f7f7f", "#bcbd22"};
    const double W = 1000, H = 700, ml = 80, mr = 220, mt = 50, mb = 70;
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    ymax *= 1.05;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::FILE* f = std::fopen(path.c_str(), "wb");
    require(f != nullptr, "write_svg: cannot open output file");
    std::fprintf(f,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                 "viewBox=\"0 0 %.0f %.0f\">\n<rect width=\"%.0f\" height=\"%.0f\" fill=\"white\"/>\n",
                 W, H, W, H, W, H);
    std::fprintf(f, "<text x=\"%.0f\" y=\"28\" font-size=\"18\" text-anchor=\"middle\">%s</text>\n",
                 (ml + W - mr) / 2, title.c_str());
    // axes
    std::fprintf(f, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", ml,
                 H - mb, W - mr, H - mb);
    std::fprintf(f, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", ml, mt,
                 ml, H - mb);
    for (int i = 0; i <= 6; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 6.0;
        const double yv = ymin + (ymax - ymin) * i / 6.0;
        std::fprintf(f,
                     "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#cccccc\"/>\n"
                     "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\">%.3g</text>\n",
                     px(xv), mt, px(xv), H - mb, px(xv), H - mb + 18, xv);
        std::fprintf(f,
                     "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#cccccc\"/>\n"
                     "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"end\">%.3g</text>\n",
                     ml, py(yv), W - mr, py(yv), ml - 8, py(yv) + 4, yv);
    }
    std::fprintf(f, "<text x=\"%.0f\" y=\"%.0f\" font-size=\"14\" text-anchor=\"middle\">%s</text>\n",
                 (ml + W - mr) / 2, H - 20, x_label.c_str());
    std::fprintf(f,
                 "<text x=\"22\" y=\"%.0f\" font-size=\"14\" text-anchor=\"middle\" "
                 "transform=\"rotate(-90 22 %.0f)\">%s</text>\n",
                 (mt + H - mb) / 2, (mt + H - mb) / 2, y_label.c_str());
    // series
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % 10];
        std::string pts;
        char buf[64];
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(series[s].x[i]), py(series[s].y[i]));
            pts += buf;
        }
        std::fprintf(f, "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                     pts.c_str(), color);
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            std::fprintf(f, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", px(series[s].x[i]),
                         py(series[s].y[i]), color);
        const double ly = mt + 22.0 * static_cast<double>(s);
        std::fprintf(f,
                     "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                     "stroke-width=\"2\"/>\n<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%s</text>\n",
                     W - mr + 12, ly, W - mr + 40, ly, color, W - mr + 46, ly + 4, series[s].label.c_str());
    }
    std::fprintf(f, "</svg>\n");
    std::fclose(f);
}

// ----- runner ------------------------------------------------------------------

namespace detail {

inline std::string nu_tag(double nu) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", nu);
    return buf;
}

inline SeCurve run_curve(const CurveSpec& c, const UtFactors& factors, double nu,
                         const ExperimentSpec& spec) {
    ExperimentOptions opt;
    opt.convention = spec.convention;
    opt.threads = spec.threads;
    const bool gb = c.kind == SchemeKind::kGbDoppler || c.kind == SchemeKind::kGbDelay;
    if (gb && c.optimize_guard) {
        return run_experiment_gb_optimized(make_scheme(c.kind, factors, 0), c.pulse, spec.snr_grid_db, nu,
                                           spec.frame, spec.trials, spec.seed, opt);
    }
    return run_experiment(make_scheme(c.kind, factors, gb ? c.fixed_G : 0), c.pulse, spec.snr_grid_db, nu,
                          spec.frame, spec.trials, spec.seed, opt);
}

inline std::vector<CsvRow> curve_rows(const CurveSpec& c, const UtFactors& factors, double nu,
                                      const SeCurve& data) {
    const bool gb = c.kind == SchemeKind::kGbDoppler || c.kind == SchemeKind::kGbDelay;
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < data.snr_grid_db.size(); ++i) {
        CsvRow r;
        r.scheme = kind_name(c.kind);
        r.snr_db = data.snr_grid_db[i];
        r.nu_max_hz = nu;
        r.Q = factors.Q;
        r.f1 = gb ? 0 : factors.f1;
        r.f2 = gb ? 0 : factors.f2;
        r.G = data.used_G[i];
        r.pulse = pulse_name(c.pulse);
        r.trials = data.trials;
        r.sum_se_mean = data.mean_sum_se[i];
        r.sum_se_stderr = data.stderr_sum_se[i];
        r.per_ut_se_mean = data.mean_per_ut_se[i];
        rows.push_back(r);
    }
    return rows;
}

}  // namespace detail

/// One executed curve with its identifying tags.
struct ExecutedCurve {
    CurveSpec curve;
    UtFactors factors;
    double nu_max = 0.0;
    SeCurve data;
};

struct RunArtifacts {
    std::vector<std::string> files;
    std::vector<ExecutedCurve> curves;
};

/// Executes every curve of the spec and writes one CSV per (curve, nu_max)
/// plus one SVG overlay.
inline RunArtifacts run_spec_full(const ExperimentSpec& spec, const std::string& out_dir) {
    spec.validate();
    std::filesystem::create_directories(out_dir);
    RunArtifacts out;
    auto& files = out.files;
    std::vector<PlotSeries> plot;

    if (spec.ut_sweep.empty()) {
        for (double nu : spec.nu_max_list) {
            for (const auto& c : spec.curves) {
                const SeCurve data = detail::run_curve(c, spec.factors, nu, spec);
                out.curves.push_back({c, spec.factors, nu, data});
                const std::string path = out_dir + "/" + spec.name + "_" + kind_name(c.kind) + "_" +
                                         pulse_name(c.pulse) + "_nu" + detail::nu_tag(nu) + ".csv";
                write_csv(path, detail::curve_rows(c, spec.factors, nu, data));
                files.push_back(path);
                PlotSeries s;
                s.label = std::string(kind_name(c.kind)) + " " + pulse_name(c.pulse);
                if (spec.nu_max_list.size() > 1) s.label += " nu=" + detail::nu_tag(nu);
                s.x = data.snr_grid_db;
                s.y = data.mean_sum_se;
                plot.push_back(std::move(s));
            }
        }
        const std::string svg = out_dir + "/" + spec.name + ".svg";
        write_svg(svg, spec.name, "SNR (dB)", "sum SE (bits/s/Hz)", plot);
        files.push_back(svg);
        return out;
    }

    // UT-count sweep at a single operating point
    const double nu = spec.nu_max_list.front();
    const double snr = spec.snr_grid_db.front();
    for (const auto& c : spec.curves) {
        std::vector<CsvRow> rows;
        PlotSeries s;
        s.label = std::string(kind_name(c.kind)) + " " + pulse_name(c.pulse);
        for (const auto& factors : spec.ut_sweep) {
            // skip geometrically impossible combinations (e.g. a Doppler
            // guard scheme whose UT count does not divide N)
            try {
                validate_scheme(make_scheme(c.kind, factors, 0), spec.frame);
            } catch (const std::invalid_argument&) {
                continue;
            }
            ExperimentSpec point = spec;
            point.snr_grid_db = {snr};
            const SeCurve data = detail::run_curve(c, factors, nu, point);
            out.curves.push_back({c, factors, nu, data});
            auto r = detail::curve_rows(c, factors, nu, data);
            rows.insert(rows.end(), r.begin(), r.end());
            s.x.push_back(static_cast<double>(factors.Q));
            s.y.push_back(data.mean_per_ut_se[0]);
        }
        const std::string path =
            out_dir + "/" + spec.name + "_" + kind_name(c.kind) + "_" + pulse_name(c.pulse) + ".csv";
        write_csv(path, rows);
        files.push_back(path);
        plot.push_back(std::move(s));
    }
    const std::string svg = out_dir + "/" + spec.name + ".svg";
    write_svg(svg, spec.name, "number of UTs", "per-UT SE (bits/s/Hz)", plot);
    files.push_back(svg);
    return out;
}

inline std::vector<std::string> run_spec(const ExperimentSpec& spec, const std::string& out_dir) {
    return run_spec_full(spec, out_dir).files;
}

}  // namespace otfsoma
