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

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "otfsoma/otfsoma.hpp"

int main(int argc, char** argv) {
    // the trial pool already saturates the machine; keep BLAS single-threaded
    setenv("OPENBLAS_NUM_THREADS", "1", 0);

    CLI::App app{"uplink sum spectral efficiency of OTFS orthogonal multiple access"};
    std::string preset, config_path, out_dir = "results";
    std::uint64_t seed = 0;
    long long trials = -1;
    long long threads = -1;
    std::string convention;

    auto* preset_opt = app.add_option("--preset", preset, "figure preset: fig4 .. fig10");
    auto* config_opt = app.add_option("--config", config_path, "key = value experiment file");
    preset_opt->excludes(config_opt);
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    app.add_option("--trials", trials, "Monte Carlo trials per point");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--snr-convention", convention, "received | transmit");
    app.add_option("--threads", threads, "worker threads (default: env OTFS_LAB_THREADS or all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        otfsoma::ExperimentSpec spec;
        if (!preset.empty()) {
            spec = otfsoma::make_preset(preset);
        } else if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cannot open config file: " << config_path << "\n";
                return 1;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            spec = otfsoma::parse_config(ss.str());
        } else {
            std::cerr << "need --preset or --config (presets:";
            for (const auto& n : otfsoma::preset_names()) std::cerr << " " << n;
            std::cerr << ")\n";
            return 1;
        }

        if (seed_opt->count() > 0) spec.seed = seed;
        if (trials >= 1) spec.trials = static_cast<otfsoma::uword>(trials);
        if (!convention.empty()) {
            if (convention == "received") spec.convention = otfsoma::SnrConvention::kReceived;
            else if (convention == "transmit") spec.convention = otfsoma::SnrConvention::kTransmit;
            else {
                std::cerr << "snr-convention must be received or transmit\n";
                return 1;
            }
        }
        if (threads >= 0) {
            spec.threads = static_cast<otfsoma::uword>(threads);
        } else if (const char* env = std::getenv("OTFS_LAB_THREADS")) {
            spec.threads = static_cast<otfsoma::uword>(std::strtoull(env, nullptr, 10));
        }

        const auto files = otfsoma::run_spec(spec, out_dir);
        for (const auto& f : files) std::cout << f << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
