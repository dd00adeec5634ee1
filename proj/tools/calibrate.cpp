/*
 * Copyright 2026 The heana-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Fits the unpublished link-budget losses and the baseline lane areas to the
// published DPU sizes and counts, and prints the values to freeze.

#include <cmath>
#include <cstdio>

#include "heana/linkbudget.hpp"
#include "heana/perfmodel.hpp"

using namespace heana;

namespace {

// Lane area that lands `target` DPUs (centered in the floor bucket) on the
// reference area for an N x N DPU of architecture a.
double fit_lane(Arch a, std::size_t n, std::size_t target, const AcceleratorConfig &ref) {
    const double total = double(ref.dpu_count) * dpu_area(ref.dpu, ref.peripherals);
    const double per_dpu = total / (double(target) + 0.5);
    DpuConfig d;
    d.arch = a;
    d.N = d.M = n;
    PeripheralModel pm = ref.peripherals;
    pm.lane_area_amw = pm.lane_area_maw = 0;
    const double rest = dpu_area(d, pm);
    return (per_dpu - rest) / double(n * n);
}

} // namespace

int main() {
    const LinkBudgetParams base;
    const CalibrationResult cr = calibrate(base, published_anchors());
    std::printf("# link budget, 4-bit\n");
    std::printf("P_SMF_att = %.4g\nd_MRR = %.4g\nP_MRR_W_OBL = %.4g\n", cr.params.P_SMF_att, cr.params.d_MRR,
            cr.params.P_MRR_W_OBL);
    std::printf("# max rel error (1 GS/s anchors) %.4f, mean over all anchors %.4f\n", cr.max_rel_error,
            cr.mean_rel_error);
    for (const auto &a : published_anchors()) {
        const ScalePoint sp = max_n(4, a.DR, cr.params, a.arch);
        std::printf("#   %-6s %4.0f GS/s  N=%zu (published %zu)\n", std::string(to_string(a.arch)).c_str(),
                a.DR / 1e9, sp.N_max, a.N);
    }

    const AcceleratorConfig ref = published_preset(Arch::HEANA, 1e9);
    std::printf("# area model\nlane_amw.area_mm2 = %.4g\nlane_maw.area_mm2 = %.4g\n",
            fit_lane(Arch::AMW, 36, 207, ref), fit_lane(Arch::MAW, 43, 280, ref));
    return 0;
}
