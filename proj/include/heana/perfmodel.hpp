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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "heana/dataflow.hpp"
#include "heana/kvconfig.hpp"
#include "heana/linkbudget.hpp"

namespace heana {

// SI units throughout: W, s, mm^2.
struct Component {
    double power_w = 0;
    double latency_s = 0;
    double area_mm2 = 0;

    double event_energy() const { return power_w * latency_s; }
};

struct PeripheralModel {
    Component reduction_network{0.050e-3, 3.125e-9, 3.00e-5};
    Component activation{0.52e-3, 0.78e-9, 6.00e-5};
    Component io_interface{140.18e-3, 0.78e-9, 2.44e-2};
    Component pooling{0.4e-3, 3.125e-9, 2.40e-4};
    Component edram{41.1e-3, 1.56e-9, 1.66e-1};
    Component bus{7e-3, 5e-9, 9.00e-3};     // 5 cycles at clock_hz
    Component router{42e-3, 2e-9, 1.50e-2}; // 2 cycles at clock_hz
    Component dac_baseline{12.5e-3, 0.78e-9, 2.50e-3};
    Component dac_heana{26e-3, 0.78e-9, 6.00e-3};
    Component bpca{1.15e-3, 0.78e-9, 5.2e-3};
    // no published ADC figures; borrows the HEANA DAC row
    Component adc{26e-3, 0.78e-9, 6.00e-3};
    Component eo_tuning{80e-6, 20e-9, 0};
    Component to_tuning{275e-3, 4e-6, 0};
    Component capacitor_switch{0.041e-3, 2.5e-9, 0};

    double clock_hz = 1e9;
    double bus_cycles = 5;
    double router_cycles = 2;

    // eDRAM transactions served per access latency when prefetching operands.
    double edram_ports = 16;

    // Per-device footprints for the DPU area model. Only ratios matter for
    // area_scale; the AMW/MAW lane areas are fitted to the published counts.
    double taom_area = 1.0e-3;
    double filter_area = 4.0e-4;
    double mrm_area = 1.0e-3;
    double lane_area_amw = 7.399e-3;
    double lane_area_maw = 2.548e-3;

    void validate() const;
    static PeripheralModel from_config(const KvConfig &cfg);
    std::string to_config() const;
};

struct AcceleratorConfig {
    DpuConfig dpu;
    std::size_t dpu_count = 1;
    std::size_t dpus_per_tile = 4;
    PeripheralModel peripherals;
    double tir_rate_hz = 1e9;
    double laser_power_w = 10e-3;  // per comb line (wavelength)

    std::size_t tiles() const { return ceil_div(dpu_count, dpus_per_tile); }
    void validate() const;
};

// Published DPU size and area-matched count for a datarate (1, 5 or 10 GS/s).
// BPCA variants reuse their base organization's row.
AcceleratorConfig published_preset(Arch a, double datarate);

double dpu_area(const DpuConfig &d, const PeripheralModel &pm);

// Area-matched DPU counts: floor(reference total area / per-DPU area).
std::vector<std::size_t> area_scale(const AcceleratorConfig &reference,
        const std::vector<DpuConfig> &others);

enum class LayerKind { Conv, Fc, Pool, Activation };

struct LayerWork {
    std::string name;
    LayerKind kind = LayerKind::Conv;
    GemmDims dims;              // Conv, Fc
    std::uint64_t elements = 0; // Pool, Activation: element operations
};

struct FrameTiming {
    double latency_s = 0;
    double compute_s = 0;
    double memory_s = 0;
    bool rate_limited = false;
};

// window: consecutive frames integrated on one capacitor before readout.
FrameTiming frame_latency(const FrameTraffic &t, bool final, std::size_t window,
        const AcceleratorConfig &acc);

struct LayerReport {
    std::string name;
    double latency_s = 0;
    std::uint64_t frames = 0;
    std::uint64_t rate_limited_frames = 0;
};

struct SimReport {
    std::string workload;
    Arch arch = Arch::HEANA;
    Dataflow dataflow = Dataflow::OS;
    double datarate = 1e9;
    std::size_t N = 0, M = 0, dpu_count = 0;
    std::size_t batch = 1;
    double latency_s = 0;
    double energy_j = 0;
    std::vector<std::pair<std::string, double>> energy_breakdown;
    double fps = 0;
    double fps_per_w = 0;
    EventCounts counts;
    std::vector<std::string> violations;
    std::vector<LayerReport> layers;

    // e.g. "amw-ws@10"
    std::string label() const;
    std::string id() const { return label() + "/" + workload; }
};

// threads: 0 runs in the calling context.
SimReport evaluate(const std::vector<LayerWork> &layers, const AcceleratorConfig &acc,
        Dataflow df, std::size_t batch, std::string workload = {}, unsigned threads = 0);

struct CompareRow {
    std::string label;
    std::string workload;
    double fps = 0, fps_per_w = 0, latency = 0, energy = 0;  // ratios to baseline
};

struct ComparisonTable {
    std::string baseline;
    std::vector<CompareRow> rows;
    // per label, geometric mean over workloads of each ratio
    std::vector<CompareRow> gmean;
};

// baseline is "label/workload" (one reference for every row) or a bare label
// (each workload normalized to its own run of that label).
ComparisonTable compare(const std::vector<SimReport> &reports, const std::string &baseline);

std::string reports_csv(const std::vector<SimReport> &reports);
std::string comparison_csv(const ComparisonTable &t);

} // namespace heana
