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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heana/device.hpp"
#include "heana/tensor.hpp"

namespace heana {

enum class Arch { HEANA, AMW, MAW, AMW_BPCA, MAW_BPCA };
enum class Dataflow { OS, IS, WS };

inline constexpr Arch kAllArchs[] = {Arch::HEANA, Arch::AMW, Arch::MAW, Arch::AMW_BPCA,
        Arch::MAW_BPCA};
inline constexpr Dataflow kAllDataflows[] = {Dataflow::OS, Dataflow::IS, Dataflow::WS};

bool arch_has_bpca(Arch a);
// HEANA drives each lane with a TAOM; the others use MRM inputs + MRR weight banks.
bool arch_uses_taom(Arch a);
std::string_view to_string(Arch a);
std::string_view to_string(Dataflow d);
Arch parse_arch(std::string_view s);
Dataflow parse_dataflow(std::string_view s);

struct DpuConfig {
    std::size_t N = 2;     // wavelengths per DPE
    std::size_t M = 2;     // DPEs per DPU
    std::size_t p = 4608;  // capacitors per BPCA
    double datarate = 1e9;
    Arch arch = Arch::HEANA;

    bool has_bpca() const { return arch_has_bpca(arch); }
    void validate() const;
};

enum class Routing { Broadcast, Unicast };

struct TileMap {
    std::size_t input_rows, input_cols;
    std::size_t weight_rows, weight_cols;
    Routing input_routing;
    Routing weight_routing;
};

TileMap tile_map(Dataflow df, const DpuConfig &cfg);

// Half-open index range; holds only real (unpadded) indices.
struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool contains(std::size_t i) const { return i >= begin && i < end; }
    bool operator==(const Range &o) const = default;
};

// One scheduling step of a DPU. The input block is rows x ks, the weight
// block ks x cols and the output block rows x cols. Padded lanes and DPEs
// are implicit (zero operands).
struct ComputationFrame {
    std::size_t frame_id = 0;
    std::size_t outer_iter = 0;  // row c (OS, IS) or column d (WS)
    std::size_t tf_cycle = 0;    // k tile
    std::size_t ts_cycle = 0;    // d tile (OS, IS) or c tile (WS)
    Range rows, ks, cols;
    std::uint32_t capacitor = 0; // same index on every DPE's bank; 0 without BPCA
    bool is_first_for_output = false;
    bool is_final_for_output = false;

    bool operator==(const ComputationFrame &o) const = default;
};

struct EventCounts {
    std::uint64_t frames = 0;
    std::uint64_t adc_conversions = 0;
    std::uint64_t dac_conversions = 0;
    std::uint64_t input_reads = 0;   // elements
    std::uint64_t weight_reads = 0;
    std::uint64_t output_writes = 0;
    std::uint64_t psum_reads = 0;
    std::uint64_t psum_writes = 0;
    std::uint64_t capacitor_switches = 0;
    std::uint64_t reduction_ops = 0;
    std::uint64_t buffer_transactions = 0;  // row-granular accesses, drives latency

    EventCounts &operator+=(const EventCounts &o);
    bool operator==(const EventCounts &o) const = default;
};

struct Schedule {
    Dataflow dataflow = Dataflow::OS;
    GemmDims dims;
    DpuConfig config;
    std::vector<ComputationFrame> frames;
    EventCounts counters;
};

std::size_t ceil_div(std::size_t a, std::size_t b);

// Outer iterations, tiles switched per iteration and k folds.
struct LoopBounds {
    std::size_t outer, ts, tf;
};
LoopBounds loop_bounds(const GemmDims &g, const DpuConfig &cfg, Dataflow df);

// Frames of a single-DPU schedule. OS and IS give C * ceil(D/M) * ceil(K/N);
// WS maps DPEs onto rows and gives D * ceil(C/M) * ceil(K/N).
std::uint64_t frame_count(const GemmDims &g, const DpuConfig &cfg, Dataflow df);

// Closed-form ADC conversions.
std::uint64_t count_adc(const GemmDims &g, const DpuConfig &cfg, Dataflow df);

// Largest number of output tiles simultaneously holding a partial sum.
std::size_t required_capacitors(const GemmDims &g, const DpuConfig &cfg, Dataflow df);

// Consecutive frames that accumulate on one capacitor before a readout.
std::size_t temporal_window(const GemmDims &g, const DpuConfig &cfg, Dataflow df);

// Streams frames in schedule order without materializing them. Capacitor
// indices are left at 0; see CapacitorAllocator.
template <class Fn>
void for_each_frame(const GemmDims &g, const DpuConfig &cfg, Dataflow df, Fn &&fn) {
    const LoopBounds b = loop_bounds(g, cfg, df);
    const std::size_t N = cfg.N, M = cfg.M;
    auto krange = [&](std::size_t kt) { return Range{kt * N, std::min(g.K, (kt + 1) * N)}; };
    ComputationFrame f;
    std::size_t id = 0;
    for (std::size_t o = 0; o < b.outer; ++o) {
        for (std::size_t i = 0; i < (df == Dataflow::OS ? b.ts : b.tf); ++i)
            for (std::size_t j = 0; j < (df == Dataflow::OS ? b.tf : b.ts); ++j) {
                const std::size_t kt = df == Dataflow::OS ? j : i;
                const std::size_t tt = df == Dataflow::OS ? i : j;
                f.frame_id = id++;
                f.outer_iter = o;
                f.tf_cycle = kt;
                f.ts_cycle = tt;
                f.ks = krange(kt);
                if (df == Dataflow::WS) {
                    f.rows = {tt * M, std::min(g.C, (tt + 1) * M)};
                    f.cols = {o, o + 1};
                } else {
                    f.rows = {o, o + 1};
                    f.cols = {tt * M, std::min(g.D, (tt + 1) * M)};
                }
                f.is_first_for_output = kt == 0;
                f.is_final_for_output = kt + 1 == b.tf;
                fn(f);
            }
    }
}

// Capacitor policy for one DPU. A new output tile reuses the active
// capacitor when it is free and otherwise takes the next free index in
// round-robin order; the capacitor is released at the tile's final frame.
class CapacitorAllocator {
public:
    CapacitorAllocator(const GemmDims &g, const DpuConfig &cfg, Dataflow df);

    // Returns the capacitor for f and whether selecting it is a switch.
    std::uint32_t assign(const ComputationFrame &f, bool *switched = nullptr);

private:
    std::size_t p_;
    std::size_t required_;
    bool rotate_;                          // IS/WS: every new tile takes the next capacitor
    std::vector<std::uint32_t> tile_cap_;  // by ts index within the current outer group
    std::vector<char> busy_;               // by capacitor index - 1
    std::size_t group_ = SIZE_MAX;
    std::uint32_t active_ = 1;
    std::uint32_t cursor_ = 0;             // last capacitor handed out
    std::size_t live_ = 0;
};

// Per-frame buffer and converter events given what the DPU already holds.
struct FrameTraffic {
    std::uint64_t input_reads = 0, weight_reads = 0, output_writes = 0;
    std::uint64_t psum_writes = 0, psum_reads = 0;
    std::uint64_t input_txn = 0, weight_txn = 0, output_txn = 0;
    std::uint64_t psum_write_txn = 0, psum_read_txn = 0;
    std::uint64_t dac = 0, adc = 0, reduction_ops = 0;
    std::uint32_t reduction_depth = 0;
    bool switched = false;
};

// Tracks the tiles held in one DPU's operand registers across frames.
class DpuTracker {
public:
    DpuTracker(const GemmDims &g, const DpuConfig &cfg, Dataflow df);

    FrameTraffic step(const ComputationFrame &f, bool switched);

private:
    GemmDims g_;
    DpuConfig cfg_;
    Dataflow df_;
    std::size_t tf_;
    std::uint32_t depth_;
    std::uint64_t held_input_ = UINT64_MAX;
    std::uint64_t held_weight_ = UINT64_MAX;
};

void add_traffic(EventCounts &ec, const FrameTraffic &t);

// Materialized single-DPU schedule with capacitors assigned and events counted.
Schedule plan_schedule(const GemmDims &g, const DpuConfig &cfg, Dataflow df);

// Fills capacitor indices in place. Throws CapacityExceeded.
void assign_capacitors(Schedule &s);

EventCounts count_buffer_accesses(const Schedule &s);

// Streaming equivalent of plan_schedule(...).counters for large layers.
EventCounts count_events(const GemmDims &g, const DpuConfig &cfg, Dataflow df);

struct FunctionalRun {
    QuantMatrix output;
    std::uint64_t adc_readouts = 0;
    std::uint64_t capacitor_switches = 0;
};

// Value-level execution through the device models, following the schedule.
FunctionalRun execute_functional(const GemmProblem &p, const DpuConfig &cfg, Dataflow df,
        const std::optional<NoiseModel> &noise = std::nullopt);

// Line-oriented trace: header comments, then one record per frame.
std::string schedule_trace(const Schedule &s);

} // namespace heana
