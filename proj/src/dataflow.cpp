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

#include "heana/dataflow.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "heana/error.hpp"

namespace heana {

bool arch_has_bpca(Arch a) {
    return a == Arch::HEANA || a == Arch::AMW_BPCA || a == Arch::MAW_BPCA;
}

bool arch_uses_taom(Arch a) { return a == Arch::HEANA; }

std::string_view to_string(Arch a) {
    switch (a) {
        case Arch::HEANA: return "heana";
        case Arch::AMW: return "amw";
        case Arch::MAW: return "maw";
        case Arch::AMW_BPCA: return "amw-bpca";
        case Arch::MAW_BPCA: return "maw-bpca";
    }
    return "?";
}

std::string_view to_string(Dataflow d) {
    switch (d) {
        case Dataflow::OS: return "os";
        case Dataflow::IS: return "is";
        case Dataflow::WS: return "ws";
    }
    return "?";
}

Arch parse_arch(std::string_view s) {
    for (Arch a : kAllArchs)
        if (s == to_string(a)) return a;
    std::string t(s);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) {
        return c == '_' ? '-' : char(std::tolower(c));
    });
    for (Arch a : kAllArchs)
        if (t == to_string(a)) return a;
    throw ValidationError("unknown architecture '" + std::string(s) + "'");
}

Dataflow parse_dataflow(std::string_view s) {
    std::string t(s);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    for (Dataflow d : kAllDataflows)
        if (t == to_string(d)) return d;
    throw ValidationError("unknown dataflow '" + std::string(s) + "'");
}

void DpuConfig::validate() const {
    if (!N || !M || !p) throw ValidationError("DPU config needs N, M, p >= 1");
    if (!(datarate > 0)) throw ValidationError("datarate must be positive");
}

TileMap tile_map(Dataflow df, const DpuConfig &cfg) {
    if (df == Dataflow::WS)
        return {cfg.M, cfg.N, cfg.N, 1, Routing::Unicast, Routing::Broadcast};
    return {1, cfg.N, cfg.N, cfg.M, Routing::Broadcast, Routing::Unicast};
}

EventCounts &EventCounts::operator+=(const EventCounts &o) {
    frames += o.frames;
    adc_conversions += o.adc_conversions;
    dac_conversions += o.dac_conversions;
    input_reads += o.input_reads;
    weight_reads += o.weight_reads;
    output_writes += o.output_writes;
    psum_reads += o.psum_reads;
    psum_writes += o.psum_writes;
    capacitor_switches += o.capacitor_switches;
    reduction_ops += o.reduction_ops;
    buffer_transactions += o.buffer_transactions;
    return *this;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

LoopBounds loop_bounds(const GemmDims &g, const DpuConfig &cfg, Dataflow df) {
    const std::size_t tf = ceil_div(g.K, cfg.N);
    if (df == Dataflow::WS) return {g.D, ceil_div(g.C, cfg.M), tf};
    return {g.C, ceil_div(g.D, cfg.M), tf};
}

std::uint64_t frame_count(const GemmDims &g, const DpuConfig &cfg, Dataflow df) {
    const LoopBounds b = loop_bounds(g, cfg, df);
    return std::uint64_t(b.outer) * b.ts * b.tf;
}

std::uint64_t count_adc(const GemmDims &g, const DpuConfig &cfg, Dataflow) {
    const std::uint64_t outs = std::uint64_t(g.C) * g.D;
    return cfg.has_bpca() ? outs : outs * ceil_div(g.K, cfg.N);
}

std::size_t required_capacitors(const GemmDims &g, const DpuConfig &cfg, Dataflow df) {
    const LoopBounds b = loop_bounds(g, cfg, df);
    if (df == Dataflow::OS || b.tf == 1) return 1;
    return b.ts;
}

std::size_t temporal_window(const GemmDims &g, const DpuConfig &cfg, Dataflow df) {
    return df == Dataflow::OS ? ceil_div(g.K, cfg.N) : 1;
}

CapacitorAllocator::CapacitorAllocator(const GemmDims &g, const DpuConfig &cfg, Dataflow df)
    : p_(cfg.has_bpca() ? cfg.p : 0)
    , required_(required_capacitors(g, cfg, df))
    , rotate_(df != Dataflow::OS)
    , tile_cap_(loop_bounds(g, cfg, df).ts, 0)
    , busy_(p_, 0) {}

std::uint32_t CapacitorAllocator::assign(const ComputationFrame &f, bool *switched) {
    if (switched) *switched = false;
    if (!p_) return 0;
    if (f.outer_iter != group_) {
        group_ = f.outer_iter;
        std::fill(tile_cap_.begin(), tile_cap_.end(), 0);
    }
    std::uint32_t &tc = tile_cap_[f.ts_cycle];
    if (!tc) {
        if (live_ >= p_) throw CapacityExceeded(std::max(required_, live_ + 1), p_);
        // OS keeps its one capacitor; IS/WS rotate so each tile lands on a fresh one
        std::uint32_t c = rotate_ ? cursor_ % std::uint32_t(p_) + 1 : active_;
        while (busy_[c - 1]) c = c % std::uint32_t(p_) + 1;
        tc = c;
        cursor_ = c;
        busy_[c - 1] = 1;
        ++live_;
    }
    const std::uint32_t c = tc;
    if (switched) *switched = c != active_;
    active_ = c;
    if (f.is_final_for_output) {
        busy_[c - 1] = 0;
        --live_;
        tc = 0;
    }
    return c;
}

DpuTracker::DpuTracker(const GemmDims &g, const DpuConfig &cfg, Dataflow df)
    : g_(g), cfg_(cfg), df_(df), tf_(ceil_div(g.K, cfg.N)) {
    depth_ = tf_ > 1 ? std::uint32_t(std::bit_width(tf_ - 1)) : 0;
}

FrameTraffic DpuTracker::step(const ComputationFrame &f, bool switched) {
    FrameTraffic t;
    t.switched = switched;
    const bool ws = df_ == Dataflow::WS;
    const std::uint64_t rows = f.rows.size(), ks = f.ks.size(), cols = f.cols.size();
    const std::uint64_t outs = rows * cols;
    const bool final = f.is_final_for_output;

    // input tiles are keyed by (row block, k tile), weight tiles by (col block, k tile)
    const std::uint64_t in_key = std::uint64_t(ws ? f.ts_cycle : f.outer_iter) * tf_ + f.tf_cycle;
    const std::uint64_t w_key = std::uint64_t(ws ? f.outer_iter : f.ts_cycle) * tf_ + f.tf_cycle;
    if (in_key != held_input_) {
        held_input_ = in_key;
        t.input_reads = rows * ks;
        t.input_txn = rows;  // one row of the lowered input per DPE (WS) or broadcast (OS, IS)
    }
    if (w_key != held_weight_) {
        held_weight_ = w_key;
        t.weight_reads = ks * cols;
        t.weight_txn = 1;  // weights are stored pre-tiled
    }

    t.dac = arch_uses_taom(cfg_.arch) ? rows * ks * cols : t.input_reads + t.weight_reads;

    if (cfg_.has_bpca()) {
        t.adc = final ? outs : 0;
    } else {
        t.adc = outs;
        if (tf_ > 1) {
            // non-final psums spill; the final one meets the read-back pending
            // psums in the reduction network without a buffer round trip
            if (!final) {
                t.psum_writes = outs;
                t.psum_write_txn = rows;
            } else {
                t.psum_reads = (tf_ - 1) * outs;
                t.psum_read_txn = (tf_ - 1) * rows;
            }
            if (final) {
                t.reduction_ops = (tf_ - 1) * outs;
                t.reduction_depth = depth_;
            }
        }
    }
    if (final) {
        t.output_writes = outs;
        t.output_txn = ws ? rows : 1;
    }
    return t;
}

void add_traffic(EventCounts &ec, const FrameTraffic &t) {
    ++ec.frames;
    ec.adc_conversions += t.adc;
    ec.dac_conversions += t.dac;
    ec.input_reads += t.input_reads;
    ec.weight_reads += t.weight_reads;
    ec.output_writes += t.output_writes;
    ec.psum_reads += t.psum_reads;
    ec.psum_writes += t.psum_writes;
    ec.capacitor_switches += t.switched ? 1 : 0;
    ec.reduction_ops += t.reduction_ops;
    ec.buffer_transactions += t.input_txn + t.weight_txn + t.output_txn + t.psum_write_txn
            + t.psum_read_txn;
}

void assign_capacitors(Schedule &s) {
    if (!s.config.has_bpca()) throw ValidationError("capacitor assignment needs a BPCA architecture");
    CapacitorAllocator alloc(s.dims, s.config, s.dataflow);
    for (auto &f : s.frames) f.capacitor = alloc.assign(f);
}

EventCounts count_buffer_accesses(const Schedule &s) {
    DpuTracker tr(s.dims, s.config, s.dataflow);
    EventCounts ec;
    std::uint32_t prev = 0;
    for (const auto &f : s.frames) {
        const bool sw = prev && f.capacitor && f.capacitor != prev;
        if (f.capacitor) prev = f.capacitor;
        add_traffic(ec, tr.step(f, sw));
    }
    return ec;
}

Schedule plan_schedule(const GemmDims &g, const DpuConfig &cfg, Dataflow df) {
    cfg.validate();
    if (!g.C || !g.K || !g.D) throw ValidationError("GEMM dims must be >= 1");
    Schedule s;
    s.dataflow = df;
    s.dims = g;
    s.config = cfg;
    s.frames.reserve(frame_count(g, cfg, df));
    for_each_frame(g, cfg, df, [&](const ComputationFrame &f) { s.frames.push_back(f); });
    if (cfg.has_bpca()) assign_capacitors(s);
    s.counters = count_buffer_accesses(s);
    return s;
}

EventCounts count_events(const GemmDims &g, const DpuConfig &cfg, Dataflow df) {
    cfg.validate();
    CapacitorAllocator alloc(g, cfg, df);
    DpuTracker tr(g, cfg, df);
    EventCounts ec;
    for_each_frame(g, cfg, df, [&](const ComputationFrame &f) {
        bool sw = false;
        alloc.assign(f, &sw);
        add_traffic(ec, tr.step(f, sw));
    });
    return ec;
}

FunctionalRun execute_functional(const GemmProblem &p, const DpuConfig &cfg, Dataflow df,
        const std::optional<NoiseModel> &noise) {
    p.validate();
    if (p.I.is_signed) throw ValidationError("activations must be unsigned");
    const GemmDims g = p.dims();
    const Schedule s = plan_schedule(g, cfg, df);

    TaomConfig taom = TaomConfig::fitted(p.I.bits, p.W.is_signed ? p.W.bits : p.W.bits + 1,
            cfg.datarate);
    taom.validate();
    const bool bpca = cfg.has_bpca();
    const std::size_t tf = ceil_div(g.K, cfg.N);

    std::vector<CapacitorBank> banks;
    banks.reserve(cfg.M);
    const double ratio = double(temporal_window(g, cfg, df));
    for (std::size_t m = 0; m < cfg.M; ++m)
        banks.emplace_back(bpca ? cfg.p : 1, bpca ? ratio : 1.0);

    std::optional<NoiseSource> ns;
    if (noise) ns.emplace(*noise);
    const double unit = double(taom.max_width_code()) * taom.max_amp_code();
    const double fs = unit * cfg.N * (bpca ? tf : 1);

    FunctionalRun run;
    run.output = QuantMatrix(g.C, g.D, 32, true);
    // reduction network state for architectures without in-situ accumulation
    std::vector<std::int64_t> reduce(bpca ? 0 : g.C * g.D, 0);
    std::vector<PwamSymbol> lane(cfg.N);
    std::uint32_t prev_cap = 0;

    for (const auto &f : s.frames) {
        if (f.capacitor && prev_cap && f.capacitor != prev_cap) ++run.capacitor_switches;
        if (f.capacitor) prev_cap = f.capacitor;
        for (std::size_t m = 0; m < cfg.M; ++m) {
            const std::size_t r = df == Dataflow::WS ? f.rows.begin + m : f.rows.begin;
            const std::size_t c = df == Dataflow::WS ? f.cols.begin : f.cols.begin + m;
            if (!f.rows.contains(r) || !f.cols.contains(c)) continue;  // padded DPE
            for (std::size_t j = 0; j < cfg.N; ++j) {
                const std::size_t k = f.ks.begin + j;
                lane[j] = f.ks.contains(k) ? taom_modulate(p.I.at(r, k), p.W.at(k, c), taom)
                                           : PwamSymbol{0, 0, 1, taom.unit_width_ps};
            }
            CapacitorBank &bank = banks[m];
            if (bpca) bank.select_capacitor(f.capacitor);
            bank.tir_accumulate(bpd_superpose(lane));
            if (bpca) {
                if (f.is_final_for_output) {
                    const Readout ro = bank.adc_readout(ns ? &*ns : nullptr, fs);
                    run.output.at(r, c) = std::int32_t(ro.code);
                }
            } else {
                const Readout ro = bank.adc_readout(ns ? &*ns : nullptr, fs);
                std::int64_t &acc = reduce[r * g.D + c];
                acc += ro.code;
                if (f.is_final_for_output) {
                    run.output.at(r, c) = std::int32_t(acc);
                    acc = 0;
                }
            }
        }
    }
    for (const auto &b : banks) run.adc_readouts += b.conversions();
    return run;
}

std::string schedule_trace(const Schedule &s) {
    std::ostringstream os;
    os << "# heana schedule trace v1\n";
    os << "# dataflow=" << to_string(s.dataflow) << " arch=" << to_string(s.config.arch)
       << " N=" << s.config.N << " M=" << s.config.M << " p=" << s.config.p << " C=" << s.dims.C
       << " K=" << s.dims.K << " D=" << s.dims.D << "\n";
    os << "# frame outer tf ts rows ks cols cap final\n";
    for (const auto &f : s.frames) {
        os << f.frame_id << ' ' << f.outer_iter << ' ' << f.tf_cycle << ' ' << f.ts_cycle << ' '
           << f.rows.begin << ':' << f.rows.end << ' ' << f.ks.begin << ':' << f.ks.end << ' '
           << f.cols.begin << ':' << f.cols.end << ' ' << f.capacitor << ' '
           << (f.is_final_for_output ? 1 : 0) << '\n';
    }
    return os.str();
}

} // namespace heana
