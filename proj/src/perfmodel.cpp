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

#include "heana/perfmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "heana/error.hpp"
#include "heana/parallel.hpp"

namespace heana {

namespace {

struct ComponentKey {
    const char *name;
    Component PeripheralModel::*member;
    bool has_latency;
    bool has_area;
};

constexpr ComponentKey kComponents[] = {
    {"reduction_network", &PeripheralModel::reduction_network, true, true},
    {"activation", &PeripheralModel::activation, true, true},
    {"io_interface", &PeripheralModel::io_interface, true, true},
    {"pooling", &PeripheralModel::pooling, true, true},
    {"edram", &PeripheralModel::edram, true, true},
    {"bus", &PeripheralModel::bus, false, true},
    {"router", &PeripheralModel::router, false, true},
    {"dac_baseline", &PeripheralModel::dac_baseline, true, true},
    {"dac_heana", &PeripheralModel::dac_heana, true, true},
    {"bpca", &PeripheralModel::bpca, true, true},
    {"adc", &PeripheralModel::adc, true, true},
    {"eo_tuning", &PeripheralModel::eo_tuning, true, false},
    {"to_tuning", &PeripheralModel::to_tuning, true, false},
    {"capacitor_switch", &PeripheralModel::capacitor_switch, true, false},
};

struct ScalarKey {
    const char *name;
    double PeripheralModel::*member;
};

constexpr ScalarKey kScalars[] = {
    {"clock_GHz", &PeripheralModel::clock_hz},
    {"bus.latency_cycles", &PeripheralModel::bus_cycles},
    {"router.latency_cycles", &PeripheralModel::router_cycles},
    {"edram_ports", &PeripheralModel::edram_ports},
    {"taom.area_mm2", &PeripheralModel::taom_area},
    {"filter.area_mm2", &PeripheralModel::filter_area},
    {"mrm.area_mm2", &PeripheralModel::mrm_area},
    {"lane_amw.area_mm2", &PeripheralModel::lane_area_amw},
    {"lane_maw.area_mm2", &PeripheralModel::lane_area_maw},
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

void PeripheralModel::validate() const {
    for (const auto &c : kComponents) {
        const Component &v = this->*c.member;
        if (!(v.power_w > 0) || (c.has_latency && !(v.latency_s > 0)) || (c.has_area && !(v.area_mm2 > 0)))
            throw ValidationError(std::string("peripheral '") + c.name + "' needs positive values");
    }
    for (const auto &s : kScalars)
        if (!(this->*s.member > 0))
            throw ValidationError(std::string("peripheral '") + s.name + "' must be positive");
}

PeripheralModel PeripheralModel::from_config(const KvConfig &cfg) {
    std::vector<std::string> names;
    for (const auto &c : kComponents) {
        names.push_back(std::string(c.name) + ".power_mW");
        if (c.has_latency) names.push_back(std::string(c.name) + ".latency_ns");
        if (c.has_area) names.push_back(std::string(c.name) + ".area_mm2");
    }
    for (const auto &s : kScalars) names.push_back(s.name);
    std::vector<std::string_view> known(names.begin(), names.end());
    cfg.require_known(known);

    PeripheralModel pm;
    for (const auto &c : kComponents) {
        Component &v = pm.*c.member;
        const std::string n(c.name);
        if (auto x = cfg.number(n + ".power_mW")) v.power_w = *x * 1e-3;
        if (auto x = cfg.number(n + ".latency_ns")) v.latency_s = *x * 1e-9;
        if (auto x = cfg.number(n + ".area_mm2")) v.area_mm2 = *x;
    }
    for (const auto &s : kScalars)
        if (auto x = cfg.number(s.name)) pm.*s.member = *x;
    if (auto x = cfg.number("clock_GHz")) pm.clock_hz = *x * 1e9;
    pm.bus.latency_s = pm.bus_cycles / pm.clock_hz;
    pm.router.latency_s = pm.router_cycles / pm.clock_hz;
    pm.validate();
    return pm;
}

std::string PeripheralModel::to_config() const {
    std::ostringstream os;
    for (const auto &c : kComponents) {
        const Component &v = this->*c.member;
        os << c.name << ".power_mW = " << fmt(v.power_w * 1e3) << "\n";
        if (c.has_latency) os << c.name << ".latency_ns = " << fmt(v.latency_s * 1e9) << "\n";
        if (c.has_area) os << c.name << ".area_mm2 = " << fmt(v.area_mm2) << "\n";
    }
    for (const auto &s : kScalars) {
        const double v = this->*s.member;
        os << s.name << " = " << fmt(s.member == &PeripheralModel::clock_hz ? v / 1e9 : v) << "\n";
    }
    return os.str();
}

void AcceleratorConfig::validate() const {
    dpu.validate();
    peripherals.validate();
    if (!dpu_count || !dpus_per_tile) throw ValidationError("dpu_count and dpus_per_tile must be >= 1");
    if (!(tir_rate_hz > 0) || !(laser_power_w >= 0)) throw ValidationError("bad TIR rate or laser power");
}

AcceleratorConfig published_preset(Arch a, double datarate) {
    struct Row { std::size_t n, count; };
    static const std::map<std::pair<int, int>, Row> rows = {
        {{0, 1}, {83, 50}}, {{0, 5}, {42, 180}}, {{0, 10}, {30, 320}},
        {{1, 1}, {36, 207}}, {{1, 5}, {17, 900}}, {{1, 10}, {12, 1950}},
        {{2, 1}, {43, 280}}, {{2, 5}, {21, 1100}}, {{2, 10}, {15, 1610}},
    };
    const int base = a == Arch::HEANA ? 0 : (a == Arch::AMW || a == Arch::AMW_BPCA) ? 1 : 2;
    const double gs = datarate / 1e9;
    const int key = int(std::lround(gs));
    auto it = rows.find({base, key});
    if (it == rows.end() || std::abs(gs - key) > 1e-9)
        throw ValidationError("no published DPU size for " + fmt(gs) + " GS/s (use 1, 5 or 10)");
    AcceleratorConfig acc;
    acc.dpu.arch = a;
    acc.dpu.N = acc.dpu.M = it->second.n;
    acc.dpu.datarate = datarate;
    acc.dpu_count = it->second.count;
    return acc;
}

double dpu_area(const DpuConfig &d, const PeripheralModel &pm) {
    const double n = double(d.N), m = double(d.M);
    const bool taom = arch_uses_taom(d.arch);
    double lane, per_wavelength;
    if (taom) {
        lane = pm.taom_area + 2 * pm.filter_area + pm.dac_heana.area_mm2;
        per_wavelength = 0;
    } else {
        const bool amw = d.arch == Arch::AMW || d.arch == Arch::AMW_BPCA;
        lane = (amw ? pm.lane_area_amw : pm.lane_area_maw) + pm.dac_baseline.area_mm2;
        per_wavelength = pm.mrm_area + pm.dac_baseline.area_mm2;
    }
    const double per_dpe = pm.adc.area_mm2 + (d.has_bpca() ? pm.bpca.area_mm2 : pm.reduction_network.area_mm2);
    return n * m * lane + m * per_dpe + n * per_wavelength;
}

std::vector<std::size_t> area_scale(const AcceleratorConfig &reference, const std::vector<DpuConfig> &others) {
    const double total = double(reference.dpu_count) * dpu_area(reference.dpu, reference.peripherals);
    std::vector<std::size_t> out;
    for (const auto &d : others) {
        // tolerance keeps exact ratios from flooring one below
        const double r = total / dpu_area(d, reference.peripherals);
        out.push_back(std::size_t(std::floor(r * (1 + 1e-12))));
    }
    return out;
}

FrameTiming frame_latency(const FrameTraffic &t, bool final, std::size_t window, const AcceleratorConfig &acc) {
    const PeripheralModel &pm = acc.peripherals;
    const bool bpca = acc.dpu.has_bpca();
    FrameTiming ft;
    double rate = acc.dpu.datarate;
    if (bpca) {
        const double cap = acc.tir_rate_hz * double(std::max<std::size_t>(window, 1));
        if (rate > cap) {
            rate = cap;
            ft.rate_limited = true;
        }
    }
    ft.compute_s = 1.0 / rate;
    // operand prefetch and posted output writes overlap with compute
    ft.memory_s = double(t.input_txn + t.weight_txn + t.output_txn) * pm.edram.latency_s / pm.edram_ports;
    double overlap = std::max(ft.compute_s, ft.memory_s);
    double serial = 0;
    if (bpca) {
        if (t.switched) serial += pm.capacitor_switch.latency_s;
        if (final) serial += pm.adc.latency_s;
    } else {
        // every psum is converted; the ADC is pipelined at one conversion per frame
        overlap = std::max(overlap, pm.adc.latency_s);
        // psum spills and refills sit on the dependency path
        serial += double(t.psum_write_txn + t.psum_read_txn) * pm.edram.latency_s;
        serial += t.reduction_depth * pm.reduction_network.latency_s;
    }
    ft.latency_s = overlap + serial;
    return ft;
}

std::string SimReport::label() const {
    return std::string(to_string(arch)) + "-" + std::string(to_string(dataflow)) + "@" + fmt(datarate / 1e9);
}

namespace {

struct LayerResult {
    EventCounts counts;
    double latency_s = 0;
    std::uint64_t limited = 0;
    double activation_ops = 0;
    double pooling_ops = 0;
};

struct DpuState {
    CapacitorAllocator alloc;
    DpuTracker tracker;
    double latency = 0;
};

LayerResult run_layer(const LayerWork &lw, const AcceleratorConfig &acc, Dataflow df) {
    LayerResult r;
    const PeripheralModel &pm = acc.peripherals;
    if (lw.kind == LayerKind::Pool) {
        r.pooling_ops = double(lw.elements);
        return r;
    }
    if (lw.kind == LayerKind::Activation) {
        r.activation_ops = double(lw.elements);
        return r;
    }
    const GemmDims &g = lw.dims;
    const LoopBounds b = loop_bounds(g, acc.dpu, df);
    const std::size_t used = std::min(acc.dpu_count, b.outer);
    const std::size_t window = temporal_window(g, acc.dpu, df);
    std::vector<DpuState> dpus;
    dpus.reserve(used);
    for (std::size_t i = 0; i < used; ++i)
        dpus.push_back({CapacitorAllocator(g, acc.dpu, df), DpuTracker(g, acc.dpu, df), 0.0});
    try {
        for_each_frame(g, acc.dpu, df, [&](const ComputationFrame &f) {
            DpuState &s = dpus[f.outer_iter % used];
            bool sw = false;
            s.alloc.assign(f, &sw);
            const FrameTraffic t = s.tracker.step(f, sw);
            const FrameTiming ft = frame_latency(t, f.is_final_for_output, window, acc);
            s.latency += ft.latency_s;
            if (ft.rate_limited) ++r.limited;
            add_traffic(r.counts, t);
        });
    } catch (const CapacityExceeded &e) {
        throw CapacityExceeded(e.required(), e.p(), lw.name);
    }
    double worst = 0;
    for (const auto &s : dpus) worst = std::max(worst, s.latency);
    // results leave through the tile bus and one router hop
    r.latency_s = worst + pm.bus.latency_s + pm.router.latency_s;
    r.activation_ops = double(r.counts.output_writes);
    return r;
}

} // namespace

SimReport evaluate(const std::vector<LayerWork> &layers, const AcceleratorConfig &acc, Dataflow df,
        std::size_t batch, std::string workload, unsigned threads) {
    acc.validate();
    if (!batch) throw ValidationError("batch must be >= 1");
    if (layers.empty()) throw ValidationError("workload has no layers");

    std::vector<LayerResult> res(layers.size());
    parallel_for(layers.size(), threads, [&](std::size_t i) { res[i] = run_layer(layers[i], acc, df); });

    const PeripheralModel &pm = acc.peripherals;
    SimReport rep;
    rep.workload = std::move(workload);
    rep.arch = acc.dpu.arch;
    rep.dataflow = df;
    rep.datarate = acc.dpu.datarate;
    rep.N = acc.dpu.N;
    rep.M = acc.dpu.M;
    rep.dpu_count = acc.dpu_count;
    rep.batch = batch;

    double image_latency = 0, act_ops = 0, pool_ops = 0;
    EventCounts ec;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerResult &r = res[i];
        image_latency += r.latency_s;
        act_ops += r.activation_ops;
        pool_ops += r.pooling_ops;
        ec += r.counts;
        rep.layers.push_back({layers[i].name, r.latency_s, r.counts.frames, r.limited});
        if (r.limited) {
            rep.violations.push_back("layer " + layers[i].name + ": " + std::to_string(r.limited)
                    + " frames throttled by the TIR rate cap (" + fmt(acc.tir_rate_hz / 1e9)
                    + " GHz x window " + std::to_string(temporal_window(layers[i].dims, acc.dpu, df))
                    + " < " + fmt(acc.dpu.datarate / 1e9) + " GS/s)");
        }
    }
    const double nb = double(batch);
    rep.latency_s = image_latency * nb;
    rep.counts = ec;
    auto scale = [&](std::uint64_t v) { return v * std::uint64_t(batch); };
    rep.counts.frames = scale(ec.frames);
    rep.counts.adc_conversions = scale(ec.adc_conversions);
    rep.counts.dac_conversions = scale(ec.dac_conversions);
    rep.counts.input_reads = scale(ec.input_reads);
    rep.counts.weight_reads = scale(ec.weight_reads);
    rep.counts.output_writes = scale(ec.output_writes);
    rep.counts.psum_reads = scale(ec.psum_reads);
    rep.counts.psum_writes = scale(ec.psum_writes);
    rep.counts.capacitor_switches = scale(ec.capacitor_switches);
    rep.counts.reduction_ops = scale(ec.reduction_ops);
    rep.counts.buffer_transactions = scale(ec.buffer_transactions);

    const EventCounts &c = rep.counts;
    const double T = rep.latency_s;
    const bool taom = arch_uses_taom(acc.dpu.arch);
    const double dpus = double(acc.dpu_count);
    const double tiles = double(acc.tiles());
    auto &bd = rep.energy_breakdown;
    bd.emplace_back("laser", dpus * double(acc.dpu.N) * acc.laser_power_w * T);
    bd.emplace_back("dac", double(c.dac_conversions) * (taom ? pm.dac_heana : pm.dac_baseline).event_energy());
    bd.emplace_back("adc", double(c.adc_conversions) * pm.adc.event_energy());
    bd.emplace_back("bpca", acc.dpu.has_bpca() ? dpus * double(acc.dpu.M) * pm.bpca.power_w * T : 0.0);
    bd.emplace_back("capacitor_switch", double(c.capacitor_switches) * pm.capacitor_switch.event_energy());
    bd.emplace_back("reduction_network", double(c.reduction_ops) * pm.reduction_network.event_energy());
    bd.emplace_back("edram", double(c.buffer_transactions) * pm.edram.event_energy());
    bd.emplace_back("eo_tuning", double(c.input_reads + c.weight_reads) * pm.eo_tuning.event_energy());
    // thermal bias of every weight ring, once per run
    bd.emplace_back("to_tuning", taom ? 0.0 : dpus * double(acc.dpu.N * acc.dpu.M) * pm.to_tuning.event_energy());
    bd.emplace_back("activation", act_ops * nb * pm.activation.event_energy());
    bd.emplace_back("pooling", pool_ops * nb * pm.pooling.event_energy());
    bd.emplace_back("io_interface", pm.io_interface.power_w * T);
    bd.emplace_back("bus", tiles * pm.bus.power_w * T);
    bd.emplace_back("router", tiles * pm.router.power_w * T);
    rep.energy_j = 0;
    for (const auto &[k, v] : bd) rep.energy_j += v;

    rep.fps = nb / T;
    rep.fps_per_w = rep.fps / (rep.energy_j / T);
    return rep;
}

ComparisonTable compare(const std::vector<SimReport> &reports, const std::string &baseline) {
    if (reports.empty()) throw ValidationError("nothing to compare");
    ComparisonTable t;
    t.baseline = baseline;
    const bool fixed = baseline.find('/') != std::string::npos;
    auto find_base = [&](const std::string &workload) -> const SimReport & {
        for (const auto &r : reports)
            if (fixed ? r.id() == baseline : (r.label() == baseline && r.workload == workload)) return r;
        throw ValidationError("missing baseline '" + baseline + "'"
                + (fixed ? std::string() : " for workload '" + workload + "'"));
    };
    std::vector<std::string> order;
    for (const auto &r : reports) {
        const SimReport &b = find_base(r.workload);
        CompareRow row{r.label(), r.workload, r.fps / b.fps, r.fps_per_w / b.fps_per_w,
                r.latency_s / b.latency_s, r.energy_j / b.energy_j};
        if (&r == &b) row.fps = row.fps_per_w = row.latency = row.energy = 1.0;
        t.rows.push_back(row);
        if (std::find(order.begin(), order.end(), row.label) == order.end()) order.push_back(row.label);
    }
    for (const auto &label : order) {
        double lf = 0, lw = 0, ll = 0, le = 0;
        std::size_t n = 0;
        for (const auto &row : t.rows)
            if (row.label == label) {
                lf += std::log(row.fps);
                lw += std::log(row.fps_per_w);
                ll += std::log(row.latency);
                le += std::log(row.energy);
                ++n;
            }
        const double k = double(n);
        t.gmean.push_back({label, "gmean", std::exp(lf / k), std::exp(lw / k), std::exp(ll / k), std::exp(le / k)});
    }
    return t;
}

std::string reports_csv(const std::vector<SimReport> &reports) {
    std::ostringstream os;
    os << "workload,arch,dataflow,datarate_gsps,N,M,dpus,batch,latency_s,energy_j,fps,fps_per_w,"
          "frames,adc,dac,input_reads,weight_reads,output_writes,psum_reads,psum_writes,"
          "capacitor_switches,reduction_ops,buffer_transactions,violations\n";
    for (const auto &r : reports) {
        const EventCounts &c = r.counts;
        os << r.workload << ',' << to_string(r.arch) << ',' << to_string(r.dataflow) << ','
           << fmt(r.datarate / 1e9) << ',' << r.N << ',' << r.M << ',' << r.dpu_count << ',' << r.batch << ','
           << fmt(r.latency_s) << ',' << fmt(r.energy_j) << ',' << fmt(r.fps) << ',' << fmt(r.fps_per_w) << ','
           << c.frames << ',' << c.adc_conversions << ',' << c.dac_conversions << ',' << c.input_reads << ','
           << c.weight_reads << ',' << c.output_writes << ',' << c.psum_reads << ',' << c.psum_writes << ','
           << c.capacitor_switches << ',' << c.reduction_ops << ',' << c.buffer_transactions << ','
           << r.violations.size() << '\n';
    }
    return os.str();
}

std::string comparison_csv(const ComparisonTable &t) {
    std::ostringstream os;
    os << "label,workload,fps,fps_per_w,latency,energy\n";
    auto line = [&](const CompareRow &r) {
        os << r.label << ',' << r.workload << ',' << fmt(r.fps) << ',' << fmt(r.fps_per_w) << ','
           << fmt(r.latency) << ',' << fmt(r.energy) << '\n';
    };
    for (const auto &r : t.rows) line(r);
    for (const auto &r : t.gmean) line(r);
    return os.str();
}

} // namespace heana
