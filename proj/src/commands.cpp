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

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "heana/dataflow.hpp"
#include "heana/frontend.hpp"
#include "heana/linkbudget.hpp"
#include "heana/parallel.hpp"

namespace heana {

using ojson = nlohmann::ordered_json;

namespace {

bool json_format(const RunOptions &o) {
    if (o.format == "csv") return false;
    if (o.format == "json-like" || o.format == "json") return true;
    throw ValidationError("unknown format '" + o.format + "' (csv or json-like)");
}

ojson counts_json(const EventCounts &c) {
    ojson j;
    j["frames"] = c.frames;
    j["adc_conversions"] = c.adc_conversions;
    j["dac_conversions"] = c.dac_conversions;
    j["input_reads"] = c.input_reads;
    j["weight_reads"] = c.weight_reads;
    j["output_writes"] = c.output_writes;
    j["psum_reads"] = c.psum_reads;
    j["psum_writes"] = c.psum_writes;
    j["capacitor_switches"] = c.capacitor_switches;
    j["reduction_ops"] = c.reduction_ops;
    j["buffer_transactions"] = c.buffer_transactions;
    return j;
}

EventCounts counts_from(const ojson &j) {
    EventCounts c;
    c.frames = j.at("frames");
    c.adc_conversions = j.at("adc_conversions");
    c.dac_conversions = j.at("dac_conversions");
    c.input_reads = j.at("input_reads");
    c.weight_reads = j.at("weight_reads");
    c.output_writes = j.at("output_writes");
    c.psum_reads = j.at("psum_reads");
    c.psum_writes = j.at("psum_writes");
    c.capacitor_switches = j.at("capacitor_switches");
    c.reduction_ops = j.at("reduction_ops");
    c.buffer_transactions = j.at("buffer_transactions");
    return c;
}

std::vector<WorkloadManifest> load_workloads(const RunOptions &o) {
    if (o.workloads.empty()) throw ValidationError("no --workload given");
    std::vector<WorkloadManifest> out;
    for (const auto &w : o.workloads) out.push_back(parse_manifest(w));
    return out;
}

std::size_t batch_for(const RunOptions &o, const WorkloadManifest &m) { return o.batch ? o.batch : m.batch; }

} // namespace

LinkBudgetParams load_params(const RunOptions &o) {
    if (o.params.empty()) return {};
    return LinkBudgetParams::from_config(KvConfig::load(o.params));
}

PeripheralModel load_peripherals(const RunOptions &o) {
    if (o.peripherals.empty()) return {};
    return PeripheralModel::from_config(KvConfig::load(o.peripherals));
}

AcceleratorConfig accelerator_for(const RunOptions &o, Arch a, double gsps) {
    AcceleratorConfig acc;
    try {
        acc = published_preset(a, gsps * 1e9);
    } catch (const ValidationError &) {
        // off-grid datarate: size from the link budget at the requested precision
        if (!o.N) throw;
        acc.dpu.arch = a;
        acc.dpu.datarate = gsps * 1e9;
    }
    if (o.N) acc.dpu.N = *o.N;
    acc.dpu.M = o.M ? *o.M : (o.N ? *o.N : acc.dpu.M);
    if (o.p) acc.dpu.p = *o.p;
    if (o.dpus) acc.dpu_count = *o.dpus;
    acc.peripherals = load_peripherals(o);
    acc.tir_rate_hz = o.tir_ghz * 1e9;
    acc.laser_power_w = dbm_to_w(load_params(o).P_Laser);
    acc.validate();
    return acc;
}

std::string cmd_scale(const RunOptions &o) {
    const auto pts = scale_sweep(load_params(o));
    if (!json_format(o)) return scale_csv(pts);
    ojson arr = ojson::array();
    for (const auto &s : pts)
        arr.push_back({{"arch", to_string(s.arch)}, {"B", s.B}, {"DR", s.DR}, {"N_max", s.N_max}});
    return arr.dump(2) + "\n";
}

std::string cmd_plan(const RunOptions &o) {
    const Arch a = o.arch.value_or(Arch::HEANA);
    const Dataflow df = o.dataflow.value_or(Dataflow::OS);
    const bool js = json_format(o);
    std::ostringstream os;

    auto header = "layer,C,K,D,frames,adc,dac,input_reads,weight_reads,output_writes,psum_reads,"
                  "psum_writes,capacitor_switches,reduction_ops,buffer_transactions,required_p\n";
    auto csv_row = [&](const std::string &name, const GemmDims &g, const EventCounts &c, std::size_t req) {
        os << name << ',' << g.C << ',' << g.K << ',' << g.D << ',' << c.frames << ',' << c.adc_conversions
           << ',' << c.dac_conversions << ',' << c.input_reads << ',' << c.weight_reads << ','
           << c.output_writes << ',' << c.psum_reads << ',' << c.psum_writes << ','
           << c.capacitor_switches << ',' << c.reduction_ops << ',' << c.buffer_transactions << ','
           << req << '\n';
    };
    auto row_json = [&](const std::string &name, const GemmDims &g, const EventCounts &c, std::size_t req) {
        ojson j;
        j["layer"] = name;
        j["C"] = g.C;
        j["K"] = g.K;
        j["D"] = g.D;
        j["counts"] = counts_json(c);
        j["required_p"] = req;
        return j;
    };

    if (o.dims) {
        DpuConfig cfg;
        cfg.arch = a;
        cfg.datarate = o.datarate_gsps.value_or(1.0) * 1e9;
        if (o.N) cfg.N = *o.N;
        cfg.M = o.M ? *o.M : cfg.N;
        if (o.p) cfg.p = *o.p;
        const Schedule s = plan_schedule(*o.dims, cfg, df);
        const std::size_t req = required_capacitors(*o.dims, cfg, df);
        if (js) {
            ojson j = row_json("gemm", *o.dims, s.counters, req);
            if (o.trace) j["trace"] = schedule_trace(s);
            return j.dump(2) + "\n";
        }
        if (o.trace) os << schedule_trace(s);
        os << header;
        csv_row("gemm", *o.dims, s.counters, req);
        return os.str();
    }

    const auto ws = load_workloads(o);
    const AcceleratorConfig acc = accelerator_for(o, a, o.datarate_gsps.value_or(1.0));
    ojson arr = ojson::array();
    if (!js) os << header;
    for (const auto &m : ws)
        for (const auto &L : m.layers) {
            if (L.kind != LayerKind::Conv && L.kind != LayerKind::Fc) continue;
            EventCounts c;
            try {
                c = count_events(L.dims, acc.dpu, df);
            } catch (const CapacityExceeded &e) {
                throw CapacityExceeded(e.required(), e.p(), L.name);
            }
            const std::size_t req = required_capacitors(L.dims, acc.dpu, df);
            const std::string name = ws.size() > 1 ? m.model + "/" + L.name : L.name;
            if (js)
                arr.push_back(row_json(name, L.dims, c, req));
            else
                csv_row(name, L.dims, c, req);
        }
    return js ? arr.dump(2) + "\n" : os.str();
}

namespace {

// Seeded random operands for every GEMM layer, checked against the oracle.
void check_functional(const WorkloadManifest &m, const AcceleratorConfig &acc, Dataflow df,
        const RunOptions &o, unsigned threads) {
    std::vector<const ManifestLayer *> gemms;
    for (const auto &L : m.layers)
        if (L.kind == LayerKind::Conv || L.kind == LayerKind::Fc) gemms.push_back(&L);
    std::vector<std::string> bad(gemms.size());
    parallel_for(gemms.size(), threads, [&](std::size_t i) {
        const ManifestLayer &L = *gemms[i];
        const std::uint64_t s = o.seed * 0x9E3779B97F4A7C15ull + i;
        GemmProblem p{random_matrix(L.dims.C, L.dims.K, m.bits, false, s),
                random_matrix(L.dims.K, L.dims.D, m.bits, true, s ^ 0xA5A5A5A5ull)};
        const QuantMatrix want = gemm_exact(p);
        std::optional<NoiseModel> noise;
        if (o.mae_bits) noise = NoiseModel{*o.mae_bits, s};
        FunctionalRun got;
        try {
            got = execute_functional(p, acc.dpu, df, noise);
        } catch (const CapacityExceeded &e) {
            throw CapacityExceeded(e.required(), e.p(), L.name);
        }
        if (!(got.output.data == want.data)) bad[i] = L.name;
    });
    std::string msg;
    for (const auto &b : bad)
        if (!b.empty()) msg += (msg.empty() ? "" : ", ") + b;
    if (!msg.empty()) throw FunctionalMismatch("functional check failed for layers: " + msg);
}

} // namespace

std::string cmd_simulate(const RunOptions &o, unsigned threads) {
    const Arch a = o.arch.value_or(Arch::HEANA);
    const Dataflow df = o.dataflow.value_or(Dataflow::OS);
    const auto ws = load_workloads(o);
    const AcceleratorConfig acc = accelerator_for(o, a, o.datarate_gsps.value_or(1.0));
    std::vector<SimReport> reps;
    for (const auto &m : ws) {
        if (o.check_functional) check_functional(m, acc, df, o, threads);
        reps.push_back(evaluate(m.work(), acc, df, batch_for(o, m), m.model, threads));
    }
    return json_format(o) ? report_json(reps) : reports_csv(reps);
}

std::string cmd_sweep(const RunOptions &o, unsigned threads) {
    const auto ws = load_workloads(o);
    std::vector<Arch> archs;
    if (o.arch) archs.push_back(*o.arch); else archs.assign(std::begin(kAllArchs), std::end(kAllArchs));
    std::vector<Dataflow> dfs;
    if (o.dataflow) dfs.push_back(*o.dataflow); else dfs.assign(std::begin(kAllDataflows), std::end(kAllDataflows));
    std::vector<double> drs;
    if (o.datarate_gsps) drs.push_back(*o.datarate_gsps); else drs = {1, 5, 10};

    struct Job { const WorkloadManifest *m; Arch a; Dataflow df; double dr; };
    std::vector<Job> jobs;
    for (const auto &m : ws)
        for (double dr : drs)
            for (Arch a : archs)
                for (Dataflow df : dfs) jobs.push_back({&m, a, df, dr});
    std::vector<SimReport> reps(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t i) {
        const Job &j = jobs[i];
        const AcceleratorConfig acc = accelerator_for(o, j.a, j.dr);
        reps[i] = evaluate(j.m->work(), acc, j.df, batch_for(o, *j.m), j.m->model, 0);
    });
    if (!o.baseline.empty()) {
        const ComparisonTable t = compare(reps, o.baseline);
        return comparison_csv(t);
    }
    return json_format(o) ? report_json(reps) : reports_csv(reps);
}

std::string cmd_compare(const RunOptions &o) {
    if (o.reports.empty()) throw ValidationError("no reports given");
    if (o.baseline.empty()) throw ValidationError("no --baseline given");
    std::vector<SimReport> all;
    for (const auto &path : o.reports) {
        auto r = parse_report_json(read_file(path), path);
        all.insert(all.end(), r.begin(), r.end());
    }
    const ComparisonTable t = compare(all, o.baseline);
    if (!json_format(o)) return comparison_csv(t);
    ojson j;
    j["baseline"] = t.baseline;
    auto rows = [](const std::vector<CompareRow> &v) {
        ojson arr = ojson::array();
        for (const auto &r : v)
            arr.push_back({{"label", r.label}, {"workload", r.workload}, {"fps", r.fps},
                    {"fps_per_w", r.fps_per_w}, {"latency", r.latency}, {"energy", r.energy}});
        return arr;
    };
    j["rows"] = rows(t.rows);
    j["gmean"] = rows(t.gmean);
    return j.dump(2) + "\n";
}

std::string report_json(const std::vector<SimReport> &reports) {
    ojson arr = ojson::array();
    for (const auto &r : reports) {
        ojson j;
        j["workload"] = r.workload;
        j["arch"] = to_string(r.arch);
        j["dataflow"] = to_string(r.dataflow);
        j["datarate"] = r.datarate;
        j["N"] = r.N;
        j["M"] = r.M;
        j["dpu_count"] = r.dpu_count;
        j["batch"] = r.batch;
        j["latency_s"] = r.latency_s;
        j["energy_j"] = r.energy_j;
        j["fps"] = r.fps;
        j["fps_per_w"] = r.fps_per_w;
        ojson bd;
        for (const auto &[k, v] : r.energy_breakdown) bd[k] = v;
        j["energy_breakdown_j"] = bd;
        j["counts"] = counts_json(r.counts);
        j["violations"] = r.violations;
        ojson layers = ojson::array();
        for (const auto &L : r.layers)
            layers.push_back({{"name", L.name}, {"latency_s", L.latency_s}, {"frames", L.frames},
                    {"rate_limited_frames", L.rate_limited_frames}});
        j["layers"] = layers;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

std::vector<SimReport> parse_report_json(std::string_view text, const std::string &source) {
    std::vector<SimReport> out;
    try {
        const ojson doc = ojson::parse(text);
        const ojson arr = doc.is_array() ? doc : ojson::array({doc});
        for (const auto &j : arr) {
            SimReport r;
            r.workload = j.at("workload").get<std::string>();
            r.arch = parse_arch(j.at("arch").get<std::string>());
            r.dataflow = parse_dataflow(j.at("dataflow").get<std::string>());
            r.datarate = j.at("datarate");
            r.N = j.at("N");
            r.M = j.at("M");
            r.dpu_count = j.at("dpu_count");
            r.batch = j.at("batch");
            r.latency_s = j.at("latency_s");
            r.energy_j = j.at("energy_j");
            r.fps = j.at("fps");
            r.fps_per_w = j.at("fps_per_w");
            for (const auto &[k, v] : j.at("energy_breakdown_j").items()) r.energy_breakdown.emplace_back(k, v.get<double>());
            r.counts = counts_from(j.at("counts"));
            r.violations = j.at("violations").get<std::vector<std::string>>();
            for (const auto &L : j.at("layers"))
                r.layers.push_back({L.at("name"), L.at("latency_s"), L.at("frames"), L.at("rate_limited_frames")});
            out.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(source, 0, "", std::string("report: ") + e.what());
    }
    return out;
}

} // namespace heana
