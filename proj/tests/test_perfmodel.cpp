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

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "heana/error.hpp"
#include "heana/kvconfig.hpp"
#include "heana/perfmodel.hpp"

using namespace heana;

namespace {

AcceleratorConfig acc_of(Arch a, std::size_t N, double dr = 1e9, std::size_t dpus = 1) {
    AcceleratorConfig acc;
    acc.dpu.arch = a;
    acc.dpu.N = acc.dpu.M = N;
    acc.dpu.datarate = dr;
    acc.dpu_count = dpus;
    return acc;
}

std::vector<LayerWork> one_gemm(GemmDims g) { return {{"g", LayerKind::Conv, g, 0}}; }

double part(const SimReport &r, const std::string &name) {
    for (auto &[k, v] : r.energy_breakdown)
        if (k == name) return v;
    FAIL("no such component " << name);
    return 0;
}

} // namespace

TEST_CASE("peripheral defaults are the published figures") {
    const PeripheralModel pm;
    CHECK(pm.reduction_network.power_w == doctest::Approx(0.050e-3));
    CHECK(pm.reduction_network.latency_s == doctest::Approx(3.125e-9));
    CHECK(pm.io_interface.power_w == doctest::Approx(140.18e-3));
    CHECK(pm.edram.power_w == doctest::Approx(41.1e-3));
    CHECK(pm.edram.latency_s == doctest::Approx(1.56e-9));
    CHECK(pm.edram.area_mm2 == doctest::Approx(0.166));
    CHECK(pm.bus.latency_s == doctest::Approx(5 / pm.clock_hz));
    CHECK(pm.router.latency_s == doctest::Approx(2 / pm.clock_hz));
    CHECK(pm.dac_heana.power_w == doctest::Approx(26e-3));
    CHECK(pm.dac_baseline.power_w == doctest::Approx(12.5e-3));
    CHECK(pm.bpca.power_w == doctest::Approx(1.15e-3));
    CHECK(pm.eo_tuning.power_w == doctest::Approx(80e-6));
    CHECK(pm.to_tuning.latency_s == doctest::Approx(4e-6));
    CHECK(pm.capacitor_switch.power_w == doctest::Approx(0.041e-3));
    CHECK(pm.capacitor_switch.latency_s == doctest::Approx(2.5e-9));
}

TEST_CASE("peripheral config round trip") {
    PeripheralModel pm;
    pm.adc.power_w = 3e-3;
    pm.edram.latency_s = 2e-9;
    const PeripheralModel back = PeripheralModel::from_config(KvConfig::parse(pm.to_config()));
    CHECK(back.adc.power_w == doctest::Approx(3e-3));
    CHECK(back.edram.latency_s == doctest::Approx(2e-9));
    CHECK_THROWS_AS(PeripheralModel::from_config(KvConfig::parse("edram.power_mW = -2\n")), ValidationError);
    const PeripheralModel shipped = PeripheralModel::from_config(KvConfig::load(HEANA_SOURCE_DIR "/configs/peripherals.cfg"));
    CHECK(shipped.to_config() == PeripheralModel{}.to_config());
}

TEST_CASE("frame latency with no memory traffic is the compute term") {
    const AcceleratorConfig acc = acc_of(Arch::HEANA, 8, 5e9);
    const FrameTiming ft = frame_latency(FrameTraffic{}, false, 8, acc);
    CHECK(ft.latency_s == doctest::Approx(1 / 5e9));
    CHECK_FALSE(ft.rate_limited);
}

TEST_CASE("TIR cap: temporal window hides it, multiplier mode does not") {
    const AcceleratorConfig acc = acc_of(Arch::HEANA, 8, 10e9);
    CHECK_FALSE(frame_latency(FrameTraffic{}, false, 10, acc).rate_limited);
    const FrameTiming slow = frame_latency(FrameTraffic{}, false, 1, acc);
    CHECK(slow.rate_limited);
    CHECK(slow.latency_s == doctest::Approx(1e-9));

    // K = 80 with N = 8 gives ten k tiles held on one capacitor under OS; IS holds none
    const auto work = one_gemm({16, 80, 8});
    CHECK(evaluate(work, acc, Dataflow::OS, 1).violations.empty());
    const SimReport is = evaluate(work, acc, Dataflow::IS, 1);
    REQUIRE(is.violations.size() == 1);
    CHECK(is.layers[0].rate_limited_frames == is.layers[0].frames);
}

TEST_CASE("non-BPCA final frame adds one reduction latency per tree level") {
    const AcceleratorConfig acc = acc_of(Arch::AMW, 8, 1e9);
    FrameTraffic t;
    t.reduction_depth = 3;
    const double base = frame_latency(FrameTraffic{}, true, 1, acc).latency_s;
    CHECK(frame_latency(t, true, 1, acc).latency_s - base == doctest::Approx(3 * 3.125e-9));
}

TEST_CASE("doubling DPUs halves a parallel layer") {
    const auto work = one_gemm({64, 32, 16});
    for (Dataflow df : kAllDataflows) {
        const AcceleratorConfig a1 = acc_of(Arch::HEANA, 4, 1e9, 4), a2 = acc_of(Arch::HEANA, 4, 1e9, 8);
        const double fixed = a1.peripherals.bus.latency_s + a1.peripherals.router.latency_s;
        const SimReport r1 = evaluate(work, a1, df, 1), r2 = evaluate(work, a2, df, 1);
        const double l1 = r1.latency_s - fixed, l2 = r2.latency_s - fixed;
        const double frame = l1 / double(r1.counts.frames / 4);
        CHECK(std::abs(l2 - l1 / 2) <= frame + 1e-15);
    }
}

TEST_CASE("slower eDRAM never speeds things up") {
    const auto work = one_gemm({20, 40, 24});
    for (Arch a : kAllArchs)
        for (Dataflow df : kAllDataflows) {
            double prev = 0;
            for (double ns : {0.5, 1.56, 4.0, 16.0, 64.0}) {
                AcceleratorConfig acc = acc_of(a, 4);
                acc.peripherals.edram.latency_s = ns * 1e-9;
                const double l = evaluate(work, acc, df, 1).latency_s;
                CHECK(l >= prev);
                prev = l;
            }
        }
}

TEST_CASE("batch scales latency and counts linearly") {
    const auto work = one_gemm({10, 20, 30});
    const AcceleratorConfig acc = acc_of(Arch::AMW_BPCA, 4);
    const SimReport r1 = evaluate(work, acc, Dataflow::OS, 1), r8 = evaluate(work, acc, Dataflow::OS, 8);
    CHECK(r8.latency_s == doctest::Approx(8 * r1.latency_s));
    CHECK(r8.counts.adc_conversions == 8 * r1.counts.adc_conversions);
    CHECK(r8.fps == doctest::Approx(r1.fps));
}

TEST_CASE("energy breakdown closes and report identities hold") {
    std::vector<LayerWork> work = one_gemm({30, 50, 20});
    work.push_back({"relu", LayerKind::Activation, {}, 600});
    work.push_back({"pool", LayerKind::Pool, {}, 150});
    for (Arch a : kAllArchs)
        for (Dataflow df : kAllDataflows) {
            const SimReport r = evaluate(work, acc_of(a, 4, 5e9, 3), df, 2);
            CHECK(r.energy_breakdown.size() == 14);
            double sum = 0;
            for (auto &[k, v] : r.energy_breakdown) {
                CHECK(v >= 0);
                sum += v;
            }
            CHECK(std::abs(sum - r.energy_j) <= 1e-9 * r.energy_j);
            CHECK(r.fps == doctest::Approx(2 / r.latency_s).epsilon(1e-12));
            CHECK(r.fps_per_w == doctest::Approx(r.fps / (r.energy_j / r.latency_s)).epsilon(1e-12));
        }
}

TEST_CASE("ADC energy gap is the conversion-count ratio") {
    const GemmDims g{12, 37, 9};
    const std::size_t N = 4;
    const PeripheralModel pm;
    for (Dataflow df : kAllDataflows) {
        const SimReport h = evaluate(one_gemm(g), acc_of(Arch::HEANA, N), df, 1);
        const SimReport m = evaluate(one_gemm(g), acc_of(Arch::AMW, N), df, 1);
        const double per = pm.adc.power_w * pm.adc.latency_s;
        CHECK(part(h, "adc") == doctest::Approx(double(g.C * g.D) * per));
        CHECK(part(m, "adc") == doctest::Approx(double(g.C * g.D * ((g.K + N - 1) / N)) * per));
        CHECK(part(m, "adc") / part(h, "adc") == doctest::Approx(double((g.K + N - 1) / N)));
    }
}

TEST_CASE("BPCA variants beat their base architecture") {
    const auto work = one_gemm({40, 96, 32});
    for (Dataflow df : kAllDataflows) {
        CHECK(evaluate(work, acc_of(Arch::AMW_BPCA, 8), df, 1).fps > evaluate(work, acc_of(Arch::AMW, 8), df, 1).fps);
        CHECK(evaluate(work, acc_of(Arch::MAW_BPCA, 8), df, 1).fps > evaluate(work, acc_of(Arch::MAW, 8), df, 1).fps);
    }
}

TEST_CASE("evaluate is deterministic across thread counts") {
    std::vector<LayerWork> work;
    for (int i = 0; i < 9; ++i) work.push_back({"l" + std::to_string(i), LayerKind::Conv, {7u + i, 20u + 3 * i, 5u + i}, 0});
    const AcceleratorConfig acc = acc_of(Arch::MAW, 4, 5e9, 3);
    const std::string a = reports_csv({evaluate(work, acc, Dataflow::IS, 1, "w", 0)});
    const std::string b = reports_csv({evaluate(work, acc, Dataflow::IS, 1, "w", 4)});
    CHECK(a == b);
}

TEST_CASE("area scaling") {
    const AcceleratorConfig ref = published_preset(Arch::HEANA, 1e9);
    CHECK(ref.dpu.N == 83);
    CHECK(ref.dpu_count == 50);
    DpuConfig amw = ref.dpu, maw = ref.dpu;
    amw.arch = Arch::AMW;
    amw.N = amw.M = 36;
    maw.arch = Arch::MAW;
    maw.N = maw.M = 43;
    const auto counts = area_scale(ref, {ref.dpu, amw, maw});
    CHECK(counts[0] == 50);
    CHECK(std::abs(double(counts[1]) - 207) <= 20.7);
    CHECK(std::abs(double(counts[2]) - 280) <= 28.0);
    CHECK(area_scale(ref, {ref.dpu, ref.dpu})[0] == area_scale(ref, {ref.dpu, ref.dpu})[1]);
}

TEST_CASE("compare normalizes to the baseline") {
    SimReport a, b;
    a.workload = b.workload = "net";
    a.arch = Arch::AMW;
    a.dataflow = Dataflow::WS;
    a.fps = 100;
    a.fps_per_w = 10;
    a.latency_s = 0.01;
    a.energy_j = 0.1;
    b = a;
    b.arch = Arch::HEANA;
    b.dataflow = Dataflow::OS;
    b.fps = 200;
    b.latency_s = 0.005;
    const ComparisonTable self = compare({a}, a.label());
    CHECK(self.rows[0].fps == 1.0);
    CHECK(self.rows[0].fps_per_w == 1.0);
    CHECK(self.rows[0].latency == 1.0);
    CHECK(self.rows[0].energy == 1.0);
    const ComparisonTable t = compare({a, b}, "amw-ws@1");
    CHECK(t.rows[1].fps == doctest::Approx(2.0));
    CHECK(t.rows[1].latency == doctest::Approx(0.5));
    CHECK_THROWS_AS(compare({b}, "amw-ws@1"), ValidationError);
}

TEST_CASE("gmean over workloads") {
    std::vector<SimReport> rs;
    const double gains[] = {2.0, 8.0, 5.0};
    for (int i = 0; i < 3; ++i) {
        SimReport base;
        base.workload = "w" + std::to_string(i);
        base.arch = Arch::AMW;
        base.dataflow = Dataflow::WS;
        base.fps = 10 + i;
        base.fps_per_w = base.latency_s = base.energy_j = 1;
        SimReport h = base;
        h.arch = Arch::HEANA;
        h.dataflow = Dataflow::OS;
        h.fps = base.fps * gains[i];
        rs.push_back(base);
        rs.push_back(h);
    }
    const ComparisonTable t = compare(rs, "amw-ws@1");
    REQUIRE(t.gmean.size() == 2);
    CHECK(t.gmean[1].label == "heana-os@1");
    CHECK(t.gmean[1].fps == doctest::Approx(std::cbrt(2.0 * 8.0 * 5.0)));
    CHECK(t.gmean[0].fps == doctest::Approx(1.0));
}

TEST_CASE("CSV output is stable") {
    const SimReport r = evaluate(one_gemm({8, 8, 8}), acc_of(Arch::HEANA, 2), Dataflow::OS, 1, "tiny");
    const std::string csv = reports_csv({r});
    CHECK(csv == reports_csv({r}));
    CHECK(csv.find("heana,os") != std::string::npos);
    CHECK(comparison_csv(compare({r}, r.label())) == comparison_csv(compare({r}, r.label())));
}
