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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "heana/device.hpp"
#include "heana/error.hpp"
#include "heana/frontend.hpp"
#include "heana/parallel.hpp"
#include "oracles.hpp"

using namespace heana;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string &why) {
        if (pass) detail = why;
        pass = false;
    }
};

DpuConfig dpu(std::size_t N, std::size_t M, Arch a = Arch::HEANA, std::size_t p = 4608) {
    DpuConfig c;
    c.N = N;
    c.M = M;
    c.arch = a;
    c.p = p;
    return c;
}

std::string dims_str(const GemmDims &g) {
    return std::to_string(g.C) + "x" + std::to_string(g.K) + "x" + std::to_string(g.D);
}

const char *kManifests[] = {"googlenet", "resnet50", "mobilenet_v2", "shufflenet_v2"};

std::string manifest_path(const char *name) {
    return std::string(HEANA_SOURCE_DIR) + "/workloads/" + name + ".manifest";
}

// 1. noiseless functional runs equal the exact product everywhere
Outcome functional_equivalence() {
    Outcome o;
    std::mt19937_64 rng(1001);
    const int problems = 120;
    std::size_t runs = 0;
    for (int t = 0; t < problems && o.pass; ++t) {
        const GemmDims g{1 + rng() % 32, 1 + rng() % 32, 1 + rng() % 32};
        const std::size_t N = 1 + rng() % 8, M = 1 + rng() % 8;
        const GemmProblem p{random_matrix(g.C, g.K, 4, false, rng()), random_matrix(g.K, g.D, 4, true, rng())};
        const auto want = oracle::gemm(p.I, p.W);
        for (Arch a : kAllArchs)
            for (Dataflow df : kAllDataflows) {
                ++runs;
                if (!oracle::same(execute_functional(p, dpu(N, M, a), df).output, want))
                    o.fail(std::string(to_string(a)) + "-" + std::string(to_string(df)) + " differs on " + dims_str(g));
            }
    }
    if (o.pass) o.detail = std::to_string(problems) + " problems, " + std::to_string(runs) + " runs exact";
    return o;
}

// 2. readouts: C*D with BPCA or TAOM, C*D*ceil(K/N) otherwise
Outcome adc_law() {
    Outcome o;
    std::mt19937_64 rng(1002);
    const int points = 200;
    for (int t = 0; t < points && o.pass; ++t) {
        const GemmDims g{1 + rng() % 16, 1 + rng() % 24, 1 + rng() % 16};
        const std::size_t N = 1 + rng() % 8, M = 1 + rng() % 8;
        const GemmProblem p{random_matrix(g.C, g.K, 4, false, rng()), random_matrix(g.K, g.D, 4, true, rng())};
        for (Arch a : kAllArchs)
            for (Dataflow df : kAllDataflows) {
                const bool single = a == Arch::HEANA || arch_has_bpca(a);
                const std::uint64_t want = g.C * g.D * (single ? 1 : oracle::cdiv(g.K, N));
                const std::uint64_t got = execute_functional(p, dpu(N, M, a), df).adc_readouts;
                if (got != want)
                    o.fail(std::string(to_string(a)) + " " + dims_str(g) + ": " + std::to_string(got) + " != "
                            + std::to_string(want));
            }
    }
    if (o.pass) o.detail = std::to_string(points) + " points x 5 archs x 3 dataflows";
    return o;
}

// 3. schedule length and the worked-example ordering
Outcome frame_law() {
    Outcome o;
    std::mt19937_64 rng(1003);
    for (int t = 0; t < 300 && o.pass; ++t) {
        const GemmDims g{1 + rng() % 40, 1 + rng() % 40, 1 + rng() % 40};
        const std::size_t N = 1 + rng() % 9, M = 1 + rng() % 9;
        for (Dataflow df : kAllDataflows) {
            // WS walks weight columns outermost, so C and D trade places
            const std::size_t outer = df == Dataflow::WS ? g.D : g.C, spatial = df == Dataflow::WS ? g.C : g.D;
            const std::size_t want = outer * oracle::cdiv(spatial, M) * oracle::cdiv(g.K, N);
            const Schedule s = plan_schedule(g, dpu(N, M), df);
            if (s.frames.size() != want || oracle::accesses(g, N, M, df).frames != want)
                o.fail(std::string(to_string(df)) + " " + dims_str(g) + " has " + std::to_string(s.frames.size()) + " frames");
        }
    }
    const GemmDims w{4, 4, 4};
    const Schedule os = plan_schedule(w, dpu(2, 2), Dataflow::OS);
    const Schedule ws = plan_schedule(w, dpu(2, 2), Dataflow::WS);
    const Schedule is = plan_schedule(w, dpu(2, 2), Dataflow::IS);
    for (const Schedule *s : {&os, &ws, &is})
        for (std::size_t outer = 0; outer < 4; ++outer) {
            std::size_t n = 0;
            for (auto &f : s->frames) n += f.outer_iter == outer;
            if (n != 4) o.fail("outer iteration " + std::to_string(outer) + " has " + std::to_string(n) + " frames");
        }
    // OS: frames 1-2 accumulate O[0,0..1]; WS: frame 1 covers O[0,0] and O[1,0]; IS: C1, C2, C1
    if (!(os.frames[0].rows == Range{0, 1} && os.frames[0].cols == Range{0, 2} && os.frames[1].cols == Range{0, 2}
                && os.frames[0].ks == Range{0, 2} && os.frames[1].ks == Range{2, 4} && os.frames[2].cols == Range{2, 4}))
        o.fail("OS worked example ordering");
    if (!(ws.frames[0].rows == Range{0, 2} && ws.frames[0].cols == Range{0, 1} && ws.frames[1].rows == Range{2, 4}))
        o.fail("WS worked example ordering");
    if (!(is.frames[0].capacitor == 1 && is.frames[1].capacitor == 2 && is.frames[2].capacitor == 1))
        o.fail("IS worked example capacitors");
    if (o.pass) o.detail = "300 random shapes x 3 dataflows; 4x4x4 golden ordering matches";
    return o;
}

// 4. namesake operand read once per element, no psum traffic with BPCA
Outcome stationarity() {
    Outcome o;
    std::mt19937_64 rng(1004);
    int cases = 0;
    for (std::size_t C = 1; C <= 8 && o.pass; C += 1 + rng() % 2)
        for (std::size_t K = 1; K <= 8; K += 1 + rng() % 2)
            for (std::size_t D = 1; D <= 8; D += 1 + rng() % 2) {
                const GemmDims g{C, K, D};
                const std::size_t N = 1 + rng() % 4, M = 1 + rng() % 4;
                for (Dataflow df : kAllDataflows) {
                    const oracle::Accesses ref = oracle::accesses(g, N, M, df);
                    for (Arch a : kAllArchs) {
                        ++cases;
                        const EventCounts ec = count_events(g, dpu(N, M, a), df);
                        const std::string where = std::string(to_string(a)) + "-" + std::string(to_string(df)) + " " + dims_str(g);
                        if (ec.input_reads != oracle::Accesses::total(ref.input)
                                || ec.weight_reads != oracle::Accesses::total(ref.weight)
                                || ec.output_writes != ref.output_writes)
                            o.fail(where + ": access counts differ from the loop nest");
                        if (df == Dataflow::IS && ec.input_reads != C * K) o.fail(where + ": input reads != C*K");
                        if (df == Dataflow::WS && ec.weight_reads != K * D) o.fail(where + ": weight reads != K*D");
                        if (df == Dataflow::OS && ec.output_writes != C * D) o.fail(where + ": output writes != C*D");
                        if ((arch_has_bpca(a) || a == Arch::HEANA) && ec.psum_reads + ec.psum_writes)
                            o.fail(where + ": psum traffic with BPCA");
                    }
                }
            }
    if (o.pass) o.detail = std::to_string(cases) + " cases against the brute-force access oracle";
    return o;
}

// 5. link-budget scaling anchors and parameter-free properties
Outcome scalability() {
    Outcome o;
    const LinkBudgetParams p = LinkBudgetParams::from_config(KvConfig::load(HEANA_SOURCE_DIR "/configs/linkbudget.cfg"));
    const std::pair<Arch, double> anchors[] = {{Arch::HEANA, 83}, {Arch::AMW, 36}, {Arch::MAW, 43}};
    std::ostringstream got;
    for (auto [a, want] : anchors) {
        const double n = double(max_n(4, 1e9, p, a).N_max);
        got << to_string(a) << "=" << n << " ";
        if (std::abs(n - want) > 0.1 * want) o.fail(std::string(to_string(a)) + " N_max " + std::to_string(n));
    }
    std::map<std::tuple<int, int, int>, std::size_t> nmax;
    for (const auto &s : scale_sweep(p)) nmax[{int(s.arch), s.B, int(s.DR / 1e9)}] = s.N_max;
    const int drs[] = {1, 5, 10};
    for (int B = 1; B <= 8; ++B)
        for (int i = 0; i < 3; ++i) {
            const int dr = drs[i];
            auto at = [&](Arch a, int b, int d) { return nmax.at({int(a), b, d}); };
            if (!(at(Arch::HEANA, B, dr) >= at(Arch::MAW, B, dr) && at(Arch::MAW, B, dr) >= at(Arch::AMW, B, dr)))
                o.fail("ordering at B=" + std::to_string(B) + " DR=" + std::to_string(dr));
            for (Arch a : kLinkArchs) {
                if (B < 8 && at(a, B + 1, dr) > at(a, B, dr)) o.fail("N_max grows with B");
                if (i < 2 && at(a, B, drs[i + 1]) > at(a, B, dr)) o.fail("N_max grows with DR");
            }
        }
    if (o.pass) o.detail = "4-bit 1 GS/s: " + got.str() + "(published 83/36/43); monotone and ordered on 72 points";
    return o;
}

// 6. capacitor policy and the p = 4608 sizing
Outcome capacitor_policy() {
    Outcome o;
    std::mt19937_64 rng(1006);
    int cases = 0;
    for (int t = 0; t < 300 && o.pass; ++t) {
        const GemmDims g{1 + rng() % 24, 1 + rng() % 24, 1 + rng() % 24};
        const std::size_t N = 1 + rng() % 6, M = 1 + rng() % 6, p = 1 + rng() % 8;
        const Schedule os = plan_schedule(g, dpu(N, M, Arch::HEANA, p), Dataflow::OS);
        for (std::size_t i = 1; i < os.frames.size(); ++i)
            if (os.frames[i].capacitor != os.frames[i - 1].capacitor && !os.frames[i].is_first_for_output)
                o.fail("OS switches inside an output tile on " + dims_str(g));
        for (Dataflow df : {Dataflow::IS, Dataflow::WS}) {
            ++cases;
            const std::size_t live = oracle::in_flight(plan_schedule(g, dpu(N, M, Arch::AMW), df));
            bool threw = false;
            try {
                plan_schedule(g, dpu(N, M, Arch::HEANA, p), df);
            } catch (const CapacityExceeded &) {
                threw = true;
            }
            if (threw != (live > p))
                o.fail(std::string(to_string(df)) + " " + dims_str(g) + " p=" + std::to_string(p) + " in-flight="
                        + std::to_string(live) + (threw ? " threw" : " did not throw"));
        }
    }
    const WorkloadManifest gn = parse_manifest(manifest_path("googlenet"));
    std::size_t worst = 0;
    std::string worst_layer;
    for (const auto &L : gn.layers) {
        if (L.kind != LayerKind::Conv && L.kind != LayerKind::Fc) continue;
        for (Dataflow df : kAllDataflows) {
            const std::size_t live = oracle::in_flight(plan_schedule(L.dims, dpu(83, 83, Arch::AMW), df));
            if (live > worst) {
                worst = live;
                worst_layer = L.name + "/" + std::string(to_string(df));
            }
        }
    }
    if (worst > 4608) o.fail("GoogleNet at N=83 needs p=" + std::to_string(worst) + " (" + worst_layer + ")");
    if (o.pass)
        o.detail = std::to_string(cases) + " IS/WS cases; GoogleNet N=83 needs p=" + std::to_string(worst) + " <= 4608 ("
                + worst_layer + ")";
    return o;
}

// 7. directional performance claims on every shipped CNN
Outcome orderings() {
    Outcome o;
    const unsigned threads = thread_budget();
    const double drs[] = {1, 5, 10};
    double min_fps = INFINITY, min_fpw = INFINITY, worst_time = 0;
    for (const char *name : kManifests) {
        const auto t0 = std::chrono::steady_clock::now();
        const WorkloadManifest m = parse_manifest(manifest_path(name));
        const auto work = m.work();
        struct Job { Arch a; Dataflow df; double dr; };
        std::vector<Job> jobs;
        for (double dr : drs)
            for (Arch a : kAllArchs)
                for (Dataflow df : kAllDataflows) jobs.push_back({a, df, dr});
        std::vector<SimReport> reps(jobs.size());
        parallel_for(jobs.size(), threads, [&](std::size_t i) {
            const RunOptions ro;
            reps[i] = evaluate(work, accelerator_for(ro, jobs[i].a, jobs[i].dr), jobs[i].df, m.batch, m.model, 0);
        });
        auto get = [&](Arch a, Dataflow df, double dr) -> const SimReport & {
            for (std::size_t i = 0; i < jobs.size(); ++i)
                if (jobs[i].a == a && jobs[i].df == df && jobs[i].dr == dr) return reps[i];
            throw std::logic_error("missing job");
        };
        for (double dr : drs) {
            const std::string at = std::string(name) + "@" + std::to_string(int(dr));
            const double os = get(Arch::HEANA, Dataflow::OS, dr).fps, is = get(Arch::HEANA, Dataflow::IS, dr).fps,
                         ws = get(Arch::HEANA, Dataflow::WS, dr).fps;
            if (!(os >= is && is >= ws)) o.fail(at + ": HEANA OS >= IS >= WS violated");
            for (auto [x, xb] : {std::pair{Arch::AMW, Arch::AMW_BPCA}, std::pair{Arch::MAW, Arch::MAW_BPCA}})
                for (Dataflow df : kAllDataflows)
                    if (!(get(xb, df, dr).fps > get(x, df, dr).fps))
                        o.fail(at + ": " + std::string(to_string(xb)) + "-" + std::string(to_string(df)) + " not faster");
            const SimReport &h = get(Arch::HEANA, Dataflow::OS, dr), &b = get(Arch::AMW, Dataflow::WS, dr);
            const double rf = h.fps / b.fps, rw = h.fps_per_w / b.fps_per_w;
            min_fps = std::min(min_fps, rf);
            min_fpw = std::min(min_fpw, rw);
            if (!(rf > 5 && rw > 5)) o.fail(at + ": HEANA-OS/AMW-WS ratios " + std::to_string(rf) + ", " + std::to_string(rw));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        worst_time = std::max(worst_time, secs);
        if (secs >= 60) o.fail(std::string(name) + " took " + std::to_string(secs) + " s");
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "4 CNNs x 3 datarates; min HEANA-OS/AMW-WS FPS %.1fx, FPS/W %.1fx; slowest CNN %.1f s",
            min_fps, min_fpw, worst_time);
    if (o.pass) o.detail = buf;
    return o;
}

// 8. readout noise hits the configured MAE and shrinks with more bits
Outcome noise_hook() {
    Outcome o;
    const int readouts = 100000;
    const double full_scale = 4096;
    double prev = INFINITY;
    std::ostringstream got;
    for (double b : {4.0, 8.0, 12.0}) {
        NoiseSource ns({b, 808 + std::uint64_t(b)});
        std::mt19937_64 rng(17);
        double sum = 0;
        for (int i = 0; i < readouts; ++i) {
            CapacitorBank bank(1);
            const long long v = (long long)(rng() % 4097) - 2048;
            bank.tir_accumulate(v);
            sum += std::abs(bank.adc_readout(&ns, full_scale).analog - double(v)) / full_scale;
        }
        const double mae = sum / readouts, target = std::exp2(-b);
        got << "b=" << b << ":" << mae / target << " ";
        if (std::abs(mae - target) > 0.2 * target) o.fail("b=" + std::to_string(int(b)) + " MAE " + std::to_string(mae));
        if (!(mae < prev)) o.fail("MAE does not shrink at b=" + std::to_string(int(b)));
        prev = mae;
    }
    if (o.pass) o.detail = "MAE / 2^-b: " + got.str();
    return o;
}

// 9. byte-identical simulate output regardless of worker count
Outcome determinism() {
    Outcome o;
    auto run = [&](const char *threads, bool functional, const std::string &fmt) {
        setenv("HEANA_SIM_THREADS", threads, 1);
        RunOptions ro;
        ro.workloads = {manifest_path("shufflenet_v2"), manifest_path("googlenet")};
        ro.arch = Arch::AMW;
        ro.dataflow = Dataflow::IS;
        ro.seed = 42;
        ro.format = fmt;
        ro.check_functional = functional;
        if (functional) {
            ro.workloads = {manifest_path("shufflenet_v2")};
            ro.N = 16;
        }
        return cmd_simulate(ro, thread_budget());
    };
    for (bool functional : {false, true})
        for (const char *fmt : {"csv", "json-like"}) {
            const std::string a = run("0", functional, fmt), b = run("4", functional, fmt), c = run("0", functional, fmt);
            if (a != b || a != c)
                o.fail(std::string(fmt) + (functional ? " with functional check" : "") + " differs across runs");
        }
    unsetenv("HEANA_SIM_THREADS");
    if (o.pass) o.detail = "csv and json-like, with and without the functional check, threads 0 vs 4";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        const char *name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const Criterion all[] = {
            {"functional oracle equivalence", 60, functional_equivalence},
            {"ADC-count law", 10, adc_law},
            {"frame-count law and worked-example ordering", 0, frame_law},
            {"stationarity", 0, stationarity},
            {"scalability solver", 5, scalability},
            {"capacitor policy", 0, capacitor_policy},
            {"performance orderings", 0, orderings},  // budget is per CNN, checked inside
            {"BPCA noise hook", 30, noise_hook},
            {"determinism", 0, determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < std::size(all); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = all[i].run();
        } catch (const std::exception &e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (all[i].budget_s > 0 && secs >= all[i].budget_s)
            o.fail("took " + std::to_string(secs) + " s, budget " + std::to_string(all[i].budget_s) + " s");
        std::printf("%s %zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", int(std::size(all)) - failed, std::size(all));
    return failed ? 1 : 0;
}
