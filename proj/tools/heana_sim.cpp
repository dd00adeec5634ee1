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

// heana-sim: scaling analysis, schedule planning, simulation and comparison.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "heana/frontend.hpp"
#include "heana/parallel.hpp"

using namespace heana;

namespace {

void add_machine(CLI::App *c, RunOptions &o, std::string &arch, std::string &df) {
    c->add_option("--arch", arch, "heana | amw | maw | amw-bpca | maw-bpca");
    c->add_option("--dataflow", df, "os | is | ws");
    c->add_option("--datarate", o.datarate_gsps, "GS/s (1, 5 or 10 use published DPU sizes)");
    c->add_option("--N", o.N, "wavelengths per DPE");
    c->add_option("--M", o.M, "DPEs per DPU (defaults to N)");
    c->add_option("--p", o.p, "capacitors per BPCA");
    c->add_option("--dpus", o.dpus, "DPU count");
    c->add_option("--bits", o.bits, "operand precision");
    c->add_option("--params", o.params, "link-budget config");
    c->add_option("--peripherals", o.peripherals, "peripheral config");
    c->add_option("--tir-ghz", o.tir_ghz, "TIR sampling-rate cap");
}

void add_output(CLI::App *c, RunOptions &o, std::string &out) {
    c->add_option("--format", o.format, "csv | json-like");
    c->add_option("--out", out, "write to file instead of stdout");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"HEANA photonic GEMM accelerator simulator"};
    app.require_subcommand(1);
    RunOptions o;
    std::string arch, df, out, dims;

    auto *scale = app.add_subcommand("scale", "maximum DPU size per precision and datarate");
    scale->add_option("--params", o.params, "link-budget config");
    add_output(scale, o, out);

    auto *plan = app.add_subcommand("plan", "schedule and event counts without values");
    add_machine(plan, o, arch, df);
    plan->add_option("--workload", o.workloads, "manifest");
    plan->add_option("--dims", dims, "C,K,D of a single GEMM");
    plan->add_flag("--trace", o.trace, "emit the frame trace (with --dims)");
    add_output(plan, o, out);

    auto *sim = app.add_subcommand("simulate", "performance and energy of one configuration");
    add_machine(sim, o, arch, df);
    sim->add_option("--workload", o.workloads, "manifest")->required();
    sim->add_option("--batch", o.batch, "images per run (default: manifest)");
    sim->add_option("--seed", o.seed, "operand and noise seed");
    sim->add_option("--mae-bits", o.mae_bits, "readout noise for the functional check");
    sim->add_flag("--check-functional", o.check_functional, "run values through the device models");
    add_output(sim, o, out);

    auto *cmp = app.add_subcommand("compare", "normalize reports against a baseline");
    cmp->add_option("reports", o.reports, "report files (json-like)")->required();
    cmp->add_option("--baseline", o.baseline, "label or label/workload, e.g. amw-ws@10")->required();
    add_output(cmp, o, out);

    auto *sweep = app.add_subcommand("sweep", "all architectures, dataflows and datarates");
    add_machine(sweep, o, arch, df);
    sweep->add_option("--workload", o.workloads, "manifests")->required();
    sweep->add_option("--batch", o.batch, "images per run (default: manifest)");
    sweep->add_option("--baseline", o.baseline, "emit ratios against this label");
    add_output(sweep, o, out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!arch.empty()) o.arch = parse_arch(arch);
        if (!df.empty()) o.dataflow = parse_dataflow(df);
        if (!dims.empty()) {
            GemmDims g;
            char c1 = 0, c2 = 0;
            std::istringstream is(dims);
            if (!(is >> g.C >> c1 >> g.K >> c2 >> g.D) || c1 != ',' || c2 != ',' || !is.eof())
                throw ParseError("--dims", 0, "dims", "expected C,K,D");
            o.dims = g;
        }
        const unsigned threads = thread_budget();
        std::string text;
        if (*scale) text = cmd_scale(o);
        else if (*plan) text = cmd_plan(o);
        else if (*sim) text = cmd_simulate(o, threads);
        else if (*cmp) text = cmd_compare(o);
        else text = cmd_sweep(o, threads);

        if (out.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(out, std::ios::binary);
            if (!(f << text)) throw Error("cannot write " + out);
        }
        return kExitOk;
    } catch (const ParseError &e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const CapacityExceeded &e) {
        std::cerr << "capacity exceeded: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const ValidationError &e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const FunctionalMismatch &e) {
        std::cerr << e.what() << "\n";
        return kExitFunctional;
    } catch (const NoSolution &e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
