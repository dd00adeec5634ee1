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

#include "heana/error.hpp"
#include "heana/perfmodel.hpp"
#include "heana/tensor.hpp"

namespace heana {

struct ManifestLayer {
    std::string name;
    LayerKind kind = LayerKind::Conv;
    std::optional<ConvLayerShape> shape;  // absent for layers given as C, K, D
    GemmDims dims;                        // conv, fc
    std::uint64_t elements = 0;           // pool, activation
    std::size_t line = 0;

    bool operator==(const ManifestLayer &o) const {
        return name == o.name && kind == o.kind && shape == o.shape && dims == o.dims
                && elements == o.elements;
    }
};

struct WorkloadManifest {
    std::string model;
    int bits = 4;
    std::size_t batch = 1;
    std::vector<ManifestLayer> layers;

    std::vector<LayerWork> work() const;
    bool operator==(const WorkloadManifest &o) const {
        return model == o.model && bits == o.bits && batch == o.batch && layers == o.layers;
    }
};

WorkloadManifest parse_manifest_text(std::string_view text, const std::string &source = {});
WorkloadManifest parse_manifest(const std::string &path);
std::string serialize_manifest(const WorkloadManifest &m);

std::string_view to_string(LayerKind k);

// Raised by simulate when a functional check disagrees with the oracle.
class FunctionalMismatch : public Error {
public:
    using Error::Error;
};

struct RunOptions {
    std::optional<Arch> arch;
    std::optional<Dataflow> dataflow;
    std::optional<double> datarate_gsps;
    int bits = 4;
    std::optional<std::size_t> N, M, p, dpus;
    std::optional<GemmDims> dims;
    std::vector<std::string> workloads;
    std::size_t batch = 0;  // 0 keeps the manifest's batch
    std::string params;
    std::string peripherals;
    std::uint64_t seed = 1;
    std::optional<double> mae_bits;
    bool check_functional = false;
    bool trace = false;
    double tir_ghz = 1.0;
    std::string format = "csv";  // csv | json-like
    std::string baseline;
    std::vector<std::string> reports;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitParse = 2,
    kExitValidation = 3,
    kExitCapacity = 4,
    kExitInternal = 5,
    kExitFunctional = 6,
};

LinkBudgetParams load_params(const RunOptions &o);
PeripheralModel load_peripherals(const RunOptions &o);
AcceleratorConfig accelerator_for(const RunOptions &o, Arch a, double datarate_gsps);

std::string cmd_scale(const RunOptions &o);
std::string cmd_plan(const RunOptions &o);
std::string cmd_simulate(const RunOptions &o, unsigned threads);
std::string cmd_compare(const RunOptions &o);
std::string cmd_sweep(const RunOptions &o, unsigned threads);

std::string report_json(const std::vector<SimReport> &reports);
std::vector<SimReport> parse_report_json(std::string_view text, const std::string &source = {});

} // namespace heana
