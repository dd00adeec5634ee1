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
#include <random>
#include <span>
#include <vector>

namespace heana {

// Lumped readout noise. mae_bits = log2(1 / normalized mean absolute error).
struct NoiseModel {
    double mae_bits = 16.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TaomConfig {
    int bits_a = 4;              // activation, unsigned
    int bits_w = 4;              // weight, signed (magnitude uses bits_w - 1 plus sign)
    double unit_width_ps = 0.0;  // pulse width per activation unit
    double optical_power_dbm = 10.0;
    double datarate = 1e9;       // symbols / s
    std::optional<NoiseModel> noise;

    double symbol_period_ps() const { return 1e12 / datarate; }
    std::uint32_t max_width_code() const { return (1u << bits_a) - 1; }
    std::uint32_t max_amp_code() const { return 1u << (bits_w - 1); }

    void validate() const;

    // Widest unit width whose full-scale pulse still fits one symbol period.
    static TaomConfig fitted(int bits_a, int bits_w, double datarate);
};

// One pulse-width/amplitude modulated symbol. Energy is in product units:
// width_code * amp_code * sign == a * w.
struct PwamSymbol {
    std::uint32_t width_code = 0;
    std::uint32_t amp_code = 0;
    int sign = 1;
    double unit_width_ps = 0.0;

    std::int64_t energy() const { return std::int64_t(width_code) * amp_code * sign; }
    double pulse_width_ps() const { return width_code * unit_width_ps; }
};

PwamSymbol taom_modulate(std::int64_t a, std::int64_t w, const TaomConfig &cfg);

// Balanced detection of one symbol cycle: the signed sum of all symbol energies.
std::int64_t bpd_superpose(std::span<const PwamSymbol> symbols);

// Gaussian readout error with E|e| = 2^-mae_bits * full_scale.
class NoiseSource {
public:
    explicit NoiseSource(const NoiseModel &m);

    double perturb(double value, double full_scale);
    double sigma(double full_scale) const;

private:
    NoiseModel model_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Readout {
    std::int64_t code = 0;  // ADC output, nearest integer
    double analog = 0.0;    // voltage before conversion, product units
};

// BPD + time-integrating receiver with p independently selectable capacitors.
// Capacitor indices are 1-based.
class CapacitorBank {
public:
    explicit CapacitorBank(std::size_t p, double sample_ratio = 1.0);

    std::size_t size() const { return voltages_.size(); }
    std::size_t active() const { return active_; }
    double sample_ratio() const { return sample_ratio_; }
    std::int64_t voltage(std::size_t index) const;

    void tir_accumulate(std::int64_t cycle_sum) { voltages_[active_ - 1] += cycle_sum; }
    void select_capacitor(std::size_t index);

    // Converts the active capacitor and resets it. full_scale sizes the noise.
    Readout adc_readout(NoiseSource *noise = nullptr, double full_scale = 0.0);

    std::uint64_t conversions() const { return conversions_; }
    std::uint64_t switches() const { return switches_; }

private:
    std::vector<std::int64_t> voltages_;
    std::size_t active_ = 1;
    double sample_ratio_;
    std::uint64_t conversions_ = 0;
    std::uint64_t switches_ = 0;
};

// Single-symbol multiply with the TIR sampling at the symbol rate.
std::int64_t multiplier_mode_step(std::int64_t a, std::int64_t w, const TaomConfig &cfg);

} // namespace heana
