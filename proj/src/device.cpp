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

#include "heana/device.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "heana/error.hpp"

namespace heana {

void NoiseModel::validate() const {
    if (!(mae_bits > 0)) throw ValidationError("mae_bits must be positive");
}

void TaomConfig::validate() const {
    if (bits_a < 1 || bits_a > 16 || bits_w < 2 || bits_w > 16)
        throw ValidationError("TAOM bit widths out of range");
    if (!(datarate > 0)) throw ValidationError("datarate must be positive");
    if (!(unit_width_ps > 0)) throw ValidationError("unit width must be positive");
    // small slack for unit widths derived by division
    if (max_width_code() * unit_width_ps > symbol_period_ps() * (1 + 1e-12))
        throw ValidationError("full-scale pulse (" + std::to_string(max_width_code() * unit_width_ps)
                + " ps) exceeds the symbol period");
    if (noise) noise->validate();
}

TaomConfig TaomConfig::fitted(int bits_a, int bits_w, double datarate) {
    TaomConfig c;
    c.bits_a = bits_a;
    c.bits_w = bits_w;
    c.datarate = datarate;
    c.unit_width_ps = std::floor(c.symbol_period_ps() / c.max_width_code());
    if (c.unit_width_ps < 1) c.unit_width_ps = c.symbol_period_ps() / c.max_width_code();
    return c;
}

PwamSymbol taom_modulate(std::int64_t a, std::int64_t w, const TaomConfig &cfg) {
    if (a < 0 || a > std::int64_t(cfg.max_width_code()))
        throw ValidationError("activation " + std::to_string(a) + " outside "
                + std::to_string(cfg.bits_a) + "-bit unsigned range");
    const std::int64_t mag = w < 0 ? -w : w;
    if (mag > std::int64_t(cfg.max_amp_code()))
        throw ValidationError("weight " + std::to_string(w) + " outside "
                + std::to_string(cfg.bits_w) + "-bit signed range");
    PwamSymbol s;
    s.width_code = std::uint32_t(a);
    s.amp_code = std::uint32_t(mag);
    s.sign = w < 0 ? -1 : 1;
    s.unit_width_ps = cfg.unit_width_ps;
    return s;
}

std::int64_t bpd_superpose(std::span<const PwamSymbol> symbols) {
    std::int64_t sum = 0;
    for (const auto &s : symbols) sum += s.energy();
    return sum;
}

NoiseSource::NoiseSource(const NoiseModel &m) : model_(m), rng_(m.seed) { m.validate(); }

double NoiseSource::sigma(double full_scale) const {
    // E|N(0, s)| = s * sqrt(2 / pi)
    return std::exp2(-model_.mae_bits) * std::sqrt(std::numbers::pi / 2.0) * full_scale;
}

double NoiseSource::perturb(double value, double full_scale) {
    return value + sigma(full_scale) * normal_(rng_);
}

CapacitorBank::CapacitorBank(std::size_t p, double sample_ratio)
    : voltages_(p, 0), sample_ratio_(sample_ratio) {
    if (p == 0) throw ValidationError("capacitor bank needs p >= 1");
    if (!(sample_ratio >= 1.0)) throw ValidationError("sample_ratio must be >= 1");
}

std::int64_t CapacitorBank::voltage(std::size_t index) const {
    if (index < 1 || index > voltages_.size())
        throw ValidationError("capacitor index " + std::to_string(index) + " outside [1, "
                + std::to_string(voltages_.size()) + "]");
    return voltages_[index - 1];
}

void CapacitorBank::select_capacitor(std::size_t index) {
    if (index < 1 || index > voltages_.size())
        throw ValidationError("capacitor index " + std::to_string(index) + " outside [1, "
                + std::to_string(voltages_.size()) + "]");
    if (index != active_) ++switches_;
    active_ = index;
}

Readout CapacitorBank::adc_readout(NoiseSource *noise, double full_scale) {
    std::int64_t &v = voltages_[active_ - 1];
    Readout r;
    r.analog = double(v);
    if (noise) r.analog = noise->perturb(r.analog, full_scale);
    r.code = noise ? std::llround(r.analog) : v;
    v = 0;
    ++conversions_;
    return r;
}

std::int64_t multiplier_mode_step(std::int64_t a, std::int64_t w, const TaomConfig &cfg) {
    const PwamSymbol s = taom_modulate(a, w, cfg);
    CapacitorBank bank(1);
    bank.tir_accumulate(bpd_superpose(std::span<const PwamSymbol>(&s, 1)));
    return bank.adc_readout().code;
}

} // namespace heana
