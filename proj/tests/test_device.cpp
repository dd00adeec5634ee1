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
#include <random>
#include <vector>

#include "heana/device.hpp"
#include "heana/error.hpp"

using namespace heana;

namespace {

const TaomConfig kCfg = TaomConfig::fitted(4, 4, 1e9);

double mean_abs_error(double mae_bits, int trials, std::uint64_t seed) {
    NoiseSource ns({mae_bits, seed});
    const double fs = 1000.0;
    double s = 0;
    for (int i = 0; i < trials; ++i) {
        CapacitorBank b(1);
        b.tir_accumulate(123);
        s += std::abs(b.adc_readout(&ns, fs).analog - 123.0) / fs;
    }
    return s / trials;
}

} // namespace

TEST_CASE("taom_modulate encodes the signed product") {
    CHECK(taom_modulate(0, 7, kCfg).energy() == 0);
    CHECK(taom_modulate(3, -5, kCfg).energy() == -15);
    const PwamSymbol mx = taom_modulate(15, 7, kCfg);
    CHECK(mx.energy() == 105);
    CHECK(mx.pulse_width_ps() <= kCfg.symbol_period_ps());
    CHECK(taom_modulate(15, -8, kCfg).energy() == -120);

    for (int a = 0; a < 16; ++a)
        for (int w = -8; w < 8; ++w) {
            const PwamSymbol s = taom_modulate(a, w, kCfg);
            CHECK(s.energy() == a * w);
            CHECK(s.sign == (w < 0 ? -1 : 1));
        }
    CHECK_THROWS_AS(taom_modulate(16, 1, kCfg), ValidationError);
    CHECK_THROWS_AS(taom_modulate(-1, 1, kCfg), ValidationError);
    CHECK_THROWS_AS(taom_modulate(1, 9, kCfg), ValidationError);
}

TEST_CASE("TAOM config keeps the full-scale pulse inside one symbol") {
    for (double dr : {1e9, 5e9, 10e9}) {
        const TaomConfig c = TaomConfig::fitted(4, 4, dr);
        CHECK_NOTHROW(c.validate());
        CHECK(c.max_width_code() * c.unit_width_ps <= c.symbol_period_ps());
    }
    TaomConfig bad = kCfg;
    bad.unit_width_ps = 100;  // 15 * 100 ps > 1 ns
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("bpd_superpose sums signed energies") {
    std::vector<PwamSymbol> cancel{taom_modulate(3, 5, kCfg), taom_modulate(3, -5, kCfg)};
    CHECK(bpd_superpose(cancel) == 0);

    // two negative products on one cycle give a negative sum
    std::vector<PwamSymbol> xy{taom_modulate(2, -3, kCfg), taom_modulate(4, -1, kCfg)};
    CHECK(bpd_superpose(xy) < 0);

    std::mt19937 rng(1);
    for (int t = 0; t < 100; ++t) {
        std::vector<PwamSymbol> s;
        long long want = 0;
        for (int i = 0; i < 8; ++i) {
            const int a = rng() % 16, w = int(rng() % 16) - 8;
            s.push_back(taom_modulate(a, w, kCfg));
            want += a * w;
        }
        CHECK(bpd_superpose(s) == want);
    }
}

TEST_CASE("tir_accumulate adds only to the active capacitor") {
    CapacitorBank b(3);
    b.tir_accumulate(-5);
    CHECK(b.voltage(1) == -5);
    CHECK(b.voltage(2) == 0);

    // four cycles of (X + Y) pairs accumulate to their total
    CapacitorBank f(1);
    const long long xs[] = {-3, 7, 2, -11}, ys[] = {4, -6, 9, 1};
    long long total = 0;
    for (int i = 0; i < 4; ++i) {
        f.tir_accumulate(xs[i] + ys[i]);
        total += xs[i] + ys[i];
    }
    CHECK(f.voltage(1) == total);

    std::mt19937 rng(2);
    CapacitorBank r(1);
    long long s = 0;
    for (int i = 0; i < 100; ++i) {
        const int v = int(rng() % 2001) - 1000;
        r.tir_accumulate(v);
        s += v;
    }
    CHECK(r.voltage(1) == s);
}

TEST_CASE("select_capacitor preserves voltages") {
    CapacitorBank b(2);
    b.select_capacitor(1);
    b.tir_accumulate(9);
    b.select_capacitor(2);
    b.select_capacitor(1);
    CHECK(b.voltage(1) == 9);
    CHECK(b.switches() == 2);
    CHECK_THROWS_AS(b.select_capacitor(3), ValidationError);
    CHECK_THROWS_AS(b.select_capacitor(0), ValidationError);

    // interleaved accumulation keeps two independent partial sums
    std::mt19937 rng(3);
    long long s1 = 0, s2 = 0;
    CapacitorBank i(2);
    for (int t = 0; t < 200; ++t) {
        const int v = int(rng() % 201) - 100;
        const std::size_t c = 1 + rng() % 2;
        i.select_capacitor(c);
        i.tir_accumulate(v);
        (c == 1 ? s1 : s2) += v;
    }
    CHECK(i.voltage(1) == s1);
    CHECK(i.voltage(2) == s2);
}

TEST_CASE("adc_readout converts and resets") {
    CapacitorBank b(2);
    b.tir_accumulate(42);
    b.select_capacitor(2);
    b.tir_accumulate(5);
    b.select_capacitor(1);
    CHECK(b.adc_readout().code == 42);
    CHECK(b.voltage(1) == 0);
    CHECK(b.voltage(2) == 5);
    CHECK(b.adc_readout().code == 0);
    CHECK(b.conversions() == 2);
}

TEST_CASE("readout noise matches the configured MAE") {
    const double e8 = mean_abs_error(8, 100000, 9);
    CHECK(std::abs(e8 - std::exp2(-8)) < 0.2 * std::exp2(-8));
    CHECK(mean_abs_error(4, 100000, 9) > e8);
    CHECK(e8 > mean_abs_error(12, 100000, 9));
}

TEST_CASE("noise is reproducible from the seed") {
    NoiseSource a({6, 77}), b({6, 77});
    for (int i = 0; i < 1000; ++i) CHECK(a.perturb(10, 100) == b.perturb(10, 100));
    CHECK_THROWS_AS(NoiseSource({0, 1}), ValidationError);
}

TEST_CASE("flipping weight signs negates the accumulation") {
    std::mt19937 rng(4);
    for (int t = 0; t < 50; ++t) {
        CapacitorBank p(1), n(1);
        for (int cyc = 0; cyc < 5; ++cyc) {
            std::vector<PwamSymbol> sp, sn;
            for (int l = 0; l < 4; ++l) {
                const int a = rng() % 16, w = int(rng() % 15) - 7;
                sp.push_back(taom_modulate(a, w, kCfg));
                sn.push_back(taom_modulate(a, -w, kCfg));
            }
            p.tir_accumulate(bpd_superpose(sp));
            n.tir_accumulate(bpd_superpose(sn));
        }
        CHECK(p.voltage(1) == -n.voltage(1));
    }
}

TEST_CASE("multiplier mode") {
    CHECK(multiplier_mode_step(3, -5, kCfg) == -15);
    CHECK(multiplier_mode_step(0, -8, kCfg) == 0);
    CHECK(multiplier_mode_step(1, 1, kCfg) == 1);
    CHECK_THROWS_AS(multiplier_mode_step(1, 100, kCfg), ValidationError);
}
