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

#include "heana/error.hpp"
#include "heana/tensor.hpp"

using namespace heana;

namespace {

// Counts sliding-window positions directly.
GemmDims windows(const ConvLayerShape &s) {
    std::size_t positions = 0;
    for (long y = -long(s.pad); y + long(s.kernel_h) <= long(s.in_h + s.pad); y += long(s.stride))
        for (long x = -long(s.pad); x + long(s.kernel_w) <= long(s.in_w + s.pad); x += long(s.stride))
            ++positions;
    return {positions, s.kernel_h * s.kernel_w * s.in_c, s.out_c};
}

QuantMatrix triple_loop(const QuantMatrix &I, const QuantMatrix &W) {
    QuantMatrix o(I.rows, W.cols, 32, true);
    for (std::size_t c = 0; c < I.rows; ++c)
        for (std::size_t d = 0; d < W.cols; ++d) {
            long long s = 0;
            for (std::size_t k = 0; k < I.cols; ++k) s += (long long)I.at(c, k) * W.at(k, d);
            o.at(c, d) = int(s);
        }
    return o;
}

QuantMatrix identity(std::size_t n) {
    QuantMatrix m(n, n, 2, false);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

} // namespace

TEST_CASE("lower_conv matches window enumeration") {
    ConvLayerShape a{4, 4, 1, 1, 1, 1, 1, 0};
    CHECK(lower_conv(a) == GemmDims{16, 1, 1});

    ConvLayerShape b{8, 8, 16, 3, 3, 32, 1, 1};
    CHECK(lower_conv(b) == windows(b));
    CHECK(lower_conv(b) == GemmDims{64, 144, 32});

    ConvLayerShape c{5, 5, 3, 3, 3, 8, 2, 0};
    CHECK(lower_conv(c) == windows(c));
    CHECK(lower_conv(c) == GemmDims{4, 27, 8});

    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        ConvLayerShape s{1 + rng() % 12, 1 + rng() % 12, 1 + rng() % 5, 1 + rng() % 4, 1 + rng() % 4,
                1 + rng() % 6, 1 + rng() % 3, rng() % 3};
        if (!s.out_h() || !s.out_w()) continue;
        CHECK(lower_conv(s) == windows(s));
    }
}

TEST_CASE("lower_conv rejects windows that do not fit") {
    ConvLayerShape s{2, 2, 1, 3, 3, 1, 1, 0};
    CHECK_THROWS_AS(lower_conv(s), ValidationError);
    ConvLayerShape z{4, 4, 0, 1, 1, 1, 1, 0};
    CHECK_THROWS_AS(lower_conv(z), ValidationError);
}

TEST_CASE("grouped conv lowers one group's channels") {
    ConvLayerShape dw{8, 8, 32, 3, 3, 32, 1, 1, 32};
    CHECK(lower_conv(dw) == GemmDims{64, 9, 32});
}

TEST_CASE("gemm_exact trivial cases") {
    const QuantMatrix W = random_matrix(4, 4, 4, true, 3);
    CHECK(gemm_exact({identity(4), W}).data == W.data);
    const QuantMatrix Z(4, 4, 4, false);
    for (auto v : gemm_exact({Z, W}).data) CHECK(v == 0);
}

TEST_CASE("gemm_exact agrees with a triple loop") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const QuantMatrix I = random_matrix(1 + s % 7, 1 + s % 5, 4, false, s);
        const QuantMatrix W = random_matrix(I.cols, 1 + s % 6, 4, true, s + 100);
        CHECK(gemm_exact({I, W}) == triple_loop(I, W));
    }
}

TEST_CASE("gemm_exact is bilinear in W") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const QuantMatrix I = random_matrix(5, 6, 4, false, s);
        const QuantMatrix W1 = random_matrix(6, 4, 4, true, s + 1);
        const QuantMatrix W2 = random_matrix(6, 4, 4, true, s + 2);
        QuantMatrix Ws(6, 4, 5, true);
        for (std::size_t i = 0; i < Ws.data.size(); ++i) Ws.data[i] = W1.data[i] + W2.data[i];
        const QuantMatrix a = gemm_exact({I, Ws}), b = gemm_exact({I, W1}), c = gemm_exact({I, W2});
        for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] == b.data[i] + c.data[i]);
    }
}

TEST_CASE("identity times W is W up to 64x64") {
    for (std::size_t n : {1, 2, 7, 16, 33, 64}) {
        const QuantMatrix W = random_matrix(n, n, 8, true, n);
        CHECK(gemm_exact({identity(n), W}).data == W.data);
    }
}

TEST_CASE("im2col then gemm equals direct convolution") {
    std::mt19937 rng(11);
    int checked = 0;
    while (checked < 60) {
        ConvLayerShape s{1 + rng() % 8, 1 + rng() % 8, 1 + rng() % 4, 1 + rng() % 3, 1 + rng() % 3,
                1 + rng() % 5, 1 + rng() % 2, rng() % 2};
        if (!s.out_h() || !s.out_w()) continue;
        ++checked;
        const QuantMatrix in = random_matrix(s.in_h * s.in_w, s.in_c, 4, false, rng());
        const QuantMatrix w = random_matrix(s.kernel_h * s.kernel_w * s.in_c, s.out_c, 4, true, rng());
        const QuantMatrix got = gemm_exact({im2col(in, s), w});
        for (std::size_t oy = 0; oy < s.out_h(); ++oy)
            for (std::size_t ox = 0; ox < s.out_w(); ++ox)
                for (std::size_t oc = 0; oc < s.out_c; ++oc) {
                    long long acc = 0;
                    for (std::size_t ky = 0; ky < s.kernel_h; ++ky)
                        for (std::size_t kx = 0; kx < s.kernel_w; ++kx)
                            for (std::size_t ic = 0; ic < s.in_c; ++ic) {
                                const long iy = long(oy * s.stride + ky) - long(s.pad);
                                const long ix = long(ox * s.stride + kx) - long(s.pad);
                                if (iy < 0 || ix < 0 || iy >= long(s.in_h) || ix >= long(s.in_w)) continue;
                                acc += (long long)in.at(iy * s.in_w + ix, ic)
                                        * w.at((ky * s.kernel_w + kx) * s.in_c + ic, oc);
                            }
                    CHECK(got.at(oy * s.out_w() + ox, oc) == acc);
                }
    }
}

TEST_CASE("quantize") {
    RealMatrix z{2, 2, {0, 0, 0, 0}};
    for (auto v : quantize(z, 4, false, 1.0).data) CHECK(v == 0);

    RealMatrix edge{1, 3, {1.0, 5.0, -5.0}};
    const QuantMatrix q = quantize(edge, 4, true, 1.0);
    CHECK(q.data[0] == 7);
    CHECK(q.data[1] == 7);
    CHECK(q.data[2] == -7);

    // half-way values round away from zero
    const double st = quant_step(4, true, 7.0);
    RealMatrix half{1, 2, {2.5 * st, -2.5 * st}};
    const QuantMatrix h = quantize(half, 4, true, 7.0);
    CHECK(h.data[0] == 3);
    CHECK(h.data[1] == -3);

    CHECK_THROWS_AS(quantize(z, 0, false, 1.0), ValidationError);
    CHECK_THROWS_AS(quantize(z, 17, false, 1.0), ValidationError);
}

TEST_CASE("4-bit unsigned reconstruction error is at most half a step") {
    RealMatrix v{1, 10000, {}};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) v.data.push_back(u(rng));
    const double step = quant_step(4, false, 1.0);
    const RealMatrix r = dequantize(quantize(v, 4, false, 1.0), step);
    double worst = 0;
    for (std::size_t i = 0; i < v.data.size(); ++i) worst = std::max(worst, std::abs(r.data[i] - v.data[i]));
    CHECK(worst <= step / 2 + 1e-15);
}

TEST_CASE("QuantMatrix validation") {
    QuantMatrix m(1, 2, 4, true);
    m.data = {-8, 7};
    CHECK_NOTHROW(m.validate());
    m.data[1] = 8;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    QuantMatrix u(1, 1, 4, false);
    u.data = {-1};
    CHECK_THROWS_AS(u.validate(), ValidationError);
}
