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

#include "heana/tensor.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "heana/error.hpp"

namespace heana {

std::int64_t QuantMatrix::min_code() const {
    return is_signed ? -(std::int64_t(1) << (bits - 1)) : 0;
}

std::int64_t QuantMatrix::max_code() const {
    return is_signed ? (std::int64_t(1) << (bits - 1)) - 1 : (std::int64_t(1) << bits) - 1;
}

void QuantMatrix::validate() const {
    if (bits < 1 || bits > 32)
        throw ValidationError("bit width " + std::to_string(bits) + " outside [1, 32]");
    if (data.size() != rows * cols)
        throw ValidationError("matrix data length does not match rows x cols");
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!fits(data[i]))
            throw ValidationError("element " + std::to_string(i) + " = "
                    + std::to_string(data[i]) + " does not fit " + std::to_string(bits)
                    + (is_signed ? "-bit signed" : "-bit unsigned"));
}

void GemmProblem::validate() const {
    I.validate();
    W.validate();
    if (I.cols != W.rows)
        throw ValidationError("shared dimension mismatch: I has " + std::to_string(I.cols)
                + " columns, W has " + std::to_string(W.rows) + " rows");
    if (I.rows == 0 || I.cols == 0 || W.cols == 0)
        throw ValidationError("empty GEMM operand");
}

static std::size_t out_extent(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad) {
    if (stride == 0) return 0;
    const std::size_t span = in + 2 * pad;
    if (span < k) return 0;
    return (span - k) / stride + 1;
}

std::size_t ConvLayerShape::out_h() const { return out_extent(in_h, kernel_h, stride, pad); }
std::size_t ConvLayerShape::out_w() const { return out_extent(in_w, kernel_w, stride, pad); }

GemmDims lower_conv(const ConvLayerShape &s) {
    if (!s.in_h || !s.in_w || !s.in_c || !s.kernel_h || !s.kernel_w || !s.out_c || !s.stride
            || !s.groups)
        throw ValidationError("convolution shape has a zero count");
    if (s.in_c % s.groups || s.out_c % s.groups)
        throw ValidationError("channel counts are not divisible by groups");
    const std::size_t oh = s.out_h(), ow = s.out_w();
    if (!oh || !ow) throw ValidationError("convolution window does not fit the input");
    return {oh * ow, s.kernel_h * s.kernel_w * (s.in_c / s.groups), s.out_c};
}

QuantMatrix im2col(const QuantMatrix &input, const ConvLayerShape &s) {
    const GemmDims g = lower_conv(s);
    if (s.groups != 1) throw ValidationError("im2col supports groups == 1 only");
    if (input.rows != s.in_h * s.in_w || input.cols != s.in_c)
        throw ValidationError("input tensor shape does not match the layer");
    QuantMatrix t(g.C, g.K, input.bits, input.is_signed);
    const std::size_t ow = s.out_w();
    for (std::size_t r = 0; r < g.C; ++r) {
        const long oy = long(r / ow), ox = long(r % ow);
        for (std::size_t ky = 0; ky < s.kernel_h; ++ky)
            for (std::size_t kx = 0; kx < s.kernel_w; ++kx) {
                const long iy = oy * long(s.stride) + long(ky) - long(s.pad);
                const long ix = ox * long(s.stride) + long(kx) - long(s.pad);
                if (iy < 0 || ix < 0 || iy >= long(s.in_h) || ix >= long(s.in_w)) continue;
                const std::size_t base = (ky * s.kernel_w + kx) * s.in_c;
                for (std::size_t ch = 0; ch < s.in_c; ++ch)
                    t.at(r, base + ch) = input.at(std::size_t(iy) * s.in_w + std::size_t(ix), ch);
            }
    }
    return t;
}

QuantMatrix gemm_exact(const GemmProblem &p) {
    p.validate();
    const GemmDims g = p.dims();
    QuantMatrix o(g.C, g.D, 32, true);
    std::vector<std::int64_t> row(g.D);
    for (std::size_t c = 0; c < g.C; ++c) {
        std::fill(row.begin(), row.end(), 0);
        for (std::size_t k = 0; k < g.K; ++k) {
            const std::int64_t a = p.I.at(c, k);
            if (!a) continue;
            const std::int32_t *w = &p.W.data[k * g.D];
            for (std::size_t d = 0; d < g.D; ++d) row[d] += a * w[d];
        }
        for (std::size_t d = 0; d < g.D; ++d) {
            if (row[d] > std::numeric_limits<std::int32_t>::max()
                    || row[d] < std::numeric_limits<std::int32_t>::min())
                throw ValidationError("GEMM result overflows the 32-bit accumulator");
            o.at(c, d) = std::int32_t(row[d]);
        }
    }
    return o;
}

double quant_step(int bits, bool is_signed, double range) {
    if (bits < 1 || bits > 16) throw ValidationError("quantization bits must be in [1, 16]");
    if (!(range > 0)) throw ValidationError("quantization range must be positive");
    const double qmax = is_signed ? double((1 << (bits - 1)) - 1) : double((1 << bits) - 1);
    if (qmax <= 0) throw ValidationError("1-bit signed quantization has no positive code");
    return range / qmax;
}

QuantMatrix quantize(const RealMatrix &v, int bits, bool is_signed, double range) {
    const double step = quant_step(bits, is_signed, range);
    if (v.data.size() != v.rows * v.cols) throw ValidationError("real matrix shape mismatch");
    QuantMatrix q(v.rows, v.cols, bits, is_signed);
    const double hi = is_signed ? double((1 << (bits - 1)) - 1) : double((1 << bits) - 1);
    const double lo = is_signed ? -hi : 0.0;
    for (std::size_t i = 0; i < v.data.size(); ++i) {
        // std::round rounds half away from zero
        double code = std::round(v.data[i] / step);
        if (code > hi) code = hi;
        if (code < lo) code = lo;
        q.data[i] = std::int32_t(code);
    }
    return q;
}

RealMatrix dequantize(const QuantMatrix &q, double step) {
    RealMatrix r{q.rows, q.cols, std::vector<double>(q.data.size())};
    for (std::size_t i = 0; i < q.data.size(); ++i) r.data[i] = q.data[i] * step;
    return r;
}

QuantMatrix random_matrix(std::size_t rows, std::size_t cols, int bits, bool is_signed,
        std::uint64_t seed) {
    QuantMatrix m(rows, cols, bits, is_signed);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> dist(m.min_code(), m.max_code());
    for (auto &x : m.data) x = std::int32_t(dist(rng));
    return m;
}

} // namespace heana
