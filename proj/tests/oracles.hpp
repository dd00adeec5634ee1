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

// Reference models shared by the unit tests and the acceptance run. They are
// written from the loop nests directly and use nothing from the simulator
// beyond its plain data types.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "heana/dataflow.hpp"
#include "heana/tensor.hpp"

namespace oracle {

inline std::size_t cdiv(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

inline std::vector<long long> gemm(const heana::QuantMatrix &I, const heana::QuantMatrix &W) {
    std::vector<long long> o(I.rows * W.cols, 0);
    for (std::size_t c = 0; c < I.rows; ++c)
        for (std::size_t k = 0; k < I.cols; ++k)
            for (std::size_t d = 0; d < W.cols; ++d)
                o[c * W.cols + d] += (long long)I.data[c * I.cols + k] * W.data[k * W.cols + d];
    return o;
}

inline bool same(const heana::QuantMatrix &got, const std::vector<long long> &want) {
    if (got.data.size() != want.size()) return false;
    for (std::size_t i = 0; i < want.size(); ++i)
        if (got.data[i] != want[i]) return false;
    return true;
}

using Element = std::pair<std::size_t, std::size_t>;

// One DPU with a one-tile register per operand: a tile is fetched from the
// buffer whenever the previous frame held a different one.
struct Accesses {
    std::map<Element, int> input, weight;
    std::uint64_t output_writes = 0;
    std::size_t frames = 0;

    static std::uint64_t total(const std::map<Element, int> &m) {
        std::uint64_t s = 0;
        for (auto &kv : m) s += kv.second;
        return s;
    }
};

inline Accesses accesses(const heana::GemmDims &g, std::size_t N, std::size_t M, heana::Dataflow df) {
    Accesses o;
    std::set<Element> held_in, held_w;
    auto visit = [&](const std::set<Element> &in, const std::set<Element> &w) {
        ++o.frames;
        if (in != held_in)
            for (auto &e : in) ++o.input[e];
        if (w != held_w)
            for (auto &e : w) ++o.weight[e];
        held_in = in;
        held_w = w;
    };
    const std::size_t KT = cdiv(g.K, N);
    if (df == heana::Dataflow::WS) {
        for (std::size_t d = 0; d < g.D; ++d)
            for (std::size_t kt = 0; kt < KT; ++kt)
                for (std::size_t c0 = 0; c0 < g.C; c0 += M) {
                    std::set<Element> in, w;
                    for (std::size_t k = kt * N; k < std::min(g.K, kt * N + N); ++k) {
                        w.insert({k, d});
                        for (std::size_t c = c0; c < std::min(g.C, c0 + M); ++c) in.insert({c, k});
                    }
                    visit(in, w);
                }
    } else {
        for (std::size_t c = 0; c < g.C; ++c) {
            auto frame = [&](std::size_t kt, std::size_t d0) {
                std::set<Element> in, w;
                for (std::size_t k = kt * N; k < std::min(g.K, kt * N + N); ++k) {
                    in.insert({c, k});
                    for (std::size_t d = d0; d < std::min(g.D, d0 + M); ++d) w.insert({k, d});
                }
                visit(in, w);
            };
            if (df == heana::Dataflow::OS) {
                for (std::size_t d0 = 0; d0 < g.D; d0 += M)
                    for (std::size_t kt = 0; kt < KT; ++kt) frame(kt, d0);
            } else {
                for (std::size_t kt = 0; kt < KT; ++kt)
                    for (std::size_t d0 = 0; d0 < g.D; d0 += M) frame(kt, d0);
            }
        }
    }
    o.output_writes = g.C * g.D;
    return o;
}

// Peak number of output tiles opened but not yet finished along a schedule.
inline std::size_t in_flight(const heana::Schedule &s) {
    std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> open;
    std::size_t peak = 0;
    for (auto &f : s.frames) {
        auto key = std::make_tuple(f.rows.begin, f.rows.end, f.cols.begin, f.cols.end);
        open.insert(key);
        peak = std::max(peak, open.size());
        if (f.is_final_for_output) open.erase(key);
    }
    return peak;
}

} // namespace oracle
