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

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "heana/frontend.hpp"
#include "heana/kvconfig.hpp"

namespace heana {

std::string_view to_string(LayerKind k) {
    switch (k) {
        case LayerKind::Conv: return "conv";
        case LayerKind::Fc: return "fc";
        case LayerKind::Pool: return "pool";
        case LayerKind::Activation: return "activation";
    }
    return "?";
}

namespace {

struct Ctx {
    const std::string &src;
    std::size_t line;

    [[noreturn]] void fail(const std::string &field, const std::string &what) const {
        throw ParseError(src, line, field, what);
    }
};

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace((unsigned char)s[j])) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::size_t to_count(const Ctx &c, std::string_view field, std::string_view v) {
    std::size_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        c.fail(std::string(field), "'" + std::string(v) + "' is not a non-negative integer");
    return x;
}

// "AxBxC" with exactly n parts
std::vector<std::size_t> dims_of(const Ctx &c, std::string_view field, std::string_view v, std::size_t n) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t x = v.find('x', start);
        out.push_back(to_count(c, field, v.substr(start, x == std::string_view::npos ? v.npos : x - start)));
        if (x == std::string_view::npos) break;
        start = x + 1;
    }
    if (out.size() != n) c.fail(std::string(field), "expected " + std::to_string(n) + " extents");
    return out;
}

LayerKind kind_of(const Ctx &c, std::string_view s) {
    for (LayerKind k : {LayerKind::Conv, LayerKind::Fc, LayerKind::Pool, LayerKind::Activation})
        if (s == to_string(k)) return k;
    c.fail("kind", "unknown layer kind '" + std::string(s) + "'");
}

ManifestLayer parse_layer(const Ctx &c, const std::vector<std::string_view> &tok) {
    if (tok.size() < 3) c.fail("layer", "expected 'layer <name> <kind> key=value...'");
    ManifestLayer L;
    L.name = std::string(tok[1]);
    L.kind = kind_of(c, tok[2]);
    L.line = c.line;
    std::map<std::string, std::string_view> kv;
    for (std::size_t i = 3; i < tok.size(); ++i) {
        const auto eq = tok[i].find('=');
        if (eq == std::string_view::npos || eq == 0)
            c.fail(std::string(tok[i]), "expected key=value");
        const std::string key(tok[i].substr(0, eq));
        if (kv.count(key)) c.fail(key, "repeated key");
        kv[key] = tok[i].substr(eq + 1);
    }
    auto take = [&](const char *k) -> std::optional<std::string_view> {
        auto it = kv.find(k);
        if (it == kv.end()) return std::nullopt;
        const auto v = it->second;
        kv.erase(it);
        return v;
    };
    auto need = [&](const char *k) {
        auto v = take(k);
        if (!v) c.fail(k, "missing for layer '" + L.name + "'");
        return *v;
    };

    const bool explicit_dims = kv.count("C") || kv.count("K") || kv.count("D");
    if ((L.kind == LayerKind::Conv || L.kind == LayerKind::Fc) && explicit_dims) {
        L.dims = {to_count(c, "C", need("C")), to_count(c, "K", need("K")), to_count(c, "D", need("D"))};
    } else if (L.kind == LayerKind::Fc) {
        L.dims = {1, to_count(c, "in", need("in")), to_count(c, "out", need("out"))};
    } else {
        ConvLayerShape s;
        const auto in = dims_of(c, "in", need("in"), 3);
        s.in_h = in[0];
        s.in_w = in[1];
        s.in_c = in[2];
        if (L.kind != LayerKind::Activation) {
            const auto k = dims_of(c, "kernel", need("kernel"), 2);
            s.kernel_h = k[0];
            s.kernel_w = k[1];
            if (auto v = take("stride")) s.stride = to_count(c, "stride", *v);
            if (auto v = take("pad")) s.pad = to_count(c, "pad", *v);
        }
        if (L.kind == LayerKind::Conv) {
            s.out_c = to_count(c, "out", need("out"));
            if (auto v = take("groups")) s.groups = to_count(c, "groups", *v);
        } else {
            s.out_c = s.in_c;
        }
        L.shape = s;
    }
    if (!kv.empty()) c.fail(kv.begin()->first, "unexpected key for a " + std::string(to_string(L.kind)) + " layer");
    return L;
}

void finish_layer(ManifestLayer &L) {
    auto bad = [&](const std::string &what) { throw ValidationError("layer '" + L.name + "': " + what); };
    try {
        switch (L.kind) {
            case LayerKind::Conv:
            case LayerKind::Fc:
                if (L.shape) L.dims = lower_conv(*L.shape);
                if (!L.dims.C || !L.dims.K || !L.dims.D) bad("lowers to a zero GEMM dimension");
                break;
            case LayerKind::Pool: {
                const GemmDims g = lower_conv(*L.shape);
                L.elements = std::uint64_t(g.C) * g.K;  // window reads per output channel plane
                break;
            }
            case LayerKind::Activation: {
                const ConvLayerShape &s = *L.shape;
                if (!s.in_h || !s.in_w || !s.in_c) bad("zero extent");
                L.elements = std::uint64_t(s.in_h) * s.in_w * s.in_c;
                break;
            }
        }
    } catch (const ValidationError &e) {
        if (std::string(e.what()).rfind("layer '", 0) == 0) throw;
        bad(e.what());
    }
}

} // namespace

WorkloadManifest parse_manifest_text(std::string_view text, const std::string &source) {
    WorkloadManifest m;
    bool have_model = false;
    std::size_t lineno = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++lineno;
        if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        const Ctx c{source, lineno};
        if (tok[0] == "model") {
            if (tok.size() != 2) c.fail("model", "expected 'model <name>'");
            if (have_model) c.fail("model", "model given twice");
            m.model = std::string(tok[1]);
            have_model = true;
        } else if (tok[0] == "bits") {
            if (tok.size() != 2) c.fail("bits", "expected 'bits <B>'");
            m.bits = int(to_count(c, "bits", tok[1]));
        } else if (tok[0] == "batch") {
            if (tok.size() != 2) c.fail("batch", "expected 'batch <N>'");
            m.batch = to_count(c, "batch", tok[1]);
        } else if (tok[0] == "layer") {
            m.layers.push_back(parse_layer(c, tok));
        } else {
            c.fail(std::string(tok[0]), "unknown directive");
        }
    }
    if (!have_model) throw ParseError(source, 0, "model", "missing 'model' line");
    if (m.bits < 1 || m.bits > 16) throw ValidationError("bits must be in [1, 16]");
    if (!m.batch) throw ValidationError("batch must be >= 1");
    if (m.layers.empty()) throw ValidationError("manifest '" + m.model + "' has no layers");
    std::set<std::string> names;
    for (auto &L : m.layers) {
        if (!names.insert(L.name).second) throw ValidationError("duplicate layer name '" + L.name + "'");
        finish_layer(L);
    }
    return m;
}

WorkloadManifest parse_manifest(const std::string &path) { return parse_manifest_text(read_file(path), path); }

std::string serialize_manifest(const WorkloadManifest &m) {
    std::ostringstream os;
    os << "model " << m.model << "\nbits " << m.bits << "\nbatch " << m.batch << "\n";
    for (const auto &L : m.layers) {
        os << "layer " << L.name << ' ' << to_string(L.kind);
        if (!L.shape) {
            os << " C=" << L.dims.C << " K=" << L.dims.K << " D=" << L.dims.D;
        } else {
            const ConvLayerShape &s = *L.shape;
            os << " in=" << s.in_h << 'x' << s.in_w << 'x' << s.in_c;
            if (L.kind != LayerKind::Activation)
                os << " kernel=" << s.kernel_h << 'x' << s.kernel_w << " stride=" << s.stride << " pad=" << s.pad;
            if (L.kind == LayerKind::Conv) {
                os << " out=" << s.out_c;
                if (s.groups != 1) os << " groups=" << s.groups;
            }
        }
        os << '\n';
    }
    return os.str();
}

std::vector<LayerWork> WorkloadManifest::work() const {
    std::vector<LayerWork> out;
    for (const auto &L : layers) out.push_back({L.name, L.kind, L.dims, L.elements});
    return out;
}

} // namespace heana
