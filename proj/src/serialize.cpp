#include "rwre/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace rwre {

namespace {

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
    throw ParseError("line " + std::to_string(line_no) + ": " + msg);
}

} // namespace

void serialize(const RootedEnvironment& env, std::ostream& out) {
    out << "env v=1 model=" << env.meta.model << " d=" << env.meta.d << " L=" << env.meta.L
        << " seed=" << env.meta.seed << " torus=" << (env.meta.torus ? 1 : 0) << " params=";
    bool first = true;
    for (auto& [k, v] : env.meta.params) {
        if (!first) out << ',';
        out << k << '=' << v;
        first = false;
    }
    out << " root=" << env.root << '\n';

    const std::int32_t n = env.num_vertices();
    for (std::int32_t v = 0; v < n; ++v) {
        out << "v " << v;
        if (env.embedded())
            for (auto c : env.coords_of(v)) out << ' ' << c;
        out << '\n';
    }
    if (env.reversible()) {
        for (std::int32_t v = 0; v < n; ++v)
            for (std::int64_t k = env.row_ptr[v]; k < env.row_ptr[v + 1]; ++k)
                if (env.col[k] >= v)
                    out << "e " << v << ' ' << env.col[k] << ' ' << fmt_g17(env.edge_weight[k])
                        << '\n';
    } else {
        for (std::int32_t v = 0; v < n; ++v)
            for (std::int64_t k = env.row_ptr[v]; k < env.row_ptr[v + 1]; ++k)
                out << "a " << v << ' ' << env.col[k] << ' ' << fmt_g17(env.prob[k]) << '\n';
    }
}

void serialize_to_file(const RootedEnvironment& env, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    serialize(env, f);
}

RootedEnvironment deserialize(std::istream& in) {
    RootedEnvironment env;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError("empty input");
    ++line_no;
    {
        std::istringstream hs(line);
        std::string tag;
        hs >> tag;
        if (tag != "env") fail(line_no, "expected 'env' header");
        std::string kv;
        while (hs >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) fail(line_no, "malformed header field '" + kv + "'");
            std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (key == "v") {
                if (val != "1") fail(line_no, "unsupported format version " + val);
            } else if (key == "model") {
                env.meta.model = val;
            } else if (key == "d") {
                env.meta.d = std::stoi(val);
            } else if (key == "L") {
                env.meta.L = std::stoi(val);
            } else if (key == "seed") {
                env.meta.seed = std::stoull(val);
            } else if (key == "torus") {
                env.meta.torus = val == "1";
            } else if (key == "root") {
                env.root = std::stoi(val);
            } else if (key == "params") {
                std::istringstream ps(val);
                std::string item;
                while (std::getline(ps, item, ',')) {
                    auto e2 = item.find('=');
                    if (e2 == std::string::npos) fail(line_no, "malformed params entry");
                    env.meta.params[item.substr(0, e2)] = item.substr(e2 + 1);
                }
            } else {
                fail(line_no, "unknown header key '" + key + "'");
            }
        }
    }

    struct Arc {
        std::int32_t i, j;
        double w;
    };
    std::vector<Arc> edges, arcs;
    std::vector<std::int32_t> coords;
    std::int32_t n_vertices = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            std::int32_t id;
            if (!(ls >> id)) fail(line_no, "bad vertex line");
            if (id != n_vertices) fail(line_no, "vertex ids must be consecutive from 0");
            ++n_vertices;
            std::int32_t c;
            int got = 0;
            while (ls >> c) {
                coords.push_back(c);
                ++got;
            }
            if (env.meta.d > 0 && got != 0 && got != env.meta.d)
                fail(line_no, "expected " + std::to_string(env.meta.d) + " coordinates");
        } else if (tag == "e" || tag == "a") {
            Arc a;
            if (!(ls >> a.i >> a.j >> a.w)) fail(line_no, "bad " + tag + " line");
            if (a.w < 0) fail(line_no, "negative weight");
            (tag == "e" ? edges : arcs).push_back(a);
        } else {
            fail(line_no, "unknown record '" + tag + "'");
        }
    }
    if (n_vertices == 0) throw ParseError("no vertices");
    if (!edges.empty() && !arcs.empty()) throw ParseError("mixed 'e' and 'a' records");
    if (!coords.empty() && coords.size() != static_cast<std::size_t>(n_vertices) * env.meta.d)
        throw ParseError("coordinate count inconsistent with d");
    env.coord = std::move(coords);

    std::vector<std::vector<std::pair<std::int32_t, double>>> adj(n_vertices);
    if (!edges.empty()) {
        for (auto& a : edges) {
            if (a.i < 0 || a.i >= n_vertices || a.j < 0 || a.j >= n_vertices)
                throw ParseError("edge endpoint out of range");
            adj[a.i].push_back({a.j, a.w});
            if (a.j != a.i) adj[a.j].push_back({a.i, a.w});
        }
        env.row_ptr.assign(n_vertices + 1, 0);
        for (std::int32_t v = 0; v < n_vertices; ++v) {
            std::sort(adj[v].begin(), adj[v].end());
            env.row_ptr[v + 1] = env.row_ptr[v] + static_cast<std::int64_t>(adj[v].size());
        }
        for (std::int32_t v = 0; v < n_vertices; ++v)
            for (auto& [w, wt] : adj[v]) {
                env.col.push_back(w);
                env.edge_weight.push_back(wt);
            }
        kernel_from_weights(env);
    } else {
        for (auto& a : arcs) {
            if (a.i < 0 || a.i >= n_vertices || a.j < 0 || a.j >= n_vertices)
                throw ParseError("arc endpoint out of range");
            adj[a.i].push_back({a.j, a.w});
        }
        env.row_ptr.assign(n_vertices + 1, 0);
        for (std::int32_t v = 0; v < n_vertices; ++v) {
            std::sort(adj[v].begin(), adj[v].end());
            env.row_ptr[v + 1] = env.row_ptr[v] + static_cast<std::int64_t>(adj[v].size());
        }
        for (std::int32_t v = 0; v < n_vertices; ++v)
            for (auto& [w, p] : adj[v]) {
                env.col.push_back(w);
                env.prob.push_back(p);
            }
    }

    env.validate();
    return env;
}

RootedEnvironment deserialize_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return deserialize(f);
}

} // namespace rwre
