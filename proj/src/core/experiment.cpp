#include "experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <thread>

#include "bisect.hpp"
#include "continuum.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "graph.hpp"
#include "kernels.hpp"
#include "numerics.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "svg.hpp"
#include "table.hpp"
#include "transport.hpp"

#ifndef PCTV_VERSION
#define PCTV_VERSION "0.0.0"
#endif

namespace pctv::experiment {

namespace {

using json = nlohmann::ordered_json;
using table::number;

// ---------------------------------------------------------------------------
// Config reading. Every error names the JSON pointer of the offending value.

std::string child(const std::string& path, std::string_view key) {
    std::string out = path + "/";
    for (char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
    fail(ErrorCode::Config, (path.empty() ? std::string("(root)") : path) + ": " + msg);
}

void check_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) bad(path, "expected an object");
    for (const auto& item : j.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) bad(child(path, item.key()), "unknown key");
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) bad(path, "expected a finite number");
    return v;
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
    return obj.contains(key) ? as_number(obj.at(key), child(path, key)) : fallback;
}

double get_positive(const json& obj, const std::string& path, const char* key, double fallback) {
    const double v = get_number(obj, path, key, fallback);
    if (!(v > 0.0)) bad(child(path, key), "must be positive");
    return v;
}

std::uint64_t as_uint(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        if (j.get<std::int64_t>() < 0) bad(path, "must be non-negative");
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    bad(path, "expected a non-negative integer");
}

std::uint64_t get_uint(const json& obj, const std::string& path, const char* key, std::uint64_t fallback) {
    return obj.contains(key) ? as_uint(obj.at(key), child(path, key)) : fallback;
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) bad(child(path, key), "expected true or false");
    return obj.at(key).get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) bad(child(path, key), "expected a string");
    return obj.at(key).get<std::string>();
}

std::vector<double> as_numbers(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_number(j[k], child(path, k)));
    return out;
}

std::vector<geometry::Point2> as_points2(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array of [x, y] pairs");
    std::vector<geometry::Point2> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto v = as_numbers(j[k], child(path, k));
        if (v.size() != 2) bad(child(path, k), "expected [x, y]");
        out.push_back({v[0], v[1]});
    }
    return out;
}

// Re-raise a library error from a constructor as a config error at `path`.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw;
        bad(path, e.what());
    }
}

// ---------------------------------------------------------------------------
// Config pieces. Each carries the fully resolved JSON it was read from.

struct DomainCfg {
    geometry::Domain domain;
    json resolved;
};

DomainCfg parse_domain(const json& root, const std::string& rpath, const std::string& default_type) {
    const std::string path = child(rpath, "domain");
    const json node = root.contains("domain") ? root.at("domain") : json{{"type", default_type}};
    if (!node.is_object()) bad(path, "expected an object");
    const std::string type = get_string(node, path, "type", "");
    json r;
    r["type"] = type;
    if (type == "unit-cube") {
        check_object(node, path, {"type", "dim"});
        const auto d = get_uint(node, path, "dim", 2);
        if (d < 1 || d > 8) bad(child(path, "dim"), "must be between 1 and 8");
        r["dim"] = d;
        return {geometry::Domain::unit_cube(static_cast<int>(d)), r};
    }
    if (type == "box") {
        check_object(node, path, {"type", "lower", "upper"});
        if (!node.contains("lower") || !node.contains("upper")) bad(path, "box needs lower and upper");
        auto lo = as_numbers(node.at("lower"), child(path, "lower"));
        auto hi = as_numbers(node.at("upper"), child(path, "upper"));
        r["lower"] = lo;
        r["upper"] = hi;
        return {at_path(path, [&] { return geometry::Domain::box(lo, hi); }), r};
    }
    if (type == "dumbbell") {
        check_object(node, path, {"type", "neck_width", "neck_length"});
        const double w = get_positive(node, path, "neck_width", 0.15);
        const double l = get_positive(node, path, "neck_length", 0.5);
        r["neck_width"] = w;
        r["neck_length"] = l;
        return {at_path(path, [&] { return geometry::Domain::dumbbell(w, l); }), r};
    }
    if (type == "union") {
        check_object(node, path, {"type", "boxes"});
        if (!node.contains("boxes") || !node.at("boxes").is_array()) bad(child(path, "boxes"), "expected an array of boxes");
        std::vector<geometry::Box> boxes;
        json rb = json::array();
        for (std::size_t k = 0; k < node.at("boxes").size(); ++k) {
            const auto bp = child(child(path, "boxes"), k);
            const auto& b = node.at("boxes")[k];
            check_object(b, bp, {"lower", "upper"});
            if (!b.contains("lower") || !b.contains("upper")) bad(bp, "box needs lower and upper");
            geometry::Box box{as_numbers(b.at("lower"), child(bp, "lower")), as_numbers(b.at("upper"), child(bp, "upper"))};
            rb.push_back({{"lower", box.lower}, {"upper", box.upper}});
            boxes.push_back(std::move(box));
        }
        r["boxes"] = rb;
        return {at_path(path, [&] { return geometry::Domain::box_union(boxes); }), r};
    }
    if (type == "polygon") {
        check_object(node, path, {"type", "vertices"});
        if (!node.contains("vertices")) bad(path, "polygon needs vertices");
        auto v = as_points2(node.at("vertices"), child(path, "vertices"));
        json rv = json::array();
        for (const auto& p : v) rv.push_back({p[0], p[1]});
        r["vertices"] = rv;
        return {at_path(path, [&] { return geometry::Domain::convex_polygon(v); }), r};
    }
    bad(child(path, "type"), "unknown domain type '" + type + "' (unit-cube, box, dumbbell, union, polygon)");
}

struct DensityCfg {
    geometry::Density density;
    json resolved;
};

DensityCfg parse_density(const json& root, const std::string& rpath, const geometry::Domain& domain) {
    const std::string path = child(rpath, "density");
    const json node = root.contains("density") ? root.at("density") : json{{"type", "uniform"}};
    if (!node.is_object()) bad(path, "expected an object");
    const std::string type = get_string(node, path, "type", "");
    json r;
    r["type"] = type;
    if (type == "uniform") {
        check_object(node, path, {"type"});
        return {geometry::Density::uniform(domain), r};
    }
    if (type == "affine") {
        check_object(node, path, {"type", "constant", "gradient"});
        const double c = get_number(node, path, "constant", 1.0);
        std::vector<double> g(domain.dim(), 0.0);
        if (node.contains("gradient")) g = as_numbers(node.at("gradient"), child(path, "gradient"));
        if (static_cast<int>(g.size()) != domain.dim()) bad(child(path, "gradient"), "length must equal the domain dimension");
        r["constant"] = c;
        r["gradient"] = g;
        return {at_path(path, [&] { return geometry::Density::affine(domain, c, g); }), r};
    }
    bad(child(path, "type"), "unknown density type '" + type + "' (uniform, affine)");
}

struct KernelCfg {
    kernels::KernelProfile profile;
    json resolved;
};

KernelCfg parse_kernel(const json& root, const std::string& rpath, int d) {
    const std::string path = child(rpath, "kernel");
    const json node = root.contains("kernel") ? root.at("kernel") : json{{"name", "indicator"}};
    if (!node.is_object()) bad(path, "expected an object");
    kernels::KernelSpec spec;
    spec.name = get_string(node, path, "name", "");
    json r;
    r["name"] = spec.name;
    if (spec.name == "indicator") {
        check_object(node, path, {"name", "radius"});
        spec.radius = get_positive(node, path, "radius", 1.0);
        r["radius"] = spec.radius;
    } else if (spec.name == "gaussian") {
        check_object(node, path, {"name", "width"});
        spec.width = get_positive(node, path, "width", 1.0);
        r["width"] = spec.width;
    } else if (spec.name == "step-sum") {
        check_object(node, path, {"name", "steps"});
        const auto sp = child(path, "steps");
        if (!node.contains("steps") || !node.at("steps").is_array() || node.at("steps").empty())
            bad(sp, "expected a non-empty array of [radius, height] pairs");
        json rs = json::array();
        for (std::size_t k = 0; k < node.at("steps").size(); ++k) {
            const auto v = as_numbers(node.at("steps")[k], child(sp, k));
            if (v.size() != 2) bad(child(sp, k), "expected [radius, height]");
            spec.steps.push_back({v[0], v[1]});
            rs.push_back({v[0], v[1]});
        }
        r["steps"] = rs;
    } else {
        bad(child(path, "name"), "unknown kernel type '" + spec.name + "' (indicator, gaussian, step-sum)");
    }
    auto profile = at_path(path, [&] { return kernels::make_profile(spec); });
    const auto report = at_path(path, [&] { return kernels::validate_profile(profile, d, 1e-9); });
    if (!report.ok()) bad(path, "kernel violates its assumptions: " + report.detail);
    return {profile, r};
}

struct EpsRule {
    std::string rule;
    double c = 1.0, gamma = 1.0, lambda = 1.0, value = 0.0;
    json resolved;
    std::string label;

    double operator()(std::size_t n, int d) const {
        const double nn = static_cast<double>(n), logn = std::log(nn);
        if (rule == "fixed") return value;
        if (rule == "sub-connectivity") return lambda * std::pow(logn / nn, 1.0 / d);
        const double rate = d == 2 ? std::pow(logn, 0.75) / std::sqrt(nn) : std::pow(logn / nn, 1.0 / d);
        return c * std::pow(rate, rule == "admissible" ? gamma : 1.0);
    }
};

std::vector<EpsRule> parse_eps(const json& root, const std::string& rpath, int d, const json& fallback) {
    const std::string path = child(rpath, "eps");
    json node = root.contains("eps") ? root.at("eps") : fallback;
    const bool single = node.is_object();
    if (single) node = json::array({node});
    if (!node.is_array()) bad(path, "expected an eps rule object or an array of them");
    std::vector<EpsRule> out;
    for (std::size_t k = 0; k < node.size(); ++k) {
        const auto p = single ? path : child(path, k);
        const auto& e = node[k];
        if (!e.is_object()) bad(p, "expected an object");
        EpsRule r;
        r.rule = get_string(e, p, "rule", "");
        r.resolved["rule"] = r.rule;
        char buf[96];
        if (r.rule == "fixed") {
            check_object(e, p, {"rule", "value"});
            if (!e.contains("value")) bad(p, "fixed rule needs a value");
            r.value = get_positive(e, p, "value", 0.0);
            r.resolved["value"] = r.value;
            std::snprintf(buf, sizeof buf, "fixed(%.6g)", r.value);
        } else if (r.rule == "admissible" || r.rule == "borderline") {
            if (d < 2) bad(p, "the " + r.rule + " rule needs dimension >= 2");
            check_object(e, p, r.rule == "admissible" ? std::initializer_list<std::string_view>{"rule", "c", "gamma"}
                                                      : std::initializer_list<std::string_view>{"rule", "c"});
            r.c = get_positive(e, p, "c", 1.0);
            r.resolved["c"] = r.c;
            if (r.rule == "admissible") {
                r.gamma = get_number(e, p, "gamma", 0.9);
                if (!(r.gamma > 0.0 && r.gamma < 1.0)) bad(child(p, "gamma"), "admissible rule needs 0 < gamma < 1");
                r.resolved["gamma"] = r.gamma;
                std::snprintf(buf, sizeof buf, "admissible(c=%.6g,gamma=%.6g)", r.c, r.gamma);
            } else {
                std::snprintf(buf, sizeof buf, "borderline(c=%.6g)", r.c);
            }
        } else if (r.rule == "sub-connectivity") {
            check_object(e, p, {"rule", "lambda"});
            r.lambda = get_positive(e, p, "lambda", 0.5);
            r.resolved["lambda"] = r.lambda;
            std::snprintf(buf, sizeof buf, "sub-connectivity(lambda=%.6g)", r.lambda);
        } else {
            bad(child(p, "rule"), "unknown eps rule '" + r.rule + "' (fixed, admissible, borderline, sub-connectivity)");
        }
        r.label = buf;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::size_t> parse_n(const json& root, const std::string& rpath, const json& fallback, bool even) {
    const std::string path = child(rpath, "n");
    const json node = root.contains("n") ? root.at("n") : fallback;
    if (!node.is_array()) bad(path, "expected an array of sample sizes");
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < node.size(); ++k) {
        const auto v = as_uint(node[k], child(path, k));
        if (v < 2) bad(child(path, k), "sample size must be at least 2");
        if (even && v % 2) bad(child(path, k), "sample size must be even");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::vector<std::uint64_t> parse_seeds(const json& root, const std::string& rpath) {
    const std::string path = child(rpath, "seeds");
    const json node = root.contains("seeds") ? root.at("seeds") : json::array({0});
    if (!node.is_array()) bad(path, "expected an array of seeds");
    std::vector<std::uint64_t> out;
    for (std::size_t k = 0; k < node.size(); ++k) out.push_back(as_uint(node[k], child(path, k)));
    return out;
}

struct FunctionCfg {
    continuum::SmoothFunction fn;
    json resolved;
};

FunctionCfg parse_function(const json& root, const std::string& rpath, int d) {
    const std::string path = child(rpath, "function");
    const json node = root.contains("function") ? root.at("function") : json{{"type", "coordinate"}};
    if (!node.is_object()) bad(path, "expected an object");
    const std::string type = get_string(node, path, "type", "");
    json r;
    r["type"] = type;
    if (type == "coordinate") {
        check_object(node, path, {"type", "axis"});
        const auto axis = get_uint(node, path, "axis", 0);
        if (axis >= static_cast<std::uint64_t>(d)) bad(child(path, "axis"), "axis out of range");
        r["axis"] = axis;
        return {continuum::coordinate(static_cast<int>(axis)), r};
    }
    if (type == "affine") {
        check_object(node, path, {"type", "constant", "gradient"});
        const double c = get_number(node, path, "constant", 0.0);
        if (!node.contains("gradient")) bad(path, "affine function needs a gradient");
        auto g = as_numbers(node.at("gradient"), child(path, "gradient"));
        if (static_cast<int>(g.size()) != d) bad(child(path, "gradient"), "length must equal the domain dimension");
        r["constant"] = c;
        r["gradient"] = g;
        continuum::SmoothFunction f;
        f.value = [c, g](std::span<const double> x) {
            double s = c;
            for (std::size_t k = 0; k < g.size(); ++k) s += g[k] * x[k];
            return s;
        };
        f.gradient = [g](std::span<const double>, std::span<double> out) { std::copy(g.begin(), g.end(), out.begin()); };
        return {f, r};
    }
    bad(child(path, "type"), "unknown function type '" + type + "' (coordinate, affine)");
}

struct SetCfg {
    std::function<bool(std::span<const double>)> contains;
    std::function<double(const geometry::Domain&, const geometry::Density&)> weighted_perimeter;
    json resolved;
};

SetCfg parse_set(const json& root, const std::string& rpath, int d) {
    const std::string path = child(rpath, "set");
    const json node = root.contains("set") ? root.at("set") : json{{"type", "half-space"}};
    if (!node.is_object()) bad(path, "expected an object");
    const std::string type = get_string(node, path, "type", "");
    json r;
    r["type"] = type;
    if (type == "half-space") {
        check_object(node, path, {"type", "axis", "position"});
        const auto axis = get_uint(node, path, "axis", 0);
        if (axis >= static_cast<std::uint64_t>(d)) bad(child(path, "axis"), "axis out of range");
        const double pos = get_number(node, path, "position", 0.5);
        r["axis"] = axis;
        r["position"] = pos;
        const int a = static_cast<int>(axis);
        return {[a, pos](std::span<const double> x) { return x[a] < pos; },
                [a, pos](const geometry::Domain& dom, const geometry::Density& rho) {
                    return continuum::weighted_planar_cut(dom, rho, a, pos);
                },
                r};
    }
    if (d != 2) bad(child(path, "type"), "set type '" + type + "' needs a planar domain");
    continuum::PolygonalSet poly;
    if (type == "disk") {
        check_object(node, path, {"type", "centre", "radius", "segments"});
        if (!node.contains("centre")) bad(path, "disk needs a centre");
        const auto c = as_numbers(node.at("centre"), child(path, "centre"));
        if (c.size() != 2) bad(child(path, "centre"), "expected [x, y]");
        const double rad = get_positive(node, path, "radius", 0.25);
        const auto seg = get_uint(node, path, "segments", 512);
        if (seg < 3) bad(child(path, "segments"), "need at least 3 segments");
        r["centre"] = c;
        r["radius"] = rad;
        r["segments"] = seg;
        poly = continuum::PolygonalSet::disk({c[0], c[1]}, rad, static_cast<int>(seg));
    } else if (type == "polygon") {
        check_object(node, path, {"type", "vertices"});
        if (!node.contains("vertices")) bad(path, "polygon needs vertices");
        poly.vertices = as_points2(node.at("vertices"), child(path, "vertices"));
        if (poly.vertices.size() < 3) bad(child(path, "vertices"), "need at least 3 vertices");
        json rv = json::array();
        for (const auto& p : poly.vertices) rv.push_back({p[0], p[1]});
        r["vertices"] = rv;
    } else {
        bad(child(path, "type"), "unknown set type '" + type + "' (half-space, disk, polygon)");
    }
    return {[poly](std::span<const double> x) { return poly.contains({x[0], x[1]}); },
            [poly](const geometry::Domain& dom, const geometry::Density& rho) {
                return continuum::weighted_perimeter(poly, rho, dom);
            },
            r};
}

// ---------------------------------------------------------------------------
// Execution helpers.

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= count) return;
            try {
                slots[k].emplace(fn(k));
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const unsigned t = static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1U), count));
    if (t <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// Job order: eps rule, then n, then seed (config order).
struct Job {
    std::size_t rule;
    std::size_t n;
    std::uint64_t seed;
};

std::vector<Job> jobs(std::size_t rules, const std::vector<std::size_t>& ns, const std::vector<std::uint64_t>& seeds) {
    std::vector<Job> out;
    for (std::size_t r = 0; r < rules; ++r)
        for (auto n : ns)
            for (auto s : seeds) out.push_back({r, n, s});
    return out;
}

/// Sample used for (seed, n) by every experiment, so the same seed gives the
/// same point cloud across eps rules.
geometry::PointCloud sample_for(const geometry::Domain& dom, const geometry::Density& rho, std::size_t n, std::uint64_t seed) {
    return geometry::sample_iid(dom, rho, n, derive_seed(seed, n));
}

json header(std::string_view name, const json& config) {
    json j;
    j["experiment"] = name;
    j["version"] = PCTV_VERSION;
    j["rng"] = {{"name", Rng::name()}, {"version", Rng::version()}};
    j["config"] = config;
    return j;
}

std::string finish(const json& j) { return j.dump(2) + "\n"; }

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

const char* colour(std::size_t k) { return kPalette[k % (sizeof kPalette / sizeof *kPalette)]; }

// Medians per (rule, n) group of a per-job metric, in job order.
struct Group {
    std::size_t rule;
    std::size_t n;
    std::vector<std::size_t> members;
};

std::vector<Group> groups(const std::vector<Job>& js) {
    std::vector<Group> out;
    for (std::size_t k = 0; k < js.size(); ++k) {
        if (out.empty() || out.back().rule != js[k].rule || out.back().n != js[k].n) out.push_back({js[k].rule, js[k].n, {}});
        out.back().members.push_back(k);
    }
    return out;
}

template <class Get>
double group_median(const Group& g, Get&& get) {
    std::vector<double> v;
    for (auto k : g.members) v.push_back(get(k));
    return numerics::median(std::move(v));
}

// ---------------------------------------------------------------------------
// Experiments.

struct CommonCfg {
    DomainCfg domain;
    DensityCfg density;
    KernelCfg kernel;
    std::vector<std::size_t> n;
    std::vector<EpsRule> eps;
    std::vector<std::uint64_t> seeds;
    json resolved;
};

CommonCfg parse_common(const json& cfg, const std::string& default_domain, const json& default_n, const json& default_eps,
                       bool even_n) {
    auto dom = parse_domain(cfg, "", default_domain);
    auto den = parse_density(cfg, "", dom.domain);
    auto ker = parse_kernel(cfg, "", dom.domain.dim());
    auto n = parse_n(cfg, "", default_n, even_n);
    auto eps = parse_eps(cfg, "", dom.domain.dim(), default_eps);
    auto seeds = parse_seeds(cfg, "");
    json r;
    r["domain"] = dom.resolved;
    r["density"] = den.resolved;
    r["kernel"] = ker.resolved;
    r["n"] = n;
    json re = json::array();
    for (const auto& e : eps) re.push_back(e.resolved);
    r["eps"] = re;
    r["seeds"] = seeds;
    return {std::move(dom), std::move(den), std::move(ker), std::move(n), std::move(eps), std::move(seeds), std::move(r)};
}

const json kDefaultEps = json{{"rule", "borderline"}, {"c", 2.0}};

std::vector<std::string> describe(const CommonCfg& c, const Job& j, double eps) {
    return {c.eps[j.rule].label, std::to_string(j.n), std::to_string(c.domain.domain.dim()), number(eps), std::to_string(j.seed),
            c.kernel.profile.name(), c.domain.domain.name(), c.density.density.name()};
}

const std::vector<std::string> kDescribeHeader = {"eps_rule", "n", "d", "eps", "seed", "kernel", "domain", "density"};

std::vector<std::string> with(std::vector<std::string> a, std::initializer_list<std::string> b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// GTV of a function of the points against its limit; shared by the gtv and
// perimeter experiments.
Artifacts convergence(std::string_view name, const CommonCfg& c, json resolved, double limit, json limit_info,
                      const std::function<double(const geometry::PointCloud&, const graph::WeightedGraph&)>& value,
                      unsigned threads) {
    const auto js = jobs(c.eps.size(), c.n, c.seeds);
    const int d = c.domain.domain.dim();
    struct Out {
        double eps, gtv;
    };
    auto res = parallel_map<Out>(js.size(), threads, [&](std::size_t k) {
        const auto& j = js[k];
        const double eps = c.eps[j.rule](j.n, d);
        const auto cloud = sample_for(c.domain.domain, c.density.density, j.n, j.seed);
        const auto g = graph::build_graph(cloud, c.kernel.profile, eps);
        return Out{eps, value(cloud, g)};
    });
    auto rel = [&](std::size_t k) { return std::abs(res[k].gtv - limit) / std::abs(limit); };

    table::Csv csv(with(kDescribeHeader, {"gtv", "limit", "rel_error"}));
    for (std::size_t k = 0; k < js.size(); ++k)
        csv.row(with(describe(c, js[k], res[k].eps), {number(res[k].gtv), number(limit), number(rel(k))}));

    json s = header(name, resolved);
    s["limit"] = limit_info;
    json gs = json::array();
    std::map<std::size_t, std::vector<double>> per_rule;
    svg::Figure fig{std::string(name), "n", "median relative error", true, false, {}};
    for (const auto& g : groups(js)) {
        const double m = group_median(g, rel);
        per_rule[g.rule].push_back(m);
        gs.push_back({{"eps_rule", c.eps[g.rule].label},
                      {"n", g.n},
                      {"eps", res[g.members[0]].eps},
                      {"runs", g.members.size()},
                      {"median_gtv", group_median(g, [&](std::size_t k) { return res[k].gtv; })},
                      {"median_rel_error", m}});
    }
    s["groups"] = gs;
    json tr = json::array();
    for (std::size_t r = 0; r < c.eps.size(); ++r) {
        const auto& v = per_rule[r];
        tr.push_back({{"eps_rule", c.eps[r].label},
                      {"median_rel_error_decreasing", stats::strictly_decreasing(v)},
                      {"final_median_rel_error", v.empty() ? json(nullptr) : json(v.back())}});
        svg::Series ser{c.eps[r].label, {}, v, true, colour(r)};
        for (auto n : c.n) ser.x.push_back(static_cast<double>(n));
        fig.series.push_back(std::move(ser));
    }
    s["trends"] = tr;
    return {csv.str(), finish(s), svg::render(fig)};
}

Artifacts run_gtv(std::string_view name, const json& cfg, unsigned threads) {
    check_object(cfg, "", {"experiment", "domain", "density", "kernel", "function", "n", "eps", "seeds", "limit_resolution"});
    const auto c = parse_common(cfg, "unit-cube", json::array(), kDefaultEps, false);
    const int d = c.domain.domain.dim();
    const auto f = parse_function(cfg, "", d);
    const auto res = get_uint(cfg, "", "limit_resolution", 512);
    if (res < 2 || res > 1u << 14) bad("/limit_resolution", "must be between 2 and 16384");
    json resolved = c.resolved;
    resolved["function"] = f.resolved;
    resolved["limit_resolution"] = res;
    const auto sigma = kernels::surface_tension(c.kernel.profile, d);
    const auto tv = continuum::weighted_tv_smooth(f.fn, c.density.density, c.domain.domain, static_cast<int>(res));
    const double limit = sigma.value * tv.value;
    json info = {{"sigma", sigma.value}, {"weighted_tv", tv.value}, {"value", limit}};
    return convergence(name, c, resolved, limit, info,
                       [&](const geometry::PointCloud& cloud, const graph::WeightedGraph& g) {
                           std::vector<double> u(cloud.size());
                           for (std::size_t i = 0; i < u.size(); ++i) u[i] = f.fn.value(cloud.point(i));
                           return graph::graph_total_variation(g, u);
                       },
                       threads);
}

Artifacts run_perimeter(std::string_view name, const json& cfg, unsigned threads) {
    check_object(cfg, "", {"experiment", "domain", "density", "kernel", "set", "n", "eps", "seeds"});
    const auto c = parse_common(cfg, "unit-cube", json::array(), kDefaultEps, false);
    const int d = c.domain.domain.dim();
    const auto set = parse_set(cfg, "", d);
    json resolved = c.resolved;
    resolved["set"] = set.resolved;
    const auto sigma = kernels::surface_tension(c.kernel.profile, d);
    const double per = at_path("/set", [&] { return set.weighted_perimeter(c.domain.domain, c.density.density); });
    const double limit = sigma.value * per;
    if (!(limit > 0.0)) bad("/set", "the set has no boundary inside the domain");
    json info = {{"sigma", sigma.value}, {"weighted_perimeter", per}, {"value", limit}};
    return convergence(name, c, resolved, limit, info,
                       [&](const geometry::PointCloud& cloud, const graph::WeightedGraph& g) {
                           std::vector<std::size_t> members;
                           for (std::size_t i = 0; i < cloud.size(); ++i)
                               if (set.contains(cloud.point(i))) members.push_back(i);
                           return graph::graph_perimeter(g, members) * graph::gtv_scale(g);
                       },
                       threads);
}

Artifacts run_nonlocal(std::string_view name, const json& cfg, unsigned threads) {
    check_object(cfg, "", {"experiment", "domain", "density", "kernel", "function", "eps", "seeds", "method", "cells_per_eps",
                           "kernel_subsamples", "samples", "limit_resolution"});
    auto dom = parse_domain(cfg, "", "unit-cube");
    auto den = parse_density(cfg, "", dom.domain);
    const int d = dom.domain.dim();
    auto ker = parse_kernel(cfg, "", d);
    const auto f = parse_function(cfg, "", d);
    auto eps = parse_eps(cfg, "", d, json::array({{{"rule", "fixed"}, {"value", 0.16}}, {{"rule", "fixed"}, {"value", 0.08}},
                                                  {{"rule", "fixed"}, {"value", 0.04}}, {{"rule", "fixed"}, {"value", 0.02}}}));
    for (std::size_t k = 0; k < eps.size(); ++k)
        if (eps[k].rule != "fixed") bad(child("/eps", k), "nonlocal-convergence takes fixed eps values only");
    const auto seeds = parse_seeds(cfg, "");
    const std::string method = get_string(cfg, "", "method", "quadrature");
    if (method != "quadrature" && method != "monte-carlo") bad("/method", "expected quadrature or monte-carlo");
    continuum::NonlocalOptions opt;
    opt.method = method == "quadrature" ? continuum::NonlocalMethod::Quadrature : continuum::NonlocalMethod::MonteCarlo;
    opt.cells_per_eps = static_cast<int>(get_uint(cfg, "", "cells_per_eps", 16));
    opt.kernel_subsamples = static_cast<int>(get_uint(cfg, "", "kernel_subsamples", 8));
    opt.samples = get_uint(cfg, "", "samples", 1'000'000);
    if (opt.cells_per_eps < 1) bad("/cells_per_eps", "must be at least 1");
    if (opt.kernel_subsamples < 1) bad("/kernel_subsamples", "must be at least 1");
    if (opt.samples < 2) bad("/samples", "must be at least 2");
    const auto res = get_uint(cfg, "", "limit_resolution", 512);
    if (res < 2 || res > 1u << 14) bad("/limit_resolution", "must be between 2 and 16384");

    json resolved;
    resolved["domain"] = dom.resolved;
    resolved["density"] = den.resolved;
    resolved["kernel"] = ker.resolved;
    resolved["function"] = f.resolved;
    json re = json::array();
    for (const auto& e : eps) re.push_back(e.resolved);
    resolved["eps"] = re;
    resolved["method"] = method;
    if (opt.method == continuum::NonlocalMethod::Quadrature) {
        resolved["cells_per_eps"] = opt.cells_per_eps;
        resolved["kernel_subsamples"] = opt.kernel_subsamples;
    } else {
        resolved["seeds"] = seeds;
        resolved["samples"] = opt.samples;
    }
    resolved["limit_resolution"] = res;

    const auto sigma = kernels::surface_tension(ker.profile, d);
    const auto tv = continuum::weighted_tv_smooth(f.fn, den.density, dom.domain, static_cast<int>(res));
    const double limit = sigma.value * tv.value;

    // Quadrature is deterministic: one job per eps, no seed.
    const bool mc = opt.method == continuum::NonlocalMethod::MonteCarlo;
    std::vector<std::pair<std::size_t, std::optional<std::uint64_t>>> js;
    for (std::size_t r = 0; r < eps.size(); ++r) {
        if (mc)
            for (auto s : seeds) js.push_back({r, s});
        else
            js.push_back({r, std::nullopt});
    }
    auto out = parallel_map<continuum::Estimate>(js.size(), threads, [&](std::size_t k) {
        auto o = opt;
        if (js[k].second) {
            o.seed_x = derive_seed(*js[k].second, 0);
            o.seed_y = derive_seed(*js[k].second, 1);
        }
        return continuum::nonlocal_tv(f.fn.value, den.density, dom.domain, ker.profile, eps[js[k].first].value, o);
    });

    table::Csv csv({"eps_rule", "eps", "method", "seed", "kernel", "domain", "density", "value", "error_estimate", "limit",
                    "rel_error"});
    for (std::size_t k = 0; k < js.size(); ++k) {
        const auto& e = eps[js[k].first];
        csv.row({e.label, number(e.value), method, js[k].second ? std::to_string(*js[k].second) : "", ker.profile.name(),
                 dom.domain.name(), den.density.name(), number(out[k].value), number(out[k].error_estimate), number(limit),
                 number(std::abs(out[k].value - limit) / std::abs(limit))});
    }

    json s = header(name, resolved);
    s["limit"] = {{"sigma", sigma.value}, {"weighted_tv", tv.value}, {"value", limit}};
    json gs = json::array();
    std::vector<double> errs, xs, vals;
    for (std::size_t r = 0; r < eps.size(); ++r) {
        std::vector<double> v;
        for (std::size_t k = 0; k < js.size(); ++k)
            if (js[k].first == r) v.push_back(out[k].value);
        const double m = numerics::median(v);
        const double e = std::abs(m - limit) / std::abs(limit);
        errs.push_back(e);
        xs.push_back(eps[r].value);
        vals.push_back(m);
        gs.push_back({{"eps", eps[r].value}, {"runs", v.size()}, {"median_value", m}, {"rel_error", e}});
    }
    s["groups"] = gs;
    s["trends"] = {{"rel_error_decreasing", stats::strictly_decreasing(errs)},
                   {"final_rel_error", errs.empty() ? json(nullptr) : json(errs.back())}};
    svg::Figure fig{std::string(name), "eps", "TV_eps", true, false, {}};
    fig.series.push_back({"TV_eps", xs, vals, true, colour(0)});
    fig.series.push_back({"limit", xs, std::vector<double>(xs.size(), limit), true, colour(1), 0.0});
    return {csv.str(), finish(s), svg::render(fig)};
}

Artifacts run_tl(std::string_view name, const json& cfg, unsigned threads) {
    check_object(cfg, "", {"experiment", "domain", "density", "function", "n", "seeds", "p", "grid"});
    auto dom = parse_domain(cfg, "", "unit-cube");
    auto den = parse_density(cfg, "", dom.domain);
    const int d = dom.domain.dim();
    const auto f = parse_function(cfg, "", d);
    const auto ns = parse_n(cfg, "", json::array(), false);
    const auto seeds = parse_seeds(cfg, "");
    const double p = get_number(cfg, "", "p", 1.0);
    if (!(p >= 1.0)) bad("/p", "must be at least 1");
    const auto grid = get_uint(cfg, "", "grid", 32);
    if (grid < 1 || grid > 4096) bad("/grid", "must be between 1 and 4096");
    json resolved;
    resolved["domain"] = dom.resolved;
    resolved["density"] = den.resolved;
    resolved["function"] = f.resolved;
    resolved["n"] = ns;
    resolved["seeds"] = seeds;
    resolved["p"] = p;
    resolved["grid"] = grid;

    transport::LiftedFunction target{bisect::discretize(dom.domain, den.density, static_cast<int>(grid)), {}};
    for (std::size_t i = 0; i < target.measure.size(); ++i) target.values.push_back(f.fn.value(target.measure.point(i)));
    const auto js = jobs(1, ns, seeds);
    auto dist = parallel_map<double>(js.size(), threads, [&](std::size_t k) {
        const auto cloud = sample_for(dom.domain, den.density, js[k].n, js[k].seed);
        transport::LiftedFunction a{transport::DiscreteMeasure::empirical(cloud), {}};
        for (std::size_t i = 0; i < cloud.size(); ++i) a.values.push_back(f.fn.value(cloud.point(i)));
        return transport::tlp_distance(a, target, p).distance;
    });

    table::Csv csv({"n", "d", "seed", "p", "grid", "domain", "density", "distance"});
    for (std::size_t k = 0; k < js.size(); ++k)
        csv.row({std::to_string(js[k].n), std::to_string(d), std::to_string(js[k].seed), number(p), std::to_string(grid),
                 dom.domain.name(), den.density.name(), number(dist[k])});
    json s = header(name, resolved);
    s["grid_atoms"] = target.measure.size();
    json gs = json::array();
    std::vector<double> med, xs;
    for (const auto& g : groups(js)) {
        med.push_back(group_median(g, [&](std::size_t k) { return dist[k]; }));
        xs.push_back(static_cast<double>(g.n));
        gs.push_back({{"n", g.n}, {"runs", g.members.size()}, {"median_distance", med.back()}});
    }
    s["groups"] = gs;
    s["trends"] = {{"median_distance_decreasing", stats::strictly_decreasing(med)}};
    svg::Figure fig{std::string(name), "n", "median TL^p distance", true, false, {{"median", xs, med, true, colour(0)}}};
    return {csv.str(), finish(s), svg::render(fig)};
}

Artifacts run_matching(std::string_view name, const json& cfg, unsigned threads) {
    check_object(cfg, "", {"experiment", "d", "n", "seeds"});
    const auto d = get_uint(cfg, "", "d", 2);
    if (d < 2 || d > 6) bad("/d", "must be between 2 and 6");
    const auto ns = parse_n(cfg, "", json::array(), false);
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const auto root = std::llround(std::pow(static_cast<double>(ns[k]), 1.0 / static_cast<double>(d)));
        std::size_t pw = 1;
        for (std::uint64_t a = 0; a < d; ++a) pw *= static_cast<std::size_t>(root);
        if (pw != ns[k]) bad(child("/n", k), "must be a perfect d-th power");
    }
    const auto seeds = parse_seeds(cfg, "");
    json resolved;
    resolved["d"] = d;
    resolved["n"] = ns;
    resolved["seeds"] = seeds;

    const auto js = jobs(1, ns, seeds);
    auto rows = parallel_map<transport::MatchingRow>(js.size(), threads, [&](std::size_t k) {
        const std::size_t n1[] = {js[k].n};
        const std::uint64_t s1[] = {js[k].seed};
        return transport::matching_scaling_experiment(n1, static_cast<int>(d), s1).at(0);
    });
    table::Csv csv({"n", "d", "seed", "dist", "ratio"});
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        csv.row({std::to_string(r.n), std::to_string(r.d), std::to_string(r.seed), number(r.dist), number(r.ratio)});
        xs.push_back(static_cast<double>(r.n));
        ys.push_back(r.ratio);
    }
    json s = header(name, resolved);
    json gs = json::array();
    for (const auto& g : groups(js)) {
        double mx = 0.0;
        for (auto k : g.members) mx = std::max(mx, rows[k].ratio);
        gs.push_back({{"n", g.n},
                      {"runs", g.members.size()},
                      {"median_ratio", group_median(g, [&](std::size_t k) { return rows[k].ratio; })},
                      {"max_ratio", mx}});
    }
    s["groups"] = gs;
    const auto kt = stats::kendall_tau(xs, ys);
    s["trend"] = {{"kendall_tau_b", kt.tau_b},
                  {"z", kt.z},
                  {"p_increasing", kt.p_increasing},
                  {"significant_increase", kt.p_increasing < 0.05}};
    svg::Figure fig{std::string(name), "n", "ratio", true, false, {{"ratio", xs, ys, false, colour(0), 2.5}}};
    return {csv.str(), finish(s), svg::render(fig)};
}

Artifacts run_connectivity(std::string_view name, const json& cfg, unsigned threads) {
    check_object(cfg, "", {"experiment", "domain", "density", "kernel", "n", "eps", "seeds"});
    const auto c = parse_common(cfg, "unit-cube", json::array(), json{{"rule", "sub-connectivity"}, {"lambda", 0.5}}, false);
    const int d = c.domain.domain.dim();
    // One cloud per (n, seed), shared by every eps rule.
    std::vector<std::pair<std::size_t, std::uint64_t>> samples;
    for (auto n : c.n)
        for (auto s : c.seeds) samples.push_back({n, s});
    struct Out {
        std::vector<double> eps;
        std::vector<std::size_t> components, edges;
    };
    auto res = parallel_map<Out>(samples.size(), threads, [&](std::size_t k) {
        const auto [n, seed] = samples[k];
        const auto cloud = sample_for(c.domain.domain, c.density.density, n, seed);
        Out o;
        for (const auto& rule : c.eps) {
            const double eps = rule(n, d);
            const auto g = graph::build_graph(cloud, c.kernel.profile, eps);
            const auto labels = graph::component_labels(g);
            o.eps.push_back(eps);
            o.components.push_back(labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1);
            o.edges.push_back(g.edges.size());
        }
        return o;
    });
    const auto js = jobs(c.eps.size(), c.n, c.seeds);
    const std::size_t per_rule = samples.size();
    auto at = [&](std::size_t k) -> std::pair<const Out&, std::size_t> { return {res[k % per_rule], k / per_rule}; };

    table::Csv csv(with(kDescribeHeader, {"connected", "components", "edges"}));
    for (std::size_t k = 0; k < js.size(); ++k) {
        const auto [o, r] = at(k);
        csv.row(with(describe(c, js[k], o.eps[r]),
                     {o.components[r] <= 1 ? "1" : "0", std::to_string(o.components[r]), std::to_string(o.edges[r])}));
    }
    json s = header(name, c.resolved);
    json gs = json::array();
    std::map<std::size_t, std::vector<std::pair<double, double>>> by_n;  // n -> (eps, fraction)
    for (const auto& g : groups(js)) {
        double conn = 0.0;
        for (auto k : g.members) conn += at(k).first.components[g.rule] <= 1;
        const double frac = conn / static_cast<double>(g.members.size());
        const double eps = at(g.members[0]).first.eps[g.rule];
        by_n[g.n].push_back({eps, frac});
        gs.push_back({{"eps_rule", c.eps[g.rule].label}, {"n", g.n}, {"eps", eps}, {"runs", g.members.size()}, {"connected_fraction", frac}});
    }
    s["groups"] = gs;
    json tr = json::array();
    svg::Figure fig{std::string(name), "eps", "connected fraction", true, false, {}};
    std::size_t col = 0;
    for (auto& [n, v] : by_n) {
        std::stable_sort(v.begin(), v.end());
        bool mono = true;
        for (std::size_t k = 1; k < v.size(); ++k) mono = mono && v[k].second >= v[k - 1].second;
        tr.push_back({{"n", n}, {"fraction_nondecreasing_in_eps", mono}});
        svg::Series ser{"n=" + std::to_string(n), {}, {}, true, colour(col++)};
        for (const auto& [e, f] : v) {
            ser.x.push_back(e);
            ser.y.push_back(f);
        }
        fig.series.push_back(std::move(ser));
    }
    s["trends"] = tr;
    return {csv.str(), finish(s), svg::render(fig)};
}

Artifacts run_bisect(std::string_view name, const json& cfg, unsigned threads) {
    check_object(cfg, "", {"experiment", "domain", "density", "kernel", "n", "eps", "seeds", "restarts", "max_iters",
                           "tl1_grid", "component_start"});
    const auto c = parse_common(cfg, "dumbbell", json::array({500}),
                                json::array({{{"rule", "fixed"}, {"value", 0.18}}, {{"rule", "fixed"}, {"value", 0.1}}}), true);
    const int d = c.domain.domain.dim();
    bisect::LocalSearchOptions base;
    base.restarts = get_uint(cfg, "", "restarts", 32);
    if (base.restarts < 1) bad("/restarts", "must be at least 1");
    base.max_iters = get_uint(cfg, "", "max_iters", 0);
    base.component_start = get_bool(cfg, "", "component_start", true);
    const auto tl1_grid = get_uint(cfg, "", "tl1_grid", 24);
    if (tl1_grid > 1024) bad("/tl1_grid", "must be at most 1024");
    json resolved = c.resolved;
    resolved["restarts"] = base.restarts;
    resolved["max_iters"] = base.max_iters;
    resolved["tl1_grid"] = tl1_grid;
    resolved["component_start"] = base.component_start;

    const auto refs = bisect::reference_cuts(c.domain.domain);
    const auto js = jobs(c.eps.size(), c.n, c.seeds);
    struct Out {
        double eps = 0, energy = 0, agreement = 0, tl1 = 0;
        bool connected = false, zero_split = false;
        std::vector<std::uint8_t> labels;
        geometry::PointCloud cloud;
    };
    auto res = parallel_map<Out>(js.size(), threads, [&](std::size_t k) {
        const auto& j = js[k];
        Out o;
        o.eps = c.eps[j.rule](j.n, d);
        o.cloud = sample_for(c.domain.domain, c.density.density, j.n, j.seed);
        const auto g = graph::build_graph(o.cloud, c.kernel.profile, o.eps);
        o.connected = graph::is_connected(g);
        o.zero_split = bisect::balanced_disconnection(g).has_value();
        auto opt = base;
        opt.seed = derive_seed(j.seed, 0xb15ec7);
        const auto b = bisect::local_search_bisection(g, opt);
        o.energy = b.energy;
        o.labels = b.labels;
        for (const auto& cut : refs) o.agreement = std::max(o.agreement, bisect::agreement(b.labels, bisect::cut_labels(o.cloud, cut)));
        o.tl1 = tl1_grid ? bisect::tl1_to_reference(o.cloud, b.labels, c.domain.domain, c.density.density, static_cast<int>(tl1_grid))
                         : std::nan("");
        if (k != 0) o.cloud = {};
        return o;
    });

    table::Csv csv(with(kDescribeHeader, {"energy", "connected", "agreement", "tl1_distance", "zero_split_exists"}));
    json runs = json::array();
    for (std::size_t k = 0; k < js.size(); ++k) {
        const auto& o = res[k];
        csv.row(with(describe(c, js[k], o.eps), {number(o.energy), o.connected ? "1" : "0", number(o.agreement),
                                                 tl1_grid ? number(o.tl1) : "", o.zero_split ? "1" : "0"}));
        runs.push_back({{"n", js[k].n},
                        {"eps", o.eps},
                        {"seed", js[k].seed},
                        {"energy", o.energy},
                        {"connected", o.connected},
                        {"agreement", o.agreement},
                        {"tl1_distance", tl1_grid ? json(o.tl1) : json(nullptr)}});
    }
    json s = header(name, resolved);
    json rc = json::array();
    for (const auto& cut : refs) rc.push_back({{"axis", cut.axis}, {"position", cut.position}});
    s["reference_cuts"] = rc;
    s["runs"] = runs;
    json gs = json::array();
    std::map<std::size_t, std::vector<double>> tl1_by_rule;
    for (const auto& g : groups(js)) {
        double conn = 0.0, zero = 0.0;
        for (auto k : g.members) {
            conn += res[k].connected;
            zero += res[k].energy == 0.0;
        }
        const double m = static_cast<double>(g.members.size());
        json e = {{"eps_rule", c.eps[g.rule].label},
                  {"n", g.n},
                  {"eps", res[g.members[0]].eps},
                  {"runs", g.members.size()},
                  {"median_energy", group_median(g, [&](std::size_t k) { return res[k].energy; })},
                  {"median_agreement", group_median(g, [&](std::size_t k) { return res[k].agreement; })},
                  {"connected_fraction", conn / m},
                  {"zero_energy_fraction", zero / m}};
        if (tl1_grid) {
            const double t = group_median(g, [&](std::size_t k) { return res[k].tl1; });
            e["median_tl1_distance"] = t;
            tl1_by_rule[g.rule].push_back(t);
        }
        gs.push_back(e);
    }
    s["groups"] = gs;
    json tr = json::array();
    for (std::size_t r = 0; r < c.eps.size() && tl1_grid; ++r)
        tr.push_back({{"eps_rule", c.eps[r].label}, {"median_tl1_decreasing", stats::strictly_decreasing(tl1_by_rule[r])}});
    s["trends"] = tr;

    std::string svg_text;
    if (!res.empty() && d == 2) {
        const auto& o = res[0];
        char title[128];
        std::snprintf(title, sizeof title, "bisection n=%zu eps=%.4g seed=%llu", js[0].n, o.eps,
                      static_cast<unsigned long long>(js[0].seed));
        svg::Figure fig{title, "x0", "x1", false, true, {}};
        svg::Series a{"A", {}, {}, false, colour(0), 2.0}, b{"complement", {}, {}, false, colour(1), 2.0};
        for (std::size_t i = 0; i < o.cloud.size(); ++i) {
            auto& ser = o.labels[i] ? a : b;
            ser.x.push_back(o.cloud.point(i)[0]);
            ser.y.push_back(o.cloud.point(i)[1]);
        }
        fig.series = {a, b};
        svg_text = svg::render(fig);
    }
    return {csv.str(), finish(s), svg_text};
}

using Runner = Artifacts (*)(std::string_view, const json&, unsigned);

const std::vector<std::pair<std::string, Runner>>& registry() {
    static const std::vector<std::pair<std::string, Runner>> r = {
        {"gtv-convergence", run_gtv},     {"perimeter-convergence", run_perimeter},
        {"nonlocal-convergence", run_nonlocal}, {"tl-distance", run_tl},
        {"matching-scaling", run_matching}, {"connectivity", run_connectivity},
        {"bisect", run_bisect},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& names() {
    static const std::vector<std::string> n = [] {
        std::vector<std::string> out;
        for (const auto& [k, v] : registry()) out.push_back(k);
        return out;
    }();
    return n;
}

const char* version() { return PCTV_VERSION; }

unsigned worker_count() {
    unsigned n = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PCTV_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return n;
}

Artifacts run(std::string_view name, std::string_view config_json, unsigned threads) {
    const auto& reg = registry();
    auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& e) { return e.first == name; });
    require(it != reg.end(), ErrorCode::Config, "unknown experiment '" + std::string(name) + "'");
    json cfg;
    try {
        cfg = json::parse(config_json.begin(), config_json.end());
    } catch (const json::parse_error& e) {
        fail(ErrorCode::Config, std::string("(root): invalid JSON: ") + e.what());
    }
    if (!cfg.is_object()) bad("", "expected an object");
    if (cfg.contains("experiment")) {
        if (!cfg.at("experiment").is_string() || cfg.at("experiment").get<std::string>() != name)
            bad("/experiment", "does not match the requested experiment '" + std::string(name) + "'");
    }
    return it->second(name, cfg, threads ? threads : worker_count());
}

void write_artifacts(std::string_view name, const Artifacts& a, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create output directory '" + out_dir + "': " + ec.message());
    auto put = [&](const std::string& ext, const std::string& text) {
        const fs::path p = fs::path(out_dir) / (std::string(name) + ext);
        std::ofstream os(p, std::ios::binary | std::ios::trunc);
        os << text;
        os.close();
        if (!os) fail(ErrorCode::Io, "cannot write '" + p.string() + "'");
    };
    put(".csv", a.csv);
    put(".json", a.summary_json);
    if (!a.svg.empty()) put(".svg", a.svg);
}

}  // namespace pctv::experiment
