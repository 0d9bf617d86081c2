#include "pctv/pctv.h"

#include <exception>
#include <new>
#include <optional>
#include <string>

#include "bisect.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "geometry.hpp"
#include "graph.hpp"
#include "kernels.hpp"
#include "transport.hpp"

struct pctv_kernel {
    pctv::kernels::KernelProfile profile;
};
struct pctv_domain {
    pctv::geometry::Domain domain;
};
struct pctv_cloud {
    pctv::geometry::PointCloud cloud;
};
struct pctv_graph {
    pctv::graph::WeightedGraph graph;
};
struct pctv_measure {
    pctv::transport::DiscreteMeasure measure;
};
struct pctv_plan {
    pctv::transport::TransportPlan plan;
};

namespace {

using pctv::ErrorCode;

thread_local std::string last_error;

template <class F>
int guard(F&& f) noexcept {
    try {
        f();
        last_error.clear();
        return PCTV_OK;
    } catch (const pctv::Error& e) {
        last_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown failure";
    }
    return PCTV_ERR_INTERNAL;
}

void need(const void* p, const char* what) { pctv::require(p != nullptr, ErrorCode::Parameter, std::string(what) + " is NULL"); }

}  // namespace

extern "C" {

const char* pctv_version(void) { return pctv::experiment::version(); }
const char* pctv_last_error(void) { return last_error.c_str(); }
const char* pctv_status_name(int status) { return pctv::error_code_name(static_cast<ErrorCode>(status)); }

int pctv_kernel_indicator(double radius, pctv_kernel** out) {
    return guard([&] {
        need(out, "out");
        *out = new pctv_kernel{pctv::kernels::KernelProfile::indicator(radius)};
    });
}

int pctv_kernel_gaussian(double width, pctv_kernel** out) {
    return guard([&] {
        need(out, "out");
        *out = new pctv_kernel{pctv::kernels::KernelProfile::gaussian(width)};
    });
}

int pctv_kernel_step_sum(const double* radii, const double* heights, size_t count, pctv_kernel** out) {
    return guard([&] {
        need(out, "out");
        need(radii, "radii");
        need(heights, "heights");
        std::vector<pctv::kernels::Step> steps;
        for (size_t k = 0; k < count; ++k) steps.push_back({radii[k], heights[k]});
        *out = new pctv_kernel{pctv::kernels::KernelProfile::step_sum(steps)};
    });
}

void pctv_kernel_free(pctv_kernel* kernel) { delete kernel; }

int pctv_kernel_eval(const pctv_kernel* kernel, double r, double* out) {
    return guard([&] {
        need(kernel, "kernel");
        need(out, "out");
        pctv::require(r >= 0.0, ErrorCode::Parameter, "radius must be non-negative");
        *out = kernel->profile(r);
    });
}

int pctv_kernel_eval_scaled(const pctv_kernel* kernel, double eps, const double* z, int d, double* out) {
    return guard([&] {
        need(kernel, "kernel");
        need(z, "z");
        need(out, "out");
        pctv::require(d >= 1, ErrorCode::Parameter, "dimension must be positive");
        *out = pctv::kernels::eval_scaled(kernel->profile, eps, {z, static_cast<size_t>(d)}, d);
    });
}

int pctv_kernel_validate(const pctv_kernel* kernel, int d, double tol, int* k1, int* k2, int* k3) {
    return guard([&] {
        need(kernel, "kernel");
        const auto rep = pctv::kernels::validate_profile(kernel->profile, d, tol);
        if (k1) *k1 = rep.k1;
        if (k2) *k2 = rep.k2;
        if (k3) *k3 = rep.k3;
    });
}

int pctv_surface_tension(const pctv_kernel* kernel, int d, double* sigma, double* error_estimate) {
    return guard([&] {
        need(kernel, "kernel");
        need(sigma, "sigma");
        const auto s = pctv::kernels::surface_tension(kernel->profile, d);
        *sigma = s.value;
        if (error_estimate) *error_estimate = s.quadrature_error_estimate;
    });
}

int pctv_domain_unit_cube(int d, pctv_domain** out) {
    return guard([&] {
        need(out, "out");
        *out = new pctv_domain{pctv::geometry::Domain::unit_cube(d)};
    });
}

int pctv_domain_box(int d, const double* lower, const double* upper, pctv_domain** out) {
    return guard([&] {
        need(out, "out");
        need(lower, "lower");
        need(upper, "upper");
        pctv::require(d >= 1, ErrorCode::Parameter, "dimension must be positive");
        *out = new pctv_domain{pctv::geometry::Domain::box({lower, lower + d}, {upper, upper + d})};
    });
}

int pctv_domain_dumbbell(double neck_width, double neck_length, pctv_domain** out) {
    return guard([&] {
        need(out, "out");
        *out = new pctv_domain{pctv::geometry::Domain::dumbbell(neck_width, neck_length)};
    });
}

void pctv_domain_free(pctv_domain* domain) { delete domain; }

int pctv_domain_volume(const pctv_domain* domain, double* out) {
    return guard([&] {
        need(domain, "domain");
        need(out, "out");
        *out = domain->domain.volume();
    });
}

int pctv_cloud_sample_uniform(const pctv_domain* domain, size_t n, uint64_t seed, pctv_cloud** out) {
    return guard([&] {
        need(domain, "domain");
        need(out, "out");
        const auto rho = pctv::geometry::Density::uniform(domain->domain);
        *out = new pctv_cloud{pctv::geometry::sample_iid(domain->domain, rho, n, seed)};
    });
}

int pctv_cloud_from_points(int d, const double* coords, size_t n, pctv_cloud** out) {
    return guard([&] {
        need(out, "out");
        pctv::require(d >= 1, ErrorCode::Parameter, "dimension must be positive");
        if (n) need(coords, "coords");
        pctv::geometry::PointCloud c;
        c.dim = d;
        c.coords.assign(coords, coords + n * static_cast<size_t>(d));
        *out = new pctv_cloud{std::move(c)};
    });
}

void pctv_cloud_free(pctv_cloud* cloud) { delete cloud; }

int pctv_cloud_shape(const pctv_cloud* cloud, size_t* n, int* d) {
    return guard([&] {
        need(cloud, "cloud");
        if (n) *n = cloud->cloud.size();
        if (d) *d = cloud->cloud.dim;
    });
}

int pctv_cloud_coords(const pctv_cloud* cloud, double* out) {
    return guard([&] {
        need(cloud, "cloud");
        need(out, "out");
        std::copy(cloud->cloud.coords.begin(), cloud->cloud.coords.end(), out);
    });
}

int pctv_graph_build(const pctv_cloud* cloud, const pctv_kernel* kernel, double eps, pctv_graph** out) {
    return guard([&] {
        need(cloud, "cloud");
        need(kernel, "kernel");
        need(out, "out");
        *out = new pctv_graph{pctv::graph::build_graph(cloud->cloud, kernel->profile, eps)};
    });
}

int pctv_graph_from_edges(size_t n, double eps, const uint32_t* i, const uint32_t* j, const double* w, size_t m,
                          pctv_graph** out) {
    return guard([&] {
        need(out, "out");
        if (m) {
            need(i, "i");
            need(j, "j");
            need(w, "w");
        }
        std::vector<pctv::graph::Edge> edges(m);
        for (size_t k = 0; k < m; ++k) edges[k] = {i[k], j[k], w[k]};
        *out = new pctv_graph{pctv::graph::from_edges(n, eps, std::move(edges))};
    });
}

void pctv_graph_free(pctv_graph* graph) { delete graph; }

int pctv_graph_shape(const pctv_graph* graph, size_t* n, size_t* edges) {
    return guard([&] {
        need(graph, "graph");
        if (n) *n = graph->graph.n;
        if (edges) *edges = graph->graph.edges.size();
    });
}

int pctv_graph_edges(const pctv_graph* graph, uint32_t* i, uint32_t* j, double* w) {
    return guard([&] {
        need(graph, "graph");
        const auto& e = graph->graph.edges;
        for (size_t k = 0; k < e.size(); ++k) {
            if (i) i[k] = e[k].i;
            if (j) j[k] = e[k].j;
            if (w) w[k] = e[k].w;
        }
    });
}

int pctv_graph_total_variation(const pctv_graph* graph, const double* u, size_t n, double* out) {
    return guard([&] {
        need(graph, "graph");
        need(out, "out");
        if (n) need(u, "u");
        *out = pctv::graph::graph_total_variation(graph->graph, {u, n});
    });
}

int pctv_graph_perimeter(const pctv_graph* graph, const size_t* members, size_t count, double* out) {
    return guard([&] {
        need(graph, "graph");
        need(out, "out");
        if (count) need(members, "members");
        *out = pctv::graph::graph_perimeter(graph->graph, std::span<const size_t>(members, count));
    });
}

int pctv_graph_is_connected(const pctv_graph* graph, int* out) {
    return guard([&] {
        need(graph, "graph");
        need(out, "out");
        *out = pctv::graph::is_connected(graph->graph);
    });
}

int pctv_measure_create(int d, const double* points, const double* masses, size_t n, pctv_measure** out) {
    return guard([&] {
        need(out, "out");
        need(points, "points");
        pctv::require(d >= 1, ErrorCode::Parameter, "dimension must be positive");
        pctv::require(n >= 1, ErrorCode::Marginal, "measure needs at least one atom");
        std::vector<double> pts(points, points + n * static_cast<size_t>(d));
        std::vector<double> m = masses ? std::vector<double>(masses, masses + n) : std::vector<double>(n, 1.0 / static_cast<double>(n));
        *out = new pctv_measure{pctv::transport::DiscreteMeasure::weighted(d, std::move(pts), std::move(m))};
    });
}

int pctv_measure_empirical(const pctv_cloud* cloud, pctv_measure** out) {
    return guard([&] {
        need(cloud, "cloud");
        need(out, "out");
        auto mu = pctv::transport::DiscreteMeasure::empirical(cloud->cloud);
        pctv::transport::validate(mu);
        *out = new pctv_measure{std::move(mu)};
    });
}

void pctv_measure_free(pctv_measure* measure) { delete measure; }

int pctv_ot_distance(const pctv_measure* mu, const pctv_measure* nu, double p, double* distance, pctv_plan** plan) {
    return guard([&] {
        need(mu, "mu");
        need(nu, "nu");
        need(distance, "distance");
        auto r = pctv::transport::ot_distance(mu->measure, nu->measure, p);
        *distance = r.distance;
        if (plan) *plan = new pctv_plan{std::move(r.plan)};
    });
}

int pctv_tlp_distance(const pctv_measure* a, const double* f, const pctv_measure* b, const double* g, double p,
                      double* distance, pctv_plan** plan) {
    return guard([&] {
        need(a, "a");
        need(b, "b");
        need(f, "f");
        need(g, "g");
        need(distance, "distance");
        pctv::transport::LiftedFunction la{a->measure, {f, f + a->measure.size()}};
        pctv::transport::LiftedFunction lb{b->measure, {g, g + b->measure.size()}};
        auto r = pctv::transport::tlp_distance(la, lb, p);
        *distance = r.distance;
        if (plan) *plan = new pctv_plan{std::move(r.plan)};
    });
}

int pctv_bottleneck_distance(const pctv_measure* mu, const pctv_measure* nu, double* distance, size_t* assignment) {
    return guard([&] {
        need(mu, "mu");
        need(nu, "nu");
        need(distance, "distance");
        const auto r = pctv::transport::bottleneck_distance(mu->measure, nu->measure);
        *distance = r.distance;
        if (assignment) std::copy(r.map.assignment.begin(), r.map.assignment.end(), assignment);
    });
}

void pctv_plan_free(pctv_plan* plan) { delete plan; }

int pctv_plan_size(const pctv_plan* plan, size_t* entries) {
    return guard([&] {
        need(plan, "plan");
        need(entries, "entries");
        *entries = plan->plan.entries.size();
    });
}

int pctv_plan_entries(const pctv_plan* plan, size_t* i, size_t* j, double* mass) {
    return guard([&] {
        need(plan, "plan");
        const auto& e = plan->plan.entries;
        for (size_t k = 0; k < e.size(); ++k) {
            if (i) i[k] = e[k].i;
            if (j) j[k] = e[k].j;
            if (mass) mass[k] = e[k].mass;
        }
    });
}

int pctv_plan_marginal_violation(const pctv_plan* plan, double* out) {
    return guard([&] {
        need(plan, "plan");
        need(out, "out");
        *out = pctv::transport::marginal_violation(plan->plan);
    });
}

int pctv_plan_inverse(const pctv_plan* plan, pctv_plan** out) {
    return guard([&] {
        need(plan, "plan");
        need(out, "out");
        *out = new pctv_plan{pctv::transport::plan_inverse(plan->plan)};
    });
}

int pctv_plan_compose(const pctv_plan* p12, const pctv_plan* p23, pctv_plan** out) {
    return guard([&] {
        need(p12, "p12");
        need(p23, "p23");
        need(out, "out");
        *out = new pctv_plan{pctv::transport::plan_compose(p12->plan, p23->plan)};
    });
}

int pctv_bisect_brute_force(const pctv_graph* graph, unsigned char* labels, double* energy) {
    return guard([&] {
        need(graph, "graph");
        const auto b = pctv::bisect::brute_force_bisection(graph->graph);
        if (labels) std::copy(b.labels.begin(), b.labels.end(), labels);
        if (energy) *energy = b.energy;
    });
}

int pctv_bisect_local_search(const pctv_graph* graph, uint64_t seed, size_t restarts, size_t max_iters,
                             const unsigned char* warm_start, unsigned char* labels, double* energy) {
    return guard([&] {
        need(graph, "graph");
        pctv::bisect::LocalSearchOptions opt;
        opt.seed = seed;
        if (restarts) opt.restarts = restarts;
        opt.max_iters = max_iters;
        if (warm_start) opt.warm_start.assign(warm_start, warm_start + graph->graph.n);
        const auto b = pctv::bisect::local_search_bisection(graph->graph, opt);
        if (labels) std::copy(b.labels.begin(), b.labels.end(), labels);
        if (energy) *energy = b.energy;
    });
}

const char* pctv_experiment_name(size_t index) {
    const auto& n = pctv::experiment::names();
    return index < n.size() ? n[index].c_str() : nullptr;
}

int pctv_experiment_run(const char* experiment, const char* config_json, const char* out_dir) {
    return guard([&] {
        need(experiment, "experiment");
        need(config_json, "config_json");
        need(out_dir, "out_dir");
        const auto a = pctv::experiment::run(experiment, config_json);
        pctv::experiment::write_artifacts(experiment, a, out_dir);
    });
}

}  // extern "C"
