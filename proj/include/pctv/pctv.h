#ifndef PCTV_PCTV_H
#define PCTV_PCTV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PCTV_API __declspec(dllexport)
#else
#define PCTV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every function returning int returns one of these. On failure a message is
 * available from pctv_last_error() on the calling thread. */
enum pctv_status {
    PCTV_OK = 0,
    PCTV_ERR_INVALID_PROFILE = 1,
    PCTV_ERR_DIVERGENCE = 2,
    PCTV_ERR_PARAMETER = 3,
    PCTV_ERR_SHAPE = 4,
    PCTV_ERR_INDEX = 5,
    PCTV_ERR_ENVELOPE = 6,
    PCTV_ERR_MARGINAL = 7,
    PCTV_ERR_UNSUPPORTED = 8,
    PCTV_ERR_COMPOSITION = 9,
    PCTV_ERR_CONFIG = 10,
    PCTV_ERR_IO = 11,
    PCTV_ERR_INTERNAL = 99
};

typedef struct pctv_kernel pctv_kernel;
typedef struct pctv_domain pctv_domain;
typedef struct pctv_cloud pctv_cloud;
typedef struct pctv_graph pctv_graph;
typedef struct pctv_measure pctv_measure;
typedef struct pctv_plan pctv_plan;

PCTV_API const char* pctv_version(void);
/* Message of the last failed call on this thread ("" if none). */
PCTV_API const char* pctv_last_error(void);
PCTV_API const char* pctv_status_name(int status);

/* Kernels ---------------------------------------------------------------- */

PCTV_API int pctv_kernel_indicator(double radius, pctv_kernel** out);
PCTV_API int pctv_kernel_gaussian(double width, pctv_kernel** out);
/* Profile sum_k heights[k] * 1[r < radii[k]]. */
PCTV_API int pctv_kernel_step_sum(const double* radii, const double* heights, size_t count, pctv_kernel** out);
PCTV_API void pctv_kernel_free(pctv_kernel* kernel);
PCTV_API int pctv_kernel_eval(const pctv_kernel* kernel, double r, double* out);
/* eps^-d eta(|z| / eps) for z of length d. */
PCTV_API int pctv_kernel_eval_scaled(const pctv_kernel* kernel, double eps, const double* z, int d, double* out);
/* Flags (0/1) for assumptions K1 (positive, continuous at 0), K2 (non-increasing), K3 (finite moment). */
PCTV_API int pctv_kernel_validate(const pctv_kernel* kernel, int d, double tol, int* k1, int* k2, int* k3);
PCTV_API int pctv_surface_tension(const pctv_kernel* kernel, int d, double* sigma, double* error_estimate);

/* Domains and point clouds ----------------------------------------------- */

PCTV_API int pctv_domain_unit_cube(int d, pctv_domain** out);
PCTV_API int pctv_domain_box(int d, const double* lower, const double* upper, pctv_domain** out);
PCTV_API int pctv_domain_dumbbell(double neck_width, double neck_length, pctv_domain** out);
PCTV_API void pctv_domain_free(pctv_domain* domain);
PCTV_API int pctv_domain_volume(const pctv_domain* domain, double* out);

/* n i.i.d. points from the uniform density on the domain. */
PCTV_API int pctv_cloud_sample_uniform(const pctv_domain* domain, size_t n, uint64_t seed, pctv_cloud** out);
/* Copies n points of dimension d (row-major). */
PCTV_API int pctv_cloud_from_points(int d, const double* coords, size_t n, pctv_cloud** out);
PCTV_API void pctv_cloud_free(pctv_cloud* cloud);
PCTV_API int pctv_cloud_shape(const pctv_cloud* cloud, size_t* n, int* d);
/* Writes n * d coordinates. */
PCTV_API int pctv_cloud_coords(const pctv_cloud* cloud, double* out);

/* Graphs ----------------------------------------------------------------- */

PCTV_API int pctv_graph_build(const pctv_cloud* cloud, const pctv_kernel* kernel, double eps, pctv_graph** out);
/* Undirected edges (i[k], j[k]) with weights w[k] > 0; duplicates rejected. */
PCTV_API int pctv_graph_from_edges(size_t n, double eps, const uint32_t* i, const uint32_t* j, const double* w, size_t m,
                                   pctv_graph** out);
PCTV_API void pctv_graph_free(pctv_graph* graph);
PCTV_API int pctv_graph_shape(const pctv_graph* graph, size_t* n, size_t* edges);
/* Writes the stored edges (i < j, sorted). */
PCTV_API int pctv_graph_edges(const pctv_graph* graph, uint32_t* i, uint32_t* j, double* w);
PCTV_API int pctv_graph_total_variation(const pctv_graph* graph, const double* u, size_t n, double* out);
PCTV_API int pctv_graph_perimeter(const pctv_graph* graph, const size_t* members, size_t count, double* out);
PCTV_API int pctv_graph_is_connected(const pctv_graph* graph, int* out);

/* Transport -------------------------------------------------------------- */

/* masses may be NULL for the uniform measure. */
PCTV_API int pctv_measure_create(int d, const double* points, const double* masses, size_t n, pctv_measure** out);
PCTV_API int pctv_measure_empirical(const pctv_cloud* cloud, pctv_measure** out);
PCTV_API void pctv_measure_free(pctv_measure* measure);

/* plan may be NULL when the coupling is not needed. */
PCTV_API int pctv_ot_distance(const pctv_measure* mu, const pctv_measure* nu, double p, double* distance, pctv_plan** plan);
/* f and g hold one value per atom of a and b. */
PCTV_API int pctv_tlp_distance(const pctv_measure* a, const double* f, const pctv_measure* b, const double* g, double p,
                               double* distance, pctv_plan** plan);
/* assignment (length n, may be NULL) receives the optimal permutation. */
PCTV_API int pctv_bottleneck_distance(const pctv_measure* mu, const pctv_measure* nu, double* distance, size_t* assignment);

PCTV_API void pctv_plan_free(pctv_plan* plan);
PCTV_API int pctv_plan_size(const pctv_plan* plan, size_t* entries);
PCTV_API int pctv_plan_entries(const pctv_plan* plan, size_t* i, size_t* j, double* mass);
PCTV_API int pctv_plan_marginal_violation(const pctv_plan* plan, double* out);
PCTV_API int pctv_plan_inverse(const pctv_plan* plan, pctv_plan** out);
PCTV_API int pctv_plan_compose(const pctv_plan* p12, const pctv_plan* p23, pctv_plan** out);

/* Bisection -------------------------------------------------------------- */

/* labels receives n entries in {0, 1}. */
PCTV_API int pctv_bisect_brute_force(const pctv_graph* graph, unsigned char* labels, double* energy);
/* restarts 0 and max_iters 0 select the defaults (32 and 10 n); warm_start may be NULL. */
PCTV_API int pctv_bisect_local_search(const pctv_graph* graph, uint64_t seed, size_t restarts, size_t max_iters,
                                      const unsigned char* warm_start, unsigned char* labels, double* energy);

/* Experiments ------------------------------------------------------------ */

/* Name of experiment `index`, or NULL past the end. */
PCTV_API const char* pctv_experiment_name(size_t index);
/* Runs the experiment on the JSON config text and writes <out_dir>/<experiment>.{csv,json,svg}. */
PCTV_API int pctv_experiment_run(const char* experiment, const char* config_json, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
