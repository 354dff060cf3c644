#ifndef HEATDA_HEATDA_H
#define HEATDA_HEATDA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(HEATDA_BUILDING_LIBRARY)
#define HEATDA_API __attribute__((visibility("default")))
#else
#define HEATDA_API
#endif

typedef enum heatda_status {
  HEATDA_OK = 0,
  HEATDA_ERR_INVALID_ARGUMENT = 1,
  HEATDA_ERR_MESH_STRUCTURE = 2,
  HEATDA_ERR_BOUNDARY_VIOLATION = 3,
  HEATDA_ERR_DEGENERATE_MESH = 4,
  HEATDA_ERR_ASSEMBLY_INVARIANT = 5,
  HEATDA_ERR_SOLVER_SINGULAR = 6,
  HEATDA_ERR_SOLVER_TOLERANCE = 7,
  HEATDA_ERR_VALIDATION = 8,
  HEATDA_ERR_IO = 9,
  HEATDA_ERR_INTERNAL = 10
} heatda_status;

/* Message of the last failed call on this thread; "" after a success. */
HEATDA_API const char* heatda_last_error(void);
HEATDA_API const char* heatda_status_name(heatda_status status);
HEATDA_API const char* heatda_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
HEATDA_API void heatda_string_free(char* text);

/* Meshes ----------------------------------------------------------------- */

typedef struct heatda_mesh heatda_mesh;

/* n x n structured triangulation of the unit square. */
HEATDA_API heatda_status heatda_mesh_create(int n, heatda_mesh** out);
HEATDA_API void heatda_mesh_destroy(heatda_mesh* mesh);
HEATDA_API heatda_status heatda_mesh_info(const heatda_mesh* mesh, int* vertices, int* triangles, int* faces,
                                          double* h);
/* Plain-text dump ("nv nt nf" header, vertices, triangles, faces). */
HEATDA_API heatda_status heatda_mesh_dump(const heatda_mesh* mesh, char** text);
HEATDA_API heatda_status heatda_mesh_dump_file(const heatda_mesh* mesh, const char* path);

/* Configurations --------------------------------------------------------- */

typedef struct heatda_config heatda_config;

HEATDA_API heatda_status heatda_config_load(const char* path, heatda_config** out);
/* `source` names the text in diagnostics; may be NULL. */
HEATDA_API heatda_status heatda_config_parse(const char* text, const char* source, heatda_config** out);
HEATDA_API void heatda_config_destroy(heatda_config* config);
/* Resolved configuration with every default materialized. */
HEATDA_API heatda_status heatda_config_render(const heatda_config* config, char** text);

/* Reports ---------------------------------------------------------------- */

typedef struct heatda_report heatda_report;

/* Both calls return HEATDA_OK whenever a report was produced, including one
 * that stopped at a failing level; heatda_report_status tells which. */
HEATDA_API heatda_status heatda_converge(const heatda_config* config, heatda_report** out);
HEATDA_API heatda_status heatda_perturb(const heatda_config* config, heatda_report** out);
HEATDA_API void heatda_report_destroy(heatda_report* report);

/* HEATDA_OK for a complete report, otherwise the failure class; `message`
 * (may be NULL) points into the report. */
HEATDA_API heatda_status heatda_report_status(const heatda_report* report, const char** message);
HEATDA_API heatda_status heatda_report_csv(const heatda_report* report, char** csv);
/* Writes the CSV (and SVG charts if enabled) under the configured output
 * directory, each file atomically. */
HEATDA_API heatda_status heatda_report_write(const heatda_report* report);
HEATDA_API const char* heatda_report_csv_path(const heatda_report* report);

/* Shape: deltas x levels x windows error cells, levels completed so far. */
HEATDA_API heatda_status heatda_report_shape(const heatda_report* report, int* deltas, int* levels, int* windows);
HEATDA_API heatda_status heatda_report_error(const heatda_report* report, int delta, int level, int window,
                                             double* value);
/* Label such as "L2H1 t0.25-0.75_x0.25-0.75_y0.25-0.75"; "" when out of range. */
HEATDA_API const char* heatda_report_window_label(const heatda_report* report, int window);
/* Mesh subdivisions n of a completed level; 0 when out of range. */
HEATDA_API int heatda_report_level_n(const heatda_report* report, int level);
/* Fitted rate of a window; HEATDA_ERR_INVALID_ARGUMENT if no fit exists. */
HEATDA_API heatda_status heatda_report_rate(const heatda_report* report, int delta, int window, double* rate);

/* Verification ----------------------------------------------------------- */

typedef enum heatda_verify_level { HEATDA_VERIFY_QUICK = 0, HEATDA_VERIFY_FULL = 1 } heatda_verify_level;

/* Fault injection for mutation tests. */
#define HEATDA_FAULT_CORRUPT_CONSTRAINT_TRANSPOSE 0x1u

typedef void (*heatda_check_callback)(const char* name, int passed, const char* detail, double seconds,
                                      void* user);

/* Runs the check suite; `failed` receives the number of failed checks. */
HEATDA_API heatda_status heatda_verify(heatda_verify_level level, uint64_t seed, unsigned faults,
                                       heatda_check_callback on_check, void* user, int* failed);

#ifdef __cplusplus
}
#endif

#endif
