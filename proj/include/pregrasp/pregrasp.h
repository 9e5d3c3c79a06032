/* C API for the pre-grasping toolkit: opaque handles, status codes, and a
 * thread-local error message. Everything the CLI does goes through here. */
#ifndef PREGRASP_PREGRASP_H
#define PREGRASP_PREGRASP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pg_status {
  PG_OK = 0,
  PG_ERROR = 1,              /* internal / runtime failure */
  PG_USAGE = 2,              /* bad arguments or config */
  PG_MISSING_DEPENDENCY = 3, /* required input artifact absent */
  PG_CORRUPT_DATA = 4        /* checksum / schema mismatch */
} pg_status;

/* Message for the most recent failure on this thread. Never NULL. */
const char* pg_last_error(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct pg_config pg_config;

/* Load a JSON config file; NULL or "" gives the documented defaults.
 * The PGR_SEED environment variable overrides the seed in either case. */
pg_status pg_config_load(const char* path, pg_config** out);
pg_status pg_config_from_json(const char* json_text, pg_config** out);
void pg_config_free(pg_config* cfg);

/* Normalized JSON (all keys, all defaults applied); free with
 * pg_string_free. */
pg_status pg_config_dump(const pg_config* cfg, char** out_text);
/* 8 hex digits; buf must hold at least 9 bytes. */
pg_status pg_config_hash(const pg_config* cfg, char* buf, size_t buflen);
void pg_string_free(char* s);

/* Targeted overrides used by CLI flags. */
pg_status pg_config_set_seed(pg_config* cfg, uint64_t seed);
pg_status pg_config_set_out_dir(pg_config* cfg, const char* dir);
/* kind: "grasp" | "pregrasp" */
pg_status pg_config_set_quota(pg_config* cfg, const char* kind,
                              uint64_t n_success, uint64_t n_failure);
pg_status pg_config_set_theta(pg_config* cfg, double theta_g);
pg_status pg_config_set_trials(pg_config* cfg, int trials);
/* comma-separated baseline names, or "all" */
pg_status pg_config_set_baselines(pg_config* cfg, const char* list);

/* ---- pipeline operations ---------------------------------------------- */

/* Collect a dataset into out_dir (shards + manifest). kind "pregrasp"
 * requires trained grasp weights; passing NULL then yields
 * PG_MISSING_DEPENDENCY. */
pg_status pg_collect(const pg_config* cfg, const char* kind,
                     const char* out_dir, const char* grasp_weights);

/* Train one module from a collected dataset. grasp_weights is required for
 * kind "pregrasp" (relay order) and ignored for "grasp". Writes the weight
 * file and a per-epoch metrics CSV; the final held-out metric (AUC for the
 * grasp module, MAE otherwise) lands in *holdout if non-NULL. */
pg_status pg_train(const pg_config* cfg, const char* kind,
                   const char* dataset_dir, const char* grasp_weights,
                   const char* out_weights, const char* metrics_csv,
                   double* holdout);

/* Run the closed-loop planner on a sampled scene; the trace JSON is
 * returned via out_json (free with pg_string_free). */
pg_status pg_plan(const pg_config* cfg, const char* grasp_weights,
                  const char* pregrasp_weights, const char* scene,
                  const char* category, char** out_json);

/* Full baseline grid; writes report.csv / report.json / report.txt into
 * out_dir. */
pg_status pg_eval(const pg_config* cfg, const char* grasp_weights,
                  const char* pregrasp_weights, const char* out_dir);

/* Threshold compatibility sweep; writes sweep.csv into out_dir. */
pg_status pg_sweep(const pg_config* cfg, const char* grasp_weights,
                   const char* pregrasp_weights, const char* out_dir);

/* Affordance heatmap PNG for one sampled scene. module_index: 1 pre-grasp,
 * 2 grasp. camera_view 0 renders top-down. */
pg_status pg_render(const pg_config* cfg, const char* weights,
                    int module_index, const char* scene, const char* category,
                    const char* out_png, int width, int height,
                    int camera_view);

#ifdef __cplusplus
}
#endif

#endif /* PREGRASP_PREGRASP_H */
