/* C interface to the fairbios shared library.
 *
 * Conventions:
 *  - every function returns FB_OK (0) on success or an error code matching
 *    the CLI exit codes; fb_last_error() describes the most recent failure
 *    on the calling thread;
 *  - char** outputs receive a malloc'd NUL-terminated string the caller
 *    releases with fb_string_free();
 *  - handles are opaque and freed with their matching *_free function.
 */
#ifndef FAIRBIOS_H
#define FAIRBIOS_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  FB_OK = 0,
  FB_ERR_USAGE = 1,   /* bad arguments or configuration */
  FB_ERR_DATA = 2,    /* bad input data, schema, or file problems */
  FB_ERR_NUMERIC = 3, /* numeric failure */
};

typedef struct fb_dataset fb_dataset;
typedef struct fb_table fb_table;

/* Message for the last failing call on this thread; empty string if none. */
const char* fb_last_error(void);

void fb_string_free(char* s);

/* Generates a synthetic corpus. config_json holds the generator parameters
 * (n, num_professions, gender_skew, profession_gender_bias,
 * signal_words_per_profession, gendered_word_rate, bio_length, seed). Writes
 * the corpus CSV to csv_path and, when sidecar_path is non-NULL, a JSON
 * sidecar of ground-truth parameters. */
int fb_synth_generate(const char* config_json, const char* csv_path, const char* sidecar_path);

/* Loads a CSV or line-delimited JSON corpus, normalizes it, and splits it
 * 80/10/10 under the given seed. */
int fb_dataset_load(const char* path, uint64_t seed, fb_dataset** out);
void fb_dataset_free(fb_dataset* ds);

/* Writes the per-split distribution tables and plot-data files into out_dir
 * and returns the human-readable stats text. */
int fb_dataset_distribution(const fb_dataset* ds, const char* out_dir, char** text_out);

/* Trains one model. task is "gender" or "profession"; condition is
 * "baseline", "oversampling" or "loss_weighting". config_json (optional,
 * NULL for defaults) may carry "seed", "train" and "featurizer" objects. The
 * checkpoint is written to model_path; report_json_out (optional) receives
 * per-epoch stats. */
int fb_train(const fb_dataset* ds, const char* task, const char* condition,
             const char* config_json, const char* model_path, char** report_json_out);

/* Evaluates a checkpoint on the dataset's test split (gender is the
 * sensitive attribute) and returns the fairness report as JSON. config_json
 * must carry the same "featurizer" settings used in training (NULL for
 * defaults). */
int fb_evaluate(const fb_dataset* ds, const char* task, const char* model_path,
                const char* config_json, char** report_json_out);

/* Fits an equalized-odds policy from a score file (columns y_true, group,
 * score_0..score_{K-1}, optional split markers; fitting uses the dev rows
 * when markers are present). Returns the policy as JSON. */
int fb_mitigate_fit(const char* score_path, char** policy_json_out);

/* Applies a fitted policy to every row of a score file and returns a CSV
 * with a single y_pred column. */
int fb_mitigate_apply(const char* score_path, const char* policy_json, uint64_t seed,
                      char** preds_csv_out);

/* Runs the experiment grid described by config_json (data source, tasks,
 * conditions, seed, optional out_dir; when out_dir is set, result tables and
 * the distribution report are also written there). */
int fb_run_all(const char* config_json, fb_table** out);
void fb_table_free(fb_table* table);

/* Renders a results table; format is "csv", "json" or "markdown". */
int fb_table_render(const fb_table* table, const char* format, char** out);

/* Audits an external score file and returns the fairness report as JSON. */
int fb_audit(const char* score_path, char** report_json_out);

#ifdef __cplusplus
}
#endif

#endif /* FAIRBIOS_H */
