/* fslab - crypto trading lab: C API for the shared library.
 *
 * All functions return fslab_status; FSLAB_OK means success. On failure the
 * thread-local message from fslab_last_error() describes what went wrong.
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with fslab_string_free(). Handles are opaque and freed with
 * their matching *_free function.
 */
#ifndef FSLAB_H
#define FSLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fslab_status {
    FSLAB_OK = 0,
    FSLAB_ERROR_DOMAIN = 1,           /* validation / precondition failure */
    FSLAB_ERROR_IO = 2,               /* missing or malformed input file   */
    FSLAB_ERROR_INVALID_ARGUMENT = 3, /* null pointer or bad argument      */
    FSLAB_ERROR_INTERNAL = 4
} fslab_status;

const char* fslab_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
const char* fslab_last_error(void);

void fslab_string_free(char* s);

/* ---- market data handles ---- */

typedef struct fslab_market_series fslab_market_series;

fslab_status fslab_market_series_load_csv(const char* asset_id, const char* path,
                                          fslab_market_series** out_series);
fslab_status fslab_market_series_size(const fslab_market_series* series, size_t* out_size);
fslab_status fslab_market_series_date_range(const fslab_market_series* series,
                                            char** out_first_iso, char** out_last_iso);
void fslab_market_series_free(fslab_market_series* series);

typedef struct fslab_news_feed fslab_news_feed;

fslab_status fslab_news_feed_load_json(const char* asset_id, const char* path,
                                       fslab_news_feed** out_feed);
fslab_status fslab_news_feed_size(const fslab_news_feed* feed, size_t* out_size);
void fslab_news_feed_free(fslab_news_feed* feed);

/* ---- reference splits ---- */

/* JSON array of the built-in splits (asset, kind, dates, prices, expected
 * trend). */
fslab_status fslab_reference_splits_json(char** out_json);

/* Trend percentage of a built-in split; split_kind is "validation",
 * "test_bull" or "test_bear". */
fslab_status fslab_split_trend(const char* asset_id, const char* split_kind,
                               double* out_trend_pct);

/* ---- experiments (config JSON in, result JSON out) ---- */

fslab_status fslab_backtest_run(const char* config_json, char** out_report_json);
fslab_status fslab_tune_run(const char* config_json, char** out_result_json);
fslab_status fslab_ablation_run(const char* config_json, char** out_result_json);

/* reports_json: JSON array of {"path": ..., "report": {...}} entries. */
fslab_status fslab_render_table(const char* reports_json, int markdown, char** out_table);
fslab_status fslab_render_ablation_table(const char* ablation_result_json, int markdown,
                                         char** out_table);

#ifdef __cplusplus
}
#endif

#endif /* FSLAB_H */
