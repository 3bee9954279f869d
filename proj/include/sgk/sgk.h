/* Copyright 2026 The sgk Authors
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

/* C interface to the sgk library: configure a run, execute it and write its
 * report. Handles are opaque; every call returns an sgk_status and leaves a
 * message in sgk_last_error() on failure. */

#ifndef SGK_SGK_H
#define SGK_SGK_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgk_status {
  SGK_OK = 0,
  SGK_E_VALIDATION = 2, /* bad configuration or arguments */
  SGK_E_NUMERIC = 3,    /* solver, conditioning or certification failure */
  SGK_E_IO = 4,
  SGK_E_NULL = 5        /* null handle or out pointer */
} sgk_status;

typedef struct sgk_config sgk_config;
typedef struct sgk_report sgk_report;

const char* sgk_version(void);

/* Message of the last failed call on this thread; "" when none. */
const char* sgk_last_error(void);

sgk_status sgk_config_new(sgk_config** out);
sgk_status sgk_config_load(const char* path, sgk_config** out);
sgk_status sgk_config_set(sgk_config* cfg, const char* key, const char* value);
sgk_status sgk_config_get(const sgk_config* cfg, const char* key, char* buf, size_t buf_len);
sgk_status sgk_config_validate(const sgk_config* cfg);
void sgk_config_free(sgk_config* cfg);

/* Runs the configured pipeline. A report is produced even when the run
 * fails; its exit code carries the outcome. */
sgk_status sgk_run(const sgk_config* cfg, sgk_report** out);

/* format: "json", "csv" or "both"; NULL uses the configured format. */
sgk_status sgk_report_write(const sgk_report* rep, const char* dir, const char* format);
/* JSON text owned by the report, valid until sgk_report_free. */
const char* sgk_report_json(const sgk_report* rep);
const char* sgk_report_status(const sgk_report* rep);
int sgk_report_exit_code(const sgk_report* rep);
void sgk_report_free(sgk_report* rep);

#ifdef __cplusplus
}
#endif

#endif /* SGK_SGK_H */
