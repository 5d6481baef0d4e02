// Copyright 2026 The hxnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to hxnn. Every function returns an hxnn_status; on failure
 * hxnn_last_error() holds a one-line message for the calling thread. Objects
 * are opaque and released with their matching _free function. */
#ifndef HXNN_H_
#define HXNN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(HXNN_BUILDING_LIBRARY)
#define HXNN_API __attribute__((visibility("default")))
#else
#define HXNN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hxnn_status {
  HXNN_OK = 0,
  HXNN_ERR_INVALID_ARGUMENT = 1,
  HXNN_ERR_NAME = 2,
  HXNN_ERR_ALGEBRA_MISMATCH = 3,
  HXNN_ERR_SHAPE = 4,
  HXNN_ERR_DIVISIBILITY = 5,
  HXNN_ERR_NORMALIZATION = 6,
  HXNN_ERR_DEGENERATE_AXIS = 7,
  HXNN_ERR_CONFIG = 8,
  HXNN_ERR_FORMAT = 9,
  HXNN_ERR_IO = 10,
  HXNN_ERR_INTERNAL = 11
} hxnn_status;

typedef enum hxnn_property {
  HXNN_COMMUTATIVE = 0,
  HXNN_ASSOCIATIVE = 1,
  HXNN_ALTERNATIVE = 2,
  HXNN_POWER_ASSOCIATIVE = 3
} hxnn_property;

typedef struct hxnn_string hxnn_string;
typedef struct hxnn_algebra hxnn_algebra;
typedef struct hxnn_config hxnn_config;
typedef struct hxnn_model hxnn_model;
/* Text for standard output plus named files for the output directory. */
typedef struct hxnn_report hxnn_report;

HXNN_API const char* hxnn_version(void);
HXNN_API const char* hxnn_last_error(void);
HXNN_API const char* hxnn_status_name(hxnn_status status);

HXNN_API const char* hxnn_string_data(const hxnn_string* s);
HXNN_API size_t hxnn_string_size(const hxnn_string* s);
HXNN_API void hxnn_string_free(hxnn_string* s);

/* Built-in algebras: real, complex, quaternion, tessarine, dual_quaternion,
 * octonion, sedenion. */
HXNN_API hxnn_status hxnn_algebra_create(const char* name, hxnn_algebra** out);
HXNN_API void hxnn_algebra_free(hxnn_algebra* a);
HXNN_API hxnn_status hxnn_algebra_dim(const hxnn_algebra* a, size_t* dim);
/* x, y and out hold dim coefficients each. */
HXNN_API hxnn_status hxnn_algebra_multiply(const hxnn_algebra* a, const double* x, const double* y,
                                           double* out);
/* Writes the dim x dim row-major matrix of left multiplication by w. */
HXNN_API hxnn_status hxnn_algebra_left_matrix(const hxnn_algebra* a, const double* w, double* out);
HXNN_API hxnn_status hxnn_algebra_check_property(const hxnn_algebra* a, hxnn_property p, int* holds);
HXNN_API hxnn_status hxnn_algebra_table(const hxnn_algebra* a, hxnn_string** out);
HXNN_API hxnn_status hxnn_algebra_check(const hxnn_algebra* a, hxnn_string** out);
HXNN_API hxnn_status hxnn_algebra_zerodiv(const hxnn_algebra* a, hxnn_string** out);

HXNN_API hxnn_status hxnn_config_load(const char* path, hxnn_config** out);
HXNN_API hxnn_status hxnn_config_parse(const char* text, hxnn_config** out);
HXNN_API void hxnn_config_free(hxnn_config* c);
HXNN_API hxnn_status hxnn_config_set_seed(hxnn_config* c, uint64_t seed);
HXNN_API hxnn_status hxnn_config_serialize(const hxnn_config* c, hxnn_string** out);

HXNN_API hxnn_status hxnn_model_load(const char* path, hxnn_model** out);
HXNN_API hxnn_status hxnn_model_save(const hxnn_model* m, const char* path);
HXNN_API void hxnn_model_free(hxnn_model* m);
HXNN_API hxnn_status hxnn_model_free_params(const hxnn_model* m, size_t* count);

HXNN_API const char* hxnn_report_text(const hxnn_report* r);
HXNN_API size_t hxnn_report_file_count(const hxnn_report* r);
HXNN_API const char* hxnn_report_file_name(const hxnn_report* r, size_t i);
HXNN_API const char* hxnn_report_file_data(const hxnn_report* r, size_t i, size_t* size);
/* Creates `dir` if needed; HXNN_ERR_IO on failure. */
HXNN_API hxnn_status hxnn_report_write_files(const hxnn_report* r, const char* dir);
HXNN_API void hxnn_report_free(hxnn_report* r);

HXNN_API hxnn_status hxnn_paramtable(const char* spec, hxnn_report** out);
HXNN_API hxnn_status hxnn_train(const hxnn_config* c, hxnn_report** out);
HXNN_API hxnn_status hxnn_eval(const hxnn_model* m, const hxnn_config* c, hxnn_report** out);
HXNN_API hxnn_status hxnn_experiment_lorenz(const hxnn_config* c, hxnn_report** out);
HXNN_API hxnn_status hxnn_experiment_blobs(const hxnn_config* c, hxnn_report** out);
/* *passed is 1 iff every layer's max relative error is below 1e-6. */
HXNN_API hxnn_status hxnn_gradcheck(hxnn_report** out, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* HXNN_H_ */
