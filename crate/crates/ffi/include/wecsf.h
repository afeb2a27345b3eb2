/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef WECSF_H
#define WECSF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WecsfStatus {
  WECSF_STATUS_OK = 0,
  WECSF_STATUS_NULL_POINTER = 1,
  WECSF_STATUS_INVALID_ARGUMENT = 2,
  WECSF_STATUS_DIMENSION_MISMATCH = 3,
  // The metric is undefined for this input, e.g. a constant map.
  WECSF_STATUS_UNDEFINED_SCORE = 4,
  WECSF_STATUS_IO = 5,
  WECSF_STATUS_DECODE = 6,
  WECSF_STATUS_DATA = 7,
  WECSF_STATUS_PANIC = 8,
} WecsfStatus;

// A saliency map or any other float plane. Opaque.
typedef struct WecsfMap WecsfMap;

// Pipeline parameters. Opaque.
typedef struct WecsfParams WecsfParams;

// Zero-based pixel coordinates.
typedef struct WecsfFixation {
  size_t x;
  size_t y;
} WecsfFixation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *wecsf_version(void);

// Message of the last failed call on this thread, or NULL after a
// successful call. Valid until the next call into the library.
const char *wecsf_last_error(void);

// Default parameters. Never NULL.
struct WecsfParams *wecsf_params_new(void);

// Reads the `[pipeline]` section of a TOML run configuration.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum WecsfStatus wecsf_params_load_toml(const char *path, struct WecsfParams **out);

// # Safety
// `params` must come from this library or be NULL.
void wecsf_params_free(struct WecsfParams *params);

// # Safety
// `params` must be a live handle.
enum WecsfStatus wecsf_params_set_ppd(struct WecsfParams *params, double ppd);

// Same von Kries gain for all three cone channels.
//
// # Safety
// `params` must be a live handle.
enum WecsfStatus wecsf_params_set_gain(struct WecsfParams *params, double gain);

// Final blur sigma as a fraction of the working width; 0 disables it.
//
// # Safety
// `params` must be a live handle.
enum WecsfStatus wecsf_params_set_smoothing(struct WecsfParams *params, double sigma);

// # Safety
// `params` must be a live handle.
enum WecsfStatus wecsf_params_set_fusion_weights(struct WecsfParams *params,
                                                 double wb,
                                                 double rg,
                                                 double yb);

// # Safety
// `params` must be a live handle.
enum WecsfStatus wecsf_params_set_include_approximation(struct WecsfParams *params, bool include);

// Predicts a map from interleaved 8-bit RGB. `stride` is the byte
// distance between rows, at least `3 * width`.
//
// # Safety
// `data` must hold `stride * height` readable bytes; `out` must be valid.
enum WecsfStatus wecsf_predict_rgb8(const struct WecsfParams *params,
                                    const uint8_t *data,
                                    size_t width,
                                    size_t height,
                                    size_t stride,
                                    struct WecsfMap **out);

// Predicts a map for a PNG or JPEG file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid.
enum WecsfStatus wecsf_predict_file(const struct WecsfParams *params,
                                    const char *path,
                                    struct WecsfMap **out);

// Copies `width * height` row-major samples into a new map.
//
// # Safety
// `data` must hold `width * height` doubles; `out` must be valid.
enum WecsfStatus wecsf_map_from_data(const double *data,
                                     size_t width,
                                     size_t height,
                                     struct WecsfMap **out);

// # Safety
// `map` must be a live handle or NULL (returns 0).
size_t wecsf_map_width(const struct WecsfMap *map);

// # Safety
// `map` must be a live handle or NULL (returns 0).
size_t wecsf_map_height(const struct WecsfMap *map);

// Row-major samples, `width * height` doubles, owned by the map.
//
// # Safety
// `map` must be a live handle or NULL (returns NULL).
const double *wecsf_map_data(const struct WecsfMap *map);

// 8-bit grayscale PNG.
//
// # Safety
// `map` must be a live handle; `path` a NUL-terminated string.
enum WecsfStatus wecsf_map_save_png(const struct WecsfMap *map, const char *path);

// Lossless `WECSF1` float dump.
//
// # Safety
// `map` must be a live handle; `path` a NUL-terminated string.
enum WecsfStatus wecsf_map_save_dump(const struct WecsfMap *map, const char *path);

// # Safety
// `map` must come from this library or be NULL.
void wecsf_map_free(struct WecsfMap *map);

// # Safety
// `fixations` must hold `count` entries; `out` must be valid.
enum WecsfStatus wecsf_metric_nss(const struct WecsfMap *map,
                                  const struct WecsfFixation *fixations,
                                  size_t count,
                                  double *out);

// # Safety
// `fixations` must hold `count` entries; `out` must be valid.
enum WecsfStatus wecsf_metric_auc_judd(const struct WecsfMap *map,
                                       const struct WecsfFixation *fixations,
                                       size_t count,
                                       double *out);

// # Safety
// Both maps must be live handles; `out` must be valid.
enum WecsfStatus wecsf_metric_cc(const struct WecsfMap *map,
                                 const struct WecsfMap *density,
                                 double *out);

// # Safety
// Both maps must be live handles; `out` must be valid.
enum WecsfStatus wecsf_metric_sim(const struct WecsfMap *map,
                                  const struct WecsfMap *density,
                                  double *out);

// KL divergence of the map from the density, regularized by machine epsilon.
//
// # Safety
// Both maps must be live handles; `out` must be valid.
enum WecsfStatus wecsf_metric_kl(const struct WecsfMap *map,
                                 const struct WecsfMap *density,
                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WECSF_H */
