#ifndef FIBDYN_H
#define FIBDYN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FibdynStatus {
  FIBDYN_STATUS_OK = 0,
  FIBDYN_STATUS_NULL_POINTER = 1,
  FIBDYN_STATUS_INVALID_ARGUMENT = 2,
  FIBDYN_STATUS_INVERSE_UNDEFINED = 3,
  FIBDYN_STATUS_OVERFLOW = 4,
  FIBDYN_STATUS_NON_REAL_PARAMETER = 5,
  FIBDYN_STATUS_PARAMETER_OUT_OF_RANGE = 6,
  FIBDYN_STATUS_RADIUS_TOO_SMALL = 7,
  FIBDYN_STATUS_UNSUPPORTED_FORMAT = 8,
  FIBDYN_STATUS_IO = 9,
  FIBDYN_STATUS_INTERNAL = 10,
  FIBDYN_STATUS_PANIC = 11,
} FibdynStatus;

typedef enum FibdynDirection {
  FIBDYN_DIRECTION_FORWARD = 0,
  FIBDYN_DIRECTION_BACKWARD = 1,
} FibdynDirection;

typedef enum FibdynOrbitKind {
  FIBDYN_ORBIT_KIND_BOUNDED = 0,
  FIBDYN_ORBIT_KIND_ESCAPED = 1,
  FIBDYN_ORBIT_KIND_INVERSE_UNDEFINED = 2,
} FibdynOrbitKind;

typedef enum FibdynFixedKind {
  FIBDYN_FIXED_KIND_ATTRACTING = 0,
  FIBDYN_FIXED_KIND_REPELLING = 1,
  FIBDYN_FIXED_KIND_SADDLE = 2,
  FIBDYN_FIXED_KIND_INDIFFERENT = 3,
  FIBDYN_FIXED_KIND_DEGENERATE = 4,
} FibdynFixedKind;

typedef struct FibdynContext FibdynContext;

typedef struct FibdynRaster FibdynRaster;

// A point of C^2. Real points have zero imaginary parts.
typedef struct FibdynPoint {
  double x_re;
  double x_im;
  double y_re;
  double y_im;
} FibdynPoint;

// Outcome of an escape classification. `index` is the escape or
// undefined index and is 0 for bounded orbits.
typedef struct FibdynOrbit {
  enum FibdynOrbitKind kind;
  uint64_t index;
} FibdynOrbit;

typedef struct FibdynRadii {
  double r0;
  double r1;
  double r2;
} FibdynRadii;

// Fixed point `(a, a)` with its two multipliers.
typedef struct FibdynFixedPoint {
  double a_re;
  double a_im;
  double eig_re[2];
  double eig_im[2];
  enum FibdynFixedKind kind;
} FibdynFixedPoint;

// The 3-cycle through `(-1, -1)`.
typedef struct FibdynCycle {
  struct FibdynPoint points[3];
  double eig_re[2];
  double eig_im[2];
  double det_re;
  double det_im;
} FibdynCycle;

// Raster request. `mode` and the later `format` use the CLI spellings.
typedef struct FibdynRenderSpec {
  const char *mode;
  double window[4];
  uint32_t width;
  uint32_t height;
  uint64_t budget;
  uint64_t seed;
  double y0_re;
  double y0_im;
} FibdynRenderSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *fibdyn_status_message(enum FibdynStatus status);

// Message of the last failure on this thread, or null. Valid until the
// next failing call on the same thread.
const char *fibdyn_last_error(void);

// Create a context for `c = c_re + i c_im`.
//
// # Safety
// `out` must be valid for writes.
enum FibdynStatus fibdyn_context_new(double c_re, double c_im, struct FibdynContext **out_ctx);

// # Safety
// `ctx` must come from [`fibdyn_context_new`] and not be used afterwards.
void fibdyn_context_free(struct FibdynContext *ctx);

// One step of the map or its inverse.
//
// # Safety
// Pointers must be valid.
enum FibdynStatus fibdyn_step(const struct FibdynContext *ctx,
                              struct FibdynPoint z,
                              enum FibdynDirection direction,
                              struct FibdynPoint *out_z);

// Escape classification with at most `budget` steps. A `radius` of 0
// selects the default radius for the direction.
//
// # Safety
// Pointers must be valid.
enum FibdynStatus fibdyn_classify(const struct FibdynContext *ctx,
                                  struct FibdynPoint z,
                                  enum FibdynDirection direction,
                                  double radius,
                                  uint64_t budget,
                                  struct FibdynOrbit *out_orbit);

// Forward radius `r0`, backward radius `r1` and bidisk radius `r2`.
//
// # Safety
// Pointers must be valid.
enum FibdynStatus fibdyn_radii(const struct FibdynContext *ctx, struct FibdynRadii *out_radii);

// `out_fixed[0]` is alpha, `out_fixed[1]` is theta.
//
// # Safety
// `out_fixed` must point to two writable elements.
enum FibdynStatus fibdyn_fixed_points(const struct FibdynContext *ctx,
                                      struct FibdynFixedPoint *out_fixed);

// # Safety
// Pointers must be valid.
enum FibdynStatus fibdyn_cycle(const struct FibdynContext *ctx, struct FibdynCycle *out_cycle);

// Rasterize `spec` for the context's parameter.
//
// # Safety
// Pointers must be valid and `spec->mode` NUL-terminated.
enum FibdynStatus fibdyn_render(const struct FibdynContext *ctx,
                                const struct FibdynRenderSpec *spec,
                                struct FibdynRaster **out_raster);

// Row-major pixel codes. The array has `width * height` entries and
// lives as long as the raster.
//
// # Safety
// Pointers must be valid.
enum FibdynStatus fibdyn_raster_codes(const struct FibdynRaster *raster,
                                      const uint8_t **out_codes,
                                      uint32_t *out_width,
                                      uint32_t *out_height);

// Encode as "ppm", "csv" or "json-meta". Free the buffer with
// [`fibdyn_buffer_free`].
//
// # Safety
// Pointers must be valid and `format` NUL-terminated.
enum FibdynStatus fibdyn_raster_encode(const struct FibdynRaster *raster,
                                       const char *format,
                                       uint8_t **out_data,
                                       size_t *out_len);

// # Safety
// `data` and `len` must come from one [`fibdyn_raster_encode`] call.
void fibdyn_buffer_free(uint8_t *data, size_t len);

// # Safety
// `raster` must come from [`fibdyn_render`] and not be used afterwards.
void fibdyn_raster_free(struct FibdynRaster *raster);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIBDYN_H */
