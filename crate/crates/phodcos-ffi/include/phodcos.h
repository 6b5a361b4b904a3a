#ifndef PHODCOS_H
#define PHODCOS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code shared by every fallible function in this library.
 */
typedef enum {
  /**
   * The call succeeded.
   */
  PHODCOS_STATUS_OK = 0,
  /**
   * A pointer was null, a string was not UTF-8, or a parameter was out of
   * range.
   */
  PHODCOS_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The input could not be used: unknown builtin name, unreadable file,
   * malformed document, or samples that do not describe a curve.
   */
  PHODCOS_STATUS_INPUT_ERROR = 2,
  /**
   * The requested tolerance could not be reached within the segment
   * budget, or the interpolation degenerated.
   */
  PHODCOS_STATUS_TOLERANCE_ERROR = 3,
  /**
   * A query was evaluated outside the path domain or hit a numerically
   * degenerate configuration.
   */
  PHODCOS_STATUS_NUMERIC_ERROR = 4,
  /**
   * An internal invariant was violated.
   */
  PHODCOS_STATUS_INTERNAL_ERROR = 5,
} PhodcosStatus;

/**
 * Opaque handle to a fitted path. Create with one of the `phodcos_fit_*`
 * constructors or [`phodcos_path_load_json`]; release with
 * [`phodcos_path_free`].
 */
typedef struct PhodcosPath PhodcosPath;

/**
 * One full evaluation of the moving coordinate system at a parameter value.
 */
typedef struct {
  /**
   * Path position.
   */
  double position[3];
  /**
   * Rotation matrix in row-major order; columns are the frame axes.
   */
  double rotation[9];
  /**
   * Angular velocity of the frame with respect to the curve parameter.
   */
  double omega[3];
  /**
   * Parametric speed `|dp/dxi|`.
   */
  double sigma;
  /**
   * Arc length accumulated from the start of the path.
   */
  double arc_length;
  /**
   * Curvature.
   */
  double curvature;
  /**
   * Torsion; meaningful only when `torsion_defined` is nonzero.
   */
  double torsion;
  /**
   * Zero where the curvature vanishes and the torsion is undefined.
   */
  int32_t torsion_defined;
} PhodcosSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fits a named built-in curve (`"exemplary"`, `"exemplary-planar"`,
 * `"line"`, `"helix"`) to the tolerance `epsilon` and returns a new path
 * handle through `out`.
 */
PhodcosStatus phodcos_fit_builtin(const char *name, double epsilon, PhodcosPath **out);

/**
 * Fits a curve through `n` samples to the tolerance `epsilon`.
 *
 * `points` holds `3 * n` doubles laid out `x0 y0 z0 x1 y1 z1 ...`.
 * `params` may be `NULL`, in which case the samples are assumed uniformly
 * spaced; otherwise it holds `n` strictly increasing parameter values.
 * `fit_tol` bounds the distance from the fitted curve to the samples.
 */
PhodcosStatus phodcos_fit_samples(const double *params,
                                  const double *points,
                                  size_t n,
                                  double fit_tol,
                                  double epsilon,
                                  PhodcosPath **out);

/**
 * Releases a path handle. Passing `NULL` is a no-op.
 */
void phodcos_path_free(PhodcosPath *path);

/**
 * Returns the number of polynomial segments, or 0 for a null handle.
 */
size_t phodcos_path_segment_count(const PhodcosPath *path);

/**
 * Writes the parameter domain `[xi0, xif]` of the path.
 */
PhodcosStatus phodcos_path_domain(const PhodcosPath *path, double *xi0, double *xif);

/**
 * Writes the conversion error the fit converged to (the maximum distance
 * between the path and its source curve).
 */
PhodcosStatus phodcos_path_max_error(const PhodcosPath *path, double *out);

/**
 * Evaluates position, frame, angular velocity, speed, and the scalar
 * geometry of the path at parameter `xi` (which must lie in the domain).
 */
PhodcosStatus phodcos_path_sample(const PhodcosPath *path, double xi, PhodcosSample *out);

/**
 * Saves the path and its metadata as a JSON document at `file_path`.
 */
PhodcosStatus phodcos_path_save_json(const PhodcosPath *path, const char *file_path);

/**
 * Loads a JSON document produced by [`phodcos_path_save_json`] (or the
 * `phodcos fit` command) and returns a new path handle through `out`.
 */
PhodcosStatus phodcos_path_load_json(const char *file_path, PhodcosPath **out);

/**
 * Returns a pointer to the description of the most recent failure on the
 * calling thread. The pointer stays valid until the next library call on
 * the same thread; the string is empty if no failure has occurred.
 */
const char *phodcos_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHODCOS_H */
