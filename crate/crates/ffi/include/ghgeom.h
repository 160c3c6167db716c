#ifndef GHGEOM_H
#define GHGEOM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GhgeomFieldKind {
  /**
   * The Gibbs-Helmholtz entropy `x1*x3 - x2`.
   */
  GHGEOM_FIELD_KIND_GH = 0,
  GHGEOM_FIELD_KIND_NU_IDENTITY = 1,
  /**
   * `nu(t) = t^p1`.
   */
  GHGEOM_FIELD_KIND_NU_POWER = 2,
  /**
   * `nu(t) = p1^(t^p2) - 1`.
   */
  GHGEOM_FIELD_KIND_NU_EXP = 3,
} GhgeomFieldKind;

typedef enum GhgeomLogKind {
  GHGEOM_LOG_KIND_NATURAL = 0,
  GHGEOM_LOG_KIND_TSALLIS = 1,
  GHGEOM_LOG_KIND_KANIADAKIS = 2,
} GhgeomLogKind;

typedef enum GhgeomStatus {
  GHGEOM_STATUS_OK = 0,
  GHGEOM_STATUS_NON_REAL_ROOTS = 1,
  GHGEOM_STATUS_NOT_POSITIVE_DEFINITE = 2,
  GHGEOM_STATUS_STEP_LIMIT_EXCEEDED = 3,
  GHGEOM_STATUS_NON_FINITE_STATE = 4,
  GHGEOM_STATUS_TOLERANCE_NOT_MET = 5,
  GHGEOM_STATUS_NO_SIGN_CHANGE = 6,
  GHGEOM_STATUS_DERIVATIVE_FAILURE = 7,
  GHGEOM_STATUS_OUT_OF_RANGE = 8,
  GHGEOM_STATUS_DOMAIN_ERROR = 9,
  GHGEOM_STATUS_NO_CONVERGENCE = 10,
  GHGEOM_STATUS_INVALID_SETTINGS = 11,
  GHGEOM_STATUS_NULL_POINTER = 100,
  GHGEOM_STATUS_INVALID_ARGUMENT = 101,
  GHGEOM_STATUS_BUFFER_TOO_SMALL = 102,
  GHGEOM_STATUS_PANIC = 103,
} GhgeomStatus;

/**
 * Opaque scalar field handle.
 */
typedef struct GhgeomField GhgeomField;

/**
 * Opaque geodesic path handle.
 */
typedef struct GhgeomPath GhgeomPath;

typedef struct GhgeomPoint {
  double x1;
  double x2;
  double x3;
} GhgeomPoint;

/**
 * Symmetric matrices are stored as their upper triangle
 * `(m11, m12, m13, m22, m23, m33)`. Principal curvatures are descending.
 */
typedef struct GhgeomCurvature {
  double a;
  double g[6];
  double h[6];
  double normal[4];
  double principal[3];
  double mean[3];
  double mean_paper[3];
  double ricci[6];
  double scalar;
} GhgeomCurvature;

typedef struct GhgeomSample {
  double t;
  double position[3];
  double velocity[3];
  double energy;
  double arc_length;
} GhgeomSample;

typedef struct GhgeomShootResult {
  double velocity[3];
  double miss;
  uint32_t iterations;
  bool converged;
} GhgeomShootResult;

/**
 * A generalized logarithm; `parameter` is q (Tsallis) or k (Kaniadakis)
 * and ignored for the natural logarithm.
 */
typedef struct GhgeomLog {
  GhgeomLogKind kind;
  double parameter;
} GhgeomLog;

typedef struct GhgeomResidual {
  double entropy;
  double sigma;
  double integral;
  double residual;
  double quad_error;
} GhgeomResidual;

typedef struct GhgeomIntersection {
  double theta;
  double point[3];
  double mate;
} GhgeomIntersection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Name of a status code as a static NUL-terminated string.
 */
const char *ghgeom_status_name(GhgeomStatus status);

/**
 * Message of the last failed call on this thread (empty after a success).
 * Valid until the next call into the library on the same thread.
 */
const char *ghgeom_last_error(void);

const char *ghgeom_version(void);

/**
 * `x1*x3 - x2`.
 */
double ghgeom_entropy(GhgeomPoint x);

/**
 * Creates a field handle. `p1`, `p2` parametrize the nu kinds.
 */
GhgeomStatus ghgeom_field_new(GhgeomFieldKind kind,
                              double p1,
                              double p2,
                              bool finite_differences,
                              GhgeomField **out);

void ghgeom_field_free(GhgeomField *field);

GhgeomStatus ghgeom_field_value(const GhgeomField *field, GhgeomPoint x, double *out);

/**
 * Curvature invariants of the graph of `field` at `x` (downward normal).
 */
GhgeomStatus ghgeom_curvature(const GhgeomField *field, GhgeomPoint x, GhgeomCurvature *out);

/**
 * Closed-form invariants of the Gibbs-Helmholtz surface.
 */
GhgeomStatus ghgeom_closed_curvature(GhgeomPoint x, GhgeomCurvature *out);

/**
 * Integrates the geodesic from `(pos, vel)` over `[0, t_end]` with
 * adaptive tolerance `tol`.
 */
GhgeomStatus ghgeom_geodesic_integrate(GhgeomPoint pos,
                                       const double *vel,
                                       double t_end,
                                       double tol,
                                       GhgeomPath **out);

/**
 * Number of samples; 0 for a null handle.
 */
size_t ghgeom_path_len(const GhgeomPath *path);

GhgeomStatus ghgeom_path_sample(const GhgeomPath *path, size_t index, GhgeomSample *out);

void ghgeom_path_free(GhgeomPath *path);

/**
 * Geodesic from `from` reaching `to` at t = 1. `out` is always filled when
 * the search ran; the status is `NoConvergence` if the miss exceeds `tol`.
 * `path_out` may be null; otherwise it receives a path handle.
 */
GhgeomStatus ghgeom_shoot(GhgeomPoint from,
                          GhgeomPoint to,
                          double tol,
                          GhgeomShootResult *out,
                          GhgeomPath **path_out);

GhgeomStatus ghgeom_glog(GhgeomLog log, double z, double *out);

/**
 * Closed-form dispersion solving the equivalence equation at entropy `s`.
 */
GhgeomStatus ghgeom_sigma_closed(GhgeomLog log, double s, double *out);

/**
 * Dispersion recovered numerically from the equivalence equation.
 */
GhgeomStatus ghgeom_sigma_solve(GhgeomLog log, double s, double tol, double *out);

/**
 * Residual of the equivalence equation at `x` for the Gaussian family with
 * constant mean `mu` and the closed-form dispersion.
 */
GhgeomStatus ghgeom_equivalence_residual(GhgeomLog log,
                                         GhgeomPoint x,
                                         double mu,
                                         GhgeomResidual *out);

GhgeomStatus ghgeom_rho_level_radius(double rho, double *out);

/**
 * Writes `samples` points of the entropy-level / cylinder intersection
 * into `buf`, which must hold at least `samples` entries.
 */
GhgeomStatus ghgeom_intersection_curve(double level,
                                       double radius,
                                       size_t samples,
                                       GhgeomIntersection *buf,
                                       size_t buf_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GHGEOM_H */
