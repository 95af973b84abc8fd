#ifndef CUTSTOKES_H
#define CUTSTOKES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every call.
 */
typedef enum CsStatus {
  CS_STATUS_OK = 0,
  /*
   Null pointer, bad name or out-of-range argument.
   */
  CS_STATUS_INVALID_ARGUMENT = 1,
  /*
   The mesh does not resolve the interface.
   */
  CS_STATUS_ASSUMPTION_VIOLATION = 2,
  /*
   Singular matrix or failed factorization.
   */
  CS_STATUS_SOLVER_FAILURE = 3,
  CS_STATUS_IO = 4,
  /*
   A bug; the handle involved should not be used again.
   */
  CS_STATUS_PANIC = 5,
} CsStatus;

/*
 A configured problem.
 */
typedef struct CsCase CsCase;

/*
 A solved problem.
 */
typedef struct CsRun CsRun;

/*
 Error norms of one run. `cond` is NaN when it was not computed.
 */
typedef struct CsReport {
  double h_x;
  double err_p_l2;
  double err_u_l2;
  double err_u_h1;
  double err_u_inf;
  double err_p_inf;
  double cond;
  double residual;
  size_t n_velocity;
  size_t n_pressure;
} CsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Valid until
 the next call on the same thread.
 */
const char *cs_last_error_message(void);

/*
 Create the preset `name` (`"1"`, `"2"`, `"3a"`, `"3b"` or the long names).

 # Safety
 `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CsStatus cs_case_new(const char *name, struct CsCase **out);

/*
 # Safety
 `case` must come from [`cs_case_new`] and not be used afterwards. Null is
 ignored.
 */
void cs_case_free(struct CsCase *case_);

/*
 Set the velocity and pressure ghost-penalty scalings.

 # Safety
 `case` must be a live handle.
 */
enum CsStatus cs_case_set_stabilization(struct CsCase *case_, double eps_u, double eps_p);

/*
 Nonzero `divergence` selects the divergence form of the coupling.

 # Safety
 `case` must be a live handle.
 */
enum CsStatus cs_case_set_divergence_form(struct CsCase *case_, int32_t divergence);

/*
 Assemble and solve on a velocity mesh with `nx` columns.

 # Safety
 `case` must be a live handle and `out` a writable pointer.
 */
enum CsStatus cs_run(const struct CsCase *case_,
                     size_t nx,
                     bool with_condition,
                     struct CsRun **out);

/*
 # Safety
 `run` must come from [`cs_run`] and not be used afterwards. Null is
 ignored.
 */
void cs_run_free(struct CsRun *run);

/*
 # Safety
 `run` must be a live handle and `out` writable.
 */
enum CsStatus cs_run_report(const struct CsRun *run, struct CsReport *out);

/*
 Copy the velocity coefficients (x and y interleaved per vertex, side one
 then side two). `len` is the capacity of `buf`.

 # Safety
 `run` must be a live handle and `buf` valid for `len` writes.
 */
enum CsStatus cs_run_velocity(const struct CsRun *run, double *buf, size_t len);

/*
 Copy the pressure coefficients, shifted to the exact solution's mean.

 # Safety
 `run` must be a live handle and `buf` valid for `len` writes.
 */
enum CsStatus cs_run_pressure(const struct CsRun *run, double *buf, size_t len);

/*
 Write the four legacy-VTK files `<stem>_{pressure,velocity}_side{1,2}.vtk`
 into the existing directory `dir`.

 # Safety
 `run` must be a live handle; `dir` and `stem` NUL-terminated strings.
 */
enum CsStatus cs_run_write_vtk(const struct CsRun *run, const char *dir, const char *stem);

/*
 Library version as a static string.
 */
const char *cs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUTSTOKES_H */
