#ifndef QDC_H
#define QDC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>

// Status codes shared by every entry point.
typedef enum QdcStatus {
  QDC_STATUS_OK = 0,
  QDC_STATUS_NULL_POINTER = 1,
  QDC_STATUS_INVALID_ARGUMENT = 2,
  QDC_STATUS_DOMAIN = 3,
  QDC_STATUS_UNCONDITIONABLE = 4,
  QDC_STATUS_INTERNAL = 5,
} QdcStatus;

// Opaque probability table.
typedef struct QdcDistribution QdcDistribution;

// Opaque IC* pattern.
typedef struct QdcPattern QdcPattern;

// Message for the last failing call on this thread; empty after success.
// Valid until the next call into the library on the same thread.
const char *qdc_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void qdc_string_free(char *s);

// Writes the 8-entry joint table `P(a,b,c)` (index `4a+2b+c`) from the
// closed form into `out`, which must hold `len == 8` doubles.
//
// # Safety
// `out` must point to `len` writable doubles.
enum QdcStatus qdc_simulate(double eta, double alpha, double phi, double *out, size_t len);

// Largest entrywise gap between the closed form and the simulated circuit.
//
// # Safety
// `out` must be a valid pointer.
enum QdcStatus qdc_circuit_residual(double eta, double alpha, double phi, double *out);

// Detection distribution over A, B, C for the given circuit parameters.
//
// # Safety
// `out` must be a valid pointer.
enum QdcStatus qdc_distribution_from_params(double eta,
                                            double alpha,
                                            double phi,
                                            struct QdcDistribution **out);

// Parses `{"variables": [...], "probabilities": [...]}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` a valid pointer.
enum QdcStatus qdc_distribution_from_json(const char *json, struct QdcDistribution **out);

// # Safety
// `h` must come from this library and not have been freed already.
void qdc_distribution_free(struct QdcDistribution *h);

// # Safety
// `h` must be a live handle; `out` a valid pointer.
enum QdcStatus qdc_distribution_to_json(const struct QdcDistribution *h, char **out);

// `x ⫫ y | given`, each argument a comma-separated variable list
// (`given` may be empty).
//
// # Safety
// String arguments must be nul-terminated; `h` live; `out` valid.
enum QdcStatus qdc_distribution_is_ci(const struct QdcDistribution *h,
                                      const char *x,
                                      const char *y,
                                      const char *given,
                                      double tol,
                                      bool *out);

// Conditions on `evidence` (`"B=0,C=1"`) and returns a new handle.
//
// # Safety
// `evidence` must be nul-terminated; `h` live; `out` valid.
enum QdcStatus qdc_distribution_condition(const struct QdcDistribution *h,
                                          const char *evidence,
                                          struct QdcDistribution **out);

// All pairwise relations at `tol`, closed under the semi-graphoid axioms,
// as a JSON array.
//
// # Safety
// `h` live; `out` valid.
enum QdcStatus qdc_distribution_ci_relations_json(const struct QdcDistribution *h,
                                                  double tol,
                                                  char **out);

// IC* over the distribution's variables.
//
// # Safety
// `h` live; `out` valid.
enum QdcStatus qdc_pattern_discover(const struct QdcDistribution *h,
                                    double tol,
                                    struct QdcPattern **out);

// The chain `A o-o B o-o C` with `S_AC = {B}`.
//
// # Safety
// `out` valid.
enum QdcStatus qdc_pattern_reference(struct QdcPattern **out);

// # Safety
// `h` must come from this library and not have been freed already.
void qdc_pattern_free(struct QdcPattern *h);

// # Safety
// `h` live; `out` valid.
enum QdcStatus qdc_pattern_to_json(const struct QdcPattern *h, char **out);

// Structures for one detection ordering (`"ACB"` or `"A<C<B"`) as a JSON
// array of graphs; `count` receives the group size.
//
// # Safety
// `ordering` nul-terminated; `h` live; `out` and `count` valid.
enum QdcStatus qdc_enumerate_json(const struct QdcPattern *h,
                                  const char *ordering,
                                  char **out,
                                  size_t *count);

// Full no-go report over the six orderings; `passed` receives whether every
// assertion held.
//
// # Safety
// `h` live; `out` and `passed` valid.
enum QdcStatus qdc_no_go_report_json(const struct QdcPattern *h, char **out, bool *passed);

// Library version, static storage.
const char *qdc_version(void);

#endif  /* QDC_H */
