#include <math.h>
#include <stdio.h>
#include "nilharm.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); return 1; } } while (0)

int main(void) {
    NhAlgebra *a = NULL;
    CHECK(nh_algebra_builtin("heisenberg-1", &a) == NH_STATUS_OK);
    size_t m = 0, k = 0;
    CHECK(nh_algebra_dims(a, &m, &k) == NH_STATUS_OK && m == 2 && k == 1);

    double lambda[1] = {1.0};
    size_t alpha[1] = {0};
    NhEigenfunction *e = NULL;
    CHECK(nh_eigenfunction_new(a, lambda, 1, alpha, 1, 0.0, &e) == NH_STATUS_OK);
    double v[2] = {0.0, 0.0}, z[1] = {0.0}, re = 0.0, im = 0.0;
    CHECK(nh_eigenfunction_eval(e, v, 2, z, 1, &re, &im) == NH_STATUS_OK);
    CHECK(fabs(re - 1.0) < 1e-12 && fabs(im) < 1e-12);

    double bad[2] = {1.0, 2.0};
    NhFrame *f = NULL;
    CHECK(nh_frame_new(a, bad, 2, 0.0, &f) == NH_STATUS_DIMENSION_MISMATCH && f == NULL);
    char msg[256];
    CHECK(nh_last_error_message(msg, sizeof msg) > 0);

    nh_eigenfunction_free(e);
    nh_algebra_free(a);
    puts("ok");
    return 0;
}
