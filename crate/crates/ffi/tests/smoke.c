#include <math.h>
#include <stdio.h>
#include <string.h>

#include "sklyanin.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "check failed: %s (%s)\n", #cond,         \
                    sk_last_error());                                 \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    SkContext *ctx = NULL;
    SkComplex eta = {0.05, 0.0};
    CHECK(sk_context_new(0.25, eta, &ctx) == SK_STATUS_OK);

    /* theta is odd */
    SkComplex x = {0.3, 0.07}, mx = {-0.3, -0.07}, a, b;
    CHECK(sk_theta(ctx, x, &a) == SK_STATUS_OK);
    CHECK(sk_theta(ctx, mx, &b) == SK_STATUS_OK);
    CHECK(fabs(a.re + b.re) < 1e-15 && fabs(a.im + b.im) < 1e-15);

    SkSixJTable *t = NULL;
    SkComplex p1 = {0.31, 0.06}, p2 = {-0.17, 0.04}, p3 = {0.12, 0.03}, p4 = {-0.36, 0.05};
    CHECK(sk_sixj_new(ctx, p1, p2, p3, p4, 2, &t) == SK_STATUS_OK);
    SkComplex r;
    CHECK(sk_sixj_get(t, 1, 2, &r) == SK_STATUS_OK);
    CHECK(sk_sixj_get(t, 5, 0, &r) == SK_STATUS_INDEX_OUT_OF_RANGE);
    CHECK(strlen(sk_last_error()) > 0);
    char *json = NULL;
    CHECK(sk_sixj_to_json(t, &json) == SK_STATUS_OK);
    CHECK(strstr(json, "\"r\"") != NULL);
    sk_string_free(json);
    sk_sixj_free(t);

    CHECK(sk_theta(NULL, x, &a) == SK_STATUS_NULL_POINTER);
    sk_context_free(ctx);
    printf("ok %s\n", sk_version());
    return 0;
}
