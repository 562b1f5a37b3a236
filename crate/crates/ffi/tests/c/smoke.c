#include <math.h>
#include <stdio.h>
#include "weylcov.h"

#define CHECK(x) do { if (!(x)) { fprintf(stderr, "failed: %s\n", #x); return 1; } } while (0)

int main(void) {
    WeylcovTable *t = NULL;
    size_t rows, cols;
    bool partial;
    CHECK(weylcov_table_new(3, &t) == WEYLCOV_STATUS_OK);
    CHECK(weylcov_table_shape(t, &rows, &cols, &partial) == WEYLCOV_STATUS_OK);
    CHECK(rows == 11 && cols == 11 && !partial);
    weylcov_table_free(t);

    double re[4] = {0.7, 0.1, 0.1, 0.1}, im[4] = {0};
    WeylcovMap *m = NULL;
    WeylcovChannelVerdict v;
    CHECK(weylcov_map_new(2, re, im, 4, &m) == WEYLCOV_STATUS_OK);
    CHECK(weylcov_map_is_channel(m, 1e-10, 1e-9, &v) == WEYLCOV_STATUS_OK);
    CHECK(v.cp && v.tp);
    weylcov_map_free(m);

    CHECK(weylcov_map_new(6, re, im, 4, &m) == WEYLCOV_STATUS_SHAPE_MISMATCH);
    char *msg = weylcov_last_error();
    CHECK(msg != NULL);
    weylcov_string_free(msg);

    WeylcovPosMap *p = NULL;
    double min;
    bool violated;
    CHECK(weylcov_posmap_reduction(3, &p) == WEYLCOV_STATUS_OK);
    CHECK(weylcov_posmap_probe(p, 200, 1, 1e-10, 1e-9, &min, &violated) == WEYLCOV_STATUS_OK);
    CHECK(!violated && min > -1e-9);
    weylcov_posmap_free(p);

    printf("ok %s\n", weylcov_version());
    return 0;
}
