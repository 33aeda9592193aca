#include "simplex_gauge.h"

int probe(void) {
    SgComplex *c = NULL;
    size_t rank = 0, tors = 0;
    if (sg_complex_fixture("hollow_triangle", 0, &c) != SG_STATUS_OK) return 1;
    SgStatus s = sg_homology(c, 1, &rank, &tors);
    sg_complex_free(c);
    return s == SG_STATUS_OK && rank == 1 ? 0 : 1;
}
