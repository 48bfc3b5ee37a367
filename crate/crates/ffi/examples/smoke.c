/* cc -I crates/ffi/include crates/ffi/examples/smoke.c target/release/libxx0_ffi.a -lpthread -ldl -lm */
#include <stdio.h>
#include "xx0.h"

int main(void) {
    Xx0TwEvaluator *ev = NULL;
    if (xx0_tw_evaluator_new(0.0, 0.0, 0.0, &ev) != XX0_STATUS_OK) {
        fprintf(stderr, "%s\n", xx0_last_error());
        return 1;
    }
    double f = 0.0;
    xx0_tw_cdf(ev, -2.0, &f);
    printf("F(-2) = %.15f\n", f);

    Xx0LogDet d;
    xx0_partition_gw_infinite(3, 2.0, &d);
    printf("log D_3(t=2) = %.15f\n", d.log_abs);

    double p = 0.0;
    xx0_width_probability(3, 3.0, 5, &p);
    printf("P(W < 5) = %.12f\n", p);

    if (xx0_partition_gw_infinite(2, -1.0, &d) != XX0_STATUS_OK)
        printf("expected failure: %s\n", xx0_last_error());

    xx0_tw_evaluator_free(ev);
    return 0;
}
