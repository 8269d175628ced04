#include <math.h>
#include <stdio.h>
#include <string.h>

#include "polariton.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "check failed at line %d: %s\n", __LINE__, #cond); \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    PolParams params;
    PolSystem *sys = NULL;
    PolEffectiveParams eff;
    PolDoublet d;

    CHECK(pol_preset(POL_PRESET_SET_A, &params) == POL_STATUS_OK);
    CHECK(pol_system_new(&params, &sys) == POL_STATUS_OK);
    CHECK(pol_effective_params(sys, &eff) == POL_STATUS_OK);
    CHECK(fabs(eff.g_eff - 4.99376e-3) < 1e-8);
    CHECK(pol_dark_doublet(sys, 1, &d) == POL_STATUS_OK);
    CHECK(d.splitting > 0.0);

    CHECK(pol_dark_doublet(sys, 7, &d) == POL_STATUS_INVALID_PARAMETER);
    CHECK(pol_last_error_message() != NULL);

    PolScan *scan = NULL;
    CHECK(pol_rabi_run(sys, 0.25, 11, 1e-8, 1e-10, NULL, &scan) == POL_STATUS_OK);
    size_t n = pol_scan_len(scan);
    CHECK(n == 11);
    double pe[11];
    CHECK(pol_scan_column(scan, "Pe", pe, n) == POL_STATUS_OK);
    CHECK(fabs(pe[0] - 1.0) < 1e-12);
    CHECK(strcmp(pol_scan_column_name(scan, 0), "N1") == 0);
    pol_scan_free(scan);
    pol_system_free(sys);

    printf("ok %s\n", pol_version());
    return 0;
}
