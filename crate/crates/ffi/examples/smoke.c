#include <stdio.h>
#include <string.h>
#include "origami_kz.h"

int main(void) {
    const uint32_t h[8] = {2, 3, 4, 1, 6, 7, 8, 5};
    const uint32_t v[8] = {5, 8, 7, 6, 3, 2, 1, 4};
    OkzOrigami *o = NULL;
    if (okz_origami_new(8, h, v, &o) != OKZ_STATUS_OK) {
        fprintf(stderr, "new: %s\n", okz_last_error_message());
        return 1;
    }
    size_t genus = 0, kappa[8], len = 0;
    if (okz_origami_stratum(o, &genus, kappa, 8, &len) != OKZ_STATUS_OK) {
        return 1;
    }
    printf("genus %zu kappa", genus);
    for (size_t i = 0; i < len; i++) {
        printf(" %zu", kappa[i]);
    }
    printf("\n");

    char *report = NULL;
    int code = -1;
    if (okz_check_theorem_json(o, 0, &report, &code) != OKZ_STATUS_OK) {
        fprintf(stderr, "check: %s\n", okz_last_error_message());
        return 1;
    }
    printf("check-theorem exit %d, report %zu bytes\n", code, strlen(report));
    okz_string_free(report);
    okz_origami_free(o);

    const uint32_t bad[2] = {1, 1};
    OkzStatus s = okz_origami_new(2, bad, bad, &o);
    printf("bad permutation: status %d (%s)\n", (int)s, okz_last_error_message());
    return code;
}
